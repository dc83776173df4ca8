"""Model documents: a line-oriented text format, its JSON twin, and DOT/JSON emitters.

Text format
-----------
Sections start at column 1 with ``name:``; the rest of that line and any
following indented lines form the section body.  ``#`` starts a comment.

    kind: datum
    elements: 0 a b c 1
    order:
      0 < a < 1
      0 < b < 1
      0 < c < 1
    base-points: z w
    action:
      {} -> 0
      {z} -> a
      {w} -> b
      {z,w} -> 1

Kinds and their sections:

* ``poset``: ``points``, ``order``.
* ``lattice``: ``elements``, ``order``, optional ``joins`` (``a v b = c``) and
  ``meets`` (``a ^ b = c``), optional support datum ``support-points``,
  ``support-order``, ``support`` (``a -> {p,q}``).
* ``datum``: a lattice plus ``base-points``, ``base-order``, ``action``.
* ``sb-model``: ``closed-points``, ``copies``, optional ``base-points`` and
  ``base-order``.
* ``koszul-model``: ``points``, ``order``, ``attrs`` (``s ecodim=2 ci=true extra=1``).

``order`` lines are chains ``a < b < c`` meaning a <= b <= c, where the smaller
point is the specialization.  A document whose first non-blank character is
``{`` is read as JSON with the same keys (``order`` as a list of pairs,
``action`` as a list of ``[[points...], element]``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable

from .order import FinitePoset, JoinSemilattice, OrderError, SubmoduleLattice, format_label

KINDS = ("poset", "lattice", "datum", "sb-model", "koszul-model")

_SECTIONS = {
    "poset": {"points", "order"},
    "lattice": {"elements", "order", "joins", "meets", "support-points", "support-order", "support"},
    "datum": {"elements", "order", "joins", "meets", "base-points", "base-order", "action"},
    "sb-model": {"closed-points", "copies", "base-points", "base-order"},
    "koszul-model": {"points", "order", "attrs"},
}
_REQUIRED = {
    "poset": {"points"},
    "lattice": {"elements"},
    "datum": {"elements", "base-points", "action"},
    "sb-model": {"closed-points", "copies"},
    "koszul-model": {"points", "attrs"},
}

_TOKEN = re.compile(r"[^\s<>{},=^#]+")
_SECTION = re.compile(r"([a-z][a-z-]*):")


class InputError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class ModelDocument:
    """Parsed document in canonical (JSON-shaped) form."""

    kind: str
    body: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.body}


@dataclass
class _Line:
    text: str
    line: int
    col: int  # column of text[0]


def _tokens(seg: _Line) -> list[tuple[str, int]]:
    out = []
    for m in re.finditer(r"\S+", seg.text):
        tok = m.group()
        if not _TOKEN.fullmatch(tok):
            raise InputError(f"bad label {tok!r}", seg.line, seg.col + m.start())
        out.append((tok, seg.col + m.start()))
    return out


def _split_sections(text: str) -> dict[str, tuple[int, list[_Line]]]:
    sections: dict[str, tuple[int, list[_Line]]] = {}
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        if body[0].isspace():
            if current is None:
                raise InputError("indented line before any section", n, len(body) - len(body.lstrip()) + 1)
            stripped = body.lstrip()
            sections[current][1].append(_Line(stripped, n, len(body) - len(stripped) + 1))
            continue
        m = _SECTION.match(body)
        if not m:
            raise InputError("expected 'section:'", n, 1)
        current = m.group(1)
        if current in sections:
            raise InputError(f"duplicate section {current!r}", n, 1)
        rest = body[m.end():]
        lines = []
        if rest.strip():
            lead = len(rest) - len(rest.lstrip())
            lines.append(_Line(rest.strip(), n, m.end() + lead + 1))
        sections[current] = (n, lines)
    return sections


def _labels(lines: list[_Line]) -> list[str]:
    return [tok for seg in lines for tok, _ in _tokens(seg)]


def _chains(lines: list[_Line]) -> list[list[str]]:
    pairs = []
    for seg in lines:
        parts = seg.text.split("<")
        col = seg.col
        names = []
        for part in parts:
            toks = _tokens(_Line(part, seg.line, col + len(part) - len(part.lstrip())))
            if len(toks) != 1:
                raise InputError("order lines look like 'a < b < c'", seg.line, col)
            names.append(toks[0][0])
            col += len(part) + 1
        if len(names) < 2:
            raise InputError("order line needs at least one '<'", seg.line, seg.col)
        pairs += [[a, b] for a, b in zip(names, names[1:])]
    return pairs


_SET = re.compile(r"\{([^{}]*)\}")


def _point_set(text: str, seg: _Line, offset: int) -> list[str]:
    m = _SET.fullmatch(text.strip())
    if not m:
        raise InputError("expected a set like {a,b}", seg.line, seg.col + offset)
    inner = [t.strip() for t in m.group(1).split(",")] if m.group(1).strip() else []
    for t in inner:
        if not _TOKEN.fullmatch(t):
            raise InputError(f"bad label {t!r}", seg.line, seg.col + offset)
    return inner


def _arrows(lines: list[_Line], set_on_left: bool) -> list[list]:
    out = []
    for seg in lines:
        if "->" not in seg.text:
            raise InputError("expected 'lhs -> rhs'", seg.line, seg.col)
        lhs, rhs = seg.text.split("->", 1)
        rcol = len(lhs) + 2
        if set_on_left:
            toks = _tokens(_Line(rhs.strip(), seg.line, seg.col + rcol))
            if len(toks) != 1:
                raise InputError("right side must be one element", seg.line, seg.col + rcol)
            out.append([_point_set(lhs, seg, 0), toks[0][0]])
        else:
            toks = _tokens(_Line(lhs.strip(), seg.line, seg.col))
            if len(toks) != 1:
                raise InputError("left side must be one element", seg.line, seg.col)
            out.append([toks[0][0], _point_set(rhs, seg, rcol)])
    return out


def _binops(lines: list[_Line], op: str) -> list[list[str]]:
    out = []
    pat = re.compile(r"(\S+)\s*" + re.escape(op) + r"\s*(\S+)\s*=\s*(\S+)")
    for seg in lines:
        m = pat.fullmatch(seg.text)
        if not m:
            raise InputError(f"expected 'a {op} b = c'", seg.line, seg.col)
        out.append(list(m.groups()))
    return out


def _attrs(lines: list[_Line]) -> dict[str, dict[str, Any]]:
    out: dict[str, dict[str, Any]] = {}
    for seg in lines:
        words = seg.text.split()
        if not words:
            continue
        name, rec = words[0], {}
        for w in words[1:]:
            col = seg.col + seg.text.index(w)
            if "=" not in w:
                raise InputError("attributes look like key=value", seg.line, col)
            k, v = w.split("=", 1)
            if k in ("ecodim", "extra"):
                if not v.isdigit():
                    raise InputError(f"{k} must be a nonnegative integer", seg.line, col)
                rec[k] = int(v)
            elif k in ("ci", "regular"):
                if v not in ("true", "false"):
                    raise InputError(f"{k} must be true or false", seg.line, col)
                rec[k] = v == "true"
            else:
                raise InputError(f"unknown attribute {k!r}", seg.line, col)
        out[name] = rec
    return out


def _int(lines: list[_Line], name: str) -> int:
    toks = _labels(lines)
    if len(toks) != 1 or not toks[0].isdigit():
        line = lines[0].line if lines else None
        raise InputError(f"{name} must be a nonnegative integer", line, lines[0].col if lines else None)
    return int(toks[0])


def parse_text(text: str) -> ModelDocument:
    sections = _split_sections(text)
    if "kind" not in sections:
        raise InputError("missing 'kind:' section", 1, 1)
    kline, klines = sections.pop("kind")
    for seg in klines:
        if seg.line != kline:
            raise InputError("kind takes a single value on its own line", seg.line, seg.col)
    kinds = _labels(klines)
    if len(kinds) != 1 or kinds[0] not in KINDS:
        raise InputError(f"kind must be one of {', '.join(KINDS)}", kline, 1)
    kind = kinds[0]
    for name, (n, _) in sections.items():
        if name not in _SECTIONS[kind]:
            raise InputError(f"section {name!r} not allowed for kind {kind}", n, 1)
    for name in sorted(_REQUIRED[kind] - set(sections)):
        raise InputError(f"missing section {name!r}", kline, 1)
    body: dict[str, Any] = {}
    for name, (n, lines) in sections.items():
        if name in ("points", "elements", "base-points", "support-points"):
            body[name] = _labels(lines)
        elif name in ("order", "base-order", "support-order"):
            body[name] = _chains(lines)
        elif name == "joins":
            body[name] = _binops(lines, "v")
        elif name == "meets":
            body[name] = _binops(lines, "^")
        elif name == "action":
            body[name] = _arrows(lines, set_on_left=True)
        elif name == "support":
            body[name] = _arrows(lines, set_on_left=False)
        elif name == "attrs":
            body[name] = _attrs(lines)
        elif name in ("closed-points", "copies"):
            body[name] = _int(lines, name) if lines else _int([_Line("", n, 1)], name)
    doc = ModelDocument(kind, body)
    validate(doc, {name: n for name, (n, _) in sections.items()})
    return doc


def parse_json(text: str) -> ModelDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise InputError("top level must be an object", 1, 1)
    kind = data.get("kind")
    if kind not in KINDS:
        raise InputError(f"kind must be one of {', '.join(KINDS)}")
    body = {k: v for k, v in data.items() if k not in ("kind", "info")}
    for k in body:
        if k not in _SECTIONS[kind]:
            raise InputError(f"key {k!r} not allowed for kind {kind}")
    for k in sorted(_REQUIRED[kind] - set(body)):
        raise InputError(f"missing key {k!r}")
    doc = ModelDocument(kind, body)
    validate(doc, {})
    return doc


def parse(text: str) -> ModelDocument:
    return parse_json(text) if text.lstrip().startswith("{") else parse_text(text)


def load(path: str) -> ModelDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


# -- semantic validation and builders ---------------------------------------


def _require_list(doc: ModelDocument, key: str, where: dict[str, int]) -> list:
    v = doc.body.get(key, [])
    if not isinstance(v, list):
        raise InputError(f"{key} must be a list", where.get(key))
    return v


def _poset(labels, pairs, key: str, where: dict[str, int]) -> FinitePoset:
    if not all(isinstance(x, str) for x in labels):
        raise InputError("labels must be strings", where.get(key))
    try:
        return FinitePoset.from_relations(labels, [tuple(p) for p in pairs])
    except (OrderError, TypeError, ValueError) as exc:
        raise InputError(str(exc), where.get(key)) from None


def validate(doc: ModelDocument, where: dict[str, int]) -> None:
    builders = {
        "poset": build_poset,
        "lattice": build_lattice,
        "datum": build_datum,
        "sb-model": build_sb_model,
        "koszul-model": build_scheme_model,
    }
    builders[doc.kind](doc, where)


def build_poset(doc: ModelDocument, where: dict[str, int] | None = None) -> FinitePoset:
    where = where or {}
    pts = _require_list(doc, "points", where)
    return _poset(pts, _require_list(doc, "order", where), "order", where)


def build_lattice(doc: ModelDocument, where: dict[str, int] | None = None) -> JoinSemilattice:
    where = where or {}
    P = _poset(_require_list(doc, "elements", where), _require_list(doc, "order", where), "order", where)
    try:
        L: JoinSemilattice = JoinSemilattice(P.labels, P.down)
        if L.has_meets:
            L = SubmoduleLattice(P.labels, P.down)
    except OrderError as exc:
        raise InputError(str(exc), where.get("order")) from None
    for key, op in (("joins", L.join), ("meets", L.meet_or_none)):
        for triple in _require_list(doc, key, where):
            try:
                a, b, c = (L.index(x) for x in triple)
            except (KeyError, ValueError, TypeError, OrderError):
                raise InputError(f"{key}: unknown element in {triple}", where.get(key)) from None
            if op(a, b) != c:
                raise InputError(f"{key}: {triple[0]}, {triple[1]} -> {triple[2]} disagrees with the order", where.get(key))
    return L


def build_support(doc: ModelDocument, L: JoinSemilattice, where: dict[str, int] | None = None):
    """Optional support datum attached to a lattice document, or None."""
    from .spectrum import SupportDatum

    where = where or {}
    if "support-points" not in doc.body:
        return None
    Y = _poset(_require_list(doc, "support-points", where), _require_list(doc, "support-order", where), "support-order", where)
    supp = [0] * len(L)
    seen = set()
    for elem, pts in _require_list(doc, "support", where):
        try:
            e = L.index(elem)
            supp[e] = Y.mask(pts)
        except (KeyError, OrderError, ValueError):
            raise InputError(f"support: unknown label in {elem} -> {pts}", where.get("support")) from None
        seen.add(e)
    if len(seen) != len(L):
        raise InputError("support must list every element", where.get("support"))
    return SupportDatum.from_poset(Y, supp)


def build_datum(doc: ModelDocument, where: dict[str, int] | None = None):
    from .datum import LatticeDatum

    where = where or {}
    L = build_lattice(doc, where)
    if not isinstance(L, SubmoduleLattice):
        raise InputError("a datum needs a lattice with meets", where.get("order"))
    base = _poset(_require_list(doc, "base-points", where), _require_list(doc, "base-order", where), "base-order", where)
    action = {}
    for pts, elem in _require_list(doc, "action", where):
        try:
            Z = base.mask(pts)
            action[Z] = L.index(elem)
        except (KeyError, OrderError, ValueError, TypeError):
            raise InputError(f"action: unknown label in {pts} -> {elem}", where.get("action")) from None
    try:
        return LatticeDatum(L, base, action, "datum")
    except OrderError as exc:
        raise InputError(str(exc), where.get("action")) from None


def build_sb_model(doc: ModelDocument, where: dict[str, int] | None = None):
    from .geometry import SBModel, p1_model

    where = where or {}
    n, k = doc.body.get("closed-points"), doc.body.get("copies")
    if not isinstance(n, int) or n < 1:
        raise InputError("closed-points must be a positive integer", where.get("closed-points"))
    if not isinstance(k, int) or k < 0:
        raise InputError("copies must be a nonnegative integer", where.get("copies"))
    if "base-points" in doc.body:
        base = _poset(_require_list(doc, "base-points", where), _require_list(doc, "base-order", where), "base-order", where)
    else:
        base = FinitePoset.from_relations(["x"])
    return SBModel(base, tuple(p1_model(n) for _ in base.labels), tuple(range(k)))


def build_scheme_model(doc: ModelDocument, where: dict[str, int] | None = None):
    """SchemeModel plus per-point projective models (from ``extra``)."""
    from .geometry import PointAttrs, SchemeModel, default_proj_model, projective_model

    where = where or {}
    X = _poset(_require_list(doc, "points", where), _require_list(doc, "order", where), "order", where)
    table = doc.body.get("attrs", {})
    if not isinstance(table, dict):
        raise InputError("attrs must map points to records", where.get("attrs"))
    attrs, proj = [], {}
    for i, lab in enumerate(X.labels):
        rec = table.get(lab)
        if rec is None:
            raise InputError(f"attrs missing for point {lab!r}", where.get("attrs"))
        unknown = set(rec) - {"ecodim", "ci", "regular", "extra"}
        if unknown:
            raise InputError(f"unknown attributes {sorted(unknown)}", where.get("attrs"))
        e = rec.get("ecodim", 0)
        ci = rec.get("ci", e <= 1)
        reg = rec.get("regular", e == 0)
        try:
            attrs.append(PointAttrs(reg, ci, e))
            if "extra" in rec:
                proj[i] = projective_model(e - 1, rec["extra"])
            else:
                proj[i] = default_proj_model(e, ci)
        except (ValueError, TypeError) as exc:
            raise InputError(f"{lab}: {exc}", where.get("attrs")) from None
    extra = set(table) - set(X.labels)
    if extra:
        raise InputError(f"attrs for unknown points {sorted(extra)}", where.get("attrs"))
    try:
        return SchemeModel(X, tuple(attrs)), proj
    except ValueError as exc:
        raise InputError(str(exc), where.get("attrs")) from None


# -- emitters ---------------------------------------------------------------


def poset_document(P: FinitePoset, info: dict | None = None) -> dict[str, Any]:
    """JSON poset document; labels are rendered as strings."""
    names = [format_label(x) for x in P.labels]
    doc: dict[str, Any] = {
        "kind": "poset",
        "points": sorted(names),
        "order": sorted([names[a], names[b]] for a, b in P.cover_pairs()),
    }
    if info is not None:
        doc["info"] = info
    return doc


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot_hasse(P: FinitePoset, name: str = "hasse") -> str:
    """Hasse diagram, edges from lower to upper, nodes and edges sorted."""
    names = [format_label(x) for x in P.labels]
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    lines += [f"  {_quote(n)};" for n in sorted(names)]
    lines += [f"  {_quote(a)} -> {_quote(b)};" for a, b in sorted((names[a], names[b]) for a, b in P.cover_pairs())]
    lines.append("}")
    return "\n".join(lines) + "\n"


def document_text(doc: ModelDocument) -> str:
    """Render a document in the text format (inverse of :func:`parse_text` up to layout)."""
    b = doc.body
    out = [f"kind: {doc.kind}"]

    def chains(key):
        if b.get(key):
            out.append(f"{key}:")
            out.extend(f"  {x} < {y}" for x, y in b[key])

    for key in ("points", "elements"):
        if key in b:
            out.append(f"{key}: {' '.join(b[key])}")
            chains("order")
    for key, op in (("joins", "v"), ("meets", "^")):
        if b.get(key):
            out.append(f"{key}:")
            out.extend(f"  {x} {op} {y} = {z}" for x, y, z in b[key])
    if "base-points" in b:
        out.append(f"base-points: {' '.join(b['base-points'])}")
        chains("base-order")
    if "action" in b:
        out.append("action:")
        out.extend(f"  {{{','.join(pts)}}} -> {e}" for pts, e in b["action"])
    if "support-points" in b:
        out.append(f"support-points: {' '.join(b['support-points'])}")
        chains("support-order")
        out.append("support:")
        out.extend(f"  {e} -> {{{','.join(pts)}}}" for e, pts in b["support"])
    for key in ("closed-points", "copies"):
        if key in b:
            out.append(f"{key}: {b[key]}")
    if "attrs" in b:
        out.append("attrs:")
        for name, rec in b["attrs"].items():
            kv = " ".join(f"{k}={str(v).lower()}" for k, v in sorted(rec.items()))
            out.append(f"  {name} {kv}")
    return "\n".join(out) + "\n"


def relabel_strings(labels: Iterable[Hashable]) -> list[str]:
    return [format_label(x) for x in labels]
