"""``ttg``: spectra, classification and datum checks for finite models.

Exit status: 0 when every check passes, 1 when a mathematical check fails,
2 on input errors (parse errors, unknown labels, size guard).
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from typing import Any

from . import io
from .datum import (
    AdmissibilityViolated,
    LatticeDatum,
    base_point_by_formula,
    check_base_morphism,
    fiber,
    validate_admissible,
)
from .order import (
    MAX_POINTS_ENV,
    DownSetLattice,
    JoinSemilattice,
    OrderError,
    SizeGuardExceeded,
    down_sets,
    format_label,
)
from .report import Report
from .spectrum import (
    AmbiguousChoice,
    VerificationFailed,
    check_support_datum,
    classify,
    spectrum,
    support_data_enumerate,
    universal_map,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
UNIVERSAL_SAMPLE = 8


class CommandError(Exception):
    pass


def _lattice_of(doc: io.ModelDocument) -> JoinSemilattice:
    if doc.kind == "poset":
        return down_sets(io.build_poset(doc))
    if doc.kind == "lattice":
        return io.build_lattice(doc)
    return _datum_of(doc).sub


def _datum_of(doc: io.ModelDocument) -> LatticeDatum:
    from .geometry import coh_datum, coh_sing_spaces, perf_model, sb_datum

    if doc.kind == "datum":
        return io.build_datum(doc)
    if doc.kind == "poset":
        return perf_model(io.build_poset(doc))
    if doc.kind == "sb-model":
        return sb_datum(io.build_sb_model(doc))
    if doc.kind == "koszul-model":
        model, proj = io.build_scheme_model(doc)
        return coh_datum(model, coh_sing_spaces(model, proj))
    raise CommandError(f"a {doc.kind} document does not describe a datum")


def _name(x) -> str:
    return format_label(x)


def _prime_names(L: JoinSemilattice, space) -> list[str]:
    """Prime labels; for down-set lattices the prime ``X - up(x)`` is named ``x``."""
    if isinstance(L, DownSetLattice):
        X = L.space
        point_of = {X.full & ~X.up[x]: x for x in range(len(X))}
        if all(L.carriers[e] in point_of for e in space.primes):
            return [_name(X.labels[point_of[L.carriers[e]]]) for e in space.primes]
    return [_name(x) for x in space.labels]


def _report_json(rep: Report) -> dict[str, Any]:
    return {
        "check": rep.check,
        "ok": rep.ok,
        "failed": rep.failed,
        "witness": [str(w) for w in rep.witness],
        "detail": rep.detail,
        "notes": list(rep.notes),
    }


def _emit(args, text: str, payload: dict | None = None, dot: str | None = None) -> None:
    if args.json and payload is not None:
        sys.stdout.write(io.dump_json(payload))
    elif args.dot and dot is not None:
        sys.stdout.write(dot)
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------


def cmd_spectrum(args) -> int:
    doc = io.load(args.file)
    L = _lattice_of(doc)
    space = spectrum(L)
    P = space.poset
    names = _prime_names(L, space)
    P = P.relabel(names)
    relations = sorted((names[b], names[a]) for a, b in P.cover_pairs())
    if not len(space):
        head = f"{len(L)} elements, empty spectrum"
    else:
        shape = ", discrete" if not relations else ""
        head = f"{len(L)} elements, {len(space)} primes{shape}"
    lines = [head]
    if len(space):
        lines.append("primes:")
        lines += [f"  {n}" for n in sorted(names)]
    if relations:
        lines.append("specialization (generic ~> special):")
        lines += [f"  {b} ~> {a}" for b, a in relations]
    lines.append(f"closed sets: {len(space.closed_sets)}")
    info = {
        "elements": len(L),
        "closed-sets": sorted(sorted(names[i] for i in range(len(space)) if C >> i & 1) for C in space.closed_sets),
        "supports": {_name(L.labels[e]): sorted(names[i] for i in range(len(space)) if space.supports[e] >> i & 1) for e in range(len(L))},
    }
    _emit(args, "\n".join(lines) + "\n", io.poset_document(P, info), io.dot_hasse(P, "spectrum"))
    return EXIT_OK


def cmd_classify(args) -> int:
    doc = io.load(args.file)
    L = _lattice_of(doc)
    space = spectrum(L)
    by_name = {name: i for i, name in enumerate(_prime_names(L, space))}
    wanted = [s.strip() for s in args.subset.split(";")] if args.subset else []
    wanted = [s for s in wanted if s]
    Z = 0
    for w in wanted:
        if w not in by_name:
            raise CommandError(f"unknown prime {w!r}; primes are {sorted(by_name)}")
        Z |= 1 << by_name[w]
    e = classify(L, space, Z)
    realized = space.supports[e] == Z
    text = f"classify: {_name(L.labels[e])}\nrealized: {'yes' if realized else 'no (not realized; supp of the result differs)'}\n"
    payload = {"element": _name(L.labels[e]), "realized": realized, "subset": sorted(wanted)}
    _emit(args, text, payload)
    return EXIT_OK


def _is_identity(dat: LatticeDatum, space, pi) -> bool:
    L = dat.sub
    if not isinstance(L, DownSetLattice) or L.space != dat.base:
        return False
    X = dat.base
    for k, P in enumerate(space.primes):
        if L.carriers[P] != X.full & ~X.up[pi[k]]:
            return False
    return len(space) == len(X)


def cmd_check_datum(args) -> int:
    doc = io.load(args.file)
    dat = _datum_of(doc)
    adm = validate_admissible(dat)
    lines = []
    reports = [adm]
    payload: dict[str, Any] = {"kind": "report", "model": doc.kind}
    if adm.ok:
        lines.append("admissible: yes")
        mor = check_base_morphism(dat)
        reports.append(mor)
        space = spectrum(dat.sub)
        if mor.ok:
            pi = [base_point_by_formula(dat, P, space) for P in space.primes]
            if _is_identity(dat, space, pi):
                lines[-1] += "; π = identity"
            names = _prime_names(dat.sub, space)
            mapping = {names[k]: _name(dat.base.labels[y]) for k, y in enumerate(pi)}
            payload["base-map"] = mapping
            lines.append("base map:")
            lines += [f"  {p} -> {y}" for p, y in sorted(mapping.items())]
        else:
            lines.append(mor.summary())
    else:
        lines.append("admissible: no")
        lines.append(adm.summary())
    for note in adm.notes:
        lines.append(f"note: {note}")
    payload["checks"] = [_report_json(r) for r in reports]
    _emit(args, "\n".join(lines) + "\n", payload)
    return EXIT_OK if all(reports) else EXIT_FAIL


def cmd_fiber(args) -> int:
    doc = io.load(args.file)
    dat = _datum_of(doc)
    adm = validate_admissible(dat)
    if not adm.ok:
        _emit(args, adm.summary() + "\n", {"kind": "report", "checks": [_report_json(adm)]})
        return EXIT_FAIL
    space = spectrum(dat.sub)
    points = range(len(dat.base))
    if args.point:
        try:
            points = [dat.base.index(args.point)]
        except OrderError:
            raise CommandError(f"unknown base point {args.point!r}") from None
    pnames = _prime_names(dat.sub, space)
    lines, rows, ok = [], [], True
    for y in points:
        fb = fiber(dat, y, space)
        members = sorted(pnames[k] for k in range(len(space)) if fb.primes >> k & 1)
        ok &= fb.homeomorphism
        rows.append(
            {
                "point": _name(dat.base.labels[y]),
                "primes": members,
                "interval-primes": len(fb.interval_space),
                "bijective": fb.bijective,
                "continuous": fb.continuous,
                "homeomorphism": fb.homeomorphism,
            }
        )
        lines.append(
            f"fiber over {_name(dat.base.labels[y])}: {len(members)} primes "
            f"[{', '.join(members)}]; local piece: {'homeomorphic' if fb.homeomorphism else 'NOT homeomorphic'}"
        )
    _emit(args, "\n".join(lines) + "\n", {"kind": "report", "fibers": rows})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_universal_map(args) -> int:
    doc = io.load(args.file)
    L = _lattice_of(doc)
    space = spectrum(L)
    given = io.build_support(doc, L) if doc.kind == "lattice" else None
    if given is not None:
        data = [given]
    else:
        data = support_data_enumerate(L)
        if len(data) > UNIVERSAL_SAMPLE:
            rng = random.Random(args.seed)
            data = rng.sample(data, UNIVERSAL_SAMPLE)
    pnames = _prime_names(L, space)
    lines, rows, ok = [], [], True
    for n, Y in enumerate(data):
        rep = check_support_datum(L, Y)
        row: dict[str, Any] = {"datum": n, "points": [_name(x) for x in Y.labels], "valid": rep.ok}
        if not rep.ok:
            ok = False
            row["report"] = _report_json(rep)
            lines.append(f"datum {n}: {rep.summary()}")
            rows.append(row)
            continue
        try:
            f = universal_map(L, Y, space)
        except (AmbiguousChoice, VerificationFailed) as exc:
            ok = False
            row["error"] = str(exc)
            lines.append(f"datum {n}: FAIL {exc}")
            rows.append(row)
            continue
        mapping = {pnames[k]: _name(Y.labels[y]) for k, y in enumerate(f)}
        row["map"] = mapping
        rows.append(row)
        shown = ", ".join(f"{p} -> {y}" for p, y in sorted(mapping.items()))
        extra = sorted(set(row["points"]) - set(mapping.values()))
        lines.append(f"datum {n}: {shown or '(empty spectrum)'}" + (f"; unused points {', '.join(extra)}" if extra else ""))
    _emit(args, "\n".join(lines) + "\n", {"kind": "report", "support-data": rows})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sb_enumerate(args) -> int:
    from .geometry import sb_expected_counts, sb_submodule_lattice

    doc = io.load(args.file)
    if doc.kind != "sb-model":
        raise CommandError("sb-enumerate needs an sb-model document")
    model = io.build_sb_model(doc)
    L = sb_submodule_lattice(model)
    space = spectrum(L)
    lines = [f"{len(L)} submodules, {len(space)} primes"]
    payload: dict[str, Any] = {
        "kind": "report",
        "submodules": sorted(str(x) for x in L.labels),
        "primes": sorted(str(x) for x in space.labels),
        "meet-flags": [list(p) for p in L.flags],
    }
    ok = True
    if len(model.base) == 1:
        exp = sb_expected_counts(doc.body["closed-points"], doc.body["copies"])
        match = (len(L), len(space)) == exp
        ok = match
        payload["expected"] = {"submodules": exp[0], "primes": exp[1], "match": match}
        lines.append(f"expected {exp[0]} submodules, {exp[1]} primes: {'match' if match else 'MISMATCH'}")
    if L.flags:
        lines.append(f"note: {len(L.flags)} pairs whose intersection is not admissible (meet taken inside)")
    lines.append(io.dot_hasse(L.order, "submodules").rstrip("\n"))
    _emit(args, "\n".join(lines) + "\n", payload, io.dot_hasse(L.order, "submodules"))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "spectrum": cmd_spectrum,
    "classify": cmd_classify,
    "check-datum": cmd_check_datum,
    "fiber": cmd_fiber,
    "universal-map": cmd_universal_map,
    "sb-enumerate": cmd_sb_enumerate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="model document (text or JSON)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="machine-readable output")
    fmt.add_argument("--dot", action="store_true", help="Graphviz output where available")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled support data")
    common.add_argument("--max-points", type=int, default=None, help=f"size guard (default ${MAX_POINTS_ENV} or 24)")
    parser = argparse.ArgumentParser(prog="ttg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "classify":
            p.add_argument("--subset", default="", help="prime labels separated by ';'")
        if name == "fiber":
            p.add_argument("--point", default=None, help="base point (default: all)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    saved = os.environ.get(MAX_POINTS_ENV)
    if args.max_points is not None:
        os.environ[MAX_POINTS_ENV] = str(args.max_points)
    try:
        return COMMANDS[args.command](args)
    except (AdmissibilityViolated, VerificationFailed, AmbiguousChoice) as exc:
        print(f"ttg: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (io.InputError, CommandError, SizeGuardExceeded, OrderError, ValueError) as exc:
        print(f"ttg: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if saved is None:
            os.environ.pop(MAX_POINTS_ENV, None)
        else:
            os.environ[MAX_POINTS_ENV] = saved


if __name__ == "__main__":
    sys.exit(main())
