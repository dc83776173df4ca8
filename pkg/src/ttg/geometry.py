"""Finite models of the worked geometric examples.

Perfect complexes over a finite spectral space, Severi-Brauer schemes of
relative dimension one, and the Koszul fibers of the coherent and singularity
spectra.  Everything is a finite poset; projective spaces are replaced by
finite posets of the right Krull dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Hashable, Iterable, Mapping, Sequence

from .datum import LatticeDatum, identity_datum, pullback_datum
from .order import (
    FinitePoset,
    OrderError,
    SubmoduleLattice,
    _enumerate_down_sets,
    bits,
    down_sets,
    find_isomorphism,
    format_label,
    is_local,
    krull_dimension,
    mask_of,
    popcount,
    resolve_max_points,
)
from .report import Report
from .spectrum import spectrum

# -- perfect complexes ------------------------------------------------------


def perf_model(X: FinitePoset, name: str = "") -> LatticeDatum:
    """Thick tensor ideals of Perf(X) acted on by Perf(X): down-sets of X, identity action."""
    return identity_datum(X, name or "perf")


def classified_by_subset(space: FinitePoset, name: str = "") -> LatticeDatum:
    """Generic datum whose submodules are the specialization-closed subsets of ``space``."""
    return identity_datum(space, name or "subsets")


def roundtrip_check(X: FinitePoset, *, max_points: int | None = None) -> Report:
    """The spectrum of down_sets(X) is X again, via ``x -> X - up(x)``."""
    rep = Report("round trip")
    L = down_sets(X, max_points=max_points)
    space = spectrum(L)
    if len(space) != len(X):
        return rep.fail("point count", (len(space), len(X)))
    witness = []
    for x in range(len(X)):
        e = L.element_of(X.full & ~X.up[x])
        if e not in space.primes:
            return rep.fail("P_x prime", (format_label(X.labels[x]),))
        witness.append(space.position(e))
    for x in range(len(X)):
        for y in range(len(X)):
            if X.leq(x, y) != space.poset.leq(witness[x], witness[y]):
                return rep.fail("order preserved", (format_label(X.labels[x]), format_label(X.labels[y])))
    image = {mask_of(witness[x] for x in bits(Z)) for Z in X.closed_sets()}
    if image != set(space.closed_sets):
        return rep.fail("homeomorphism", detail="closed sets differ")
    if find_isomorphism(X, space.poset) is None:
        return rep.fail("order isomorphism")
    return rep


# -- Severi-Brauer, relative dimension one ------------------------------------


@dataclass(frozen=True)
class FiberDescriptor:
    """Shape of a submodule's trace over one base point.

    ``A``: empty.  ``B``: the down-set ``W`` of the fiber plus every copy.
    ``C``: the whole fiber plus every copy except ``n``.
    """

    kind: str
    W: frozenset = frozenset()
    n: Hashable = None

    def __str__(self) -> str:
        if self.kind == "A":
            return "A"
        if self.kind == "B":
            return "B" + format_label(self.W)
        return f"C{self.n}"


A = FiberDescriptor("A")


def B(W: Iterable[Hashable]) -> FiberDescriptor:
    return FiberDescriptor("B", frozenset(W))


def C(n: Hashable) -> FiberDescriptor:
    return FiberDescriptor("C", n=n)


def projective_model(m: int, extra_closed: int = 0) -> FinitePoset:
    """Finite stand-in for P^m: a chain of m+1 layers, with extra closed points under layer 1.

    ``m = -1`` is the empty space.  Extra closed points need a layer above them.
    """
    if m < -1:
        raise ValueError("dimension must be at least -1")
    if extra_closed and m < 1:
        raise ValueError("extra closed points need m >= 1")
    labels = [f"l{i}" for i in range(m + 1)] + [f"e{j}" for j in range(extra_closed)]
    pairs = [(f"l{i}", f"l{i + 1}") for i in range(m)] + [(f"e{j}", "l1") for j in range(extra_closed)]
    return FinitePoset.from_relations(labels, pairs)


def p1_model(closed_points: int) -> FinitePoset:
    """A generic point over ``closed_points`` closed points."""
    if closed_points < 1:
        raise ValueError("need at least one closed point")
    return projective_model(1, closed_points - 1)


@dataclass(frozen=True, eq=False)
class SBModel:
    """Base X, a fiber poset per base point, copy indices K, optional cross relations.

    The total space is the Y-part (fibers) and one copy of X per index in K.
    Points are labelled ``("Y", x, p)`` and ``("X", k, x)``.  The order is
    componentwise unless ``cross`` adds pairs ``(a, b)`` meaning ``a <= b``.
    """

    base: FinitePoset
    fibers: tuple[FinitePoset, ...]
    copies: tuple[Hashable, ...]
    cross: tuple[tuple[tuple, tuple], ...] = ()
    total: FinitePoset = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.fibers) != len(self.base):
            raise ValueError("need one fiber per base point")
        if len(set(self.copies)) != len(self.copies):
            raise ValueError("duplicate copy index")
        labels = []
        pairs = []
        for x, F in enumerate(self.fibers):
            xl = self.base.labels[x]
            labels += [("Y", xl, p) for p in F.labels]
            pairs += [(("Y", xl, F.labels[a]), ("Y", xl, F.labels[b])) for a, b in F.relation_pairs()]
        for k in self.copies:
            labels += [("X", k, xl) for xl in self.base.labels]
            pairs += [(("X", k, self.base.labels[a]), ("X", k, self.base.labels[b])) for a, b in self.base.relation_pairs()]
        object.__setattr__(self, "total", FinitePoset.from_relations(labels, list(pairs) + list(self.cross)))

    @classmethod
    def over_point(cls, closed_points: int, copies: int) -> "SBModel":
        return cls(FinitePoset.from_relations(["x"]), (p1_model(closed_points),), tuple(range(copies)))

    def fiber_mask(self, x: int) -> int:
        xl = self.base.labels[x]
        return self.total.mask(("Y", xl, p) for p in self.fibers[x].labels)

    def copy_mask(self, x: int, k: Hashable) -> int:
        return 1 << self.total.index(("X", k, self.base.labels[x]))


Assignment = Mapping[int, FiberDescriptor]


def _check_descriptor(model: SBModel, x: int, d: FiberDescriptor) -> None:
    F = model.fibers[x]
    if d.kind == "A":
        return
    if d.kind == "B":
        if not d.W:
            raise ValueError("kind B needs a nonempty W")
        unknown = set(d.W) - set(F.labels)
        if unknown:
            raise ValueError(f"W mentions points outside the fiber: {sorted(map(str, unknown))}")
        return
    if d.kind == "C":
        if d.n not in model.copies:
            raise ValueError(f"copy index {d.n!r} not in K")
        return
    raise ValueError(f"unknown descriptor kind {d.kind!r}")


def sb_realize(model: SBModel, Z: Assignment) -> int:
    """Subset of the total space described by ``Z`` (missing base points are kind A)."""
    out = 0
    for x in range(len(model.base)):
        d = Z.get(x, A)
        _check_descriptor(model, x, d)
        if d.kind == "A":
            continue
        copies = [k for k in model.copies if d.kind == "B" or k != d.n]
        for k in copies:
            out |= model.copy_mask(x, k)
        if d.kind == "B":
            xl = model.base.labels[x]
            out |= model.total.mask(("Y", xl, p) for p in d.W)
        else:
            out |= model.fiber_mask(x)
    return out


def sb_is_admissible(model: SBModel, Z: Assignment) -> bool:
    """Fiber shapes are of kind A/B/C with B's W a down-set, and the realized set is specialization-closed."""
    for x in range(len(model.base)):
        d = Z.get(x, A)
        _check_descriptor(model, x, d)
        if d.kind == "B" and not model.fibers[x].is_down_set(model.fibers[x].mask(d.W)):
            return False
    return model.total.is_down_set(sb_realize(model, Z))


def fiber_descriptors(model: SBModel, x: int) -> list[FiberDescriptor]:
    F = model.fibers[x]
    out = [A]
    for W in sorted(_enumerate_down_sets(F, resolve_max_points()), key=lambda m: (popcount(m), m)):
        if W:
            out.append(B(F.names(W)))
    out += [C(k) for k in model.copies]
    return out


def sb_enumerate(model: SBModel, *, max_points: int | None = None) -> list[dict[int, FiberDescriptor]]:
    """All admissible assignments, one descriptor per base point."""
    if len(model.total) > resolve_max_points(max_points):
        from .order import SizeGuardExceeded

        raise SizeGuardExceeded(f"total space has {len(model.total)} points")
    choices = [fiber_descriptors(model, x) for x in range(len(model.base))]
    out = []
    for combo in cartesian(*choices):
        Z = dict(enumerate(combo))
        if sb_is_admissible(model, Z):
            out.append(Z)
    return out


def assignment_label(model: SBModel, Z: Assignment) -> str:
    if len(model.base) == 1:
        return str(Z.get(0, A))
    return ",".join(f"{format_label(model.base.labels[x])}={Z.get(x, A)}" for x in range(len(model.base)))


class SBLattice(SubmoduleLattice):
    """Admissible subsets ordered by inclusion.

    Joins must be unions.  Meets are the largest admissible subset inside the
    intersection; ``flags`` lists the pairs whose intersection is not itself
    admissible.
    """

    def __init__(self, model: SBModel, assignments: Sequence[dict[int, FiberDescriptor]]):
        self.model = model
        self.assignments = list(assignments)
        masks = [sb_realize(model, Z) for Z in self.assignments]
        order = sorted(range(len(masks)), key=lambda i: (popcount(masks[i]), masks[i]))
        self.assignments = [self.assignments[i] for i in order]
        self.carriers = tuple(masks[i] for i in order)
        self.carrier_index = {m: i for i, m in enumerate(self.carriers)}
        down = [mask_of(j for j, t in enumerate(self.carriers) if t & ~s == 0) for s in self.carriers]
        labels = [assignment_label(model, Z) for Z in self.assignments]
        super().__init__(labels, down)
        self.flags: list[tuple[str, str]] = []
        for a in range(len(self)):
            for b in range(a + 1, len(self)):
                u = self.carriers[a] | self.carriers[b]
                if self.carriers[self.join(a, b)] != u:
                    raise OrderError(f"union of {labels[a]} and {labels[b]} is not admissible")
                if self.carriers[a] & self.carriers[b] not in self.carrier_index:
                    self.flags.append(tuple(sorted((labels[a], labels[b]))))
        self.flags.sort()


def sb_submodule_lattice(model: SBModel, *, max_points: int | None = None) -> SBLattice:
    return SBLattice(model, sb_enumerate(model, max_points=max_points))


def sb_datum(model: SBModel, lattice: SBLattice | None = None) -> LatticeDatum:
    """Action of Perf(X): a closed Z of the base gives everything lying over Z."""
    L = sb_submodule_lattice(model) if lattice is None else lattice
    action = {}
    whole = {x: B(model.fibers[x].labels) for x in range(len(model.base))}
    for Z in _enumerate_down_sets(model.base, resolve_max_points()):
        carrier = sb_realize(model, {x: whole[x] for x in bits(Z)})
        action[Z] = L.carrier_index[carrier]
    return LatticeDatum(L, model.base, action, "severi-brauer")


def sb_expected_counts(closed_points: int, copies: int) -> tuple[int, int]:
    """Submodule and prime counts for a point base: ``1 + 2^n + |K|`` and ``(n + 1) + |K|``."""
    return 1 + 2**closed_points + copies, closed_points + 1 + copies


# -- Koszul fibers, coherent and singularity spectra ------------------------


@dataclass(frozen=True)
class PointAttrs:
    regular: bool
    complete_intersection: bool
    ecodim: int


@dataclass(frozen=True, eq=False)
class SchemeModel:
    space: FinitePoset
    attrs: tuple[PointAttrs, ...]

    def __post_init__(self):
        if len(self.attrs) != len(self.space):
            raise ValueError("need attributes for every point")
        for lab, a in zip(self.space.labels, self.attrs):
            if a.ecodim < 0:
                raise ValueError(f"{lab}: negative ecodim")
            if a.regular != (a.ecodim == 0):
                raise ValueError(f"{lab}: regular points are exactly those with ecodim 0")
            if a.ecodim <= 1 and not a.complete_intersection:
                raise ValueError(f"{lab}: ecodim <= 1 is a hypersurface, hence a complete intersection")

    def singular_locus(self) -> int:
        return mask_of(i for i, a in enumerate(self.attrs) if not a.regular)

    def is_hypersurface(self) -> bool:
        return all(a.ecodim <= 1 for a in self.attrs)


def default_proj_model(c: int, complete_intersection: bool = True) -> FinitePoset:
    """Chain model of P^{c-1}; non-CI points get an extra closed point so the fiber is not local."""
    if c >= 2 and not complete_intersection:
        return projective_model(c - 1, 1)
    return projective_model(c - 1)


def koszul_fiber(c: int, proj_model: FinitePoset, complete_intersection: bool = True) -> tuple[FinitePoset, FinitePoset]:
    """Coherent and singularity fibers over a point with Koszul invariant ``c``.

    The singularity fiber is ``proj_model``.  The coherent fiber adds the
    point ``x`` itself: at complete intersections it is the cone point, the
    unique closed point below all of ``proj_model`` (the homogeneous spectrum
    of a polynomial ring); otherwise it is isolated.
    """
    if krull_dimension(proj_model) != c - 1:
        raise ValueError(f"proj_model has Krull dimension {krull_dimension(proj_model)}, expected {c - 1}")
    if "x" in proj_model.labels:
        raise ValueError("proj_model may not use the label 'x'")
    labels = ["x"] + list(proj_model.labels)
    pairs = [(proj_model.labels[a], proj_model.labels[b]) for a, b in proj_model.relation_pairs()]
    if complete_intersection:
        pairs += [("x", p) for p in proj_model.labels]
    return FinitePoset.from_relations(labels, pairs), proj_model


@dataclass(frozen=True, eq=False)
class CohSing:
    coh: FinitePoset
    sing: FinitePoset
    proj: tuple[int, ...]
    embedding: tuple[int, ...]
    fibers: tuple[tuple[FinitePoset, FinitePoset], ...]


def coh_sing_spaces(
    model: SchemeModel,
    proj_models: Mapping[int, FinitePoset] | None = None,
    relations: Iterable[tuple[Hashable, Hashable]] = (),
) -> CohSing:
    """Assemble X^coh and X^sing from the Koszul fibers.

    Points of X^coh are ``("x", x)`` (the closed copy of X, keeping its order)
    and ``("p", x, q)`` for ``q`` in the fiber model.  Between fibers,
    ``("p", x, q) <= ("p", y, r)`` is added when ``x <= y`` and both fibers are
    single points; further pairs can be passed in ``relations``.
    """
    proj_models = dict(proj_models or {})
    X = model.space
    fibers = []
    for i, a in enumerate(model.attrs):
        pm = proj_models.get(i, default_proj_model(a.ecodim, a.complete_intersection))
        fibers.append(koszul_fiber(a.ecodim, pm, a.complete_intersection))
    labels: list = [("x", xl) for xl in X.labels]
    pairs: list = [(("x", X.labels[a]), ("x", X.labels[b])) for a, b in X.relation_pairs()]
    proj = list(range(len(X)))
    for i, (coh, sing) in enumerate(fibers):
        xl = X.labels[i]
        labels += [("p", xl, q) for q in sing.labels]
        proj += [i] * len(sing)
        for a, b in coh.relation_pairs():
            la = ("x", xl) if coh.labels[a] == "x" else ("p", xl, coh.labels[a])
            lb = ("x", xl) if coh.labels[b] == "x" else ("p", xl, coh.labels[b])
            pairs.append((la, lb))
    for a, b in X.relation_pairs():
        Fa, Fb = fibers[a][1], fibers[b][1]
        if len(Fa) == 1 and len(Fb) == 1:
            pairs.append((("p", X.labels[a], Fa.labels[0]), ("p", X.labels[b], Fb.labels[0])))
    pairs += list(relations)
    coh = FinitePoset.from_relations(labels, pairs)
    for i, j in coh.relation_pairs():
        if not X.leq(proj[i], proj[j]):
            raise OrderError(f"relation {format_label(coh.labels[i])} <= {format_label(coh.labels[j])} does not lie over X")
    sing_mask = mask_of(range(len(X), len(coh)))
    sing = coh.subposet(sing_mask).relabel([lab[1:] for lab in coh.names(sing_mask)])
    return CohSing(coh, sing, tuple(proj), tuple(range(len(X))), tuple(fibers))


def coh_datum(model: SchemeModel, spaces: CohSing | None = None) -> LatticeDatum:
    """Submodules of the coherent category under the action of Perf(X)."""
    spaces = coh_sing_spaces(model) if spaces is None else spaces
    return pullback_datum(spaces.coh, model.space, spaces.proj, "coherent")


def sing_datum(model: SchemeModel, spaces: CohSing | None = None) -> LatticeDatum:
    spaces = coh_sing_spaces(model) if spaces is None else spaces
    X = model.space
    proj = spaces.proj[len(X):]
    return pullback_datum(spaces.sing, X, proj, "singularity")


def fiber_report(model: SchemeModel, spaces: CohSing | None = None) -> list[dict]:
    """Per-point dimensions and locality of both fibers."""
    spaces = coh_sing_spaces(model) if spaces is None else spaces
    rows = []
    for i, (coh, sing) in enumerate(spaces.fibers):
        a = model.attrs[i]
        rows.append(
            {
                "point": format_label(model.space.labels[i]),
                "ecodim": a.ecodim,
                "ci": a.complete_intersection,
                "coh_points": len(coh),
                "sing_points": len(sing),
                "coh_dim": krull_dimension(coh),
                "sing_dim": krull_dimension(sing),
                "coh_local": is_local(coh),
                "proj_local": is_local(sing),
            }
        )
    return rows


def random_scheme_model(rng, max_points: int = 5, max_ecodim: int = 3, hypersurface: bool = False) -> SchemeModel:
    from .catalog import random_poset

    X = random_poset(rng, rng.randint(1, max_points))
    attrs = []
    for _ in X.labels:
        e = rng.randint(0, 1 if hypersurface else max_ecodim)
        ci = True if e <= 1 else rng.random() < 0.5
        attrs.append(PointAttrs(e == 0, ci, e))
    return SchemeModel(X, tuple(attrs))
