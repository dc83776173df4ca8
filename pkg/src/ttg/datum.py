"""Lattice-level data (D, S): an action of the base's closed sets on submodules.

The base is a finite poset standing for Spc(S, S); its closed sets are its
down-sets.  ``action[Z]`` is the submodule generated by the part of S
supported in ``Z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Mapping, Sequence

from .order import (
    FinitePoset,
    IntervalView,
    JoinSemilattice,
    OrderError,
    SubmoduleLattice,
    _enumerate_down_sets,
    bits,
    down_sets,
    format_label,
    mask_of,
    popcount,
    resolve_max_points,
)
from .report import Report
from .spectrum import SpectrumSpace, VerificationFailed, generate_closed_sets, spectrum


class NotPrime(ValueError):
    pass


class AdmissibilityViolated(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LatticeDatum:
    """Submodule lattice, base poset, and the action ``Z -> D(Z)`` on base down-sets.

    ``action`` maps every down-set bitmask of ``base`` to an element id of ``sub``.
    """

    sub: SubmoduleLattice
    base: FinitePoset
    action: Mapping[int, int]
    name: str = ""
    closed: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        closed = sorted(_enumerate_down_sets(self.base, resolve_max_points()), key=lambda m: (popcount(m), m))
        object.__setattr__(self, "closed", tuple(closed))
        if not len(self.base) and len(self.sub) != 1:
            raise OrderError("an empty base is only allowed for the zero category (1-element lattice)")
        missing = [Z for Z in closed if Z not in self.action]
        if missing:
            raise OrderError(f"action undefined on closed set {self.closed_label(missing[0])}")
        for Z, e in self.action.items():
            if Z not in closed:
                raise OrderError(f"action given on {self.closed_label(Z)}, which is not specialization-closed")
            self.sub._check(e)

    def closed_label(self, Z: int) -> str:
        return "{" + ",".join(sorted(format_label(x) for x in self.base.names(Z))) + "}"

    def element_label(self, e: int) -> str:
        return format_label(self.sub.labels[e])


def pullback_datum(space: FinitePoset, base: FinitePoset, proj: Sequence[int], name: str = "") -> LatticeDatum:
    """Down-sets of ``space`` acted on by preimages of base down-sets along a monotone ``proj``."""
    for i, j in space.relation_pairs():
        if not base.leq(proj[i], proj[j]):
            raise OrderError(
                f"projection is not monotone: {format_label(space.labels[i])} <= {format_label(space.labels[j])}"
            )
    sub = down_sets(space)
    action = {}
    for Z in _enumerate_down_sets(base, resolve_max_points()):
        action[Z] = sub.element_of(mask_of(i for i in range(len(space)) if Z >> proj[i] & 1))
    return LatticeDatum(sub, base, action, name)


def identity_datum(X: FinitePoset, name: str = "") -> LatticeDatum:
    return pullback_datum(X, X, list(range(len(X))), name)


def validate_admissible(dat: LatticeDatum) -> Report:
    """Intersections, unions, and the composability identity, checked exhaustively."""
    rep = Report("admissible")
    L, act = dat.sub, dat.action
    empty, whole = 0, dat.base.full
    if L.bottom is not None and act[empty] != L.bottom:
        rep.notes.append(f"D(empty) = {dat.element_label(act[empty])} is not the bottom")
    if act[whole] != L.top:
        rep.notes.append(f"D(base) = {dat.element_label(act[whole])} is not the top")
    pairs = list(combinations(dat.closed, 2))
    for Z, W in pairs:
        if act[Z & W] != L.meet(act[Z], act[W]):
            return rep.fail(
                "intersections: D(Z n W) = D(Z) n D(W)",
                (dat.closed_label(Z), dat.closed_label(W)),
                f"D(Z n W) = {dat.element_label(act[Z & W])}, D(Z) n D(W) = {dat.element_label(L.meet(act[Z], act[W]))}",
            )
    for Z, W in pairs:
        if act[Z | W] != L.join(act[Z], act[W]):
            return rep.fail(
                "unions: D(Z u W) = <D(Z), D(W)>",
                (dat.closed_label(Z), dat.closed_label(W)),
                f"D(Z u W) = {dat.element_label(act[Z | W])}, join = {dat.element_label(L.join(act[Z], act[W]))}",
            )
    for P in range(len(L)):
        for Z, W in pairs:
            lhs = L.join(P, act[Z & W])
            rhs = L.meet(L.join(P, act[Z]), L.join(P, act[W]))
            if lhs != rhs:
                return rep.fail(
                    "composability: <P, D(Z n W)> = <P, D(Z)> n <P, D(W)>",
                    (dat.element_label(P), dat.closed_label(Z), dat.closed_label(W)),
                    f"left side {dat.element_label(lhs)}, right side {dat.element_label(rhs)}",
                )
    return rep


def _require_prime(dat: LatticeDatum, P: int, space: SpectrumSpace | None) -> SpectrumSpace:
    space = spectrum(dat.sub) if space is None else space
    if P not in space.primes:
        raise NotPrime(f"{dat.element_label(P)} is not prime")
    return space


def base_point_of_prime(dat: LatticeDatum, P: int, space: SpectrumSpace | None = None) -> int:
    """Base point of a prime, following the smallest-closed-set argument.

    Collect the closed ``Z`` with ``D(Z)`` not inside ``P``; this family must
    be closed under intersection, its smallest member must be the closure of
    a single point, and that point is returned.
    """
    _require_prime(dat, P, space)
    L = dat.sub
    family = [Z for Z in dat.closed if not L.leq(dat.action[Z], P)]
    if not family:
        raise AdmissibilityViolated(f"no closed set Z has D(Z) outside {dat.element_label(P)}")
    fam = set(family)
    for Z, W in combinations(family, 2):
        if Z & W not in fam:
            raise AdmissibilityViolated(
                f"family for {dat.element_label(P)} not closed under intersection: "
                f"{dat.closed_label(Z)}, {dat.closed_label(W)}"
            )
    Z0 = dat.base.full
    for Z in family:
        Z0 &= Z
    if Z0 not in fam:
        raise AdmissibilityViolated(f"no smallest closed set for {dat.element_label(P)}")
    tops = [z for z in bits(Z0) if dat.base.up[z] & Z0 == 1 << z]
    if len(tops) != 1 or dat.base.down[tops[0]] != Z0:
        raise AdmissibilityViolated(f"smallest closed set {dat.closed_label(Z0)} is not a point closure")
    return tops[0]


def base_point_by_formula(dat: LatticeDatum, P: int, space: SpectrumSpace | None = None) -> int:
    """Base point read off ``{s : s (x) D inside P}``: the largest closed ``Z`` with ``D(Z) <= P``.

    That set must be a prime of the base, i.e. the complement of the up-set of
    one point.
    """
    _require_prime(dat, P, space)
    L = dat.sub
    Q = 0
    for Z in dat.closed:
        if L.leq(dat.action[Z], P):
            Q |= Z
    if not L.leq(dat.action[Q], P):
        raise AdmissibilityViolated(f"union of closed sets inside {dat.element_label(P)} escapes it")
    hits = [z for z in range(len(dat.base)) if dat.base.full & ~dat.base.up[z] == Q]
    if len(hits) != 1:
        raise AdmissibilityViolated(f"{dat.closed_label(Q)} is not a prime of the base")
    return hits[0]


def base_map(dat: LatticeDatum, space: SpectrumSpace | None = None) -> tuple[int, ...]:
    space = spectrum(dat.sub) if space is None else space
    return tuple(base_point_of_prime(dat, P, space) for P in space.primes)


@dataclass(frozen=True, eq=False)
class FinTopology:
    space: SpectrumSpace
    extra_closed: frozenset[int]
    closed_sets: frozenset[int]


def fin_topology(dat: LatticeDatum, space: SpectrumSpace | None = None) -> FinTopology:
    """Spectrum topology refined by ``supp(D(Z))`` for every closed ``Z`` of the base."""
    space = spectrum(dat.sub) if space is None else space
    extra = frozenset(space.supports[dat.action[Z]] for Z in dat.closed)
    closed = generate_closed_sets(set(space.closed_sets) | extra, len(space))
    return FinTopology(space, extra, closed)


def check_base_morphism(dat: LatticeDatum) -> Report:
    """Both computations of the base map agree; it is total, continuous, and its fibers partition."""
    rep = Report("base morphism")
    space = spectrum(dat.sub)
    try:
        closure_route = base_map(dat, space)
        formula = tuple(base_point_by_formula(dat, P, space) for P in space.primes)
    except (AdmissibilityViolated, NotPrime) as exc:
        return rep.fail("total", detail=str(exc))
    for k, (a, b) in enumerate(zip(closure_route, formula)):
        if a != b:
            return rep.fail(
                "two computations agree",
                (space.labels[k], dat.base.labels[a], dat.base.labels[b]),
            )
    fin = fin_topology(dat, space)
    for Z in dat.closed:
        pre = mask_of(k for k, y in enumerate(closure_route) if Z >> y & 1)
        if pre not in fin.closed_sets:
            return rep.fail("continuous", (dat.closed_label(Z),), "preimage is not closed")
    covered = 0
    for y in range(len(dat.base)):
        m = mask_of(k for k, z in enumerate(closure_route) if z == y)
        if covered & m:
            return rep.fail("fibers partition", (dat.base.labels[y],))
        covered |= m
    if covered != space.full:
        return rep.fail("fibers partition", detail="some prime lies in no fiber")
    return rep


def quotient_spectrum(sub: JoinSemilattice, I: int) -> SpectrumSpace:
    """Spectrum of the interval above ``I`` (submodules of the quotient by ``I``).

    ``result.lattice.to_parent`` translates its element ids back to ``sub``.
    """
    return spectrum(IntervalView(sub, I))


def quotient_embedding(space: SpectrumSpace, quotient: SpectrumSpace) -> tuple[int, ...]:
    """Positions in ``space`` of the primes of ``quotient``."""
    to_parent = quotient.lattice.to_parent
    return tuple(space.position(to_parent[p]) for p in quotient.primes)


def spectrum_decomposition(sub: JoinSemilattice, I: int, space: SpectrumSpace | None = None) -> tuple[int, int]:
    """Split the spectrum into ``supp(I)`` and the image of the quotient spectrum."""
    space = spectrum(sub) if space is None else space
    support = space.supports[I]
    image = mask_of(quotient_embedding(space, quotient_spectrum(sub, I)))
    if support & image:
        raise VerificationFailed("supp(I) meets the quotient spectrum")
    if support | image != space.full:
        raise VerificationFailed("supp(I) and the quotient spectrum do not cover the spectrum")
    return support, image


def check_open_embedding(sub: JoinSemilattice, I: int, space: SpectrumSpace | None = None) -> Report:
    """The quotient spectrum is the open complement of ``supp(I)`` with the subspace topology."""
    rep = Report("open embedding")
    space = spectrum(sub) if space is None else space
    q = quotient_spectrum(sub, I)
    emb = quotient_embedding(space, q)
    target = space.full & ~space.supports[I]
    if mask_of(emb) != target:
        return rep.fail("image", detail="quotient primes are not the primes above I")
    if target not in {space.full & ~C for C in space.closed_sets}:
        return rep.fail("open image")
    traces = {_pull_mask(emb, C & target) for C in space.closed_sets}
    if traces != set(q.closed_sets):
        return rep.fail("subspace topology", (format_label(sub.labels[I]),))
    return rep


def _pull_mask(positions: Sequence[int], mask: int) -> int:
    return mask_of(k for k, p in enumerate(positions) if mask >> p & 1)


@dataclass(frozen=True, eq=False)
class Fiber:
    """Primes over one base point, with the comparison to the local piece.

    The local piece is the interval ``[D(Z), D(W)]`` for ``W`` the closure of
    the point and ``Z = W - {point}``; ``correspondence[k]`` is the interval
    prime hit by the ``k``-th fiber prime under ``P -> P n D(W)``.
    """

    point: int
    primes: int
    poset: FinitePoset
    closed_sets: frozenset[int]
    interval: IntervalView
    interval_space: SpectrumSpace
    correspondence: tuple[int | None, ...]
    bijective: bool
    continuous: bool
    homeomorphism: bool


def fiber(dat: LatticeDatum, y: int, space: SpectrumSpace | None = None) -> Fiber:
    space = spectrum(dat.sub) if space is None else space
    pi = base_map(dat, space)
    members = [k for k, z in enumerate(pi) if z == y]
    mask = mask_of(members)
    pos = {k: i for i, k in enumerate(members)}
    traces = frozenset(mask_of(pos[k] for k in bits(C & mask)) for C in space.closed_sets)
    L = dat.sub
    W = dat.base.down[y]
    Z = W & ~(1 << y)
    lo, hi = dat.action[Z], dat.action[W]
    interval = _closed_interval(L, lo, hi)
    ispace = spectrum(interval)
    corr: list[int | None] = []
    for k in members:
        image = interval.from_parent.get(L.meet(space.primes[k], hi))
        corr.append(ispace.primes.index(image) if image in ispace.primes else None)
    bijective = None not in corr and sorted(corr) == list(range(len(ispace)))
    continuous = bijective and all(_pull_mask(corr, C) in traces for C in ispace.closed_sets)
    homeo = continuous and all(_push_mask(corr, C) in ispace.closed_sets for C in traces)
    sub_poset = space.poset.subposet(mask)
    return Fiber(y, mask, sub_poset, traces, interval, ispace, tuple(corr), bijective, continuous, homeo)


def _push_mask(f: Sequence[int], mask: int) -> int:
    return mask_of(f[k] for k in bits(mask))


def _closed_interval(L: JoinSemilattice, lo: int, hi: int) -> IntervalView:
    # [lo, hi] as a lattice in its own right
    view = IntervalView.__new__(IntervalView)
    ids = [e for e in range(len(L)) if L.leq(lo, e) and L.leq(e, hi)]
    pos = {e: i for i, e in enumerate(ids)}
    down = [mask_of(pos[d] for d in bits(L.down[e]) if d in pos) for e in ids]
    JoinSemilattice.__init__(view, [L.labels[e] for e in ids], down, check=False)
    view.parent = L
    view.bottom_in_parent = lo
    view.to_parent = tuple(ids)
    view.from_parent = pos
    return view


def check_sub_sheaf(dat: LatticeDatum, I: int, J: int) -> Report:
    """Gluing square of upper intervals over ``I n J``, ``I``, ``J`` and ``I v J``.

    Cartesian means ``K -> (K v I, K v J)`` is a bijection from ``[I n J, top]``
    onto pairs agreeing in ``[I v J, top]``.
    """
    image = set(dat.action.values())
    if I not in image or J not in image:
        raise ValueError("check_sub_sheaf expects submodules of the form D(Z)")
    rep = Report("sheaf gluing")
    L = dat.sub
    low = L.meet(I, J)
    over = lambda x: [e for e in range(len(L)) if L.leq(x, e)]  # noqa: E731
    square = {(a, b) for a, b in product(over(I), over(J)) if L.join(a, J) == L.join(b, I)}
    seen: dict[tuple[int, int], int] = {}
    for K in over(low):
        pair = (L.join(K, I), L.join(K, J))
        if pair in seen:
            return rep.fail(
                "injective", (dat.element_label(seen[pair]), dat.element_label(K)), "same image in the square"
            )
        seen[pair] = K
    missing = square - set(seen)
    if missing:
        a, b = min(missing)
        return rep.fail("surjective", (dat.element_label(a), dat.element_label(b)), "compatible pair not hit")
    return rep
