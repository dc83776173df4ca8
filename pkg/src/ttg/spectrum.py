"""Primes of a finite semilattice of submodules, the spectrum and support data.

A lattice ``L`` stands for the semilattice of submodules.  Points of the
spectrum are the primes: elements ``P`` such that the intersection of
everything strictly above ``P`` is still strictly above ``P``.  ``supp(e)``
is the set of primes not containing ``e``; these sets generate the closed
sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .order import (
    FinitePoset,
    JoinSemilattice,
    OrderError,
    SizeGuardExceeded,
    _enumerate_down_sets,
    bits,
    covers,
    format_label,
    mask_of,
    popcount,
)
from .report import Report

IND_LIMIT = 40
SUPPORT_DATA_LIMIT = 16


class AmbiguousChoice(RuntimeError):
    pass


class VerificationFailed(RuntimeError):
    pass


class InvalidSupportDatum(ValueError):
    def __init__(self, report: Report):
        super().__init__(report.summary())
        self.report = report


@dataclass(frozen=True)
class IndObject:
    """Nonempty, downward closed, join-closed subset of a semilattice (bitmask over element ids)."""

    carrier: int

    def __contains__(self, e: int) -> bool:
        return bool(self.carrier >> e & 1)


def is_ind_object(L: JoinSemilattice, carrier: int) -> bool:
    if not carrier:
        return False
    members = list(bits(carrier))
    if any(L.down[e] & ~carrier for e in members):
        return False
    return all(carrier >> L.join(a, b) & 1 for a, b in combinations(members, 2))


def ind_completion(L: JoinSemilattice, *, limit: int = IND_LIMIT) -> list[IndObject]:
    """All ind-objects of ``L``, found by filtering down-sets of ``L`` (no principality assumed)."""
    cached = getattr(L, "_ind_cache", None)
    if cached is not None:
        return cached
    if len(L) > limit:
        raise SizeGuardExceeded(f"ind-completion enumeration is limited to {limit} elements")
    found = [IndObject(c) for c in _enumerate_down_sets(L.order, limit) if is_ind_object(L, c)]
    found.sort(key=lambda s: (popcount(s.carrier), s.carrier))
    L._ind_cache = found
    return found


def is_s_prime(L: JoinSemilattice, P: int) -> bool:
    """Family definition, evaluated on Ind(L).

    ``P`` is prime iff the intersection of all ind-objects strictly
    containing the principal ind-object of ``P`` strictly contains it.  The
    empty intersection is all of ``L``, which never strictly contains the
    principal ideal of the top, so the top is never prime.
    """
    L._check(P)
    base = L.down[P]
    inter = L.full
    for S in ind_completion(L):
        if S.carrier != base and S.carrier & base == base:
            inter &= S.carrier
    return inter != base


def is_quasi_s_prime(L: JoinSemilattice, P: int, *, allow_top: bool = False) -> bool:
    """Pairwise definition: any two submodules strictly above ``P`` meet strictly above ``P``.

    The condition is vacuous at the top; by convention the top is excluded
    unless ``allow_top`` is set.
    """
    L._check(P)
    above = list(bits(L.strictly_above(P)))
    if not above:
        return allow_top
    base = L.down[P]
    return all(L.down[a] & L.down[b] != base for a, b in combinations(above, 2))


def has_unique_cover(L: JoinSemilattice, P: int) -> bool:
    return len(covers(L, P)) == 1


def _is_prime(L: JoinSemilattice, P: int) -> bool:
    # principal ideals of a finite semilattice exhaust Ind(L), so the family
    # definition reduces to intersecting down-sets of the strict over-elements
    inter = L.full
    for e in bits(L.strictly_above(P)):
        inter &= L.down[e]
    return inter != L.down[P]


def prime_closure(L: JoinSemilattice, P: int) -> int:
    """The smallest element strictly above a prime ``P``."""
    inter = L.full
    for e in bits(L.strictly_above(P)):
        inter &= L.down[e]
    # inter is the principal ideal of the closure
    return L._by_down[inter]


def generate_closed_sets(generators: Iterable[int], n: int) -> frozenset[int]:
    """Closure of ``generators`` under finite unions and finite intersections, plus the empty and full sets."""
    full = (1 << n) - 1
    gens = sorted(set(generators) | {0})
    unions: set[int] = set()
    for g in gens:
        unions |= {g | r for r in unions}
        unions.add(g)
    # intersections of a union-closed family stay union-closed (distributivity)
    closed: set[int] = set()
    for g in sorted(unions):
        closed |= {g & r for r in closed}
        closed.add(g)
    closed.add(full)
    return frozenset(closed)


def closure_of_point(closed_sets: Iterable[int], n: int, x: int) -> int:
    acc = (1 << n) - 1
    for C in closed_sets:
        if C >> x & 1:
            acc &= C
    return acc


@dataclass(frozen=True, eq=False)
class SpectrumSpace:
    """Primes of a lattice with the topology generated by supports.

    ``primes[k]`` is an element id of ``lattice``; subsets of the spectrum
    are bitmasks over positions ``k``.  ``supports[e]`` is ``supp(e)``.
    """

    lattice: JoinSemilattice
    primes: tuple[int, ...]
    poset: FinitePoset
    closed_sets: frozenset[int]
    supports: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    @property
    def labels(self) -> tuple[Hashable, ...]:
        return self.poset.labels

    @property
    def full(self) -> int:
        return (1 << len(self.primes)) - 1

    def position(self, element: int) -> int:
        try:
            return self.primes.index(element)
        except ValueError:
            raise OrderError(f"element {self.lattice.labels[element]!r} is not prime") from None

    def position_of_label(self, label: Hashable) -> int:
        return self.poset.index(label)

    def elements(self, mask: int) -> list[int]:
        return [self.primes[k] for k in bits(mask)]

    def closure(self, mask: int) -> int:
        acc = self.full
        for C in self.closed_sets:
            if C & mask == mask:
                acc &= C
        return acc

    def is_closed(self, mask: int) -> bool:
        return mask in self.closed_sets


def spectrum(L: JoinSemilattice) -> SpectrumSpace:
    primes = tuple(e for e in range(len(L)) if _is_prime(L, e))
    pos = {e: k for k, e in enumerate(primes)}
    down = [mask_of(pos[q] for q in bits(L.down[p]) if q in pos) for p in primes]
    poset = FinitePoset.from_masks([L.labels[p] for p in primes], down)
    supports = tuple(mask_of(k for k, p in enumerate(primes) if not L.leq(e, p)) for e in range(len(L)))
    closed = generate_closed_sets(supports, len(primes))
    return SpectrumSpace(L, primes, poset, closed, supports)


def supp(L: JoinSemilattice, space: SpectrumSpace, e: int) -> int:
    """Primes not containing ``e`` (bitmask over spectrum positions)."""
    L._check(e)
    return space.supports[e]


def classify(L: JoinSemilattice, space: SpectrumSpace, Z: int) -> int:
    """Join of every element whose support lies inside ``Z``."""
    return L.join_all(e for e in range(len(L)) if space.supports[e] & ~Z == 0)


def prime_decomposition(L: JoinSemilattice, space: SpectrumSpace, I: int) -> int:
    """Primes containing ``I``; their meet is ``I`` (the empty meet being the top)."""
    L._check(I)
    return mask_of(k for k, p in enumerate(space.primes) if L.leq(I, p))


@dataclass(frozen=True, eq=False)
class SupportDatum:
    """A finite T_0 space with a support assignment ``supp[e]`` for each element of a semilattice.

    Points are ``labels``; subsets are bitmasks over point positions.
    ``closed_sets`` is the full family of closed sets.
    """

    labels: tuple[Hashable, ...]
    supp: tuple[int, ...]
    closed_sets: frozenset[int]

    @classmethod
    def from_poset(cls, space: FinitePoset, supp: Sequence[int]) -> "SupportDatum":
        return cls(space.labels, tuple(supp), space.closed_sets())

    @classmethod
    def of_spectrum(cls, space: SpectrumSpace) -> "SupportDatum":
        return cls(space.labels, space.supports, space.closed_sets)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def specialization(self) -> FinitePoset:
        """The specialization order ``x <= y`` iff x lies in the closure of y."""
        n = len(self.labels)
        return FinitePoset.from_masks(self.labels, [closure_of_point(self.closed_sets, n, x) for x in range(n)])


def _support_of_ind(Y: SupportDatum, carrier: int) -> int:
    acc = 0
    for e in bits(carrier):
        acc |= Y.supp[e]
    return acc


def check_support_datum(L: JoinSemilattice, Y: SupportDatum) -> Report:
    """Semilattice-map, distinguishability, topology and T_0 axioms."""
    rep = Report("support datum")
    if len(Y.supp) != len(L):
        return rep.fail("domain", detail=f"supp has {len(Y.supp)} values for {len(L)} elements")
    names = lambda m: sorted(format_label(Y.labels[i]) for i in bits(m))  # noqa: E731
    for a, b in combinations(range(len(L)), 2):
        j = L.join(a, b)
        if Y.supp[j] != Y.supp[a] | Y.supp[b]:
            return rep.fail(
                "semilattice map",
                (L.labels[a], L.labels[b]),
                f"supp(a v b) = {names(Y.supp[j])} but supp(a) u supp(b) = {names(Y.supp[a] | Y.supp[b])}",
            )
    try:
        ind = [S.carrier for S in ind_completion(L)]
    except SizeGuardExceeded:
        ind = list(L.down)
    seen: dict[int, int] = {}
    for S in ind:
        s = _support_of_ind(Y, S)
        if s in seen:
            a, b = seen[s], S
            lab = lambda c: sorted(format_label(L.labels[e]) for e in bits(c))  # noqa: E731
            return rep.fail("distinguishability", (lab(a), lab(b)), f"both have support {names(s)}")
        seen[s] = S
    generated = generate_closed_sets(Y.supp, len(Y))
    if generated != Y.closed_sets:
        extra = sorted(Y.closed_sets - generated)
        missing = sorted(generated - Y.closed_sets)
        w = ("not generated", names(extra[0])) if extra else ("missing", names(missing[0]))
        return rep.fail("topology", w, "closed sets differ from the family generated by supports")
    closures: dict[int, int] = {}
    for x in range(len(Y)):
        c = closure_of_point(Y.closed_sets, len(Y), x)
        if c in closures:
            return rep.fail("T_0", (Y.labels[closures[c]], Y.labels[x]), "points have the same closure")
        closures[c] = x
    return rep


def universal_map(L: JoinSemilattice, Y: SupportDatum, space: SpectrumSpace | None = None) -> tuple[int, ...]:
    """The unique map of support data from the spectrum to ``Y``.

    Returns ``f`` with ``f[k]`` the point of ``Y`` assigned to prime position
    ``k``.  For each prime ``P`` the candidates are the points in
    ``supp_Y(closure P) - supp_Y(P)``; only a candidate whose co-support
    ``{l : y not in supp_Y(l)}`` equals the ideal of ``P`` is compatible.
    """
    rep = check_support_datum(L, Y)
    if not rep:
        raise InvalidSupportDatum(rep)
    space = spectrum(L) if space is None else space
    cosupport = []
    for y in range(len(Y)):
        cosupport.append(mask_of(e for e in range(len(L)) if not Y.supp[e] >> y & 1))
    f = []
    for P in space.primes:
        Pbar = prime_closure(L, P)
        candidates = Y.supp[Pbar] & ~Y.supp[P]
        compatible = [y for y in bits(candidates) if cosupport[y] == L.down[P]]
        if len(compatible) > 1:
            raise AmbiguousChoice(f"prime {L.labels[P]!r}: {len(compatible)} compatible points")
        if not compatible:
            raise VerificationFailed(f"prime {L.labels[P]!r}: no compatible point in supp(P-bar) - supp(P)")
        f.append(compatible[0])
    if not is_support_map(L, space, Y, f):
        raise VerificationFailed("pullback identity f^-1(supp_Y(l)) = supp(l) fails")
    return tuple(f)


def preimage(f: Sequence[int], mask: int) -> int:
    return mask_of(k for k, y in enumerate(f) if mask >> y & 1)


def is_support_map(L: JoinSemilattice, space: SpectrumSpace, Y: SupportDatum, f: Sequence[int]) -> bool:
    """Continuity plus ``f^-1(supp_Y(l)) = supp(l)`` for every ``l``."""
    if any(preimage(f, Y.supp[e]) != space.supports[e] for e in range(len(L))):
        return False
    return all(preimage(f, C) in space.closed_sets for C in Y.closed_sets)


def support_data_enumerate(L: JoinSemilattice, *, limit: int = SUPPORT_DATA_LIMIT) -> list[SupportDatum]:
    """One support datum for every subset of Ind(L) + {empty} containing the spectrum.

    A point is an ind-object ``S`` (or the empty set) and lies in ``supp(l)``
    iff ``l`` is not in ``S``.
    """
    space = spectrum(L)
    prime_ideals = [L.down[p] for p in space.primes]
    ind = [S.carrier for S in ind_completion(L)]
    others = [c for c in ind if c not in prime_ideals] + [0]
    if len(others) > limit:
        raise SizeGuardExceeded(f"{2 ** len(others)} support data exceed the enumeration limit")

    def label(carrier: int) -> str:
        if not carrier:
            return "{}"
        top = L.join_all(bits(carrier))
        return "<" + format_label(L.labels[top])

    out = []
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            points = prime_ideals + list(extra)
            sup = tuple(mask_of(i for i, c in enumerate(points) if not c >> e & 1) for e in range(len(L)))
            out.append(SupportDatum(tuple(label(c) for c in points), sup, generate_closed_sets(sup, len(points))))
    return out
