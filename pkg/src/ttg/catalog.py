"""Test corpora: posets up to isomorphism, seeded random posets and lattices."""

from __future__ import annotations

import random
from collections import defaultdict
from functools import lru_cache

from .order import (
    FinitePoset,
    JoinSemilattice,
    OrderError,
    SubmoduleLattice,
    _enumerate_down_sets,
    _transitive_closure,
    bits,
    find_isomorphism,
    mask_of,
    popcount,
)

DEFAULT_SEED = 20240601


def _invariant(P: FinitePoset) -> tuple:
    return tuple(sorted((popcount(d), popcount(u)) for d, u in zip(P.down, P.up)))


@lru_cache(maxsize=None)
def posets_up_to_iso(n: int) -> tuple[FinitePoset, ...]:
    """One representative per isomorphism class of posets on ``n`` points.

    Built by adding a new maximal point above each down-set of every smaller
    representative (every nonempty poset has a maximal point).
    """
    if n == 0:
        return (FinitePoset.from_relations([]),)
    buckets: dict[tuple, list[FinitePoset]] = defaultdict(list)
    out = []
    labels = [f"p{i}" for i in range(n)]
    for P in posets_up_to_iso(n - 1):
        for D in _enumerate_down_sets(P, n):
            Q = FinitePoset.from_masks(labels, list(P.down) + [D])
            key = _invariant(Q)
            if any(find_isomorphism(Q, R) is not None for R in buckets[key]):
                continue
            buckets[key].append(Q)
            out.append(Q)
    return tuple(out)


def poset_catalog(max_points: int = 4) -> list[FinitePoset]:
    return [P for n in range(max_points + 1) for P in posets_up_to_iso(n)]


def random_poset(rng: random.Random, n: int, density: float | None = None) -> FinitePoset:
    """Random DAG on a shuffled linear order, transitively closed."""
    density = rng.uniform(0.1, 0.6) if density is None else density
    order = list(range(n))
    rng.shuffle(order)
    below = [1 << i for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                below[order[b]] |= 1 << order[a]
    return FinitePoset.from_masks([f"p{i}" for i in range(n)], _transitive_closure(n, below))


def random_posets(count: int, max_points: int, seed: int = DEFAULT_SEED) -> list[FinitePoset]:
    rng = random.Random(seed)
    return [random_poset(rng, rng.randint(0, max_points)) for _ in range(count)]


def family_lattice(family) -> SubmoduleLattice:
    """Subsets (bitmasks) ordered by inclusion; must be a lattice."""
    sets = sorted(set(family), key=lambda m: (popcount(m), m))
    down = [mask_of(j for j, t in enumerate(sets) if t & ~s == 0) for s in sets]
    labels = [frozenset(f"g{i}" for i in bits(s)) for s in sets]
    return SubmoduleLattice(labels, down)


def random_meet_closed_lattice(rng: random.Random, max_elements: int = 20, ground: int = 6) -> SubmoduleLattice:
    """Intersection-closed family of subsets of a small ground set plus the full set.

    Any finite meet-semilattice with a top is a lattice, so this yields a
    lattice whose meets are intersections.
    """
    full = (1 << ground) - 1
    family = {full}
    for _ in range(rng.randint(1, 3 * ground)):
        s = rng.getrandbits(ground)
        new = {s} | {s & t for t in family}
        if len(family | new) > max_elements:
            continue
        family |= new
    return family_lattice(family)


def random_lattices(count: int = 500, max_elements: int = 20, seed: int = DEFAULT_SEED) -> list[SubmoduleLattice]:
    rng = random.Random(seed)
    return [random_meet_closed_lattice(rng, max_elements, rng.randint(1, 6)) for _ in range(count)]


def bounded_lattices(max_inner: int = 4) -> list[SubmoduleLattice]:
    """Lattices obtained by adding a bottom and a top to small posets.

    Every finite lattice with at least two elements arises this way from the
    poset of its proper, nontrivial elements.
    """
    out = []
    for P in poset_catalog(max_inner):
        n = len(P)
        labels = ["0"] + [str(x) for x in P.labels] + ["1"]
        down = [0] + [d << 1 | 1 for d in P.down] + [(1 << (n + 2)) - 1]
        try:
            out.append(SubmoduleLattice(labels, down))
        except OrderError:
            continue
    return out


def trivial_lattice() -> SubmoduleLattice:
    return SubmoduleLattice(["0"], [1])


def non_lattice_semilattices() -> list[JoinSemilattice]:
    """Small join-semilattices without a bottom, where meets can fail."""
    out = []
    for P in poset_catalog(4):
        n = len(P)
        if not n:
            continue
        labels = [str(x) for x in P.labels] + ["1"]
        down = list(P.down) + [(1 << (n + 1)) - 1]
        try:
            L = JoinSemilattice(labels, down)
        except OrderError:
            continue
        if L.bottom is None:
            out.append(L)
    return out


def lattice_catalog(seed: int = DEFAULT_SEED, random_count: int = 500) -> list[JoinSemilattice]:
    """Exhaustive small lattices, down-set lattices of small posets, and seeded random lattices."""
    from .order import down_sets

    out: list[JoinSemilattice] = [trivial_lattice()]
    out += bounded_lattices(4)
    out += [down_sets(P) for P in poset_catalog(4)]
    out += random_lattices(random_count, 20, seed)
    return out
