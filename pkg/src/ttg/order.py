"""Finite posets, down-sets and finite (join-semi)lattices.

Orientation: ``x <= y`` means x is a specialization of y, i.e. x lies in the
closure of {y}.  Down-sets are then exactly the specialization-closed
subsets, which are the closed sets of the Alexandrov topology.

Subsets of a carrier are stored as Python ints used as bit vectors; bit ``i``
refers to the element with index ``i``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence

DEFAULT_MAX_POINTS = 24
MAX_POINTS_ENV = "TTG_MAX_POINTS"


class SizeGuardExceeded(ValueError):
    pass


class OrderError(ValueError):
    """Raised for ill-formed orders (cycles, missing joins, unknown ids)."""


def resolve_max_points(override: int | None = None) -> int:
    if override is not None:
        return override
    raw = os.environ.get(MAX_POINTS_ENV)
    return int(raw) if raw else DEFAULT_MAX_POINTS


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _transitive_closure(n: int, below: list[int]) -> list[int]:
    # below[i] is a bitmask of elements known to be <= i; closes in place
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = below[i]
            for j in bits(below[i] & ~(1 << i)):
                acc |= below[j]
            if acc != below[i]:
                below[i] = acc
                changed = True
    return below


@dataclass(frozen=True, eq=False)
class FinitePoset:
    """A finite T_0 space presented by its specialization order.

    ``down[i]`` is the bitmask of points ``<= i`` (the closure of point i),
    ``up[i]`` the bitmask of points ``>= i``.  Use :meth:`from_relations` to
    build one from labels and generating pairs.
    """

    labels: tuple[Hashable, ...]
    down: tuple[int, ...]
    up: tuple[int, ...] = field(repr=False)
    _index: dict = field(repr=False, compare=False)

    @classmethod
    def from_masks(cls, labels: Sequence[Hashable], down: Sequence[int]) -> "FinitePoset":
        labels = tuple(labels)
        n = len(labels)
        if len(set(labels)) != n:
            raise OrderError("duplicate point labels")
        down = [d | (1 << i) for i, d in enumerate(down)]
        up = [0] * n
        for i in range(n):
            for j in bits(down[i]):
                up[j] |= 1 << i
        for i in range(n):
            for j in bits(down[i] & ~(1 << i)):
                if down[j] >> i & 1:
                    raise OrderError(f"{labels[i]!r} and {labels[j]!r} are mutually related (not T_0)")
                if down[j] & ~down[i]:
                    raise OrderError("relation is not transitive")
        index = {lab: i for i, lab in enumerate(labels)}
        return cls(labels, tuple(down), tuple(up), index)

    @classmethod
    def from_relations(cls, labels: Sequence[Hashable], pairs: Iterable[tuple[Hashable, Hashable]] = ()) -> "FinitePoset":
        """Points ``labels`` with ``a <= b`` for every ``(a, b)`` in ``pairs``, transitively closed."""
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise OrderError("duplicate point labels")
        below = [1 << i for i in range(len(labels))]
        for a, b in pairs:
            if a not in index or b not in index:
                missing = a if a not in index else b
                raise OrderError(f"unknown point {missing!r}")
            below[index[b]] |= 1 << index[a]
        return cls.from_masks(labels, _transitive_closure(len(labels), below))

    @classmethod
    def chain(cls, n: int, prefix: str = "c") -> "FinitePoset":
        labels = [f"{prefix}{i}" for i in range(n)]
        return cls.from_relations(labels, zip(labels, labels[1:]))

    @classmethod
    def antichain(cls, n: int, prefix: str = "a") -> "FinitePoset":
        return cls.from_relations([f"{prefix}{i}" for i in range(n)])

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise OrderError(f"unknown point {label!r}") from None

    def leq(self, i: int, j: int) -> bool:
        return bool(self.down[j] >> i & 1)

    def mask(self, labels: Iterable[Hashable]) -> int:
        return mask_of(self.index(lab) for lab in labels)

    def names(self, mask: int) -> list[Hashable]:
        return [self.labels[i] for i in bits(mask)]

    def is_down_set(self, mask: int) -> bool:
        return all(self.down[i] & ~mask == 0 for i in bits(mask))

    def minimal(self) -> list[int]:
        return [i for i in range(len(self)) if self.down[i] == 1 << i]

    def maximal(self) -> list[int]:
        return [i for i in range(len(self)) if self.up[i] == 1 << i]

    def linear_extension(self) -> list[int]:
        """Indices sorted so that every point comes after everything below it."""
        return sorted(range(len(self)), key=lambda i: (popcount(self.down[i]), i))

    def cover_pairs(self) -> list[tuple[int, int]]:
        """Hasse diagram edges ``(lower, upper)``."""
        out = []
        for j in range(len(self)):
            strict = self.down[j] & ~(1 << j)
            for i in bits(strict):
                # i is covered by j iff nothing strictly between them
                if not any(self.down[k] >> i & 1 for k in bits(strict & ~(1 << i))):
                    out.append((i, j))
        return sorted(out)

    def relation_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for j in range(len(self)) for i in bits(self.down[j]) if i != j]

    def subposet(self, mask: int) -> "FinitePoset":
        idx = list(bits(mask))
        pos = {old: new for new, old in enumerate(idx)}
        down = [mask_of(pos[k] for k in bits(self.down[i] & mask)) for i in idx]
        return FinitePoset.from_masks([self.labels[i] for i in idx], down)

    def relabel(self, labels: Sequence[Hashable]) -> "FinitePoset":
        return FinitePoset.from_masks(labels, self.down)

    def dual(self) -> "FinitePoset":
        return FinitePoset.from_masks(self.labels, self.up)

    def closed_sets(self) -> frozenset[int]:
        """All down-sets, i.e. the closed sets of the Alexandrov topology."""
        return frozenset(_enumerate_down_sets(self, resolve_max_points()))


def disjoint_union(parts: Sequence[FinitePoset], tags: Sequence[Hashable] | None = None) -> FinitePoset:
    """Disjoint union; labels become ``(tag, label)`` pairs."""
    tags = list(range(len(parts))) if tags is None else list(tags)
    labels, down, offset = [], [], 0
    for tag, part in zip(tags, parts):
        labels.extend((tag, lab) for lab in part.labels)
        down.extend(d << offset for d in part.down)
        offset += len(part)
    return FinitePoset.from_masks(labels, down)


def product(a: FinitePoset, b: FinitePoset) -> FinitePoset:
    """Product order on pairs ``(x, y)``."""
    labels = [(x, y) for x in a.labels for y in b.labels]
    nb = len(b)
    down = []
    for i in range(len(a)):
        for j in range(nb):
            down.append(mask_of(p * nb + q for p in bits(a.down[i]) for q in bits(b.down[j])))
    return FinitePoset.from_masks(labels, down)


def is_isomorphic(a: FinitePoset, b: FinitePoset, witness: dict[int, int] | None = None) -> bool:
    """Order isomorphism test; with ``witness`` checks that specific map, else searches."""
    if len(a) != len(b):
        return False
    if witness is not None:
        if sorted(witness.values()) != list(range(len(b))) or len(witness) != len(a):
            return False
        return all(a.leq(i, j) == b.leq(witness[i], witness[j]) for i in range(len(a)) for j in range(len(a)))
    return find_isomorphism(a, b) is not None


def find_isomorphism(a: FinitePoset, b: FinitePoset) -> dict[int, int] | None:
    if len(a) != len(b):
        return None

    def signature(p: FinitePoset, i: int) -> tuple[int, int]:
        return popcount(p.down[i]), popcount(p.up[i])

    if sorted(signature(a, i) for i in range(len(a))) != sorted(signature(b, i) for i in range(len(b))):
        return None
    order = a.linear_extension()
    assign: dict[int, int] = {}
    used = 0

    def extend(k: int) -> bool:
        nonlocal used
        if k == len(order):
            return True
        i = order[k]
        for j in range(len(b)):
            if used >> j & 1 or signature(a, i) != signature(b, j):
                continue
            if all(a.leq(i, i2) == b.leq(j, j2) and a.leq(i2, i) == b.leq(j2, j) for i2, j2 in assign.items()):
                assign[i] = j
                used |= 1 << j
                if extend(k + 1):
                    return True
                del assign[i]
                used &= ~(1 << j)
        return False

    return dict(assign) if extend(0) else None


def _enumerate_down_sets(X: FinitePoset, limit: int) -> list[int]:
    if len(X) > limit:
        raise SizeGuardExceeded(f"poset has {len(X)} points; down-set enumeration is limited to {limit}")
    sets = [0]
    for x in X.linear_extension():
        need = X.down[x] & ~(1 << x)
        bit = 1 << x
        sets.extend([s | bit for s in sets if s & need == need])
    return sets


def down_closure(X: FinitePoset, W: Iterable[Hashable] | int) -> int:
    """Smallest down-set containing ``W`` (labels, or a bitmask)."""
    mask = W if isinstance(W, int) else X.mask(W)
    if mask & ~X.full:
        raise OrderError("subset mentions points outside the poset")
    out = 0
    for i in bits(mask):
        out |= X.down[i]
    return out


def up_closure(X: FinitePoset, W: int) -> int:
    out = 0
    for i in bits(W):
        out |= X.up[i]
    return out


def krull_dimension(X: FinitePoset) -> int:
    """Number of edges in a longest chain; -1 for the empty poset."""
    height: dict[int, int] = {}
    for x in X.linear_extension():
        below = X.down[x] & ~(1 << x)
        height[x] = 1 + max((height[y] for y in bits(below)), default=-1)
    return max(height.values(), default=-1)


def is_local(X: FinitePoset) -> bool:
    """Unique closed point which every point generalizes."""
    mins = X.minimal()
    return len(mins) == 1 and X.up[mins[0]] == X.full


class JoinSemilattice:
    """A finite poset in which every pair of elements has a least upper bound.

    Element ids are ``0..n-1``; ``up[i]``/``down[i]`` are bitmasks of the
    elements above/below ``i`` (inclusive).  Joins are read off the fact that
    the set of upper bounds of ``{a, b}`` is the principal up-set of ``a v b``.
    """

    def __init__(self, labels: Sequence[Hashable], down: Sequence[int], *, check: bool = True):
        self.order = FinitePoset.from_masks(labels, down)
        self.labels = self.order.labels
        self.down = self.order.down
        self.up = self.order.up
        self._by_up = {u: i for i, u in enumerate(self.up)}
        self._by_down = {d: i for i, d in enumerate(self.down)}
        if not self.labels:
            raise OrderError("a semilattice needs at least one element")
        if check:
            for a in range(len(self)):
                for b in range(a + 1, len(self)):
                    if self.up[a] & self.up[b] not in self._by_up:
                        raise OrderError(f"{self.labels[a]!r} and {self.labels[b]!r} have no least upper bound")

    @classmethod
    def from_relations(cls, labels: Sequence[Hashable], pairs: Iterable[tuple[Hashable, Hashable]], **kw) -> "JoinSemilattice":
        P = FinitePoset.from_relations(labels, pairs)
        return cls(P.labels, P.down, **kw)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self)} elements)"

    @property
    def full(self) -> int:
        return (1 << len(self)) - 1

    def index(self, label: Hashable) -> int:
        return self.order.index(label)

    def _check(self, e: int) -> None:
        if not 0 <= e < len(self):
            raise OrderError(f"unknown element id {e!r}")

    def leq(self, a: int, b: int) -> bool:
        return bool(self.down[b] >> a & 1)

    def join(self, a: int, b: int) -> int:
        return self._by_up[self.up[a] & self.up[b]]

    def join_all(self, elements: Iterable[int]) -> int:
        """Join of a family; the empty join is the bottom (if there is one)."""
        ub = self.full
        for e in elements:
            ub &= self.up[e]
        try:
            return self._by_up[ub]
        except KeyError:
            raise OrderError("family has no least upper bound") from None

    def meet_or_none(self, a: int, b: int) -> int | None:
        return self._by_down.get(self.down[a] & self.down[b])

    def meet(self, a: int, b: int) -> int:
        m = self.meet_or_none(a, b)
        if m is None:
            raise OrderError(f"{self.labels[a]!r} and {self.labels[b]!r} have no greatest lower bound")
        return m

    def meet_all(self, elements: Iterable[int]) -> int:
        """Meet of a family; the empty meet is the top."""
        lb = self.full
        for e in elements:
            lb &= self.down[e]
        try:
            return self._by_down[lb]
        except KeyError:
            raise OrderError("family has no greatest lower bound") from None

    @property
    def top(self) -> int:
        return self.join_all(range(len(self)))

    @property
    def bottom(self) -> int | None:
        mins = self.order.minimal()
        return mins[0] if len(mins) == 1 else None

    @property
    def has_meets(self) -> bool:
        return all(
            self.down[a] & self.down[b] in self._by_down for a in range(len(self)) for b in range(a + 1, len(self))
        )

    def strictly_above(self, e: int) -> int:
        return self.up[e] & ~(1 << e)


class SubmoduleLattice(JoinSemilattice):
    """A finite lattice: joins and meets for every pair.  Models Sub_S(D)."""

    def __init__(self, labels: Sequence[Hashable], down: Sequence[int], *, check: bool = True):
        super().__init__(labels, down, check=check)
        if check and not self.has_meets:
            raise OrderError("submodule lattice must be closed under binary meets")


def covers(L: JoinSemilattice, e: int) -> set[int]:
    """Elements covering ``e``: ``e < c`` with nothing strictly in between."""
    L._check(e)
    strict = L.strictly_above(e)
    return {c for c in bits(strict) if L.down[c] & strict == 1 << c}


class DownSetLattice(SubmoduleLattice):
    """Down-sets of a poset under inclusion; ``carriers[i]`` is the bitmask over ``space``."""

    def __init__(self, space: FinitePoset, carriers: Sequence[int]):
        self.space = space
        self.carriers = tuple(carriers)
        self.carrier_index = {m: i for i, m in enumerate(self.carriers)}
        down = []
        for i, m in enumerate(self.carriers):
            down.append(mask_of(j for j in range(i + 1) if self.carriers[j] & ~m == 0))
        super().__init__([frozenset(space.names(m)) for m in self.carriers], down, check=False)

    def element_of(self, carrier: int) -> int:
        try:
            return self.carrier_index[carrier]
        except KeyError:
            raise OrderError("not a down-set of the underlying poset") from None


def down_sets(X: FinitePoset, *, max_points: int | None = None) -> DownSetLattice:
    """The lattice of down-sets of ``X`` (join = union, meet = intersection).

    Element labels are frozensets of point labels.  Elements are numbered by
    (size, bitmask), so the empty set is 0 and ``X`` itself is last.
    """
    sets = _enumerate_down_sets(X, resolve_max_points(max_points))
    return DownSetLattice(X, sorted(sets, key=lambda m: (popcount(m), m)))


class IntervalView(JoinSemilattice):
    """The upper interval ``[bottom, top]`` of a parent semilattice.

    ``to_parent[i]`` maps interval ids to parent ids.
    """

    def __init__(self, parent: JoinSemilattice, bottom: int):
        parent._check(bottom)
        ids = [e for e in range(len(parent)) if parent.leq(bottom, e)]
        pos = {e: i for i, e in enumerate(ids)}
        down = [mask_of(pos[d] for d in bits(parent.down[e]) if d in pos) for e in ids]
        super().__init__([parent.labels[e] for e in ids], down, check=False)
        self.parent = parent
        self.bottom_in_parent = bottom
        self.to_parent = tuple(ids)
        self.from_parent = pos


def format_label(label: Hashable) -> str:
    if isinstance(label, frozenset):
        return "{" + ",".join(sorted(format_label(x) for x in label)) + "}"
    if isinstance(label, tuple):
        return ":".join(format_label(x) for x in label)
    return str(label)
