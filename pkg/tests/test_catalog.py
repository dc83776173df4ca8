import random


import pytest

from ttg.catalog import (
    bounded_lattices,
    poset_catalog,
    posets_up_to_iso,
    random_lattices,
    random_poset,
    random_posets,
)
from ttg.order import FinitePoset, is_isomorphic


@pytest.mark.parametrize("n,count", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 16), (5, 63), (6, 318)])
def test_poset_counts(n, count):
    assert len(posets_up_to_iso(n)) == count


def brute_classes(n):
    # orbits of all labelled posets on n points, by brute force
    seen = []
    for rel in range(1 << (n * n)):
        down = [rel >> (i * n) & ((1 << n) - 1) | 1 << i for i in range(n)]
        try:
            P = FinitePoset.from_masks(list(range(n)), down)
        except ValueError:
            continue
        if not any(is_isomorphic(P, Q) for Q in seen):
            seen.append(P)
    return len(seen)


def test_catalog_against_brute_force():
    assert brute_classes(3) == len(posets_up_to_iso(3))


def test_catalog_has_no_duplicates():
    cat = posets_up_to_iso(4)
    for i, P in enumerate(cat):
        for Q in cat[i + 1:]:
            assert not is_isomorphic(P, Q)


def test_small_lattice_count():
    # lattices with 2..6 elements up to isomorphism: 1+1+2+5+15
    assert len(bounded_lattices(4)) == 24


def test_random_posets_are_seeded():
    a = random_posets(20, 8, seed=3)
    b = random_posets(20, 8, seed=3)
    assert [P.down for P in a] == [P.down for P in b]


def test_random_poset_is_transitive():
    P = random_poset(random.Random(7), 9)
    for i in range(len(P)):
        for j in range(len(P)):
            if P.leq(i, j):
                assert P.down[i] & ~P.down[j] == 0


def test_random_lattices_bounded_and_seeded():
    lats = random_lattices(50, 20, seed=11)
    assert all(1 <= len(L) <= 20 for L in lats)
    assert [len(L) for L in lats] == [len(L) for L in random_lattices(50, 20, seed=11)]
    assert all(L.has_meets for L in lats)


def test_catalog_sizes():
    assert len(poset_catalog(4)) == 1 + 1 + 2 + 5 + 16

