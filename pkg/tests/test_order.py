from itertools import combinations

import pytest
from hypothesis import given

from ttg.order import (
    FinitePoset,
    JoinSemilattice,
    OrderError,
    SizeGuardExceeded,
    SubmoduleLattice,
    covers,
    disjoint_union,
    down_closure,
    down_sets,
    find_isomorphism,
    is_isomorphic,
    is_local,
    krull_dimension,
    product,
    resolve_max_points,
)

from conftest import posets


def brute_down_sets(X):
    return {m for m in range(1 << len(X)) if all(X.down[i] & ~m == 0 for i in range(len(X)) if m >> i & 1)}


def test_from_relations_closes_transitively():
    X = FinitePoset.from_relations("abc", [("a", "b"), ("b", "c")])
    assert X.leq(X.index("a"), X.index("c"))
    assert not X.leq(X.index("c"), X.index("a"))


def test_cycle_rejected():
    with pytest.raises(OrderError):
        FinitePoset.from_relations("ab", [("a", "b"), ("b", "a")])


def test_unknown_point_rejected():
    with pytest.raises(OrderError, match="unknown point"):
        FinitePoset.from_relations("ab", [("a", "z")])


def test_duplicate_labels():
    with pytest.raises(OrderError):
        FinitePoset.from_relations(["a", "a"])


@given(posets())
def test_down_sets_match_brute_force(X):
    L = down_sets(X)
    assert set(L.carriers) == brute_down_sets(X)
    assert L.carriers[0] == 0 and L.carriers[-1] == X.full


@given(posets(max_points=5))
def test_down_set_lattice_operations_are_set_operations(X):
    L = down_sets(X)
    for a, b in combinations(range(len(L)), 2):
        assert L.carriers[L.join(a, b)] == L.carriers[a] | L.carriers[b]
        assert L.carriers[L.meet(a, b)] == L.carriers[a] & L.carriers[b]


def test_empty_poset_has_one_down_set():
    L = down_sets(FinitePoset.from_relations([]))
    assert len(L) == 1


def test_size_guard(monkeypatch):
    X = FinitePoset.antichain(6)
    with pytest.raises(SizeGuardExceeded):
        down_sets(X, max_points=5)
    monkeypatch.setenv("TTG_MAX_POINTS", "3")
    assert resolve_max_points() == 3
    with pytest.raises(SizeGuardExceeded):
        down_sets(X)


def test_bad_env_guard(monkeypatch):
    monkeypatch.setenv("TTG_MAX_POINTS", "lots")
    with pytest.raises(ValueError):
        resolve_max_points()


def test_join_semilattice_requires_joins():
    # two maximal elements: no join
    with pytest.raises(OrderError):
        JoinSemilattice.from_relations("abc", [("a", "b"), ("a", "c")])


def test_submodule_lattice_requires_meets():
    # two minimal elements under a top: joins exist, meets do not
    L = JoinSemilattice.from_relations("ab1", [("a", "1"), ("b", "1")])
    assert L.bottom is None and not L.has_meets
    with pytest.raises(OrderError):
        SubmoduleLattice.from_relations("ab1", [("a", "1"), ("b", "1")])


def test_diamond_covers():
    L = SubmoduleLattice.from_relations("0ab1", [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
    assert covers(L, L.index("0")) == {L.index("a"), L.index("b")}
    assert covers(L, L.index("1")) == set()
    assert L.join(L.index("a"), L.index("b")) == L.index("1")
    assert L.meet(L.index("a"), L.index("b")) == L.index("0")


@given(posets(max_points=5))
def test_isomorphism_with_shuffled_copy(X):
    Y = X.relabel([f"q{i}" for i in range(len(X))][::-1])
    assert is_isomorphic(X, Y)
    w = find_isomorphism(X, X.dual()) if len(X) else {}
    if w is not None:
        for i, j in combinations(range(len(X)), 2):
            assert X.leq(i, j) == X.dual().leq(w[i], w[j])


def test_chain_not_isomorphic_to_antichain():
    assert not is_isomorphic(FinitePoset.chain(3), FinitePoset.antichain(3))


def test_krull_dimension_and_locality():
    assert krull_dimension(FinitePoset.from_relations([])) == -1
    assert krull_dimension(FinitePoset.chain(4)) == 3
    assert is_local(FinitePoset.chain(3))
    assert not is_local(FinitePoset.antichain(2))
    V = FinitePoset.from_relations("abg", [("a", "g"), ("b", "g")])
    assert krull_dimension(V) == 1 and not is_local(V)


def test_products_and_unions():
    a, b = FinitePoset.chain(2), FinitePoset.chain(3)
    assert len(product(a, b)) == 6
    assert krull_dimension(product(a, b)) == 3
    U = disjoint_union([a, b], ["L", "R"])
    assert len(U) == 5 and len(U.minimal()) == 2


def test_down_closure():
    X = FinitePoset.chain(3)
    assert down_closure(X, ["c1"]) == 0b011
