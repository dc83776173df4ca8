from itertools import product as cartesian

import pytest
from hypothesis import given

from ttg.catalog import bounded_lattices, non_lattice_semilattices, trivial_lattice
from ttg.order import FinitePoset, JoinSemilattice, SubmoduleLattice, bits, down_sets
from ttg.spectrum import (
    InvalidSupportDatum,
    SupportDatum,
    check_support_datum,
    classify,
    generate_closed_sets,
    has_unique_cover,
    ind_completion,
    is_quasi_s_prime,
    is_s_prime,
    is_support_map,
    prime_decomposition,
    spectrum,
    support_data_enumerate,
    universal_map,
)

from conftest import meet_closed_lattices, posets


def diamond():
    return SubmoduleLattice.from_relations("0ab1", [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])


def oracle_topology(gens, n):
    # close under all unions and intersections of subfamilies, by brute force
    fam = {0, (1 << n) - 1} | set(gens)
    fam_l = sorted(fam)
    out = set()
    for choice in range(1, 1 << len(fam_l)):
        acc = (1 << n) - 1
        for k in bits(choice):
            acc &= fam_l[k]
        out.add(acc)
    fam_l = sorted(out)
    res = set()
    for choice in range(1 << len(fam_l)):
        acc = 0
        for k in bits(choice):
            acc |= fam_l[k]
        res.add(acc)
    return res


def test_diamond_primes():
    L = diamond()
    space = spectrum(L)
    assert sorted(L.labels[p] for p in space.primes) == ["a", "b"]
    assert not is_s_prime(L, L.index("0"))
    assert space.closed_sets == frozenset({0, 1, 2, 3})


def test_chain_has_one_prime():
    L = down_sets(FinitePoset.chain(1))
    assert len(spectrum(L)) == 1


def test_trivial_lattice_has_empty_spectrum():
    space = spectrum(trivial_lattice())
    assert len(space) == 0
    assert space.closed_sets == frozenset({0})


def test_top_is_never_prime():
    L = diamond()
    assert not is_s_prime(L, L.top)
    assert not is_quasi_s_prime(L, L.top)
    assert is_quasi_s_prime(L, L.top, allow_top=True)


@given(meet_closed_lattices())
def test_three_prime_notions_agree(L):
    for P in range(len(L)):
        assert is_s_prime(L, P) == is_quasi_s_prime(L, P) == has_unique_cover(L, P)


@pytest.mark.parametrize("L", non_lattice_semilattices(), ids=repr)
def test_prime_notions_without_bottom(L):
    for P in range(len(L)):
        assert is_s_prime(L, P) == is_quasi_s_prime(L, P) == has_unique_cover(L, P)


@given(meet_closed_lattices(ground=4))
def test_ind_completion_is_principal(L):
    assert sorted(i.carrier for i in ind_completion(L)) == sorted(L.down)


def test_generated_topology_matches_brute_force():
    gens = [0b001, 0b011, 0b100]
    assert generate_closed_sets(gens, 3) == oracle_topology(gens, 3)


@given(meet_closed_lattices(ground=4, max_elements=10))
def test_spectrum_topology_oracle(L):
    space = spectrum(L)
    assert set(space.closed_sets) == oracle_topology(space.supports, len(space))


@given(meet_closed_lattices())
def test_classification(L):
    space = spectrum(L)
    supports = [space.supports[e] for e in range(len(L))]
    assert len(set(supports)) == len(L)
    for e in range(len(L)):
        assert classify(L, space, supports[e]) == e
        above = [space.primes[k] for k in bits(prime_decomposition(L, space, e))]
        assert L.meet_all(above) == e


def test_classify_not_realized():
    # a non-closed subset rounds down to the largest realized one
    L = down_sets(FinitePoset.chain(2))
    space = spectrum(L)
    generic = next(k for k in range(len(space)) if space.poset.up[k] == 1 << k)
    e = classify(L, space, 1 << generic)
    assert space.supports[e] != 1 << generic
    assert e == L.bottom


@given(posets(max_points=5))
def test_down_set_primes_are_complements_of_up_sets(X):
    L = down_sets(X)
    expected = {L.element_of(X.full & ~X.up[x]) for x in range(len(X))}
    assert set(spectrum(L).primes) == expected


def brute_support_maps(L, space, Y):
    n = len(space)
    return [f for f in cartesian(range(len(Y)), repeat=n) if is_support_map(L, space, Y, f)]


@pytest.mark.parametrize("L", [diamond(), down_sets(FinitePoset.chain(2)), down_sets(FinitePoset.antichain(2))], ids=repr)
def test_universal_map_unique(L):
    space = spectrum(L)
    for Y in support_data_enumerate(L):
        assert check_support_datum(L, Y)
        f = universal_map(L, Y, space)
        assert brute_support_maps(L, space, Y) == [f]


def test_support_datum_rejects_non_join_map():
    L = diamond()
    Y = SupportDatum.from_poset(FinitePoset.antichain(2, "y"), [0, 1, 2, 1])
    rep = check_support_datum(L, Y)
    assert not rep
    assert "semilattice" in rep.failed or "join" in rep.failed


def test_support_datum_requires_t0():
    L = down_sets(FinitePoset.chain(1))
    Y = SupportDatum(("u", "v"), (0, 3), frozenset({0, 3}))
    rep = check_support_datum(L, Y)
    assert not rep


def test_universal_map_rejects_invalid_datum():
    # an extra closed set the supports do not generate
    L = down_sets(FinitePoset.chain(1))
    Y = SupportDatum(("u", "v"), (0, 3), frozenset({0, 1, 3}))
    with pytest.raises(InvalidSupportDatum) as err:
        universal_map(L, Y)
    assert err.value.report.failed == "topology"


def test_support_data_count():
    # chain with three elements: one non-prime ideal plus the empty point
    assert len(support_data_enumerate(down_sets(FinitePoset.chain(2)))) == 4


@pytest.mark.parametrize("L", bounded_lattices(3), ids=repr)
def test_every_enumerated_datum_is_valid(L):
    for Y in support_data_enumerate(L):
        assert check_support_datum(L, Y), check_support_datum(L, Y).summary()


def test_join_semilattice_without_meets_has_spectrum():
    L = JoinSemilattice.from_relations("ab1", [("a", "1"), ("b", "1")])
    assert sorted(L.labels[p] for p in spectrum(L).primes) == ["a", "b"]
