import pytest
from hypothesis import given

from ttg.catalog import bounded_lattices, poset_catalog
from ttg.datum import (
    AdmissibilityViolated,
    LatticeDatum,
    NotPrime,
    base_map,
    base_point_by_formula,
    base_point_of_prime,
    check_base_morphism,
    check_open_embedding,
    check_sub_sheaf,
    fiber,
    fin_topology,
    identity_datum,
    pullback_datum,
    quotient_spectrum,
    spectrum_decomposition,
    validate_admissible,
)
from ttg.order import FinitePoset, OrderError, SubmoduleLattice, down_sets
from ttg.spectrum import spectrum

from conftest import meet_closed_lattices, posets


def m3_datum():
    L = SubmoduleLattice.from_relations(
        "0abc1", [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")]
    )
    base = FinitePoset.antichain(2, "z")
    z, w = 1, 2
    action = {0: L.index("0"), z: L.index("a"), w: L.index("b"), 3: L.index("1")}
    return LatticeDatum(L, base, action, "m3")


def test_m3_fails_composability_with_witness():
    rep = validate_admissible(m3_datum())
    assert not rep
    assert rep.failed.startswith("composability")
    assert rep.witness == ("c", "{z0}", "{z1}")


def test_action_must_cover_every_closed_set():
    L = down_sets(FinitePoset.chain(1))
    with pytest.raises(OrderError):
        LatticeDatum(L, FinitePoset.chain(1), {0: 0})


def test_empty_base_only_for_zero():
    L = down_sets(FinitePoset.chain(1))
    with pytest.raises(OrderError):
        LatticeDatum(L, FinitePoset.from_relations([]), {0: 0})
    Z = SubmoduleLattice(["0"], [1])
    assert validate_admissible(LatticeDatum(Z, FinitePoset.from_relations([]), {0: 0}))


def test_non_monotone_projection():
    X = FinitePoset.chain(2)
    with pytest.raises(OrderError):
        pullback_datum(X, X, [1, 0])


@given(posets(max_points=5))
def test_identity_datum_base_map_is_roundtrip(X):
    dat = identity_datum(X)
    assert validate_admissible(dat)
    space = spectrum(dat.sub)
    for k, P in enumerate(space.primes):
        x = base_point_of_prime(dat, P, space)
        assert dat.sub.carriers[P] == X.full & ~X.up[x]
        assert base_point_by_formula(dat, P, space) == x


def test_base_point_of_non_prime():
    dat = identity_datum(FinitePoset.antichain(2))
    with pytest.raises(NotPrime):
        base_point_of_prime(dat, dat.sub.bottom)


def test_m3_base_point_breaks():
    dat = m3_datum()
    space = spectrum(dat.sub)
    c = dat.sub.index("c")
    with pytest.raises(AdmissibilityViolated):
        base_point_of_prime(dat, c, space)


def product_datum(X, Y):
    from ttg.order import product

    XY = product(X, Y)
    proj = [X.index(lab[0]) for lab in XY.labels]
    return pullback_datum(XY, X, proj)


@pytest.mark.parametrize("X,Y", [(FinitePoset.chain(2), FinitePoset.antichain(2)), (FinitePoset.antichain(2), FinitePoset.chain(3))])
def test_product_datum(X, Y):
    dat = product_datum(X, Y)
    assert validate_admissible(dat)
    assert check_base_morphism(dat)
    for y in range(len(X)):
        fb = fiber(dat, y)
        assert fb.homeomorphism
        assert len(fb.poset) == len(Y)


def test_fin_topology_adds_nothing_at_finite_scale():
    dat = product_datum(FinitePoset.chain(2), FinitePoset.chain(2))
    fin = fin_topology(dat)
    assert fin.closed_sets == fin.space.closed_sets


@given(meet_closed_lattices(ground=4))
def test_decomposition(L):
    space = spectrum(L)
    for I in range(len(L)):
        support, image = spectrum_decomposition(L, I, space)
        assert support | image == space.full and not support & image
        assert check_open_embedding(L, I, space)


def test_quotient_of_diamond_by_atom():
    L = SubmoduleLattice.from_relations("0ab1", [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
    q = quotient_spectrum(L, L.index("a"))
    assert [q.lattice.labels[p] for p in q.primes] == ["a"]


@pytest.mark.parametrize("X", poset_catalog(3), ids=lambda P: str(P.down))
def test_sheaf_gluing_on_perf(X):
    dat = identity_datum(X)
    image = sorted(set(dat.action.values()))
    for I in image:
        for J in image:
            assert check_sub_sheaf(dat, I, J)


def test_sheaf_gluing_fails_on_m3():
    dat = m3_datum()
    L = dat.sub
    assert not check_sub_sheaf(dat, L.index("a"), L.index("b"))


def test_sheaf_gluing_needs_image_elements():
    dat = m3_datum()
    with pytest.raises(ValueError):
        check_sub_sheaf(dat, dat.sub.index("c"), dat.sub.index("a"))


@pytest.mark.parametrize("L", bounded_lattices(3), ids=repr)
def test_trivial_base_datum(L):
    # base = point acting by 0 and everything
    dat = LatticeDatum(L, FinitePoset.from_relations(["x"]), {0: L.bottom, 1: L.top})
    assert validate_admissible(dat)
    assert check_base_morphism(dat)
    assert set(base_map(dat)) <= {0}
