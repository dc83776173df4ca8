import random

import pytest
from hypothesis import given, strategies as st

from ttg.catalog import poset_catalog
from ttg.datum import check_base_morphism, validate_admissible
from ttg.geometry import (
    A,
    B,
    C,
    PointAttrs,
    SBModel,
    SchemeModel,
    classified_by_subset,
    coh_datum,
    coh_sing_spaces,
    fiber_descriptors,
    koszul_fiber,
    p1_model,
    perf_model,
    projective_model,
    random_scheme_model,
    roundtrip_check,
    sb_datum,
    sb_enumerate,
    sb_is_admissible,
    sb_submodule_lattice,
)
from ttg.order import FinitePoset, covers, find_isomorphism, is_local, krull_dimension
from ttg.spectrum import spectrum

from conftest import posets


@given(posets(max_points=6))
def test_roundtrip(X):
    assert roundtrip_check(X)


def test_roundtrip_examples():
    sp = spectrum(perf_model(FinitePoset.antichain(2)).sub)
    assert len(sp) == 2 and len(sp.closed_sets) == 4
    sp = spectrum(perf_model(FinitePoset.chain(3)).sub)
    assert krull_dimension(sp.poset) == 2


def test_perf_of_point():
    dat = perf_model(FinitePoset.from_relations(["x"]))
    assert len(dat.sub) == 2 and len(spectrum(dat.sub)) == 1


def test_classified_by_subset():
    dat = classified_by_subset(FinitePoset.antichain(2))
    assert len(dat.sub) == 4 and len(spectrum(dat.sub)) == 2
    empty = classified_by_subset(FinitePoset.from_relations([]))
    assert len(empty.sub) == 1 and len(spectrum(empty.sub)) == 0


def test_projective_models():
    assert len(projective_model(-1)) == 0
    assert krull_dimension(projective_model(2)) == 2 and is_local(projective_model(2))
    P = projective_model(1, 2)
    assert len(P) == 4 and krull_dimension(P) == 1 and not is_local(P)
    with pytest.raises(ValueError):
        projective_model(0, 1)


def test_sb_descriptor_catalog():
    m = SBModel.over_point(2, 2)
    ds = fiber_descriptors(m, 0)
    kinds = [d.kind for d in ds]
    assert kinds.count("A") == 1 and kinds.count("B") == 4 and kinds.count("C") == 2
    assert len(sb_enumerate(m)) == 7


def test_sb_malformed_descriptors():
    m = SBModel.over_point(2, 2)
    assert sb_is_admissible(m, {0: A})
    with pytest.raises(ValueError):
        sb_is_admissible(m, {0: B([])})
    with pytest.raises(ValueError):
        sb_is_admissible(m, {0: C(5)})


def test_sb_non_closed_W():
    m = SBModel.over_point(2, 0)
    assert not sb_is_admissible(m, {0: B(["l1"])})


def test_sb_extremes():
    m = SBModel.over_point(2, 2)
    L = sb_submodule_lattice(m)
    assert L.assignments[L.bottom][0] == A
    assert L.assignments[L.top][0] == B(p1_model(2).labels)


def test_sb_without_copies_is_down_sets():
    m = SBModel.over_point(3, 0)
    L = sb_submodule_lattice(m)
    from ttg.order import down_sets

    assert len(L) == len(down_sets(p1_model(3)))
    assert not L.flags


def test_sb_meet_flags():
    # C0 and C1 intersect in the bare fiber, which is not admissible
    L = sb_submodule_lattice(SBModel.over_point(2, 2))
    assert ("C0", "C1") in L.flags
    assert L.labels[L.meet(L.index("C0"), L.index("C1"))] == "A"


def unique_cover_count(L):
    return sum(1 for e in range(len(L)) if len(covers(L, e)) == 1)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_sb_counts(n, k):
    L = sb_submodule_lattice(SBModel.over_point(n, k))
    assert len(L) == 1 + 2**n + k
    assert len(spectrum(L)) == unique_cover_count(L) == n + 1 + k


@pytest.mark.parametrize("k", [1, 2, 3])
def test_sb_one_closed_point(k):
    # with one closed point the zero submodule has two covers (B{l0} and C_j),
    # so it is not prime and the count is 1 + |K|
    L = sb_submodule_lattice(SBModel.over_point(1, k))
    assert len(L) == 1 + 2 + k
    assert len(spectrum(L)) == unique_cover_count(L) == 1 + k


def test_sb_over_chain_base():
    base = FinitePoset.chain(2, "x")
    m = SBModel(base, (p1_model(2), p1_model(2)), (0, 1))
    L = sb_submodule_lattice(m)
    dat = sb_datum(m, L)
    assert validate_admissible(dat)
    assert check_base_morphism(dat)


def test_sb_datum_point():
    dat = sb_datum(SBModel.over_point(2, 2))
    assert validate_admissible(dat) and check_base_morphism(dat)


# Koszul fibers


def test_koszul_c0():
    coh, sing = koszul_fiber(0, projective_model(-1))
    assert len(coh) == 1 and len(sing) == 0


def test_koszul_c1():
    coh, sing = koszul_fiber(1, projective_model(0))
    assert len(sing) == 1 and is_local(coh)


def test_koszul_c2_ci_and_not():
    coh, sing = koszul_fiber(2, projective_model(1))
    assert krull_dimension(sing) == 1
    assert krull_dimension(coh) == 2 and is_local(coh)
    coh, sing = koszul_fiber(2, projective_model(1, 1), complete_intersection=False)
    assert krull_dimension(sing) == 1 and not is_local(coh)


def test_koszul_dimension_mismatch():
    with pytest.raises(ValueError):
        koszul_fiber(2, projective_model(0))


def test_scheme_model_validation():
    X = FinitePoset.from_relations(["x"])
    with pytest.raises(ValueError):
        SchemeModel(X, (PointAttrs(True, True, 1),))
    with pytest.raises(ValueError):
        SchemeModel(X, (PointAttrs(False, False, 1),))


def test_all_regular():
    X = FinitePoset.chain(3)
    model = SchemeModel(X, tuple(PointAttrs(True, True, 0) for _ in X.labels))
    s = coh_sing_spaces(model)
    assert find_isomorphism(s.coh, X) is not None and len(s.sing) == 0


def test_one_hypersurface_point():
    X = FinitePoset.chain(2, "x")
    model = SchemeModel(X, (PointAttrs(False, True, 1), PointAttrs(True, True, 0)))
    s = coh_sing_spaces(model)
    assert [lab[0] for lab in s.sing.labels] == ["x0"]


def test_mixed_ecodims():
    X = FinitePoset.antichain(3)
    model = SchemeModel(X, (PointAttrs(True, True, 0), PointAttrs(False, True, 1), PointAttrs(False, False, 2)))
    s = coh_sing_spaces(model)
    assert len(s.sing) == sum(len(f[1]) for f in s.fibers) == 0 + 1 + 3


def test_closed_copy_of_base():
    rng = random.Random(5)
    for _ in range(20):
        model = random_scheme_model(rng, 4, 3)
        s = coh_sing_spaces(model)
        X = model.space
        copy = s.coh.subposet((1 << len(X)) - 1)
        assert copy.down == X.down
        assert s.coh.is_down_set((1 << len(X)) - 1)


@given(st.integers(0, 10_000))
def test_coh_datum_admissible(seed):
    model = random_scheme_model(random.Random(seed), 3, 2)
    dat = coh_datum(model)
    assert validate_admissible(dat)
    assert check_base_morphism(dat)


@pytest.mark.parametrize("X", poset_catalog(3), ids=lambda P: str(P.down))
def test_hypersurface_sing_locus(X):
    for mask in range(1 << len(X)):
        attrs = tuple(PointAttrs(not mask >> i & 1, True, mask >> i & 1) for i in range(len(X)))
        s = coh_sing_spaces(SchemeModel(X, attrs))
        assert find_isomorphism(s.sing, X.subposet(mask)) is not None
