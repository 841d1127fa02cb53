import itertools

import pytest
from hypothesis import given, strategies as st

from fibcat.errors import RelationNotPreserved, SectionViolation
from fibcat.finset import (
    FamilyComorphism,
    FamilyMorphism,
    FinFamilyBundle,
    FinFunction,
    all_comorphisms,
    all_family_morphisms,
    all_functions,
    compose_family_comorphisms,
    pullback_map,
)
from fibcat.jets import (
    FiberwiseMonoid,
    NeighborhoodRelation,
    PointedBundle,
    is_homomorphism,
    jet_comorphism,
    jet_count,
    jet_map,
    jet_monoid,
    jet_object,
    jet_oracle,
    jet_strength,
    omega1,
    omega1_map,
    oracle_bijection,
    product_projection,
)

CHAIN = NeighborhoodRelation.chain(3)


@st.composite
def relations(draw, max_size=3):
    n = draw(st.integers(1, max_size))
    pairs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))
    return NeighborhoodRelation.reflexive_closure(n, pairs)


def test_relation_must_be_reflexive():
    with pytest.raises(Exception):
        NeighborhoodRelation(2, {(0, 0)})
    assert CHAIN.neighbors(1) == (0, 1, 2)


def test_chain_counts():
    J = jet_object(CHAIN, FinFamilyBundle((2, 2, 2)))
    assert J.bundle.fibers == (4, 8, 4)
    assert jet_object(CHAIN, FinFamilyBundle((2, 0, 2))).bundle.fibers == (0, 0, 0)


def test_diagonal_jets_are_the_family():
    X = FinFamilyBundle((3, 1, 2))
    assert jet_object(NeighborhoodRelation.diagonal(3), X).bundle == X


@given(relations().flatmap(lambda R: st.tuples(st.just(R), st.lists(st.integers(0, 3), min_size=R.base_size, max_size=R.base_size))))
def test_count_law_and_oracle(args):
    R, fibers = args
    X = FinFamilyBundle(tuple(fibers))
    J = jet_object(R, X)
    assert all(J.bundle.fibers[b] == jet_count(R, X, b) for b in range(R.base_size))
    assert jet_oracle(R, X).bundle == J.bundle
    for row in oracle_bijection(R, X):
        assert sorted(row) == list(range(len(row)))


def _preserving_maps(R):
    n = R.base_size
    for al in all_functions(n, n):
        if all((al(a), al(b)) in R.pairs for a, b in R.pairs):
            yield al


def test_jet_comorphism_is_functorial_on_chain():
    X = FinFamilyBundle((1, 2, 1))
    maps = list(_preserving_maps(CHAIN))
    assert len(maps) > 3
    ident = FamilyComorphism.identity(X)
    assert jet_comorphism(CHAIN, CHAIN, ident) == FamilyComorphism.identity(jet_object(CHAIN, X).bundle)
    for al, be in itertools.product(maps, repeat=2):
        fs = list(all_comorphisms(al, X, X))[:6]
        gs = list(all_comorphisms(be, X, X))[:6]
        for f in fs:
            Jf = jet_comorphism(CHAIN, CHAIN, f)
            for g in gs:
                lhs = jet_comorphism(CHAIN, CHAIN, compose_family_comorphisms(f, g))
                assert lhs == compose_family_comorphisms(Jf, jet_comorphism(CHAIN, CHAIN, g))


def test_vertical_jet_formula():
    X = FinFamilyBundle((2, 2, 2))
    m = FamilyMorphism(X, X, tuple(FinFunction(2, 2, (1, 0)) for _ in range(3)))
    J = jet_object(CHAIN, X)
    Jm = jet_map(CHAIN, m)
    for b in range(3):
        for i, s in enumerate(J.sections[b]):
            assert J.sections[b][Jm.components[b](i)] == tuple(1 - v for v in s)


def test_relation_must_be_preserved():
    al = FinFunction(3, 3, (0, 1, 0))
    R = NeighborhoodRelation.chain(3)
    with pytest.raises(RelationNotPreserved):
        jet_comorphism(R, NeighborhoodRelation.diagonal(3), FamilyComorphism(al, FinFamilyBundle((1, 1, 1)), FinFamilyBundle((1, 1, 1)), (FinFunction(1, 1, (0,)),) * 3))


@pytest.mark.parametrize("Q", [1, 2, 3])
def test_strength_comparison_is_natural_and_bijective(Q):
    Y, Y2 = FinFamilyBundle((2, 1, 2)), FinFamilyBundle((1, 2, 1))
    t = jet_strength(CHAIN, Q, Y)
    assert all(c.is_bijection() for c in t.components)
    p = product_projection(Q, 3)
    t2 = jet_strength(CHAIN, Q, Y2)
    for m in list(all_family_morphisms(Y, Y2))[:16]:
        lhs = pullback_map(p, jet_map(CHAIN, m)).then(t2)
        rhs = t.then(jet_map(CHAIN.product(Q), pullback_map(p, m)))
        assert lhs == rhs


def test_omega1_counts():
    E = PointedBundle(FinFamilyBundle((2, 2, 2)), (0, 0, 0))
    assert omega1(CHAIN, E).bundle.fibers == (2, 4, 2)
    assert omega1(NeighborhoodRelation.diagonal(3), E).bundle.fibers == (1, 1, 1)


def test_omega1_map_needs_basepoints():
    X = FinFamilyBundle((2, 2, 2))
    E = PointedBundle(X, (0, 0, 0))
    for m in all_family_morphisms(X, X):
        if all(c(0) == 0 for c in m.components):
            om = omega1_map(CHAIN, E, E, m)
            assert om.source == omega1(CHAIN, E).bundle
        else:
            with pytest.raises(SectionViolation):
                omega1_map(CHAIN, E, E, m)


def test_jet_monoid_and_homomorphisms():
    X = FinFamilyBundle((2, 2, 2))
    xor = ((0, 1), (1, 0))
    mon = FiberwiseMonoid(X, (xor,) * 3, (0, 0, 0))
    assert mon.is_valid()
    J = jet_monoid(CHAIN, mon)
    assert J.is_valid()
    for m in all_family_morphisms(X, X):
        if is_homomorphism(m, mon, mon):
            assert is_homomorphism(jet_map(CHAIN, m), J, J)
