import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fibcat.errors import NotAPullback, RelationNotPreserved, ShapeMismatch
from fibcat.finset import FinFunction, all_functions
from fibcat.jets import NeighborhoodRelation, jet_map, jet_object
from fibcat.vect import (
    FinVectorBundle,
    LinearBundleMap,
    LinearComorphism,
    all_bundle_maps,
    check_cartesian_preservation,
    cotangent_bundle,
    cotangent_comorphism,
    dagger_morphism,
    dagger_object,
    double_dagger_identification,
    field,
    jet_linear_map,
    jet_vector_bundle,
    reverse_dagger,
    tangent_from_omega,
    tangent_map,
    to_family_morphism,
)

CHAIN = NeighborhoodRelation.chain(3)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_field_axioms(q):
    F = field(q)
    els = range(q)
    for a, b, c in itertools.product(els, repeat=3):
        assert F.add[F.add[a][b]][c] == F.add[a][F.add[b][c]]
        assert F.mul[F.mul[a][b]][c] == F.mul[a][F.mul[b][c]]
        assert F.mul[a][F.add[b][c]] == F.add[F.mul[a][b]][F.mul[a][c]]
    for a in els:
        assert F.add[a][0] == a and F.mul[a][1] == a
        assert any(F.add[a][b] == 0 for b in els)
        if a:
            assert any(F.mul[a][b] == 1 for b in els)


def test_rank_and_inverse():
    F = field(2)
    assert F.rank(np.array([[1, 1], [1, 1]])) == 1
    assert F.is_invertible(np.array([[0, 1], [1, 1]]))
    assert not F.is_invertible(np.zeros((2, 1), dtype=int))
    assert field(3).rank(np.array([[1, 2], [2, 1]])) == 1
    assert field(5).rank(np.array([[1, 2], [2, 1]])) == 2


def _bundles(q, max_base=2, max_dim=2):
    for n in range(max_base + 1):
        for dims in itertools.product(range(max_dim + 1), repeat=n):
            yield FinVectorBundle(q, dims)


def _pull_covector(F, m, phi):
    """phi after m, computed by evaluation on every basis vector."""
    cols = m.shape[1]
    out = []
    for j in range(cols):
        e = tuple(1 if i == j else 0 for i in range(cols))
        x = F.apply(m, e)
        s = 0
        for k, v in enumerate(x):
            s = F.add[s][F.mul[phi[k]][v]]
        out.append(s)
    return tuple(out)


def test_dagger_matches_evaluation_oracle():
    F = field(3)
    X, Y = FinVectorBundle(3, (2, 1)), FinVectorBundle(3, (2,))
    al = FinFunction(2, 1, (0, 0))
    for t in itertools.islice(all_bundle_maps(al, X, Y), 0, None, 97):
        d = dagger_morphism(t)
        for a in range(2):
            for phi in F.vectors(Y.dims[0]):
                assert F.apply(d.matrices[a], phi) == _pull_covector(F, t.matrices[a], phi)


def test_dagger_functor_laws_exhaustive():
    """Identities and composites over every base map, fibre dimensions up to 2 over F_2."""
    q = 2
    bundles = list(_bundles(q, 2, 2))
    small = list(_bundles(q, 2, 1))
    for X in bundles:
        assert dagger_morphism(LinearBundleMap.identity(X)) == LinearComorphism.identity(dagger_object(X))
    checked = 0
    for X, Y, Z in itertools.product(bundles, small, bundles):
        for al in all_functions(X.base_size, Y.base_size):
            maps1 = list(all_bundle_maps(al, X, Y))
            for be in all_functions(Y.base_size, Z.base_size):
                for s in maps1:
                    ds = dagger_morphism(s)
                    for t in all_bundle_maps(be, Y, Z):
                        assert dagger_morphism(s.then(t)) == ds.then(dagger_morphism(t))
                        checked += 1
    assert checked > 10000


@given(st.lists(st.integers(0, 2), min_size=1, max_size=3), st.integers(0, 10**6))
def test_reverse_dagger_round_trip(dims, seed):
    import random

    rng = random.Random(seed)
    X = FinVectorBundle(3, tuple(dims))
    Y = FinVectorBundle(3, tuple(rng.randint(0, 2) for _ in range(2)))
    al = FinFunction(len(dims), 2, tuple(rng.randrange(2) for _ in dims))
    mats = [np.array([[rng.randrange(3) for _ in range(X.dims[a])] for _ in range(Y.dims[al(a)])], dtype=int).reshape(Y.dims[al(a)], X.dims[a]) for a in range(len(dims))]
    t = LinearBundleMap(al, X, Y, mats)
    assert reverse_dagger(dagger_morphism(t)) == t
    c = dagger_morphism(t)
    assert dagger_morphism(reverse_dagger(c)) == c
    assert all(np.array_equal(m, np.eye(d, dtype=int)) for m, d in zip(double_dagger_identification(X), X.dims))


def test_pullback_squares_become_cartesian():
    X, Y = FinVectorBundle(2, (2, 2)), FinVectorBundle(2, (2,))
    al = FinFunction(2, 1, (0, 0))
    seen = 0
    for t in all_bundle_maps(al, X, Y):
        if t.is_pullback():
            assert check_cartesian_preservation(t)
            seen += 1
        else:
            with pytest.raises(NotAPullback):
                check_cartesian_preservation(t)
    assert seen == 36


def test_shape_errors():
    X = FinVectorBundle(2, (1,))
    with pytest.raises(ShapeMismatch):
        LinearBundleMap(FinFunction.identity(1), X, X, (np.zeros((2, 1), dtype=int),))
    with pytest.raises(ShapeMismatch):
        FinVectorBundle(2, (-1,))


def test_tangent_dimensions():
    T = tangent_from_omega(CHAIN, 2)
    assert T.cotangent.dims == (1, 2, 1)
    assert T.tangent.dims == (1, 2, 1)
    assert tangent_from_omega(NeighborhoodRelation.diagonal(3), 5).tangent.dims == (0, 0, 0)


def _preserving(R_A, R_B):
    for al in all_functions(R_A.base_size, R_B.base_size):
        if all((al(a), al(b)) in R_B.pairs for a, b in R_A.pairs):
            yield al


def test_cotangent_and_tangent_are_functorial():
    maps = list(_preserving(CHAIN, CHAIN))
    for al in maps:
        assert tangent_map(al, CHAIN, CHAIN, 2) == reverse_dagger(cotangent_comorphism(al, CHAIN, CHAIN, 2))
        for be in maps:
            lhs = cotangent_comorphism(al.then(be), CHAIN, CHAIN, 2)
            assert lhs == cotangent_comorphism(al, CHAIN, CHAIN, 2).then(cotangent_comorphism(be, CHAIN, CHAIN, 2))
            assert tangent_map(al.then(be), CHAIN, CHAIN, 2) == tangent_map(al, CHAIN, CHAIN, 2).then(tangent_map(be, CHAIN, CHAIN, 2))
    ident = FinFunction.identity(3)
    assert cotangent_comorphism(ident, CHAIN, CHAIN, 3) == LinearComorphism.identity(cotangent_bundle(CHAIN, 3))
    with pytest.raises(RelationNotPreserved):
        cotangent_comorphism(FinFunction(3, 3, (0, 1, 0)), CHAIN, NeighborhoodRelation.diagonal(3), 2)


def test_jet_of_linear_maps_is_linear_and_matches_jets():
    V = FinVectorBundle(2, (1, 1, 2))
    J = jet_vector_bundle(CHAIN, V)
    assert J.as_family() == jet_object(CHAIN, V.as_family()).bundle
    F = field(2)
    for t in itertools.islice(all_bundle_maps(FinFunction.identity(3), V, V), 0, None, 5):
        Jt = jet_linear_map(CHAIN, t)
        set_map = jet_map(CHAIN, to_family_morphism(t))
        jets = jet_object(CHAIN, V.as_family())
        for b in range(3):
            m = Jt.matrices[b]
            for u, w in itertools.product(F.vectors(J.dims[b]), repeat=2):
                s = tuple(F.add[x][y] for x, y in zip(u, w))
                lhs = F.apply(m, s)
                rhs = tuple(F.add[x][y] for x, y in zip(F.apply(m, u), F.apply(m, w)))
                assert lhs == rhs
            # the linear block map agrees with the jet functor on sections
            nb = CHAIN.neighbors(b)
            for i, sec in enumerate(jets.sections[b]):
                vecs = [F.vectors(V.dims[bp])[sec[k]] for k, bp in enumerate(nb)]
                flat = tuple(c for v in vecs for c in v)
                image = F.apply(m, flat)
                out = jets.sections[b][set_map.components[b](i)]
                want, pos = [], 0
                for k, bp in enumerate(nb):
                    want.append(F.vectors(V.dims[bp])[out[k]])
                assert tuple(c for v in want for c in v) == image
