import dataclasses

import pytest
from hypothesis import given, strategies as st

from fibcat import fixtures as fx
from fibcat.category import (
    CatFunctor,
    FiniteCategory,
    fiber,
    hom_over,
    identity_functor,
    is_isomorphism,
    opposite,
    validate_category,
    validate_functor,
)
from fibcat.errors import PreconditionError, StructuralError
from fibcat.generators import concrete_category


def test_identities_come_first():
    E = fx.fixture_total()
    assert E.identity == (0, 1, 2)
    assert [E.arrow_name(f) for f in range(E.n_arrows)] == ["id_X0", "id_X1", "id_Y0", "v", "h0", "vh0"]


def test_composition_is_diagrammatic():
    E = fx.fixture_total()
    v, h0, vh0 = (E.arrow_index(n) for n in ("v", "h0", "vh0"))
    assert E.compose(v, h0) == vh0
    assert E.then(E.identity[0], v, h0) == vh0
    with pytest.raises(PreconditionError):
        E.compose(h0, v)


@pytest.mark.parametrize("make", [fx.terminal, fx.walking_arrow, fx.fixture_total, fx.twisted_total, fx.chain3])
def test_fixtures_are_categories(make):
    C = make()
    assert validate_category(C).ok
    assert validate_category(opposite(C)).ok
    assert opposite(opposite(C)) == C


def test_unit_law_violation_is_reported():
    E = fx.fixture_total()
    comp = dict(E.comp)
    comp[(E.arrow_index("v"), E.identity[1])] = E.identity[0]
    bad = dataclasses.replace(E, comp=comp)
    report = validate_category(bad)
    assert not report.ok
    assert report.first.check == "unit-law"


def test_associativity_violation_is_reported():
    E2 = fx.twisted_total()
    g, h, gh = (E2.arrow_index(n) for n in ("g", "h", "gh"))
    comp = dict(E2.comp)
    comp[(g, gh)] = gh  # should be h, since g.g = id
    report = validate_category(dataclasses.replace(E2, comp=comp))
    assert report.first.check == "associativity"


def test_missing_composite_is_reported():
    E = fx.fixture_total()
    comp = dict(E.comp)
    del comp[(E.arrow_index("v"), E.arrow_index("h0"))]
    assert validate_category(dataclasses.replace(E, comp=comp)).first.check == "composition-domain"


def test_out_of_range_arrow_raises():
    bad = FiniteCategory(1, ((0, 3),), (0,), {})
    with pytest.raises(StructuralError):
        validate_category(bad)


def test_inverse_of_involution():
    E2 = fx.twisted_total()
    g = E2.arrow_index("g")
    assert E2.inverse(g) == g
    assert not fx.fixture_total().is_invertible(3)


def test_fixture_functor_and_fiber(pi):
    assert validate_functor(pi).ok
    fa = fiber(pi, 0)
    assert fa.objects == (0, 1)
    assert [pi.source.arrow_name(f) for f in fa.arrows] == ["id_X0", "id_X1", "v"]
    assert validate_category(fa.category).ok
    assert fa.local_arrow(3) == 2


def test_hom_over(pi):
    u = 2
    assert list(hom_over(pi, u, 1, 2)) == [4]
    assert list(hom_over(pi, u, 0, 2)) == [5]
    with pytest.raises(PreconditionError):
        hom_over(pi, u, 2, 2)


def test_functor_composition_failure_detected(pi):
    bad = CatFunctor(pi.source, pi.target, pi.obj_map, (0, 0, 1, 0, 2, 0))
    report = validate_functor(bad)
    assert not report.ok and report.first.check in ("endpoints", "composition")


def test_functor_then_and_identity(pi):
    ident = identity_functor(pi.source)
    assert ident.then(pi) == pi
    assert pi.then(identity_functor(pi.target)) == pi
    assert is_isomorphism(ident) and not is_isomorphism(pi)


@st.composite
def concrete(draw):
    sizes = draw(st.lists(st.integers(1, 2), min_size=1, max_size=3))
    n = len(sizes)
    gens = []
    for _ in range(draw(st.integers(0, 3))):
        d, c = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        gens.append((d, c, tuple(draw(st.integers(0, sizes[c] - 1)) for _ in range(sizes[d]))))
    return concrete_category(sizes, gens)


@given(concrete())
def test_concrete_categories_validate(base):
    C = base.category
    assert validate_category(C).ok
    assert validate_category(opposite(C)).ok
    for f in range(C.n_arrows):
        assert C.compose(C.identity[C.dom(f)], f) == f == C.compose(f, C.identity[C.cod(f)])
