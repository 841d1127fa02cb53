import pytest

from fibcat import fixtures as fx
from fibcat.cartesian import is_cartesian, is_fibration, make_cleavage
from fibcat.category import CatFunctor, fiber, opposite, validate_category, validate_functor
from fibcat.dual import (
    all_spans,
    build_dual,
    classify_dual_arrow,
    compose_spans,
    comorphism_class,
    double_dual_iso,
    equivalent_spans,
    make_span,
    span_witness,
)
from fibcat.errors import PreconditionError

V, H0 = 3, 4


def test_terminal_dual_is_terminal():
    d = build_dual(fx.terminal_fibration())
    assert d.category.n_objects == 1 and d.category.n_arrows == 1


def test_fixture_dual_shape(pi):
    d = build_dual(pi)
    C = d.category
    assert C.n_objects == 3 and C.n_arrows == 5
    named = {C.arrow_name(g): (C.object_name(C.dom(g)), C.object_name(C.cod(g))) for g in range(C.n_arrows)}
    assert named["[v,id_X0]"] == ("X1", "X0")
    assert named["[id_X1,h0]"] == ("X1", "Y0")
    kinds = {C.arrow_name(g): classify_dual_arrow(d, g) for g in range(C.n_arrows)}
    assert kinds == {"id_X0": "both", "[v,id_X0]": "vertical", "id_X1": "both", "id_Y0": "both", "[id_X1,h0]": "cartesian"}


def test_make_span_rejects_bad_legs(pi):
    with pytest.raises(PreconditionError):
        make_span(pi, H0, H0)
    with pytest.raises(PreconditionError):
        make_span(pi, 0, 5)  # vh0 is not Cartesian
    s = make_span(pi, 1, H0)
    assert (s.source, s.target) == (1, 2)


def test_unit_and_factorization_in_fixture(pi):
    c = make_cleavage(pi)
    one = make_span(pi, 1, 1)
    h = make_span(pi, 1, H0)
    assert compose_spans(c, one, h).canonical.pair == (1, H0)
    v1 = make_span(pi, V, 0)
    assert compose_spans(c, make_span(pi, 1, 1), v1).canonical.pair == v1.pair
    assert compose_spans(c, v1, make_span(pi, 0, 0)).canonical.pair == v1.pair


def _fiber_is_opposite(pi, dual):
    """(X*)_A is isomorphic to (X_A)^op via v -> {(v, 1)}."""
    total = pi.source
    for A in range(pi.target.n_objects):
        fb = fiber(pi, A)
        fd = fiber(dual.projection, A)
        arr = tuple(fd.local_arrow(dual.arrow_of(f, total.identity[total.dom(f)])) for f in fb.arrows)
        F = CatFunctor(opposite(fb.category), fd.category, tuple(range(len(fb.objects))), arr)
        assert fd.objects == fb.objects
        assert validate_functor(F).ok
        assert sorted(arr) == list(range(len(fd.arrows)))


def _dual_checks(pi):
    dual = build_dual(pi)
    assert validate_category(dual.category).ok and validate_functor(dual.projection).ok
    assert is_fibration(dual.projection)
    for g in range(dual.category.n_arrows):
        classify_dual_arrow(dual, g, cross_check=True)
    _fiber_is_opposite(pi, dual)
    c = dual.cleavage
    total = pi.source
    for s in all_spans(pi):
        # (v, h) lies in {(v, 1)}.{(1, h)}
        vs = type(s)(s.apex, s.vertical, total.identity[s.apex], pi)
        hs = type(s)(s.apex, total.identity[s.apex], s.horizontal, pi)
        assert s.pair in compose_spans(c, vs, hs).key
    return dual


def test_dual_on_fixtures(any_fixture):
    _dual_checks(any_fixture)


def test_dual_on_random_fibrations(random_fibrations):
    for pi in random_fibrations:
        _dual_checks(pi)


def test_composition_independent_of_representatives(random_fibrations):
    for pi in random_fibrations[:25]:
        c = make_cleavage(pi)
        dual = build_dual(pi)
        for (i, j) in list(dual.category.comp)[:80]:
            compose_spans(c, dual.class_of[i].canonical, dual.class_of[j].canonical, check_independence=True)


def test_classes_independent_of_cleavage(rho, random_fibrations):
    for pi in [rho, *random_fibrations[:25]]:
        low = build_dual(pi, make_cleavage(pi, "lowest"))
        high = build_dual(pi, make_cleavage(pi, "highest"))
        assert {c.key for c in low.class_of} == {c.key for c in high.class_of}


def test_equivalent_spans_share_a_witness(rho):
    for s in all_spans(rho):
        for t in equivalent_spans(s):
            assert span_witness(s, t) is not None
        cls = comorphism_class(make_cleavage(rho), s)
        assert s.pair in cls.key and cls.canonical.pair in cls.key


def test_double_dual_terminal_is_identity():
    dd = double_dual_iso(fx.terminal_fibration())
    assert dd.ok and dd.functor.arr_map == (0,)


def test_double_dual_fixture(pi):
    dd = double_dual_iso(pi)
    assert dd.is_isomorphism and dd.over_base
    table = dict(dd.arrow_table())
    assert table["v"] == "[[v,id_X0],id_X1]"
    assert table["h0"] == "[id_X1,[id_X1,h0]]"


def test_double_dual_on_random(random_fibrations):
    for pi in random_fibrations:
        dd = double_dual_iso(pi)
        assert dd.ok
        assert dd.second.category.n_arrows == pi.source.n_arrows


def test_dual_arrows_cartesian_iff_identity_vertical_leg(random_fibrations):
    for pi in random_fibrations[:20]:
        dual = build_dual(pi)
        total = pi.source
        for g, cls in enumerate(dual.class_of):
            has_form = any(total.is_identity(s.vertical) for s in cls.representatives)
            assert bool(is_cartesian(dual.projection, g)) == has_form
