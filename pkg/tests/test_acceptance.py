"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (run with ``-s`` to see them,
or ``python tests/test_acceptance.py``).  Populations are seeded so reruns are
reproducible.
"""

import dataclasses
import itertools
import json
import random
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from fibcat import fixtures as fx
from fibcat.cartesian import (
    is_cartesian,
    is_fibration,
    lemma1_counterexamples,
    make_cleavage,
    monicity_counterexamples,
    vh_factorizations,
)
from fibcat.category import identity_functor, validate_category, validate_functor
from fibcat.cli import fixtures_text, main
from fibcat.codomain import (
    arrow_category,
    base_for_maps,
    encode_codomain_fibration,
    family_encoding,
    finset_skeleton,
    function_of,
    is_pullback_square,
    meet,
    poset_leq,
)
from fibcat.dsl import emit_document, parse_document
from fibcat.dual import build_dual, classify_dual_arrow, double_dual_iso
from fibcat.errors import GlueConditionViolated
from fibcat.finset import (
    FamilyComorphism,
    FinFamilyBundle,
    FinFunction,
    all_comorphisms,
    all_family_morphisms,
    all_functions,
    check_adjunction,
    compose_family_comorphisms,
    families_up_to,
    is_pullback_of_sets,
    pullback_map,
)
from fibcat.generators import enumerate_functors, random_fibration, random_functor
from fibcat.glue import restrict, glue_functor, verify_glue_conditions
from fibcat.jets import (
    NeighborhoodRelation,
    jet_comorphism,
    jet_count,
    jet_map,
    jet_object,
    jet_oracle,
    jet_strength,
    oracle_bijection,
    product_projection,
)
from fibcat.strength import (
    all_vector_fields,
    builtin_strengths,
    check_flow,
    check_tensorial_strength,
    composite_strength,
    eval_at,
    flow_transform,
    is_vector_field,
    prolong_field,
)
from fibcat.vect import (
    FinVectorBundle,
    LinearBundleMap,
    LinearComorphism,
    all_bundle_maps,
    all_matrices,
    check_cartesian_preservation,
    cotangent_bundle,
    dagger_morphism,
    dagger_object,
    double_dagger_identification,
    reverse_dagger,
    tangent_from_omega,
)

GOLDEN = Path(__file__).parent / "golden"
POPULATION = 1000
SEED = 20261014


def verdict(n: int, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}", flush=True)
    assert ok, detail


@lru_cache(maxsize=None)
def population() -> tuple:
    rng = random.Random(SEED)
    gen = tuple(random_fibration(rng, max_arrows=40, max_base_objects=3, max_base_arrows=6) for _ in range(POPULATION))
    return (fx.fixture_fibration(), fx.twisted_fibration(), fx.terminal_fibration()) + gen


def _random_comorphism(rng, al, X, Y):
    comps = []
    for i in range(al.dom_size):
        n, m = Y.fibers[al(i)], X.fibers[i]
        if n and not m:
            return None
        comps.append(FinFunction(n, m, tuple(rng.randrange(m) for _ in range(n))))
    return FamilyComorphism(al, X, Y, tuple(comps))


def _random_family(rng, n, max_fiber):
    return FinFamilyBundle(tuple(rng.randint(0, max_fiber) for _ in range(n)))


def _random_map(rng, a, b):
    return FinFunction(a, b, tuple(rng.randrange(b) for _ in range(a)))


# 1 -------------------------------------------------------------------------


def test_criterion_1_factorization():
    start = time.perf_counter()
    fails, arrows, pairs = [], 0, 0
    pops = population()
    for k, pi in enumerate(pops):
        total, base = pi.source, pi.target
        assert base.n_objects <= 3 and base.n_arrows <= 6 and total.n_arrows <= 40
        for z in range(total.n_arrows):
            arrows += 1
            facts = vh_factorizations(pi, z)
            if not facts:
                fails.append((k, z, "no factorization"))
                continue
            for p, q in itertools.product(facts, repeat=2):
                pairs += 1
                # witnesses counted by brute force over the whole fibre
                A = base.dom(pi.arr_map[p.horizontal])
                ws = [
                    s
                    for s in pi.members_over(base.identity[A], total.dom(p.horizontal), total.dom(q.horizontal))
                    if total.comp.get((p.vertical, s)) == q.vertical
                    and total.comp[(s, q.horizontal)] == p.horizontal
                    and is_cartesian(pi, s)
                ]
                if len(ws) != 1:
                    fails.append((k, z, f"{len(ws)} witnesses"))
    elapsed = time.perf_counter() - start
    verdict(
        1,
        not fails and elapsed < 60,
        f"{len(pops)} fibrations, {arrows} arrows, {pairs} factorization pairs, {len(fails)} failures, {elapsed:.1f} s",
    )


# 2 -------------------------------------------------------------------------


def test_criterion_2_lemma1_and_monicity():
    bad = [(k, "lemma1") for k, pi in enumerate(population()) if lemma1_counterexamples(pi)]
    bad += [(k, "monic") for k, pi in enumerate(population()) if monicity_counterexamples(pi)]
    verdict(2, not bad, f"{len(population())} fibrations, {len(bad)} counterexamples")


# 3 -------------------------------------------------------------------------


def test_criterion_3_dual_fibration():
    fails, checked = [], 0
    for k, pi in enumerate(population()):
        dual = build_dual(pi, check=False)
        if not (validate_category(dual.category).ok and validate_functor(dual.projection).ok):
            fails.append((k, "not a category/functor"))
            continue
        if not is_fibration(dual.projection):
            fails.append((k, "missing lifts"))
        total = pi.source
        for g in range(dual.category.n_arrows):
            checked += 1
            reps = dual.class_of[g].representatives
            by_form = any(total.is_identity(s.vertical) for s in reps)
            if by_form != bool(is_cartesian(dual.projection, g)):
                fails.append((k, g))
            kind = classify_dual_arrow(dual, g, cross_check=False)
            if (kind in ("cartesian", "both")) != by_form:
                fails.append((k, g, kind))
    verdict(3, not fails, f"{len(population())} duals, {checked} arrows classified, {len(fails)} disagreements")


# 4 -------------------------------------------------------------------------


def test_criterion_4_double_dual():
    fails = []
    for k, pi in enumerate(population()):
        dd = double_dual_iso(pi)
        y, proj = dd.functor, dd.second.projection
        XX = y.target
        bij = sorted(y.obj_map) == list(range(XX.n_objects)) and sorted(y.arr_map) == list(range(XX.n_arrows))
        over = all(proj.obj_map[y.obj_map[X]] == pi.obj_map[X] for X in range(pi.source.n_objects)) and all(
            proj.arr_map[y.arr_map[f]] == pi.arr_map[f] for f in range(pi.source.n_arrows)
        )
        if not (bij and over and validate_functor(y).ok and dd.ok):
            fails.append(k)
    verdict(4, not fails, f"{len(population())} double duals, {len(fails)} not isomorphisms over the base")


# 5 -------------------------------------------------------------------------


def test_criterion_5_codomain_fibration():
    checked, bad = 0, 0
    base = finset_skeleton(2)
    B = base.category
    ac = encode_codomain_fibration(B, require_pullbacks=False)
    for s, (t, alpha) in enumerate(ac.squares):
        x, y = ac.category.arrows[s]
        fns = [function_of(base, a) for a in (x, t, alpha, y)]
        oracle = is_pullback_of_sets(*fns)
        checked += 1
        bad += not (bool(is_cartesian(ac.codomain, s)) == oracle == is_pullback_square(B, x, t, alpha, y))
    for n, covers in ((4, [(0, 1), (0, 2), (1, 3), (2, 3)]), (3, [(0, 2), (1, 2)])):
        P = fx.poset_category([f"p{i}" for i in range(n)], covers)
        leq = poset_leq(n, covers)
        pac = arrow_category(P)
        for s, (t, alpha) in enumerate(pac.squares):
            x, y = pac.category.arrows[s]
            oracle = meet(leq, P.cod(x), P.dom(y)) == P.dom(x)
            checked += 1
            bad += not (bool(is_cartesian(pac.codomain, s)) == oracle == is_pullback_square(P, x, t, alpha, y))
    verdict(5, bad == 0, f"{checked} squares (skeleton {len(ac.squares)}, diamond and V posets), {bad} mismatches")


# 6 -------------------------------------------------------------------------


def _exhaustive_generic(max_base, max_fiber):
    n = bad = 0
    for a, b, c in itertools.product(range(max_base + 1), repeat=3):
        for al, be in itertools.product(all_functions(a, b), all_functions(b, c)):
            base = base_for_maps(al, be)
            phi, psi = base.category.hom(0, 1)[0], base.category.hom(1, 2)[0]
            for X, Y, Z in itertools.product(
                families_up_to(a, max_fiber), families_up_to(b, max_fiber), families_up_to(c, max_fiber)
            ):
                fs = list(all_comorphisms(al, X, Y))
                gs = list(all_comorphisms(be, Y, Z))
                if not (fs and gs):
                    continue
                enc = family_encoding(base, {0: [X], 1: [Y], 2: [Z]})
                for f, g in itertools.product(fs, gs):
                    n += 1
                    bad += enc.compose(phi, f, psi, g) != compose_family_comorphisms(f, g)
    return n, bad


def test_criterion_6_family_semantics():
    n1, b1 = _exhaustive_generic(2, 2)
    n2, b2 = _exhaustive_generic(3, 1)
    rng = random.Random(SEED + 6)
    n3 = b3 = 0
    while n3 < 300:
        a, b, c = (rng.randint(0, 3) for _ in range(3))
        if (a and not b) or (b and not c):
            continue
        al, be = _random_map(rng, a, b), _random_map(rng, b, c)
        X, Y, Z = (_random_family(rng, k, 2) for k in (a, b, c))
        f, g = _random_comorphism(rng, al, X, Y), _random_comorphism(rng, be, Y, Z)
        if f is None or g is None:
            continue
        base = base_for_maps(al, be)
        enc = family_encoding(base, {0: [X], 1: [Y], 2: [Z]})
        n3 += 1
        b3 += enc.compose(base.category.hom(0, 1)[0], f, base.category.hom(1, 2)[0], g) != compose_family_comorphisms(f, g)
    triples = law_bad = 0
    while triples < 500:
        sizes = [rng.randint(0, 3) for _ in range(4)]
        if any(sizes[i] and not sizes[i + 1] for i in range(3)):
            continue
        maps = [_random_map(rng, sizes[i], sizes[i + 1]) for i in range(3)]
        fams = [_random_family(rng, k, 2) for k in sizes]
        cs = [_random_comorphism(rng, maps[i], fams[i], fams[i + 1]) for i in range(3)]
        if any(c is None for c in cs):
            continue
        f, g, h = cs
        triples += 1
        C = compose_family_comorphisms
        law_bad += C(C(f, g), h) != C(f, C(g, h))
        law_bad += C(FamilyComorphism.identity(f.source), f) != f or C(f, FamilyComorphism.identity(f.target)) != f
    ok = b1 == b2 == b3 == law_bad == 0
    verdict(
        6,
        ok,
        f"generic composite: {n1} pairs (bases<=2, fibres<=2) + {n2} (bases<=3, fibres<=1) exhaustive, "
        f"{n3} random at bases<=3, fibres<=2, {b1 + b2 + b3} mismatches; {triples} random triples, {law_bad} law failures",
    )


# 7 -------------------------------------------------------------------------


def _adjunction_exhaustive(maxA, maxB, max_fiber):
    n = bad = 0
    for a, b in itertools.product(range(maxA + 1), range(maxB + 1)):
        for al in all_functions(a, b):
            for X, Y in itertools.product(families_up_to(a, max_fiber), families_up_to(b, max_fiber)):
                n += 1
                bad += not check_adjunction(al, X, Y).ok
    return n, bad


def test_criterion_7_adjunction():
    n1, b1 = _adjunction_exhaustive(3, 3, 2)
    n2, b2 = _adjunction_exhaustive(2, 2, 3)
    rng = random.Random(SEED + 7)
    n3 = b3 = 0
    for _ in range(300):
        a, b = rng.randint(0, 3), rng.randint(1, 3)
        al = _random_map(rng, a, b)
        X, Y = _random_family(rng, a, 3), _random_family(rng, b, 3)
        n3 += 1
        b3 += not check_adjunction(al, X, Y).ok
    verdict(
        7,
        b1 == b2 == b3 == 0,
        f"exhaustive {n1} configs (|A|,|B|<=3, fibres<=2) + {n2} (|A|,|B|<=2, fibres<=3), "
        f"{n3} random at |A|,|B|<=3, fibres<=3; {b1 + b2 + b3} failures",
    )


# 8 -------------------------------------------------------------------------


def _all_relations(n):
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    for bits in itertools.product((0, 1), repeat=len(off)):
        yield NeighborhoodRelation.reflexive_closure(n, {p for p, keep in zip(off, bits) if keep})


def _jet_functoriality_exhaustive(R, M):
    """All pairs of comorphisms M -> M over relation-preserving maps, vectorized."""
    n = R.base_size
    maps = [al for al in all_functions(n, n) if all((al(a), al(b)) in R.pairs for a, b in R.pairs)]
    fs = [f for al in maps for f in all_comorphisms(al, M, M)]
    key = {(f.base_map.values, tuple(c.values for c in f.components)): i for i, f in enumerate(fs)}
    Js = [jet_comorphism(R, R, f) for f in fs]
    if Js[key[(tuple(range(n)), tuple(tuple(range(k)) for k in M.fibers))]] != FamilyComorphism.identity(
        jet_object(R, M).bundle
    ):
        return 0, 1
    width = max(jet_object(R, M).bundle.fibers)
    JA = np.full((len(fs), n, width), -1, dtype=np.int64)
    for i, J in enumerate(Js):
        for a, c in enumerate(J.components):
            JA[i, a, : c.dom_size] = c.values
    base = np.array([f.base_map.values for f in fs])
    comp = {}
    for i, f in enumerate(fs):
        comp[i] = np.array([c.values for c in f.components])
    FA = np.stack([comp[i] for i in range(len(fs))])  # (N, n, fibre)
    lookup = {k: i for k, i in key.items()}
    bad = 0
    idx = np.arange(len(fs))
    for i in range(len(fs)):
        al = base[i]
        # (f_i . g_j)_a = f_a after g_{al(a)}; base map al then beta
        cb = base[idx][:, al]  # beta(al(a))
        cc = np.take_along_axis(FA[i][None, :, :].repeat(len(fs), 0), FA[idx][:, al, :], axis=2)
        jidx = np.array([lookup[(tuple(cb[j]), tuple(map(tuple, cc[j])))] for j in range(len(fs))])
        lhs = JA[jidx]
        # (Jf_i . Jg_j)_a(s) = Jf_a(Jg_{al(a)}(s))
        inner = JA[idx][:, al, :]
        safe = np.where(inner < 0, 0, inner)
        rhs = np.take_along_axis(JA[i][None, :, :].repeat(len(fs), 0), safe, axis=2)
        rhs = np.where(inner < 0, -1, rhs)
        bad += int(np.any(lhs != rhs, axis=(1, 2)).sum())
    # spot-check the vectorized composite against the library composite
    rng = random.Random(SEED + 8)
    for _ in range(200):
        i, j = rng.randrange(len(fs)), rng.randrange(len(fs))
        lib = jet_comorphism(R, R, compose_family_comorphisms(fs[i], fs[j]))
        bad += lib != compose_family_comorphisms(Js[i], Js[j])
    return len(fs) ** 2, bad


def test_criterion_8_jets():
    count_bad = oracle_bad = instances = 0
    for n in range(1, 4):
        for R in _all_relations(n):
            for X in families_up_to(n, 2):
                instances += 1
                J = jet_object(R, X)
                for b in range(n):
                    want = 1
                    for bp in range(n):
                        if (b, bp) in R.pairs:
                            want *= X.fibers[bp]
                    count_bad += J.bundle.fibers[b] != want or jet_count(R, X, b) != want
                P = jet_oracle(R, X)
                rows = oracle_bijection(R, X)
                if P.bundle != J.bundle or any(sorted(r) != list(range(len(r))) for r in rows):
                    oracle_bad += 1
    chain = NeighborhoodRelation.chain(3)
    pairs, functor_bad = _jet_functoriality_exhaustive(chain, FinFamilyBundle((2, 2, 2)))
    strength_bad = 0
    for Q in (1, 2, 3):
        for Y, Y2 in itertools.product(families_up_to(3, 1), [FinFamilyBundle((2, 1, 2)), FinFamilyBundle((1, 2, 1))]):
            t, t2 = jet_strength(chain, Q, Y), jet_strength(chain, Q, Y2)
            strength_bad += not all(c.is_bijection() for c in t.components)
            p = product_projection(Q, 3)
            for m in all_family_morphisms(Y, Y2):
                lhs = pullback_map(p, jet_map(chain, m)).then(t2)
                rhs = t.then(jet_map(chain.product(Q), pullback_map(p, m)))
                strength_bad += lhs != rhs
    ok = count_bad == oracle_bad == functor_bad == strength_bad == 0
    verdict(
        8,
        ok,
        f"{instances} relation/family instances ({count_bad} count, {oracle_bad} oracle failures); "
        f"{pairs} comorphism pairs on the chain ({functor_bad} failures); strength {strength_bad} failures",
    )


# 9 -------------------------------------------------------------------------


def test_criterion_9_strength_and_flow():
    strengths = builtin_strengths()
    bad = []
    for name, t in strengths.items():
        F = t.functor
        if not check_tensorial_strength(t, 3, 3).ok:
            bad.append((name, "axioms"))
        if not check_flow(t, 2, 3).ok:
            bad.append((name, "flow"))
        for B in range(4):
            if flow_transform(t, 1, B) != FinFunction.identity(F.obj(B)):
                bad.append((name, "unit", B))
        for D, B in itertools.product(range(1, 4), range(3)):
            if flow_transform(t, D, B).then(eval_at(0, D, F.obj(B))) != F(eval_at(0, D, B)):
                bad.append((name, "bundle", D, B))
        for D, M in itertools.product(range(1, 3), range(4)):
            for xi in all_vector_fields(D, M):
                if not is_vector_field(prolong_field(t, D, M, xi), D, F.obj(M)):
                    bad.append((name, "prolong", D, M))
    composites = 0
    for a, b in itertools.product(strengths, repeat=2):
        composites += 1
        if not check_tensorial_strength(composite_strength(strengths[a], strengths[b]), 2, 2).ok:
            bad.append((a, b, "composite"))
    verdict(9, not bad, f"{len(strengths)} built-in strengths, {composites} composites, {len(bad)} failures")


# 10 ------------------------------------------------------------------------


def _vector_bundles(q, max_base, max_dim):
    for n in range(max_base + 1):
        for dims in itertools.product(range(max_dim + 1), repeat=n):
            yield FinVectorBundle(q, dims)


def test_criterion_10_dagger():
    q = 2
    bad = 0
    big = list(_vector_bundles(q, 2, 2))
    for X in big:
        bad += dagger_morphism(LinearBundleMap.identity(X)) != LinearComorphism.identity(dagger_object(X))
    # every composable pair of bundle maps whose middle fibres have dimension <= 1
    pairs = 0
    for X, Y, Z in itertools.product(big, list(_vector_bundles(q, 2, 1)), big):
        for al in all_functions(X.base_size, Y.base_size):
            ss = [(s, dagger_morphism(s)) for s in all_bundle_maps(al, X, Y)]
            for be in all_functions(Y.base_size, Z.base_size):
                for t in all_bundle_maps(be, Y, Z):
                    dt = dagger_morphism(t)
                    for s, ds in ss:
                        pairs += 1
                        bad += dagger_morphism(s.then(t)) != ds.then(dt)
    # every composable pair of components up to dimension 2, as maps of one-point bundles
    one = FinFunction.identity(1)
    triples = 0
    for x, y, z in itertools.product(range(3), repeat=3):
        X, Y, Z = (FinVectorBundle(q, (d,)) for d in (x, y, z))
        for A in all_matrices(q, y, x):
            s = LinearBundleMap(one, X, Y, (A,))
            for Bm in all_matrices(q, z, y):
                t = LinearBundleMap(one, Y, Z, (Bm,))
                triples += 1
                bad += dagger_morphism(s.then(t)) != dagger_morphism(s).then(dagger_morphism(t))
    # pullback squares, round trips, tangent dimensions
    pull = 0
    for X, Y in itertools.product(big, big):
        for al in all_functions(X.base_size, Y.base_size):
            for t in all_bundle_maps(al, X, Y):
                bad += reverse_dagger(dagger_morphism(t)) != t
                if t.is_pullback():
                    pull += 1
                    bad += not check_cartesian_preservation(t)
        bad += not all(np.array_equal(m, np.eye(d, dtype=int)) for m, d in zip(double_dagger_identification(X), X.dims))
    chain = NeighborhoodRelation.chain(3)
    for qq in (2, 3, 4, 5):
        T = tangent_from_omega(chain, qq)
        want = tuple(len(chain.neighbors(b)) - 1 for b in range(3))
        bad += T.cotangent.dims != want or T.tangent.dims != want or cotangent_bundle(chain, qq).dims != (1, 2, 1)
    verdict(
        10,
        bad == 0,
        f"{pairs} bundle-map pairs + {triples} component pairs (q=2, dims<=2, bases<=2), {pull} pullback squares, {bad} failures",
    )


# 11 ------------------------------------------------------------------------


def _glue_key(data):
    return (
        tuple((A, F.obj_map, F.arr_map) for A, F in sorted(data.fiber_functors.items())),
        tuple(sorted(data.cartesian_functor.items())),
    )


def _mutations(data):
    T = data.target
    for h, g in data.cartesian_functor.items():
        for g2 in T.hom(*T.arrows[g]):
            if g2 != g:
                yield dataclasses.replace(data, cartesian_functor={**data.cartesian_functor, h: g2})
    for A, F in data.fiber_functors.items():
        for i, g in enumerate(F.arr_map):
            for g2 in T.hom(*T.arrows[g]):
                if g2 != g:
                    arr = F.arr_map[:i] + (g2,) + F.arr_map[i + 1 :]
                    G = dataclasses.replace(F, arr_map=arr)
                    yield dataclasses.replace(data, fiber_functors={**data.fiber_functors, A: G})


def test_criterion_11_glue():
    rng = random.Random(SEED + 11)
    pops = population()[3:]
    round_trips = bad = 0
    while round_trips < 200:
        pi = pops[rng.randrange(len(pops))]
        F = random_functor(pi.source, pi.source, rng)
        if F is None:
            continue
        round_trips += 1
        data = restrict(F, pi)
        for prefer in ("lowest", "highest"):
            bad += glue_functor(data, make_cleavage(pi, prefer)).arr_map != F.arr_map
    # on the fixtures, the conditions accept exactly the restrictions of functors
    mutations = undetected = 0
    for pi in (fx.fixture_fibration(), fx.twisted_fibration(), fx.terminal_fibration()):
        functors = list(enumerate_functors(pi.source, pi.source))
        legal = {_glue_key(restrict(G, pi)) for G in functors}
        for F in functors:
            data = restrict(F, pi)
            g1 = glue_functor(data, make_cleavage(pi, "lowest"))
            g2 = glue_functor(data, make_cleavage(pi, "highest"))
            bad += not (g1 == g2 == F)
            for m in _mutations(data):
                mutations += 1
                passes = verify_glue_conditions(m).ok
                if passes != (_glue_key(m) in legal):
                    undetected += 1
    # random fibrations: a mutation that passes must glue to a functor that restricts back to it
    sampled = 0
    for pi in pops[:100]:
        F = random_functor(pi.source, pi.source, rng)
        if F is None:
            continue
        for m in itertools.islice(_mutations(restrict(F, pi)), 20):
            sampled += 1
            if verify_glue_conditions(m).ok:
                try:
                    G = glue_functor(m)
                    undetected += _glue_key(restrict(G, pi)) != _glue_key(m)
                except GlueConditionViolated:
                    undetected += 1
    verdict(
        11,
        bad == undetected == 0,
        f"{round_trips} round trips under two cleavages, {mutations} fixture mutations + {sampled} random mutations, "
        f"{bad} round-trip failures, {undetected} misclassified mutations",
    )


# 12 ------------------------------------------------------------------------


def test_criterion_12_cli_and_dsl(tmp_path, capsys):
    problems = []
    canonical = emit_document(parse_document(fixtures_text()))
    if canonical != (GOLDEN / "fixtures_canonical.fib").read_text() or emit_document(parse_document(canonical)) != canonical:
        problems.append("canonical fixtures")
    reports = {}
    for name, argv in (
        ("check", ["check"]),
        ("analyze_pi", ["analyze", "--functor", "pi"]),
        ("doubledual_pi", ["doubledual", "--functor", "pi"]),
    ):
        code = main(argv + ["--no-timing"])
        out = capsys.readouterr().out
        reports[name] = json.loads(out)
        if code != 0 or reports[name] != json.loads((GOLDEN / f"{name}.json").read_text()):
            problems.append(name)
    dual = tmp_path / "dual.fib"
    if main(["dualize", "--functor", "pi", "--out", str(dual), "--no-timing"]) != 0:
        problems.append("dualize")
    capsys.readouterr()
    if dual.read_text() != (GOLDEN / "dualize_pi.fib").read_text():
        problems.append("dualize golden")
    if emit_document(parse_document(dual.read_text())) != dual.read_text():
        problems.append("dual reparse")
    for argv in (["analyze", "--functor", "pi_star"], ["doubledual", "--functor", "pi_star"]):
        if main(argv + ["--input", str(dual)]) != 0:
            problems.append(" ".join(argv))
    capsys.readouterr()
    bad_cat = tmp_path / "bad.fib"
    bad_cat.write_text(
        "category C { objects: a; arrow e: a -> a; arrow f: a -> a; "
        "compose e.e = e; compose e.f = f; compose f.e = e; compose f.f = e; }\n"
    )
    typo = tmp_path / "typo.fib"
    typo.write_text("category C { objects: a; arrow f: a -> missing; }\n")
    codes = {
        0: main(["check"]),
        1: main(["check", "--input", str(bad_cat)]),
        2: main(["check", "--input", str(typo)]),
    }
    codes[-2] = main(["analyze", "--functor", "nope"])
    capsys.readouterr()
    if codes != {0: 0, 1: 1, 2: 2, -2: 2}:
        problems.append(f"exit codes {codes}")
    verdict(12, not problems, "golden files, dual pipeline, exit codes 0/1/2" + (f"; broken: {problems}" if problems else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
