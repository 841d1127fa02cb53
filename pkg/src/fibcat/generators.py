"""Random finite categories, fibrations and functors for property suites.

Fibrations are produced by a Grothendieck construction so they are
fibrations by construction:

* the base is a concrete category of maps between sets of size 1 or 2,
  closed under composition;
* the fibre over A is a preorder of tagged subsets (U, t) of A, enriched
  in a small monoid M (hom-sets are M or empty);
* reindexing along alpha is preimage, alpha*(U, t) = (alpha^-1 U, t),
  which is strictly functorial.

Non-trivial monoids give parallel vertical arrows and vertical
automorphisms, so lifts and vh factorizations are not unique on the nose.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .category import CatFunctor, FiniteCategory

# name -> (elements, multiplication table); element 0 is the unit
MONOIDS = {
    "trivial": (1, ((0,),)),
    "Z2": (2, ((0, 1), (1, 0))),
    "idem": (2, ((0, 1), (1, 1))),
}


@dataclass(frozen=True)
class ConcreteCategory:
    category: FiniteCategory
    sizes: tuple[int, ...]
    functions: tuple[tuple[int, ...], ...]


def concrete_category(sizes, generators, max_arrows=None, names=None) -> ConcreteCategory | None:
    """Close a set of functions between finite sets under composition.

    ``generators`` holds (dom, cod, values).  Returns None when closure
    exceeds ``max_arrows``.
    """
    n = len(sizes)
    keys = [(o, o, tuple(range(sizes[o]))) for o in range(n)]
    index = {k: i for i, k in enumerate(keys)}
    for g in generators:
        g = (g[0], g[1], tuple(g[2]))
        if g not in index:
            index[g] = len(keys)
            keys.append(g)
    changed = True
    while changed:
        changed = False
        for f in list(keys):
            for g in list(keys):
                if f[1] != g[0]:
                    continue
                h = (f[0], g[1], tuple(g[2][x] for x in f[2]))
                if h not in index:
                    index[h] = len(keys)
                    keys.append(h)
                    changed = True
                    if max_arrows is not None and len(keys) > max_arrows:
                        return None
    comp = {}
    for i, f in enumerate(keys):
        for j, g in enumerate(keys):
            if f[1] == g[0]:
                comp[(i, j)] = index[(f[0], g[1], tuple(g[2][x] for x in f[2]))]
    obj_names = tuple(names) if names else tuple(f"B{o}" for o in range(n))
    arr_names = tuple(
        f"id_{obj_names[d]}" if i < n else f"b{i}" for i, (d, _, _) in enumerate(keys)
    )
    cat = FiniteCategory(
        n, tuple((d, c) for d, c, _ in keys), tuple(range(n)), comp, obj_names, arr_names
    )
    return ConcreteCategory(cat, tuple(sizes), tuple(v for _, _, v in keys))


def random_base(rng: random.Random, max_objects=3, max_arrows=6) -> ConcreteCategory:
    while True:
        n = rng.randint(1, max_objects)
        sizes = [rng.randint(1, 2) for _ in range(n)]
        gens = []
        for _ in range(rng.randint(0, 3)):
            d, c = rng.randrange(n), rng.randrange(n)
            gens.append((d, c, tuple(rng.randrange(sizes[c]) for _ in range(sizes[d]))))
        base = concrete_category(sizes, gens, max_arrows=max_arrows)
        if base is not None:
            return base


def _subsets(k):
    return [frozenset(c) for r in range(k + 1) for c in itertools.combinations(range(k), r)]


def grothendieck_fibration(base: ConcreteCategory, families, tags, tag_order, monoid, shuffle=None) -> CatFunctor:
    """Total category of the split fibration described in the module docstring.

    ``families[A]`` is a set of subsets of A closed under preimage,
    ``tag_order(t, t2)`` a preorder on ``range(tags)``.
    """
    B = base.category
    m, mult = MONOIDS[monoid]
    objects = [(A, U, t) for A in range(B.n_objects) for U in sorted(families[A], key=sorted) for t in range(tags)]
    oix = {o: i for i, o in enumerate(objects)}

    def pre(alpha, U):
        vals = base.functions[alpha]
        return frozenset(x for x in range(len(vals)) if vals[x] in U)

    def leq(x, y):
        return x[1] <= y[1] and tag_order(x[2], y[2])

    arrows = []
    for alpha in range(B.n_arrows):
        A, Bo = B.arrows[alpha]
        for x in objects:
            if x[0] != A:
                continue
            for y in objects:
                if y[0] != Bo:
                    continue
                if leq(x, (A, pre(alpha, y[1]), y[2])):
                    for g in range(m):
                        arrows.append((alpha, oix[x], oix[y], g))
    if shuffle is not None:
        shuffle(arrows)
    aix = {a: i for i, a in enumerate(arrows)}
    by_dom = {}
    for a in arrows:
        by_dom.setdefault(a[1], []).append(a)
    comp = {}
    for a in arrows:
        for b in by_dom.get(a[2], ()):
            c = (B.comp[(a[0], b[0])], a[1], b[2], mult[a[3]][b[3]])
            comp[(aix[a], aix[b])] = aix[c]
    ident = tuple(aix[(B.identity[objects[i][0]], i, i, 0)] for i in range(len(objects)))
    obj_names = tuple(
        f"{B.object_name(A)}_{''.join(map(str, sorted(U))) or 'e'}_{t}" for A, U, t in objects
    )
    arr_names = tuple(f"x{i}" for i in range(len(arrows)))
    total = FiniteCategory(
        len(objects), tuple((d, c) for _, d, c, _ in arrows), ident, comp, obj_names, arr_names
    )
    return CatFunctor(total, B, tuple(o[0] for o in objects), tuple(a[0] for a in arrows), "pi")


def random_fibration(rng: random.Random, max_arrows=40, max_base_objects=3, max_base_arrows=6) -> CatFunctor:
    """A random fibration with base <= 3 objects / <= 6 arrows and total <= 40 arrows.

    Sizes are spread over the whole range by drawing a lower bound per call.
    """
    floor = rng.randint(1, max(1, (2 * max_arrows) // 3))
    while True:
        base = random_base(rng, max_base_objects, max_base_arrows)
        B = base.category
        families = []
        for A in range(B.n_objects):
            subs = _subsets(base.sizes[A])
            families.append(set(rng.sample(subs, rng.randint(0, min(3, len(subs))))))
        changed = True
        while changed:
            changed = False
            for alpha in range(B.n_arrows):
                A, Bo = B.arrows[alpha]
                vals = base.functions[alpha]
                for U in list(families[Bo]):
                    P = frozenset(x for x in range(len(vals)) if vals[x] in U)
                    if P not in families[A]:
                        families[A].add(P)
                        changed = True
        if not any(families):
            continue
        tags = rng.choice([1, 1, 2])
        kind = rng.choice(["discrete", "chaotic", "chain"])
        order = {
            "discrete": lambda s, t: s == t,
            "chaotic": lambda s, t: True,
            "chain": lambda s, t: s <= t,
        }[kind]
        monoid = rng.choice(["trivial", "trivial", "Z2", "idem"])
        pi = grothendieck_fibration(base, families, tags, order, monoid, shuffle=rng.shuffle)
        if floor <= pi.source.n_arrows <= max_arrows:
            return pi
        floor = max(1, floor - 1)


def _search_functors(source: FiniteCategory, target: FiniteCategory, rng=None, obj_map=None, limit=None):
    """Backtracking enumeration of functors source -> target.

    With ``rng`` the candidate order is randomized.
    """
    S, T = source, target
    order = list(range(S.n_objects))
    found = 0

    def choices(seq):
        seq = list(seq)
        if rng is not None:
            rng.shuffle(seq)
        return seq

    non_id = [f for f in range(S.n_arrows) if not S.is_identity(f)]

    def assign_arrows(omap, amap, i):
        nonlocal found
        if i == len(non_id):
            yield tuple(omap), tuple(amap)
            return
        f = non_id[i]
        if amap[f] is not None:
            yield from assign_arrows(omap, amap, i + 1)
            return
        d, c = S.arrows[f]
        for cand in choices(T.hom(omap[d], omap[c])):
            trial = list(amap)
            if _propagate(S, T, trial, f, cand):
                yield from assign_arrows(omap, trial, i + 1)

    def assign_objects(omap, i):
        if i == len(order):
            amap = [None] * S.n_arrows
            for o in range(S.n_objects):
                amap[S.identity[o]] = T.identity[omap[o]]
            if not all(_propagate(S, T, amap, S.identity[o], T.identity[omap[o]], force=True) for o in range(S.n_objects)):
                return
            yield from assign_arrows(omap, amap, 0)
            return
        o = order[i]
        for cand in choices(range(T.n_objects)):
            omap[o] = cand
            if all(
                T.hom(omap[d], omap[c])
                for f in S.arrows_from(o) + S.arrows_into(o)
                for d, c in (S.arrows[f],)
                if omap[d] is not None and omap[c] is not None
            ):
                yield from assign_objects(omap, i + 1)
        omap[order[i]] = None

    start = list(obj_map) if obj_map is not None else [None] * S.n_objects
    gen = assign_arrows(start, _initial_amap(S, T, start), 0) if obj_map is not None else assign_objects(start, 0)
    for omap, amap in gen:
        if None in amap:
            continue
        yield CatFunctor(S, T, omap, amap)
        found += 1
        if limit is not None and found >= limit:
            return


def _initial_amap(S, T, omap):
    amap = [None] * S.n_arrows
    for o in range(S.n_objects):
        amap[S.identity[o]] = T.identity[omap[o]]
    return amap


def _propagate(S, T, amap, f, value, force=False) -> bool:
    """Set amap[f] = value and close under composition; False on conflict."""
    stack = [(f, value)]
    if force:
        amap[f] = None
    while stack:
        a, val = stack.pop()
        if amap[a] is not None:
            if amap[a] != val:
                return False
            continue
        amap[a] = val
        for b in S.arrows_from(S.cod(a)):
            if amap[b] is not None:
                fv = T.comp.get((val, amap[b]))
                if fv is None:
                    return False
                stack.append((S.comp[(a, b)], fv))
        for b in S.arrows_into(S.dom(a)):
            if amap[b] is not None:
                fv = T.comp.get((amap[b], val))
                if fv is None:
                    return False
                stack.append((S.comp[(b, a)], fv))
    return True


def enumerate_functors(source: FiniteCategory, target: FiniteCategory, limit=None):
    """All functors source -> target (lazily), in deterministic order."""
    return _search_functors(source, target, limit=limit)


def random_functor(source: FiniteCategory, target: FiniteCategory, rng: random.Random) -> CatFunctor:
    """A functor chosen by randomized backtracking (first solution found)."""
    for F in _search_functors(source, target, rng=rng, limit=1):
        return F
    raise ValueError("no functor exists")
