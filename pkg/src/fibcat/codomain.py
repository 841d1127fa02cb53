"""Explicit codomain fibrations and finite encodings of family fibrations.

``arrow_category`` builds B^2 for any finite B: objects are the arrows
of B and an arrow x -> y is a commuting square (t, alpha) with
t.y = x.alpha.  The codomain functor sends it to alpha.

``FamilyEncoding`` realizes families of finite sets over a concrete base
as an explicit split fibration, so the generic dual construction can be
compared with the family formulas.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .cartesian import Cleavage, is_cartesian
from .category import CatFunctor, FiniteCategory
from .dual import VhSpan, compose_spans
from .errors import MissingPullback, PreconditionError
from .finset import FamilyComorphism, FinFamilyBundle, FinFunction, all_functions
from .generators import ConcreteCategory, concrete_category


@dataclass(frozen=True, eq=False)
class ArrowCategory:
    base: FiniteCategory
    codomain: CatFunctor  # d1: B^2 -> B
    squares: tuple[tuple[int, int], ...]  # arrow index -> (t, alpha)

    @property
    def category(self) -> FiniteCategory:
        return self.codomain.source


def commuting_squares(B: FiniteCategory, x: int, y: int) -> list[tuple[int, int]]:
    """All (t, alpha) with t.y = x.alpha, t: dom x -> dom y, alpha: cod x -> cod y."""
    out = []
    for t in B.hom(B.dom(x), B.dom(y)):
        ty = B.comp[(t, y)]
        for alpha in B.hom(B.cod(x), B.cod(y)):
            if B.comp[(x, alpha)] == ty:
                out.append((t, alpha))
    return out


def arrow_category(B: FiniteCategory) -> ArrowCategory:
    squares = []
    for x in range(B.n_arrows):
        for y in range(B.n_arrows):
            for t, alpha in commuting_squares(B, x, y):
                squares.append((x, y, t, alpha))
    index = {s: i for i, s in enumerate(squares)}
    by_dom: dict[int, list[tuple]] = {}
    for s in squares:
        by_dom.setdefault(s[0], []).append(s)
    comp = {}
    for s in squares:
        for r in by_dom.get(s[1], ()):
            comp[(index[s], index[r])] = index[(s[0], r[1], B.comp[(s[2], r[2])], B.comp[(s[3], r[3])])]
    ident = tuple(index[(x, x, B.identity[B.dom(x)], B.identity[B.cod(x)])] for x in range(B.n_arrows))
    names = B.arrow_name
    cat = FiniteCategory(
        B.n_arrows,
        tuple((s[0], s[1]) for s in squares),
        ident,
        comp,
        tuple(names(x) for x in range(B.n_arrows)),
        tuple(f"({names(s[2])},{names(s[3])})" for s in squares),
    )
    d1 = CatFunctor(cat, B, tuple(B.cod(x) for x in range(B.n_arrows)), tuple(s[3] for s in squares), "d1")
    return ArrowCategory(B, d1, tuple((s[2], s[3]) for s in squares))


def is_pullback_square(B: FiniteCategory, x: int, t: int, alpha: int, y: int) -> bool:
    """Brute-force universal property of the square t.y = x.alpha over the cospan (alpha, y)."""
    if B.comp.get((t, y)) != B.comp.get((x, alpha)) or B.comp.get((t, y)) is None:
        return False
    X, A, Y = B.dom(x), B.cod(x), B.dom(y)
    for W in range(B.n_objects):
        for a in B.hom(W, A):
            aa = B.comp[(a, alpha)]
            for q in B.hom(W, Y):
                if B.comp[(q, y)] != aa:
                    continue
                us = [u for u in B.hom(W, X) if B.comp[(u, x)] == a and B.comp[(u, t)] == q]
                if len(us) != 1:
                    return False
    return True


def find_pullback(B: FiniteCategory, alpha: int, y: int) -> tuple[int, int] | None:
    """Some (x, t) completing the cospan (alpha, y) to a pullback, lowest indices first."""
    for x in B.arrows_into(B.dom(alpha)):
        for t in B.hom(B.dom(x), B.dom(y)):
            if is_pullback_square(B, x, t, alpha, y):
                return x, t
    return None


def encode_codomain_fibration(B: FiniteCategory, require_pullbacks: bool = True) -> ArrowCategory:
    """d1: B^2 -> B; with ``require_pullbacks`` every cospan must have a pullback."""
    if require_pullbacks:
        for alpha in range(B.n_arrows):
            for y in B.arrows_into(B.cod(alpha)):
                if find_pullback(B, alpha, y) is None:
                    raise MissingPullback((alpha, y))
    return arrow_category(B)


def finset_skeleton(max_size: int = 2) -> ConcreteCategory:
    """Sets {0..n-1} for n <= max_size and every function between them."""
    sizes = list(range(max_size + 1))
    gens = [
        (d, c, f.values)
        for d in sizes
        for c in sizes
        for f in all_functions(d, c)
        if not (d == c and f.values == tuple(range(d)))
    ]
    base = concrete_category(sizes, gens, names=[f"n{k}" for k in sizes])
    cat = base.category
    names = tuple(
        f"id_n{base.sizes[d]}" if cat.is_identity(i) else f"f{base.sizes[d]}{base.sizes[c]}_{''.join(map(str, base.functions[i]))}"
        for i, (d, c) in enumerate(cat.arrows)
    )
    return ConcreteCategory(
        FiniteCategory(cat.n_objects, cat.arrows, cat.identity, cat.comp, cat.object_names, names),
        base.sizes,
        base.functions,
    )


def function_of(base: ConcreteCategory, f: int) -> FinFunction:
    d, c = base.category.arrows[f]
    return FinFunction(base.sizes[d], base.sizes[c], base.functions[f])


def poset_leq(n: int, covers: Sequence[tuple[int, int]]) -> list[list[bool]]:
    leq = [[i == j for j in range(n)] for i in range(n)]
    for i, j in covers:
        leq[i][j] = True
    for k in range(n):
        for i in range(n):
            for j in range(n):
                leq[i][j] = leq[i][j] or (leq[i][k] and leq[k][j])
    return leq


def meet(leq: list[list[bool]], a: int, b: int) -> int | None:
    """Greatest lower bound of a and b, if it exists."""
    lower = [c for c in range(len(leq)) if leq[c][a] and leq[c][b]]
    top = [c for c in lower if all(leq[d][c] for d in lower)]
    return top[0] if top else None


# Families of finite sets over a concrete base, as an explicit fibration.


@dataclass(frozen=True, eq=False)
class FamilyEncoding:
    base: ConcreteCategory
    fibration: CatFunctor
    cleavage: Cleavage
    objects: tuple[tuple[int, FinFamilyBundle], ...]
    arrow_data: tuple[tuple[int, int, int, tuple[tuple[int, ...], ...]], ...]
    arrow_index: Mapping[tuple, int]

    def object_of(self, base_object: int, fam: FinFamilyBundle) -> int:
        return self.objects.index((base_object, fam))

    def encode(self, phi: int, f: FamilyComorphism) -> VhSpan:
        """The span (f read as alpha*Y -> X, chosen lift alpha*Y -> Y)."""
        B = self.base.category
        A, Bo = B.arrows[phi]
        X, Y = self.object_of(A, f.source), self.object_of(Bo, f.target)
        c = self.cleavage.lift(phi, Y)
        P = self.fibration.source.dom(c)
        v = self.arrow_index[(B.identity[A], P, X, tuple(g.values for g in f.components))]
        return VhSpan(P, v, c, self.fibration)

    def decode(self, span: VhSpan) -> FamilyComorphism:
        """Read a span whose horizontal leg is a chosen lift back as a comorphism."""
        phi, P, Y, comps = self.arrow_data[span.horizontal]
        if comps != tuple(tuple(range(self.objects[Y][1].fibers[self.base.functions[phi][p]])) for p in range(len(comps))):
            raise PreconditionError("span is not in canonical form")
        _, _, X, vcomps = self.arrow_data[span.vertical]
        src, tgt, pfam = self.objects[X][1], self.objects[Y][1], self.objects[P][1]
        components = tuple(FinFunction(pfam.fibers[a], src.fibers[a], vals) for a, vals in enumerate(vcomps))
        return FamilyComorphism(function_of(self.base, phi), src, tgt, components)

    def compose(self, phi: int, f: FamilyComorphism, psi: int, g: FamilyComorphism) -> FamilyComorphism:
        """Compose through the generic dual-fibration machinery."""
        cls = compose_spans(self.cleavage, self.encode(phi, f), self.encode(psi, g))
        return self.decode(cls.canonical)


def reindex(base: ConcreteCategory, phi: int, fam: FinFamilyBundle) -> FinFamilyBundle:
    return FinFamilyBundle(tuple(fam.fibers[v] for v in base.functions[phi]))


def family_encoding(base: ConcreteCategory, families: Mapping[int, Sequence[FinFamilyBundle]], verify: bool = False) -> FamilyEncoding:
    """All maps of families over base arrows, among the given families closed under reindexing."""
    B = base.category
    fams = {A: set(families.get(A, ())) for A in range(B.n_objects)}
    changed = True
    while changed:
        changed = False
        for phi in range(B.n_arrows):
            A, Bo = B.arrows[phi]
            for F in list(fams[Bo]):
                G = reindex(base, phi, F)
                if G not in fams[A]:
                    fams[A].add(G)
                    changed = True
    objects = tuple((A, F) for A in range(B.n_objects) for F in sorted(fams[A], key=lambda F: F.fibers))
    arrows = []
    for phi in range(B.n_arrows):
        A, Bo = B.arrows[phi]
        vals = base.functions[phi]
        for i, (Ai, E) in enumerate(objects):
            if Ai != A:
                continue
            for j, (Bj, F) in enumerate(objects):
                if Bj != Bo:
                    continue
                choices = [
                    [f.values for f in all_functions(E.fibers[p], F.fibers[vals[p]])] for p in range(len(vals))
                ]
                for comps in itertools.product(*choices):
                    arrows.append((phi, i, j, tuple(comps)))
    index = {a: k for k, a in enumerate(arrows)}
    by_dom: dict[int, list[int]] = {}
    for k, a in enumerate(arrows):
        by_dom.setdefault(a[1], []).append(k)
    comp = {}
    for k, (phi, i, j, c1) in enumerate(arrows):
        vals = base.functions[phi]
        for m in by_dom.get(j, ()):
            psi, _, l, c2 = arrows[m]
            c = tuple(tuple(c2[vals[p]][e] for e in c1[p]) for p in range(len(c1)))
            comp[(k, m)] = index[(B.comp[(phi, psi)], i, l, c)]
    ident = tuple(
        index[(B.identity[A], i, i, tuple(tuple(range(k)) for k in E.fibers))] for i, (A, E) in enumerate(objects)
    )
    total = FiniteCategory(
        len(objects),
        tuple((a[1], a[2]) for a in arrows),
        ident,
        comp,
        tuple(f"{B.object_name(A)}{list(E.fibers)}" for A, E in objects),
        tuple(f"m{k}" for k in range(len(arrows))),
    )
    pi = CatFunctor(total, B, tuple(A for A, _ in objects), tuple(a[0] for a in arrows), "fam")
    oix = {o: i for i, o in enumerate(objects)}
    choice = {}
    for phi in range(B.n_arrows):
        A, Bo = B.arrows[phi]
        for j, (Bj, F) in enumerate(objects):
            if Bj != Bo:
                continue
            G = reindex(base, phi, F)
            comps = tuple(tuple(range(F.fibers[v])) for v in base.functions[phi])
            choice[(phi, j)] = index[(phi, oix[(A, G)], j, comps)]
    cleavage = Cleavage.from_choice(pi, choice) if verify else Cleavage(pi, choice)
    return FamilyEncoding(base, pi, cleavage, objects, tuple(arrows), index)


def base_for_maps(alpha: FinFunction, beta: FinFunction | None = None) -> ConcreteCategory:
    """The concrete base A -alpha-> B -beta-> C on three distinct objects (or two)."""
    if beta is None:
        return concrete_category([alpha.dom_size, alpha.cod_size], [(0, 1, alpha.values)], names=["A", "B"])
    if alpha.cod_size != beta.dom_size:
        raise PreconditionError("base maps are not composable")
    return concrete_category(
        [alpha.dom_size, alpha.cod_size, beta.cod_size],
        [(0, 1, alpha.values), (1, 2, beta.values)],
        names=["A", "B", "C"],
    )


def generic_composite(f: FamilyComorphism, g: FamilyComorphism, verify: bool = False) -> FamilyComorphism:
    """f.g computed in the dual of an explicit encoding, decoded back to families."""
    base = base_for_maps(f.base_map, g.base_map)
    enc = family_encoding(base, {0: [f.source], 1: [f.target], 2: [g.target]}, verify=verify)
    phi = base.category.hom(0, 1)[0]
    psi = base.category.hom(1, 2)[0]
    return enc.compose(phi, f, psi, g)
