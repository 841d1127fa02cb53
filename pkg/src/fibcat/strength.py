"""Strong endofunctors of finite sets, the flow transform and prolongation.

A finite set is a size n with elements 0..n-1.  Products Q x B index
(q, b) as q * |B| + b and exponentials B^D index a function D -> B by
its value tuple read as a base-|B| numeral, first digit most
significant (the order of ``itertools.product``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .category import Failure, ValidationReport
from .errors import PreconditionError, ProductNotPreserved, SectionViolation, ShapeMismatch
from .finset import FamilyMorphism, FinFamilyBundle, FinFunction, all_functions


def product_map(f: FinFunction, g: FinFunction) -> FinFunction:
    """f x g on lexicographically indexed products."""
    n = g.dom_size
    m = g.cod_size
    return FinFunction(
        f.dom_size * n, f.cod_size * m, tuple(f(a) * m + g(b) for a in range(f.dom_size) for b in range(n))
    )


def fst(Q: int, B: int) -> FinFunction:
    return FinFunction(Q * B, Q, tuple(q for q in range(Q) for _ in range(B)))


def snd(Q: int, B: int) -> FinFunction:
    return FinFunction(Q * B, B, tuple(b for _ in range(Q) for b in range(B)))


def pairing(f: FinFunction, g: FinFunction) -> FinFunction:
    if f.dom_size != g.dom_size:
        raise ShapeMismatch("pairing needs a common domain")
    return FinFunction(f.dom_size, f.cod_size * g.cod_size, tuple(f(x) * g.cod_size + g(x) for x in range(f.dom_size)))


def inverse(f: FinFunction) -> FinFunction:
    if not f.is_bijection():
        raise PreconditionError("map is not a bijection")
    inv = [0] * f.dom_size
    for x, y in enumerate(f.values):
        inv[y] = x
    return FinFunction(f.cod_size, f.dom_size, tuple(inv))


def power_size(B: int, D: int) -> int:
    return B**D


def power_elements(B: int, D: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(B), repeat=D))


def power_index(values, B: int) -> int:
    out = 0
    for v in values:
        out = out * B + v
    return out


def power_map(f: FinFunction, D: int) -> FinFunction:
    """f^D: postcomposition on function tables."""
    return FinFunction(
        f.dom_size**D, f.cod_size**D, tuple(power_index((f(v) for v in s), f.cod_size) for s in power_elements(f.dom_size, D))
    )


def precompose(g: FinFunction, B: int) -> FinFunction:
    """B^g: B^D2 -> B^D1 for g: D1 -> D2."""
    return FinFunction(
        B**g.cod_size, B**g.dom_size, tuple(power_index((s[g(d)] for d in range(g.dom_size)), B) for s in power_elements(B, g.cod_size))
    )


def evaluation(D: int, B: int) -> FinFunction:
    """ev: D x B^D -> B."""
    return FinFunction(D * B**D, B, tuple(s[d] for d in range(D) for s in power_elements(B, D)))


def eval_at(d: int, D: int, B: int) -> FinFunction:
    return FinFunction(B**D, B, tuple(s[d] for s in power_elements(B, D)))


@dataclass(frozen=True, eq=False)
class FinEndofunctor:
    name: str
    obj: Callable[[int], int]
    arr: Callable[[FinFunction], FinFunction]
    projection: Callable[[int], FinFunction] | None = None  # p_B: F(B) -> B

    def __call__(self, f: FinFunction) -> FinFunction:
        return self.arr(f)


def identity_functor() -> FinEndofunctor:
    return FinEndofunctor("identity", lambda n: n, lambda f: f, lambda n: FinFunction.identity(n))


def square_functor() -> FinEndofunctor:
    """X x X, a bundle over X by the first projection."""
    return FinEndofunctor("square", lambda n: n * n, lambda f: product_map(f, f), lambda n: fst(n, n))


def plus_one_functor() -> FinEndofunctor:
    """X + 1 with the new point stored last; it preserves no products."""

    def arr(f):
        return FinFunction(f.dom_size + 1, f.cod_size + 1, f.values + (f.cod_size,))

    return FinEndofunctor("plus1", lambda n: n + 1, arr, None)


def power_functor(D: int) -> FinEndofunctor:
    """X^D, a bundle over X by evaluation at 0."""
    if D < 1:
        raise PreconditionError("exponent must be a non-empty pointed set")
    return FinEndofunctor(f"power{D}", lambda n: n**D, lambda f: power_map(f, D), lambda n: eval_at(0, D, n))


def constant_product_functor(K: int) -> FinEndofunctor:
    """K x X, a bundle over X by the second projection; its naturality squares are pullbacks."""
    return FinEndofunctor(
        f"const{K}",
        lambda n: K * n,
        lambda f: product_map(FinFunction.identity(K), f),
        lambda n: snd(K, n),
    )


def compose_functors(F: FinEndofunctor, G: FinEndofunctor) -> FinEndofunctor:
    """G after F."""
    proj = None
    if F.projection is not None and G.projection is not None:
        proj = lambda n: G.projection(F.obj(n)).then(F.projection(n))  # noqa: E731
    return FinEndofunctor(f"{G.name}.{F.name}", lambda n: G.obj(F.obj(n)), lambda f: G.arr(F.arr(f)), proj)


def check_functor_laws(F: FinEndofunctor, max_size: int = 3) -> ValidationReport:
    fails = []
    for n in range(max_size + 1):
        if F.arr(FinFunction.identity(n)) != FinFunction.identity(F.obj(n)):
            fails.append(Failure("identity", f"{F.name} does not preserve the identity of {n}", (n,)))
    for a, b, c in itertools.product(range(max_size + 1), repeat=3):
        for f in all_functions(a, b):
            for g in all_functions(b, c):
                if F.arr(f.then(g)) != F.arr(f).then(F.arr(g)):
                    fails.append(Failure("composition", f"{F.name} breaks composition", (f.values, g.values)))
                    return ValidationReport(tuple(fails))
    return ValidationReport(tuple(fails))


@dataclass(frozen=True, eq=False)
class StrengthData:
    """Tensorial strength t''_{Q,B}: Q x F(B) -> F(Q x B)."""

    functor: FinEndofunctor
    tensorial: Callable[[int, int], FinFunction]
    name: str = "t"

    def __call__(self, Q: int, B: int) -> FinFunction:
        t = self.tensorial(Q, B)
        F = self.functor
        if (t.dom_size, t.cod_size) != (Q * F.obj(B), F.obj(Q * B)):
            raise ShapeMismatch(f"strength component at {(Q, B)} has the wrong shape")
        return t

    def fibrational(self, Q: int, M: int) -> FamilyMorphism:
        """t_{Q,M} as a vertical map Q (x) F(M) -> F(Q x M) of bundles over Q x M."""
        p = self.functor.projection
        if p is None:
            raise PreconditionError(f"{self.functor.name} is not a bundle functor")
        src = product_map(FinFunction.identity(Q), p(M))
        tgt = p(Q * M)
        return as_family_morphism(src, tgt, self(Q, M))


def as_family_morphism(src: FinFunction, tgt: FinFunction, f: FinFunction) -> FamilyMorphism:
    """A map of total sets over a common base, read fibrewise."""
    if src.cod_size != tgt.cod_size or any(tgt(f(x)) != src(x) for x in range(src.dom_size)):
        raise PreconditionError("map does not commute with the bundle projections")
    S, T = FinFamilyBundle.from_map(src), FinFamilyBundle.from_map(tgt)
    rank_t = {}
    for b in range(tgt.cod_size):
        for i, y in enumerate(tgt.preimage(b)):
            rank_t[y] = i
    comps = tuple(
        FinFunction(S.fibers[b], T.fibers[b], tuple(rank_t[f(x)] for x in src.preimage(b))) for b in range(src.cod_size)
    )
    return FamilyMorphism(S, T, comps)


def check_tensorial_strength(t: StrengthData, max_size: int = 3, max_q: int = 3) -> ValidationReport:
    """Naturality in Q and B, the unit law and associativity, exhaustively up to the bounds."""
    F = t.functor
    fails: list[Failure] = []
    sizes = range(max_size + 1)
    qs = range(1, max_q + 1)
    for Q in qs:
        for B, B2 in itertools.product(sizes, repeat=2):
            tB, tB2 = t(Q, B), t(Q, B2)
            for f in all_functions(B, B2):
                lhs = product_map(FinFunction.identity(Q), F(f)).then(tB2)
                rhs = tB.then(F(product_map(FinFunction.identity(Q), f)))
                if lhs != rhs:
                    x = next(i for i in range(lhs.dom_size) if lhs(i) != rhs(i))
                    fails.append(Failure("naturality-B", f"square for f={f.values} at Q={Q} fails at element {x}", (Q, B, B2, f.values, x)))
                    break
    for Q, Q2 in itertools.product(qs, repeat=2):
        for B in sizes:
            tQ, tQ2 = t(Q, B), t(Q2, B)
            for g in all_functions(Q, Q2):
                lhs = product_map(g, FinFunction.identity(F.obj(B))).then(tQ2)
                rhs = tQ.then(F(product_map(g, FinFunction.identity(B))))
                if lhs != rhs:
                    x = next(i for i in range(lhs.dom_size) if lhs(i) != rhs(i))
                    fails.append(Failure("naturality-Q", f"square for g={g.values} at B={B} fails at element {x}", (Q, Q2, B, g.values, x)))
                    break
    for B in sizes:
        if t(1, B) != FinFunction.identity(F.obj(B)):
            fails.append(Failure("unit", f"t''_(1,{B}) is not the identity", (B,)))
    for Q, Q2 in itertools.product(qs, repeat=2):
        for B in sizes:
            # (Q x Q') x F(B) and Q x (Q' x F(B)) share lexicographic indices, as do their F-images.
            lhs = t(Q * Q2, B)
            rhs = product_map(FinFunction.identity(Q), t(Q2, B)).then(t(Q, Q2 * B))
            if lhs != rhs:
                x = next(i for i in range(lhs.dom_size) if lhs(i) != rhs(i))
                fails.append(Failure("associativity", f"associativity fails at Q={Q}, Q'={Q2}, B={B}, element {x}", (Q, Q2, B, x)))
    return ValidationReport(tuple(fails))


def check_projection_triangle(t: StrengthData, max_size: int = 3, max_q: int = 3) -> ValidationReport:
    """t''_{Q,B} followed by p_{Q x B} equals Q x p_B."""
    p = t.functor.projection
    if p is None:
        return ValidationReport.single("bundle", f"{t.functor.name} has no bundle projection")
    fails = []
    for Q in range(1, max_q + 1):
        for B in range(max_size + 1):
            lhs = t(Q, B).then(p(Q * B))
            rhs = product_map(FinFunction.identity(Q), p(B))
            if lhs != rhs:
                x = next(i for i in range(lhs.dom_size) if lhs(i) != rhs(i))
                fails.append(Failure("triangle", f"projection triangle fails at Q={Q}, B={B}, element {x}", (Q, B, x)))
    return ValidationReport(tuple(fails))


def tensorial_fibrational_bridge(t: StrengthData, max_size: int = 3, max_q: int = 3) -> tuple[dict, ValidationReport]:
    """Package t'' as vertical maps over Q x M when the projection triangle commutes."""
    report = check_projection_triangle(t, max_size, max_q)
    if not report.ok:
        return {}, report
    instances = {(Q, M): t.fibrational(Q, M) for Q in range(1, max_q + 1) for M in range(max_size + 1)}
    return instances, report


def product_comparison(F: FinEndofunctor, Q: int, B: int) -> FinFunction:
    """F(Q x B) -> F(Q) x F(B)."""
    return pairing(F(fst(Q, B)), F(snd(Q, B)))


def bundle_comparison(F: FinEndofunctor, Q: int, B: int) -> FinFunction:
    """F(Q x B) -> Q x F(B), (first coordinate of the projection, F(second projection))."""
    if F.projection is None:
        raise PreconditionError(f"{F.name} is not a bundle functor")
    return pairing(F.projection(Q * B).then(fst(Q, B)), F(snd(Q, B)))


@dataclass(frozen=True, eq=False)
class SectionNat:
    functor: FinEndofunctor
    component: Callable[[int], FinFunction]

    def __call__(self, B: int) -> FinFunction:
        return self.component(B)


def check_section(z: SectionNat, max_size: int = 3) -> ValidationReport:
    F = z.functor
    fails = []
    for B in range(max_size + 1):
        if F.projection is not None and z(B).then(F.projection(B)) != FinFunction.identity(B):
            fails.append(Failure("section", f"z_{B} is not a section of the projection", (B,)))
        for B2 in range(max_size + 1):
            for f in all_functions(B, B2):
                if f.then(z(B2)) != z(B).then(F(f)):
                    fails.append(Failure("naturality", f"z is not natural along {f.values}", (B, B2, f.values)))
                    break
    return ValidationReport(tuple(fails))


def zero_section_strength(F: FinEndofunctor, z: SectionNat, max_size: int = 3) -> StrengthData:
    """t''_{Q,B} = (z_Q x F(B)) followed by the inverse product comparison."""
    for Q in range(max_size + 1):
        for B in range(max_size + 1):
            if not product_comparison(F, Q, B).is_bijection():
                raise ProductNotPreserved(F.name, (Q, B))

    def comp(Q, B):
        return product_map(z(Q), FinFunction.identity(F.obj(B))).then(inverse(product_comparison(F, Q, B)))

    return StrengthData(F, comp, f"zero-section({F.name})")


def comparison_inverse_strength(F: FinEndofunctor, max_size: int = 3) -> StrengthData:
    """For a Cartesian bundle functor, the inverse of F(Q x B) -> Q x F(B)."""
    for Q in range(1, max_size + 1):
        for B in range(max_size + 1):
            if not bundle_comparison(F, Q, B).is_bijection():
                raise PreconditionError(f"{F.name} is not Cartesian: comparison at {(Q, B)} is not bijective")
    return StrengthData(F, lambda Q, B: inverse(bundle_comparison(F, Q, B)), f"comparison({F.name})")


def diagonal_section() -> SectionNat:
    return SectionNat(square_functor(), lambda n: FinFunction(n, n * n, tuple(x * n + x for x in range(n))))


def constant_section(D: int) -> SectionNat:
    return SectionNat(power_functor(D), lambda n: FinFunction(n, n**D, tuple(power_index((x,) * D, n) for x in range(n))))


def identity_strength() -> StrengthData:
    F = identity_functor()
    return StrengthData(F, lambda Q, B: FinFunction.identity(Q * B), "identity")


def plus_one_strength() -> StrengthData:
    """(q, x) -> (q, x) and (q, *) -> *."""
    F = plus_one_functor()

    def comp(Q, B):
        return FinFunction(Q * (B + 1), Q * B + 1, tuple(q * B + x if x < B else Q * B for q in range(Q) for x in range(B + 1)))

    return StrengthData(F, comp, "plus1")


def composite_strength(tF: StrengthData, tG: StrengthData) -> StrengthData:
    """t^{GF}_{Q,B} = t^G_{Q,F B} followed by G(t^F_{Q,B})."""
    F, G = tF.functor, tG.functor
    GF = compose_functors(F, G)
    return StrengthData(GF, lambda Q, B: tG(Q, F.obj(B)).then(G(tF(Q, B))), f"{tG.name}.{tF.name}")


def builtin_strengths(D: int = 2, K: int = 2) -> dict[str, StrengthData]:
    sq = diagonal_section()
    pw = constant_section(D)
    return {
        "identity": identity_strength(),
        "square": zero_section_strength(sq.functor, sq),
        "plus1": plus_one_strength(),
        f"power{D}": zero_section_strength(pw.functor, pw),
        f"const{K}": comparison_inverse_strength(constant_product_functor(K)),
    }


def flow_transform(t: StrengthData, D: int, B: int) -> FinFunction:
    """lambda_{D,B}: F(B^D) -> F(B)^D, the transpose of t''_{D,B^D} followed by F(ev)."""
    F = t.functor
    k = F.obj(B**D)
    through = t(D, B**D).then(F(evaluation(D, B)))  # D x F(B^D) -> F(B)
    FB = F.obj(B)
    return FinFunction(k, FB**D, tuple(power_index((through(d * k + w) for d in range(D)), FB) for w in range(k)))


def check_flow(t: StrengthData, max_D: int = 2, max_size: int = 2) -> ValidationReport:
    """The unit law, ev_0 . lambda = F(ev_0), and naturality in B and in pointed D."""
    F = t.functor
    fails = []
    for B in range(max_size + 1):
        if flow_transform(t, 1, B) != FinFunction.identity(F.obj(B)):
            fails.append(Failure("unit", f"lambda_(1,{B}) is not the identity", (B,)))
    for D in range(1, max_D + 1):
        for B in range(max_size + 1):
            lam = flow_transform(t, D, B)
            if lam.then(eval_at(0, D, F.obj(B))) != F(eval_at(0, D, B)):
                fails.append(Failure("bundle", f"ev_0 . lambda != F(ev_0) at D={D}, B={B}", (D, B)))
            for B2 in range(max_size + 1):
                lam2 = flow_transform(t, D, B2)
                for f in all_functions(B, B2):
                    if F(power_map(f, D)).then(lam2) != lam.then(power_map(F(f), D)):
                        fails.append(Failure("naturality-B", f"lambda not natural along {f.values} at D={D}", (D, B, B2, f.values)))
                        break
    for D1, D2 in itertools.product(range(1, max_D + 1), repeat=2):
        for g in all_functions(D1, D2):
            if g(0) != 0:
                continue
            for B in range(max_size + 1):
                lhs = F(precompose(g, B)).then(flow_transform(t, D1, B))
                rhs = flow_transform(t, D2, B).then(precompose(g, F.obj(B)))
                if lhs != rhs:
                    fails.append(Failure("naturality-D", f"lambda not natural along pointed {g.values} at B={B}", (D1, D2, B, g.values)))
    return ValidationReport(tuple(fails))


def is_vector_field(xi: FinFunction, D: int, M: int) -> bool:
    return xi.dom_size == M and xi.cod_size == M**D and xi.then(eval_at(0, D, M)) == FinFunction.identity(M)


def prolong_field(t: StrengthData, D: int, M: int, xi: FinFunction) -> FinFunction:
    """F(xi) followed by lambda_{D,M}; again a section of ev_0."""
    if not is_vector_field(xi, D, M):
        raise SectionViolation("field is not a section of evaluation at 0")
    return t.functor(xi).then(flow_transform(t, D, M))


def constant_field(D: int, M: int) -> FinFunction:
    return FinFunction(M, M**D, tuple(power_index((m,) * D, M) for m in range(M)))


def all_vector_fields(D: int, M: int):
    """Every xi: M -> M^D with xi(m)(0) = m."""
    choices = [[power_index((m,) + rest, M) for rest in itertools.product(range(M), repeat=D - 1)] for m in range(M)]
    for vals in itertools.product(*choices):
        yield FinFunction(M, M**D, vals)


def transform_family(t: StrengthData, Q: int, M: int, h: FinFunction) -> FinFunction:
    """A Q-parametrized map h: Q x M -> N sent to Q x F(M) -> F(N), t'' then F(h)."""
    if h.dom_size != Q * M:
        raise ShapeMismatch(f"family has domain {h.dom_size}, expected {Q * M}")
    return t(Q, M).then(t.functor(h))
