"""The fibrewise dual X* of a finite fibration and the double-dual isomorphism.

An arrow X -> Y of X* over alpha is a class of spans X <-v- P -h-> Y
with v vertical and h Cartesian over alpha.  Two spans are identified
when a vertical isomorphism s: P' -> P carries one to the other,
s.v = v' and s.h = h'.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

from .cartesian import Cleavage, is_cartesian, make_cleavage, vertical_factor
from .category import CatFunctor, FiniteCategory, fiber, validate_category, validate_functor
from .errors import InternalConsistencyError, PreconditionError
from .glue import GlueData, glue_functor, is_over


@dataclass(frozen=True)
class VhSpan:
    apex: int
    vertical: int
    horizontal: int
    fibration: CatFunctor = field(repr=False, compare=False)

    @property
    def source(self) -> int:
        return self.fibration.source.cod(self.vertical)

    @property
    def target(self) -> int:
        return self.fibration.source.cod(self.horizontal)

    @property
    def base_arrow(self) -> int:
        return self.fibration.arr_map[self.horizontal]

    @property
    def pair(self) -> tuple[int, int]:
        return (self.vertical, self.horizontal)


def make_span(pi: CatFunctor, vertical: int, horizontal: int) -> VhSpan:
    total = pi.source
    if total.dom(vertical) != total.dom(horizontal):
        raise PreconditionError("span legs have different apexes")
    if not pi.is_vertical(vertical):
        raise PreconditionError(f"{total.arrow_name(vertical)} is not vertical")
    if not is_cartesian(pi, horizontal):
        raise PreconditionError(f"{total.arrow_name(horizontal)} is not Cartesian")
    return VhSpan(total.dom(vertical), vertical, horizontal, pi)


@dataclass(frozen=True)
class ComorphismClass:
    representatives: tuple[VhSpan, ...]
    canonical: VhSpan
    source: int
    target: int
    base_arrow: int

    @property
    def key(self) -> frozenset[tuple[int, int]]:
        """The class as a set of (vertical, horizontal) pairs; cleavage independent."""
        return frozenset(s.pair for s in self.representatives)


def _vertical_isos_into(pi: CatFunctor, P: int) -> list[int]:
    total = pi.source
    A = pi.obj_map[P]
    idA = pi.target.identity[A]
    return [
        s
        for Q in pi.objects_over(A)
        for s in pi.members_over(idA, Q, P)
        if total.is_invertible(s)
    ]


def equivalent_spans(span: VhSpan) -> list[VhSpan]:
    """All spans related to ``span``: (s.v, s.h) for vertical isos s into the apex."""
    pi = span.fibration
    total = pi.source
    out = {
        (total.comp[(s, span.vertical)], total.comp[(s, span.horizontal)]): total.dom(s)
        for s in _vertical_isos_into(pi, span.apex)
    }
    return [VhSpan(P, v, h, pi) for (v, h), P in sorted(out.items())]


def span_witness(s1: VhSpan, s2: VhSpan) -> int | None:
    """The vertical iso s: apex2 -> apex1 with s.v1 = v2 and s.h1 = h2, if any."""
    pi = s1.fibration
    total = pi.source
    found = [
        s
        for s in _vertical_isos_into(pi, s1.apex)
        if total.dom(s) == s2.apex
        and total.comp[(s, s1.vertical)] == s2.vertical
        and total.comp[(s, s1.horizontal)] == s2.horizontal
    ]
    if len(found) > 1:
        raise InternalConsistencyError(f"span equivalence witness not unique: {found}")
    return found[0] if found else None


def canonicalize(cleavage: Cleavage, span: VhSpan) -> VhSpan:
    """The representative whose horizontal leg is the chosen lift."""
    pi = span.fibration
    c = cleavage.lift(span.base_arrow, span.target)
    s = vertical_factor(pi, c, span.horizontal)
    return VhSpan(pi.source.dom(c), pi.source.comp[(s, span.vertical)], c, pi)


def comorphism_class(cleavage: Cleavage, span: VhSpan) -> ComorphismClass:
    return ComorphismClass(
        tuple(equivalent_spans(span)),
        canonicalize(cleavage, span),
        span.source,
        span.target,
        span.base_arrow,
    )


def all_spans(pi: CatFunctor) -> list[VhSpan]:
    total = pi.source
    out = []
    for h in range(total.n_arrows):
        if not is_cartesian(pi, h):
            continue
        P = total.dom(h)
        idA = pi.target.identity[pi.obj_map[P]]
        for X in pi.objects_over(pi.obj_map[P]):
            for v in pi.members_over(idA, P, X):
                out.append(VhSpan(P, v, h, pi))
    return out


def compose_spans(cleavage: Cleavage, s1: VhSpan, s2: VhSpan, check_independence: bool = False) -> ComorphismClass:
    """{(v1, h1)}.{(v2, h2)} = {(w.v1, k.h2)}.

    k is the chosen lift of pi(h1) into the apex of s2 and w the vertical
    with w.h1 = k.v2.  With ``check_independence`` every pair of
    representatives is composed and required to land in one class.
    """
    pi = s1.fibration
    total = pi.source
    if s1.target != s2.source:
        raise PreconditionError("spans are not composable")

    def raw(a: VhSpan, b: VhSpan) -> VhSpan:
        k = cleavage.lift(a.base_arrow, b.apex)
        w = vertical_factor(pi, total.comp[(k, b.vertical)], a.horizontal)
        return VhSpan(total.dom(k), total.comp[(w, a.vertical)], total.comp[(k, b.horizontal)], pi)

    result = comorphism_class(cleavage, raw(s1, s2))
    if check_independence:
        for a in equivalent_spans(s1):
            for b in equivalent_spans(s2):
                if canonicalize(cleavage, raw(a, b)) != result.canonical:
                    raise InternalConsistencyError(
                        f"composite depends on representatives: {a.pair}, {b.pair}"
                    )
    return result


@dataclass(frozen=True, eq=False)
class DualFibration:
    category: FiniteCategory
    projection: CatFunctor
    class_of: tuple[ComorphismClass, ...]
    span_index: Mapping[tuple[int, int], int]
    original: CatFunctor
    cleavage: Cleavage

    def arrow_of(self, vertical: int, horizontal: int) -> int:
        """Dual arrow containing the span (vertical, horizontal)."""
        return self.span_index[(vertical, horizontal)]

    def dual_cleavage(self) -> Cleavage:
        """(alpha, Y) -> class of (1, c(alpha, Y))."""
        total = self.original.source
        choice = {
            key: self.arrow_of(total.identity[total.dom(c)], c) for key, c in self.cleavage.choice.items()
        }
        return Cleavage(self.projection, choice)


def build_dual(pi: CatFunctor, cleavage: Cleavage | None = None, check: bool = True) -> DualFibration:
    """Materialize X* as an explicit finite category with its projection to the base."""
    cleavage = cleavage or make_cleavage(pi)
    total = pi.source
    classes: dict[tuple[int, int], ComorphismClass] = {}
    for span in all_spans(pi):
        canon = canonicalize(cleavage, span)
        if canon.pair not in classes:
            classes[canon.pair] = comorphism_class(cleavage, canon)
    ordered = sorted(
        classes.values(),
        key=lambda c: (c.base_arrow, c.source, c.target, c.canonical.vertical),
    )
    index = {c.canonical.pair: i for i, c in enumerate(ordered)}
    span_index = {s.pair: index[c.canonical.pair] for c in ordered for s in c.representatives}
    if len(span_index) != sum(len(c.representatives) for c in ordered):
        raise InternalConsistencyError("span classes overlap")
    arrows = tuple((c.source, c.target) for c in ordered)
    ident = tuple(span_index[(total.identity[X], total.identity[X])] for X in range(total.n_objects))
    outgoing: dict[int, list[int]] = {}
    for i, c in enumerate(ordered):
        outgoing.setdefault(c.source, []).append(i)
    comp = {}
    for i, c1 in enumerate(ordered):
        for j in outgoing.get(c1.target, ()):
            comp[(i, j)] = index[compose_spans(cleavage, c1.canonical, ordered[j].canonical).canonical.pair]
    names = tuple(_class_name(total, c) for c in ordered)
    cat = FiniteCategory(total.n_objects, arrows, ident, comp, total.object_names, names)
    proj = CatFunctor(cat, pi.target, pi.obj_map, tuple(c.base_arrow for c in ordered), "pi*")
    dual = DualFibration(cat, proj, tuple(ordered), span_index, pi, cleavage)
    if check:
        for report in (validate_category(cat), validate_functor(proj)):
            if not report.ok:
                raise InternalConsistencyError(f"dual construction broke: {report.first.message}")
    return dual


def _class_name(total: FiniteCategory, c: ComorphismClass) -> str:
    v, h = c.canonical.pair
    if total.is_identity(v) and total.is_identity(h):
        return f"id_{total.object_name(c.source)}"
    return f"[{total.arrow_name(v)},{total.arrow_name(h)}]"


Kind = Literal["vertical", "cartesian", "both", "neither"]


def classify_dual_arrow(dual: DualFibration, g: int, cross_check: bool = True) -> Kind:
    """Classify by representative form, optionally cross-checked by brute force."""
    total = dual.original.source
    cls = dual.class_of[g]
    vertical = any(total.is_identity(s.horizontal) for s in cls.representatives)
    cartesian = any(total.is_identity(s.vertical) for s in cls.representatives)
    if cross_check:
        brute = bool(is_cartesian(dual.projection, g))
        if brute != cartesian:
            raise InternalConsistencyError(
                f"dual arrow {g}: representative form says cartesian={cartesian}, brute force says {brute}"
            )
        if dual.projection.is_vertical(g) != vertical:
            raise InternalConsistencyError(f"dual arrow {g}: verticality mismatch")
        if cartesian and not all(total.is_invertible(s.vertical) for s in cls.representatives):
            raise InternalConsistencyError(f"Cartesian dual arrow {g} has a non-invertible vertical leg")
    if vertical and cartesian:
        return "both"
    return "vertical" if vertical else "cartesian" if cartesian else "neither"


@dataclass(frozen=True, eq=False)
class DoubleDual:
    functor: CatFunctor
    first: DualFibration
    second: DualFibration
    is_isomorphism: bool
    over_base: bool

    @property
    def ok(self) -> bool:
        return self.is_isomorphism and self.over_base

    def arrow_table(self) -> list[tuple[str, str]]:
        X, XX = self.functor.source, self.functor.target
        return [(X.arrow_name(f), XX.arrow_name(self.functor.arr_map[f])) for f in range(X.n_arrows)]


def double_dual_iso(pi: CatFunctor, cleavage: Cleavage | None = None) -> DoubleDual:
    """y: X -> X** glued from y(v) = ((v,1),1) and y(h) = (1,(1,h))."""
    cleavage = cleavage or make_cleavage(pi)
    total = pi.source
    d1 = build_dual(pi, cleavage)
    d2 = build_dual(d1.projection, d1.dual_cleavage())
    one = total.identity
    one1 = d1.category.identity

    fibers = {}
    for A in range(pi.target.n_objects):
        fb = fiber(pi, A)
        arr = []
        for v in fb.arrows:
            g = d1.arrow_of(v, one[total.dom(v)])  # (v,1): cod v -> dom v in X*
            arr.append(d2.arrow_of(g, one1[d1.category.dom(g)]))
        fibers[A] = CatFunctor(fb.category, d2.category, fb.objects, tuple(arr))
    cart = {}
    for h in range(total.n_arrows):
        if is_cartesian(pi, h):
            g = d1.arrow_of(one[total.dom(h)], h)
            cart[h] = d2.arrow_of(one1[d1.category.dom(g)], g)
    data = GlueData(pi, d2.category, fibers, cart, d2.projection)
    y = glue_functor(data, cleavage)
    bij = (
        sorted(y.obj_map) == list(range(d2.category.n_objects))
        and sorted(y.arr_map) == list(range(d2.category.n_arrows))
        and total.n_arrows == d2.category.n_arrows
    )
    return DoubleDual(y, d1, d2, bij and validate_functor(y).ok, is_over(y, pi, d2.projection))
