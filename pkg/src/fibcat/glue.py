"""Gluing fibrewise functors and a Cartesian-arrow functor into one functor.

Given functors F_A on every fibre and a functor Fbar on the Cartesian
arrows that agree on vertical Cartesian arrows and respect every square
of verticals and Cartesians, there is exactly one functor F with these
restrictions: F(v.h) = F_A(v).Fbar(h).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .cartesian import (
    Cleavage,
    is_cartesian,
    make_cleavage,
    vertical_factor,
    vh_factorize,
)
from .category import (
    CatFunctor,
    Failure,
    FiniteCategory,
    ValidationReport,
    fiber,
    validate_functor,
)
from .errors import GlueConditionViolated, PreconditionError


@dataclass(frozen=True, eq=False)
class GlueData:
    fibration: CatFunctor
    target: FiniteCategory
    fiber_functors: Mapping[int, CatFunctor]
    cartesian_functor: Mapping[int, int]
    target_projection: CatFunctor | None = None

    def vertical_value(self, v: int) -> int:
        A = self.fibration.obj_map[self.fibration.source.dom(v)]
        fb = fiber(self.fibration, A)
        return self.fiber_functors[A].arr_map[fb.local_arrow(v)]

    def object_value(self, X: int) -> int:
        A = self.fibration.obj_map[X]
        fb = fiber(self.fibration, A)
        return self.fiber_functors[A].obj_map[fb.local_object(X)]


def restrict(F: CatFunctor, pi: CatFunctor, target_projection: CatFunctor | None = None) -> GlueData:
    """Restrict a functor on the total category to fibres and Cartesian arrows."""
    fibers = {}
    for A in range(pi.target.n_objects):
        fb = fiber(pi, A)
        fibers[A] = CatFunctor(
            fb.category,
            F.target,
            tuple(F.obj_map[X] for X in fb.objects),
            tuple(F.arr_map[f] for f in fb.arrows),
        )
    cart = {h: F.arr_map[h] for h in range(pi.source.n_arrows) if is_cartesian(pi, h)}
    return GlueData(pi, F.target, fibers, cart, target_projection)


def _commuting_squares(pi: CatFunctor):
    """Yield (v, h, k, w) with k.w = v.h, v, w vertical and h, k Cartesian."""
    total = pi.source
    cart = [h for h in range(total.n_arrows) if is_cartesian(pi, h)]
    vert = [v for v in range(total.n_arrows) if pi.is_vertical(v)]
    cart_from: dict[int, list[int]] = {}
    for h in cart:
        cart_from.setdefault(total.dom(h), []).append(h)
    vert_from: dict[int, list[int]] = {}
    for v in vert:
        vert_from.setdefault(total.dom(v), []).append(v)
    for v in vert:
        for h in cart_from.get(total.cod(v), ()):
            z = total.comp[(v, h)]
            for k in cart_from.get(total.dom(v), ()):
                if pi.arr_map[k] != pi.arr_map[h]:
                    continue
                for w in vert_from.get(total.cod(k), ()):
                    if total.cod(w) == total.cod(h) and total.comp[(k, w)] == z:
                        yield v, h, k, w


def verify_glue_conditions(data: GlueData) -> ValidationReport:
    """Check the glue hypotheses; every violation is reported, the most relevant first.

    Order: structure, condition 3 (vertical Cartesian agreement),
    condition 4 (squares), then functoriality of the pieces.
    """
    pi, Y = data.fibration, data.target
    total, base = pi.source, pi.target
    failures: list[Failure] = []
    name = total.arrow_name

    for A in range(base.n_objects):
        fb = fiber(pi, A)
        FA = data.fiber_functors.get(A)
        if FA is None:
            if fb.objects:
                failures.append(Failure("structure", f"no fibre functor over {base.object_name(A)}", (A,)))
            continue
        if FA.source.n_objects != fb.category.n_objects or FA.source.n_arrows != fb.category.n_arrows:
            failures.append(Failure("structure", f"fibre functor over {base.object_name(A)} has the wrong domain", (A,)))
    cart = {h for h in range(total.n_arrows) if is_cartesian(pi, h)}
    if set(data.cartesian_functor) != cart:
        extra = sorted(set(data.cartesian_functor) - cart)
        missing = sorted(cart - set(data.cartesian_functor))
        failures.append(
            Failure("structure", f"Cartesian functor domain mismatch: extra {extra}, missing {missing}", tuple(extra + missing))
        )
    for h, g in data.cartesian_functor.items():
        if not 0 <= g < Y.n_arrows:
            failures.append(Failure("structure", f"Cartesian value of {name(h)} out of range", (h, g)))
    if failures:
        return ValidationReport(tuple(failures))

    ob = data.object_value
    for h in sorted(cart):
        if Y.arrows[data.cartesian_functor[h]] != (ob(total.dom(h)), ob(total.cod(h))):
            failures.append(Failure("structure", f"Cartesian value of {name(h)} has wrong endpoints", (h,)))
    if failures:
        return ValidationReport(tuple(failures))

    for s in sorted(cart):
        if pi.is_vertical(s) and data.vertical_value(s) != data.cartesian_functor[s]:
            failures.append(
                Failure("condition-3", f"F_A({name(s)}) != Fbar({name(s)}) on a vertical Cartesian arrow", (s,))
            )

    Fbar = data.cartesian_functor
    for v, h, k, w in _commuting_squares(pi):
        lhs = Y.comp.get((data.vertical_value(v), Fbar[h]))
        rhs = Y.comp.get((Fbar[k], data.vertical_value(w)))
        if lhs is None or lhs != rhs:
            failures.append(
                Failure(
                    "condition-4",
                    f"square k.w = v.h with v={name(v)}, h={name(h)}, k={name(k)}, w={name(w)}: "
                    f"F(v).Fbar(h) != Fbar(k).F(w)",
                    (v, h, k, w),
                )
            )

    for A, FA in sorted(data.fiber_functors.items()):
        rep = validate_functor(FA)
        if not rep.ok:
            failures.append(Failure("fiber-functor", f"over {base.object_name(A)}: {rep.first.message}", (A,)))
    for (f, g), fg in total.comp.items():
        if f in cart and g in cart and Y.comp.get((Fbar[f], Fbar[g])) != Fbar[fg]:
            failures.append(Failure("cartesian-functor", f"Fbar({name(f)}.{name(g)}) != Fbar({name(f)}).Fbar({name(g)})", (f, g)))
    for X in range(total.n_objects):
        if Fbar[total.identity[X]] != Y.identity[ob(X)]:
            failures.append(Failure("cartesian-functor", f"Fbar does not preserve the identity of {total.object_name(X)}", (X,)))
    if data.target_projection is not None:
        P = data.target_projection
        for h in sorted(cart):
            if P.arr_map[Fbar[h]] != pi.arr_map[h]:
                failures.append(Failure("over-base", f"Fbar({name(h)}) does not lie over pi({name(h)})", (h,)))
    return ValidationReport(tuple(failures))


def glue_functor(data: GlueData, cleavage: Cleavage | None = None, check: bool = True) -> CatFunctor:
    """The unique functor with the given restrictions, F(x) = F_A(v).Fbar(h)."""
    if check:
        report = verify_glue_conditions(data)
        if not report.ok:
            raise GlueConditionViolated(report)
    pi, Y = data.fibration, data.target
    total = pi.source
    cleavage = cleavage or make_cleavage(pi)
    arr = []
    for x in range(total.n_arrows):
        p = vh_factorize(pi, cleavage, x)
        arr.append(Y.comp[(data.vertical_value(p.vertical), data.cartesian_functor[p.horizontal])])
    objs = tuple(data.object_value(X) for X in range(total.n_objects))
    return CatFunctor(total, Y, objs, tuple(arr))


def is_over(F: CatFunctor, pi_X: CatFunctor, pi_Y: CatFunctor) -> bool:
    return all(pi_Y.obj_map[F.obj_map[X]] == pi_X.obj_map[X] for X in range(F.source.n_objects)) and all(
        pi_Y.arr_map[F.arr_map[f]] == pi_X.arr_map[f] for f in range(F.source.n_arrows)
    )


@dataclass(frozen=True)
class ComparisonFamily:
    """Vertical comparison maps v[alpha, X]: F(alpha*X) -> alpha*(F X)."""

    entries: Mapping[tuple[int, int], int]
    naturality: ValidationReport
    invertible: Mapping[tuple[int, int], bool] = field(default_factory=dict)


def _reindex_vertical(pi: CatFunctor, cleavage: Cleavage, alpha: int, f: int) -> int:
    """alpha*(f): the vertical with alpha*(f).c(alpha, X') = c(alpha, X).f."""
    total = pi.source
    X, Xp = total.arrows[f]
    c, cp = cleavage.lift(alpha, X), cleavage.lift(alpha, Xp)
    return vertical_factor(pi, total.comp[(c, f)], cp)


def extract_comparison(F: CatFunctor, cleavage_X: Cleavage, cleavage_Y: Cleavage) -> ComparisonFamily:
    """Factor F(chosen lift) as v[alpha, X] followed by the chosen lift in the target.

    Naturality in X is verified for every vertical arrow of every fibre.
    """
    pi_X, pi_Y = cleavage_X.fibration, cleavage_Y.fibration
    if not is_over(F, pi_X, pi_Y):
        raise PreconditionError("functor does not lie over the base")
    X_cat, Y_cat = pi_X.source, pi_Y.source
    base = pi_X.target
    entries, inv = {}, {}
    for alpha in range(base.n_arrows):
        for X in pi_X.objects_over(base.cod(alpha)):
            Fh = F.arr_map[cleavage_X.lift(alpha, X)]
            v = vertical_factor(pi_Y, Fh, cleavage_Y.lift(alpha, F.obj_map[X]))
            entries[(alpha, X)] = v
            inv[(alpha, X)] = Y_cat.is_invertible(v)
    failures = []
    for alpha in range(base.n_arrows):
        B = base.cod(alpha)
        for f in range(X_cat.n_arrows):
            if pi_X.arr_map[f] != base.identity[B]:
                continue
            X, Xp = X_cat.arrows[f]
            lhs = Y_cat.comp[(F.arr_map[_reindex_vertical(pi_X, cleavage_X, alpha, f)], entries[(alpha, Xp)])]
            rhs = Y_cat.comp[(entries[(alpha, X)], _reindex_vertical(pi_Y, cleavage_Y, alpha, F.arr_map[f]))]
            if lhs != rhs:
                failures.append(
                    Failure("naturality", f"comparison not natural at base arrow {alpha}, vertical {X_cat.arrow_name(f)}", (alpha, f))
                )
    return ComparisonFamily(entries, ValidationReport(tuple(failures)), inv)
