"""Canonical small categories and fibrations used throughout the test-suite.

The same data ships as a DSL document (``data/fixtures.fib``); the parser
is tested to reproduce these objects exactly.
"""
from __future__ import annotations

from .category import CatFunctor, FiniteCategory, identity_functor


def terminal() -> FiniteCategory:
    return FiniteCategory.from_names(["*"], [])


def walking_arrow() -> FiniteCategory:
    """W2: objects a, b and one arrow u: a -> b."""
    return FiniteCategory.from_names(["a", "b"], [("u", "a", "b")])


def fixture_total() -> FiniteCategory:
    """E: X0, X1 over a, Y0 over b; v: X0 -> X1, h0: X1 -> Y0, vh0 = v.h0."""
    return FiniteCategory.from_names(
        ["X0", "X1", "Y0"],
        [("v", "X0", "X1"), ("h0", "X1", "Y0"), ("vh0", "X0", "Y0")],
        {("v", "h0"): "vh0"},
    )


def fixture_fibration() -> CatFunctor:
    """pi: E -> W2."""
    E, W2 = fixture_total(), walking_arrow()
    # W2 arrows: id_a=0, id_b=1, u=2
    return CatFunctor(E, W2, (0, 0, 1), (0, 0, 1, 0, 2, 2), "pi")


def twisted_total() -> FiniteCategory:
    """E2: one object X over a with an involution g, one object Y over b.

    Two Cartesian arrows h, gh = g.h over u; g.g = id_X.
    """
    return FiniteCategory.from_names(
        ["X", "Y"],
        [("g", "X", "X"), ("h", "X", "Y"), ("gh", "X", "Y")],
        {("g", "g"): "id_X", ("g", "h"): "gh", ("g", "gh"): "h"},
    )


def twisted_fibration() -> CatFunctor:
    """rho: E2 -> W2, a fibration with a non-trivial vertical automorphism."""
    return CatFunctor(twisted_total(), walking_arrow(), (0, 1), (0, 1, 0, 2, 2), "rho")


def terminal_fibration() -> CatFunctor:
    return identity_functor(terminal())


def chain3() -> FiniteCategory:
    """The poset 0 < 1 < 2 as a category."""
    return poset_category(["p0", "p1", "p2"], [(0, 1), (1, 2)])


def poset_category(names, covers) -> FiniteCategory:
    """Category of a finite poset given by covering (or any generating) pairs."""
    n = len(names)
    leq = [[i == j for j in range(n)] for i in range(n)]
    for i, j in covers:
        leq[i][j] = True
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if leq[i][k] and leq[k][j]:
                    leq[i][j] = True
    arrows = [(f"{names[i]}_{names[j]}", names[i], names[j]) for i in range(n) for j in range(n) if leq[i][j] and i != j]

    def arrow(i, j):
        return f"id_{names[i]}" if i == j else f"{names[i]}_{names[j]}"

    comp = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if i != j and j != k and leq[i][j] and leq[j][k]:
                    comp[(arrow(i, j), arrow(j, k))] = arrow(i, k)
    return FiniteCategory.from_names(list(names), arrows, comp)
