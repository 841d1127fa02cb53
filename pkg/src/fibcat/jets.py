"""Combinatorial jets over a reflexive neighbourhood relation.

With M(b) = {b' : (b, b') in R}, the jet fibre J(X)_b is the set of
sections s of X over M(b): tuples indexed by M(b) in ascending order.
Equivalently J = Pi_d . c* where d, c: R -> B are the two projections.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .errors import PreconditionError, RelationNotPreserved, SectionViolation, ShapeMismatch
from .finset import (
    DependentProduct,
    FamilyComorphism,
    FamilyMorphism,
    FinFamilyBundle,
    FinFunction,
    pi_along,
    pullback,
)


@dataclass(frozen=True)
class NeighborhoodRelation:
    base_size: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(tuple(p) for p in self.pairs))
        for b, bp in self.pairs:
            if not (0 <= b < self.base_size and 0 <= bp < self.base_size):
                raise ShapeMismatch(f"pair {(b, bp)} leaves the base of size {self.base_size}")
        missing = [b for b in range(self.base_size) if (b, b) not in self.pairs]
        if missing:
            raise PreconditionError(f"relation is not reflexive at {missing}")

    @classmethod
    def reflexive_closure(cls, base_size: int, pairs) -> NeighborhoodRelation:
        return cls(base_size, frozenset(pairs) | {(b, b) for b in range(base_size)})

    @classmethod
    def diagonal(cls, base_size: int) -> NeighborhoodRelation:
        return cls(base_size, frozenset((b, b) for b in range(base_size)))

    @classmethod
    def chain(cls, base_size: int, radius: int = 1) -> NeighborhoodRelation:
        """|b - b'| <= radius."""
        return cls(
            base_size,
            frozenset((b, bp) for b in range(base_size) for bp in range(base_size) if abs(b - bp) <= radius),
        )

    def neighbors(self, b: int) -> tuple[int, ...]:
        return self._neighbors[b]

    @cached_property
    def _neighbors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(bp for a, bp in self.pairs if a == b)) for b in range(self.base_size))

    @cached_property
    def ordered_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.pairs))

    @property
    def d(self) -> FinFunction:
        return FinFunction(len(self.pairs), self.base_size, tuple(b for b, _ in self.ordered_pairs))

    @property
    def c(self) -> FinFunction:
        return FinFunction(len(self.pairs), self.base_size, tuple(bp for _, bp in self.ordered_pairs))

    def product(self, Q: int) -> NeighborhoodRelation:
        """The relation on Q x B, indexed q * |B| + b, with q held fixed."""
        n = self.base_size
        return NeighborhoodRelation(Q * n, frozenset((q * n + b, q * n + bp) for q in range(Q) for b, bp in self.pairs))


def check_preserves(alpha: FinFunction, R_A: NeighborhoodRelation, R_B: NeighborhoodRelation) -> None:
    """Raise RelationNotPreserved unless (a, a') in R_A implies (alpha a, alpha a') in R_B."""
    for a, ap in sorted(R_A.pairs):
        image = (alpha(a), alpha(ap))
        if image not in R_B.pairs:
            raise RelationNotPreserved((a, ap), image)


@dataclass(frozen=True)
class JetBundle:
    relation: NeighborhoodRelation
    source: FinFamilyBundle
    sections: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def bundle(self) -> FinFamilyBundle:
        return FinFamilyBundle(tuple(len(s) for s in self.sections))

    def section_index(self, b: int, s: Sequence[int]) -> int:
        return self._lookup[b][tuple(s)]

    @cached_property
    def _lookup(self):
        return tuple({s: i for i, s in enumerate(ss)} for ss in self.sections)

    def as_function(self, b: int, i: int) -> dict[int, int]:
        return dict(zip(self.relation.neighbors(b), self.sections[b][i]))


def jet_object(R: NeighborhoodRelation, x: FinFamilyBundle) -> JetBundle:
    if x.base_size != R.base_size:
        raise ShapeMismatch(f"family over {x.base_size} points, relation over {R.base_size}")
    sections = tuple(
        tuple(itertools.product(*(range(x.fibers[bp]) for bp in R.neighbors(b)))) for b in range(R.base_size)
    )
    return JetBundle(R, x, sections)


def jet_oracle(R: NeighborhoodRelation, x: FinFamilyBundle) -> DependentProduct:
    """Pi_d(c*(X)) computed by the generic finite-set constructions."""
    return pi_along(R.d, pullback(R.c, x).bundle)


def oracle_bijection(R: NeighborhoodRelation, x: FinFamilyBundle) -> tuple[tuple[int, ...], ...]:
    """Per b, the index in J(X)_b of each oracle section (a section over d^-1(b))."""
    J, P = jet_object(R, x), jet_oracle(R, x)
    pairs = R.ordered_pairs
    out = []
    for b in range(R.base_size):
        row = []
        for i in range(len(P.sections[b])):
            over_pairs = P.section(b, i)  # pair index -> element of X_{c(pair)}
            s = {pairs[k][1]: v for k, v in over_pairs.items()}
            row.append(J.section_index(b, tuple(s[bp] for bp in R.neighbors(b))))
        out.append(tuple(row))
    return tuple(out)


def jet_count(R: NeighborhoodRelation, x: FinFamilyBundle, b: int) -> int:
    out = 1
    for bp in R.neighbors(b):
        out *= x.fibers[bp]
    return out


def jet_comorphism(R_A: NeighborhoodRelation, R_B: NeighborhoodRelation, f: FamilyComorphism) -> FamilyComorphism:
    """(Jf)_a(s) = a' -> f_a'(s(alpha(a'))), a comorphism J(X) -> J(Y) over alpha."""
    al = f.base_map
    check_preserves(al, R_A, R_B)
    JX, JY = jet_object(R_A, f.source), jet_object(R_B, f.target)
    comps = []
    for a in range(al.dom_size):
        nb_b = R_B.neighbors(al(a))
        pos = {bp: k for k, bp in enumerate(nb_b)}
        vals = []
        for s in JY.sections[al(a)]:
            image = tuple(f.components[ap](s[pos[al(ap)]]) for ap in R_A.neighbors(a))
            vals.append(JX.section_index(a, image))
        comps.append(FinFunction(len(JY.sections[al(a)]), len(JX.sections[a]), tuple(vals)))
    return FamilyComorphism(al, JX.bundle, JY.bundle, comps)


def jet_map(R: NeighborhoodRelation, m: FamilyMorphism) -> FamilyMorphism:
    """J on a vertical map: s -> b' -> m_b'(s(b'))."""
    JX, JY = jet_object(R, m.source), jet_object(R, m.target)
    comps = []
    for b in range(R.base_size):
        nb = R.neighbors(b)
        vals = tuple(JY.section_index(b, tuple(m.components[bp](v) for bp, v in zip(nb, s))) for s in JX.sections[b])
        comps.append(FinFunction(len(JX.sections[b]), len(JY.sections[b]), vals))
    return FamilyMorphism(JX.bundle, JY.bundle, comps)


def jet_comparison(alpha: FinFunction, R_A: NeighborhoodRelation, R_B: NeighborhoodRelation, y: FinFamilyBundle) -> FamilyMorphism:
    """alpha*(J Y) -> J(alpha* Y) over A: s -> a' -> s(alpha(a'))."""
    check_preserves(alpha, R_A, R_B)
    JY = jet_object(R_B, y)
    ay = pullback(alpha, y).bundle
    JaY = jet_object(R_A, ay)
    comps = []
    for a in range(alpha.dom_size):
        nb_b = R_B.neighbors(alpha(a))
        pos = {bp: k for k, bp in enumerate(nb_b)}
        vals = tuple(
            JaY.section_index(a, tuple(s[pos[alpha(ap)]] for ap in R_A.neighbors(a))) for s in JY.sections[alpha(a)]
        )
        comps.append(FinFunction(len(JY.sections[alpha(a)]), len(JaY.sections[a]), vals))
    return FamilyMorphism(pullback(alpha, JY.bundle).bundle, JaY.bundle, comps)


def product_projection(Q: int, base_size: int) -> FinFunction:
    """Q x B -> B with (q, b) stored at q * |B| + b."""
    return FinFunction(Q * base_size, base_size, tuple(b for _ in range(Q) for b in range(base_size)))


def jet_strength(R: NeighborhoodRelation, Q: int, y: FinFamilyBundle) -> FamilyMorphism:
    """The comparison along the projection Q x B -> B."""
    if Q < 1:
        raise PreconditionError("Q must be non-empty")
    return jet_comparison(product_projection(Q, R.base_size), R.product(Q), R, y)


@dataclass(frozen=True)
class PointedBundle:
    bundle: FinFamilyBundle
    basepoint: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "basepoint", tuple(self.basepoint))
        if len(self.basepoint) != self.bundle.base_size:
            raise ShapeMismatch("one basepoint per base element is required")
        for b, z in enumerate(self.basepoint):
            if not 0 <= z < self.bundle.fibers[b]:
                raise ShapeMismatch(f"basepoint {z} outside fibre {b}")


@dataclass(frozen=True)
class Omega1:
    jets: JetBundle
    members: tuple[tuple[int, ...], ...]  # per b, indices into J(E)_b

    @property
    def bundle(self) -> FinFamilyBundle:
        return FinFamilyBundle(tuple(len(m) for m in self.members))

    def inclusion(self) -> FamilyMorphism:
        J = self.jets.bundle
        return FamilyMorphism(
            self.bundle, J, tuple(FinFunction(len(m), J.fibers[b], m) for b, m in enumerate(self.members))
        )


def omega1(R: NeighborhoodRelation, e: PointedBundle) -> Omega1:
    """Jets vanishing at their basepoint: s(b) = 0_b."""
    J = jet_object(R, e.bundle)
    members = []
    for b in range(R.base_size):
        k = R.neighbors(b).index(b)
        members.append(tuple(i for i, s in enumerate(J.sections[b]) if s[k] == e.basepoint[b]))
    return Omega1(J, tuple(members))


def omega1_map(R: NeighborhoodRelation, e: PointedBundle, e2: PointedBundle, m: FamilyMorphism) -> FamilyMorphism:
    """Restriction of J(m) to 1-forms; m must preserve basepoints."""
    for b, (z, z2) in enumerate(zip(e.basepoint, e2.basepoint)):
        if m.components[b](z) != z2:
            raise SectionViolation(f"map does not preserve the basepoint over {b}")
    Jm = jet_map(R, m)
    O, O2 = omega1(R, e), omega1(R, e2)
    comps = []
    for b in range(R.base_size):
        pos = {i: k for k, i in enumerate(O2.members[b])}
        vals = []
        for i in O.members[b]:
            j = Jm.components[b](i)
            if j not in pos:
                raise SectionViolation(f"image of a 1-form over {b} is not a 1-form")
            vals.append(pos[j])
        comps.append(FinFunction(len(O.members[b]), len(O2.members[b]), tuple(vals)))
    return FamilyMorphism(O.bundle, O2.bundle, comps)


@dataclass(frozen=True)
class FiberwiseMonoid:
    """A commutative monoid on each fibre: tables[b][i][j] and unit[b]."""

    bundle: FinFamilyBundle
    tables: tuple[tuple[tuple[int, ...], ...], ...]
    unit: tuple[int, ...]

    def is_valid(self) -> bool:
        for b, k in enumerate(self.bundle.fibers):
            t, e = self.tables[b], self.unit[b]
            r = range(k)
            if any(t[e][i] != i or t[i][j] != t[j][i] for i in r for j in r):
                return False
            if any(t[t[i][j]][l] != t[i][t[j][l]] for i in r for j in r for l in r):
                return False
        return True


def jet_monoid(R: NeighborhoodRelation, mon: FiberwiseMonoid) -> FiberwiseMonoid:
    """The pointwise structure on J(X)."""
    J = jet_object(R, mon.bundle)
    tables, units = [], []
    for b in range(R.base_size):
        nb = R.neighbors(b)
        ss = J.sections[b]
        tables.append(
            tuple(
                tuple(J.section_index(b, tuple(mon.tables[bp][x][y] for bp, x, y in zip(nb, s, t))) for t in ss)
                for s in ss
            )
        )
        units.append(J.section_index(b, tuple(mon.unit[bp] for bp in nb)))
    return FiberwiseMonoid(J.bundle, tuple(tables), tuple(units))


def is_homomorphism(m: FamilyMorphism, M1: FiberwiseMonoid, M2: FiberwiseMonoid) -> bool:
    for b, f in enumerate(m.components):
        if f(M1.unit[b]) != M2.unit[b]:
            return False
        k = m.source.fibers[b]
        if any(f(M1.tables[b][i][j]) != M2.tables[b][f(i)][f(j)] for i in range(k) for j in range(k)):
            return False
    return True
