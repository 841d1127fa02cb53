"""Vector bundles over finite bases with fibres F_q^n, and fibrewise duals.

Fibres carry the standard basis, a linear map is the matrix acting on
column coordinate vectors, and the dual of a map is its transpose.
Vectors are enumerated lexicographically by coordinates, which links
the linear layer to the finite-set family layer.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import NotAPullback, PreconditionError, ShapeMismatch
from .finset import FamilyComorphism, FamilyMorphism, FinFamilyBundle, FinFunction
from .jets import NeighborhoodRelation, check_preserves


class FiniteField:
    """GF(q) for q in {2, 3, 4, 5}; GF(4) is F_2[x]/(x^2 + x + 1) with x = 2."""

    SUPPORTED = (2, 3, 4, 5)

    def __init__(self, q: int):
        if q not in self.SUPPORTED:
            raise PreconditionError(f"field order {q} is not supported")
        self.q = q
        r = np.arange(q)
        if q == 4:
            self.add = r[:, None] ^ r[None, :]
            mul = np.zeros((4, 4), dtype=int)
            for a in range(4):
                for b in range(4):
                    p = 0
                    for i in range(2):
                        if b >> i & 1:
                            p ^= a << i
                    if p & 4:
                        p ^= 0b111
                    mul[a, b] = p
            self.mul = mul
        else:
            self.add = (r[:, None] + r[None, :]) % q
            self.mul = (r[:, None] * r[None, :]) % q
        self.neg = np.array([int(np.flatnonzero(self.add[a] == 0)[0]) for a in range(q)])
        self.inv = np.array([0] + [int(np.flatnonzero(self.mul[a] == 1)[0]) for a in range(1, q)])

    def __repr__(self):
        return f"GF({self.q})"

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A, B = np.asarray(A, dtype=int), np.asarray(B, dtype=int)
        if A.shape[1] != B.shape[0]:
            raise ShapeMismatch(f"cannot multiply {A.shape} by {B.shape}")
        if A.shape[1] == 0:
            return np.zeros((A.shape[0], B.shape[1]), dtype=int)
        terms = self.mul[A[:, :, None], B[None, :, :]]  # (m, k, n)
        return reduce(lambda x, y: self.add[x, y], (terms[:, k, :] for k in range(A.shape[1])))

    def rank(self, A: np.ndarray) -> int:
        M = np.array(A, dtype=int)
        rows, cols = M.shape
        r = 0
        for c in range(cols):
            pivot = next((i for i in range(r, rows) if M[i, c]), None)
            if pivot is None:
                continue
            M[[r, pivot]] = M[[pivot, r]]
            M[r] = self.mul[self.inv[M[r, c]], M[r]]
            for i in range(rows):
                if i != r and M[i, c]:
                    M[i] = self.add[M[i], self.mul[self.neg[M[i, c]], M[r]]]
            r += 1
        return r

    def is_invertible(self, A: np.ndarray) -> bool:
        A = np.asarray(A)
        return A.shape[0] == A.shape[1] and self.rank(A) == A.shape[0]

    def vectors(self, n: int) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.q), repeat=n))

    def vector_index(self, v) -> int:
        out = 0
        for x in v:
            out = out * self.q + int(x)
        return out

    def apply(self, A: np.ndarray, v) -> tuple[int, ...]:
        return tuple(int(x) for x in self.matmul(A, np.asarray(v, dtype=int).reshape(-1, 1)).ravel())

    def as_function(self, A: np.ndarray) -> FinFunction:
        """The map F_q^n -> F_q^m on lexicographically indexed vectors."""
        m, n = np.asarray(A).shape
        return FinFunction(self.q**n, self.q**m, tuple(self.vector_index(self.apply(A, v)) for v in self.vectors(n)))


@lru_cache(maxsize=None)
def field(q: int) -> FiniteField:
    return FiniteField(q)


def _freeze(mats) -> tuple[np.ndarray, ...]:
    out = []
    for m in mats:
        a = np.array(m, dtype=int)
        a.setflags(write=False)
        out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class FinVectorBundle:
    q: int
    dims: tuple[int, ...]

    def __post_init__(self):
        field(self.q)
        object.__setattr__(self, "dims", tuple(self.dims))
        if any(d < 0 for d in self.dims):
            raise ShapeMismatch("dimensions must be non-negative")

    @property
    def base_size(self) -> int:
        return len(self.dims)

    def as_family(self) -> FinFamilyBundle:
        return FinFamilyBundle(tuple(self.q**d for d in self.dims))


def _shape_ok(m: np.ndarray, rows: int, cols: int) -> bool:
    return m.shape == (rows, cols)


@dataclass(frozen=True, eq=False)
class LinearBundleMap:
    """t_a: X_a -> Y_alpha(a), a map of bundles over alpha: A -> B."""

    base_map: FinFunction
    source: FinVectorBundle
    target: FinVectorBundle
    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrices", _freeze(self.matrices))
        al = self.base_map
        if self.source.q != self.target.q:
            raise ShapeMismatch("bundles over different fields")
        if (al.dom_size, al.cod_size) != (self.source.base_size, self.target.base_size) or len(self.matrices) != al.dom_size:
            raise ShapeMismatch("bundle map does not match its base map")
        for a, m in enumerate(self.matrices):
            if not _shape_ok(m, self.target.dims[al(a)], self.source.dims[a]):
                raise ShapeMismatch(f"matrix at {a} has shape {m.shape}")

    def __eq__(self, other):
        if not isinstance(other, LinearBundleMap):
            return NotImplemented
        return (
            self.base_map == other.base_map
            and self.source == other.source
            and self.target == other.target
            and all(np.array_equal(x, y) for x, y in zip(self.matrices, other.matrices))
        )

    __hash__ = None

    @classmethod
    def identity(cls, X: FinVectorBundle) -> LinearBundleMap:
        return cls(FinFunction.identity(X.base_size), X, X, tuple(np.eye(d, dtype=int) for d in X.dims))

    def then(self, other: LinearBundleMap) -> LinearBundleMap:
        if self.target != other.source:
            raise ShapeMismatch("bundle maps are not composable")
        F = field(self.source.q)
        al = self.base_map
        mats = tuple(F.matmul(other.matrices[al(a)], self.matrices[a]) for a in range(al.dom_size))
        return LinearBundleMap(al.then(other.base_map), self.source, other.target, mats)

    def is_pullback(self) -> bool:
        F = field(self.source.q)
        return all(F.is_invertible(m) for m in self.matrices)


@dataclass(frozen=True, eq=False)
class LinearComorphism:
    """c_a: Y_alpha(a) -> X_a, a comorphism X -> Y over alpha with linear components."""

    base_map: FinFunction
    source: FinVectorBundle
    target: FinVectorBundle
    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrices", _freeze(self.matrices))
        al = self.base_map
        if (al.dom_size, al.cod_size) != (self.source.base_size, self.target.base_size) or len(self.matrices) != al.dom_size:
            raise ShapeMismatch("comorphism does not match its base map")
        for a, m in enumerate(self.matrices):
            if not _shape_ok(m, self.source.dims[a], self.target.dims[al(a)]):
                raise ShapeMismatch(f"matrix at {a} has shape {m.shape}")

    def __eq__(self, other):
        if not isinstance(other, LinearComorphism):
            return NotImplemented
        return (
            self.base_map == other.base_map
            and self.source == other.source
            and self.target == other.target
            and all(np.array_equal(x, y) for x, y in zip(self.matrices, other.matrices))
        )

    __hash__ = None

    @classmethod
    def identity(cls, X: FinVectorBundle) -> LinearComorphism:
        return cls(FinFunction.identity(X.base_size), X, X, tuple(np.eye(d, dtype=int) for d in X.dims))

    def then(self, other: LinearComorphism) -> LinearComorphism:
        """h_a = f_a after g_alpha(a)."""
        if self.target != other.source:
            raise ShapeMismatch("comorphisms are not composable")
        F = field(self.source.q)
        al = self.base_map
        mats = tuple(F.matmul(self.matrices[a], other.matrices[al(a)]) for a in range(al.dom_size))
        return LinearComorphism(al.then(other.base_map), self.source, other.target, mats)

    def is_cartesian(self) -> bool:
        F = field(self.source.q)
        return all(F.is_invertible(m) for m in self.matrices)

    def to_family(self) -> FamilyComorphism:
        """The underlying comorphism of families of finite sets."""
        F = field(self.source.q)
        return FamilyComorphism(
            self.base_map, self.source.as_family(), self.target.as_family(), tuple(F.as_function(m) for m in self.matrices)
        )


def dagger_object(V: FinVectorBundle) -> FinVectorBundle:
    """Dual bundle in the dual basis; same dimensions."""
    return FinVectorBundle(V.q, V.dims)


def double_dagger_identification(V: FinVectorBundle) -> tuple[np.ndarray, ...]:
    """Evaluation pairing V -> V^dagger^dagger in the chosen bases."""
    return tuple(np.eye(d, dtype=int) for d in V.dims)


def dagger_morphism(t: LinearBundleMap) -> LinearComorphism:
    """Components t_a transposed, a comorphism X^dagger -> Y^dagger over alpha."""
    return LinearComorphism(
        t.base_map, dagger_object(t.source), dagger_object(t.target), tuple(m.T.copy() for m in t.matrices)
    )


def reverse_dagger(c: LinearComorphism) -> LinearBundleMap:
    """Transpose the components back into a bundle map."""
    return LinearBundleMap(c.base_map, dagger_object(c.source), dagger_object(c.target), tuple(m.T.copy() for m in c.matrices))


def check_cartesian_preservation(t: LinearBundleMap) -> bool:
    """For a square declared a pullback: is its dagger Cartesian?"""
    F = field(t.source.q)
    for a, m in enumerate(t.matrices):
        if not F.is_invertible(m):
            raise NotAPullback(a, f"component at {a} has rank {F.rank(m)} and shape {m.shape}")
    return dagger_morphism(t).is_cartesian()


def all_matrices(q: int, rows: int, cols: int):
    for vals in itertools.product(range(q), repeat=rows * cols):
        yield np.array(vals, dtype=int).reshape(rows, cols)


def all_bundle_maps(alpha: FinFunction, X: FinVectorBundle, Y: FinVectorBundle):
    spaces = [list(all_matrices(X.q, Y.dims[alpha(a)], X.dims[a])) for a in range(alpha.dom_size)]
    for mats in itertools.product(*spaces):
        yield LinearBundleMap(alpha, X, Y, mats)


# Tangent and cotangent bundles from 1-forms with values in the constant bundle.


def cotangent_bundle(R: NeighborhoodRelation, q: int) -> FinVectorBundle:
    """Fibre at b: maps M(b) -> F_q vanishing at b, basis e_b' for b' != b."""
    return FinVectorBundle(q, tuple(len(R.neighbors(b)) - 1 for b in range(R.base_size)))


def tangent_bundle(R: NeighborhoodRelation, q: int) -> FinVectorBundle:
    return dagger_object(cotangent_bundle(R, q))


def _punctured(R: NeighborhoodRelation, b: int) -> list[int]:
    return [bp for bp in R.neighbors(b) if bp != b]


def cotangent_comorphism(alpha: FinFunction, R_A: NeighborhoodRelation, R_B: NeighborhoodRelation, q: int) -> LinearComorphism:
    """Pull back 1-forms: (s)(a') = s(alpha(a')); matrix M[a', b'] = [alpha(a') = b']."""
    check_preserves(alpha, R_A, R_B)
    mats = []
    for a in range(alpha.dom_size):
        rows, cols = _punctured(R_A, a), _punctured(R_B, alpha(a))
        mats.append(np.array([[1 if alpha(ap) == bp else 0 for bp in cols] for ap in rows], dtype=int).reshape(len(rows), len(cols)))
    return LinearComorphism(alpha, cotangent_bundle(R_A, q), cotangent_bundle(R_B, q), mats)


def tangent_map(alpha: FinFunction, R_A: NeighborhoodRelation, R_B: NeighborhoodRelation, q: int) -> LinearBundleMap:
    """The tangent of alpha: the dagger of its cotangent comorphism, read back as a bundle map."""
    return reverse_dagger(cotangent_comorphism(alpha, R_A, R_B, q))


@dataclass(frozen=True)
class TangentData:
    cotangent: FinVectorBundle
    tangent: FinVectorBundle


def tangent_from_omega(R: NeighborhoodRelation, q: int) -> TangentData:
    return TangentData(cotangent_bundle(R, q), tangent_bundle(R, q))


def jet_vector_bundle(R: NeighborhoodRelation, V: FinVectorBundle) -> FinVectorBundle:
    """J(V)_b is the direct sum of V_b' over M(b)."""
    return FinVectorBundle(V.q, tuple(sum(V.dims[bp] for bp in R.neighbors(b)) for b in range(R.base_size)))


def jet_linear_map(R: NeighborhoodRelation, t: LinearBundleMap) -> LinearBundleMap:
    """J on a vertical linear map: block diagonal over M(b)."""
    if t.base_map != FinFunction.identity(t.source.base_size):
        raise PreconditionError("only vertical maps are handled here")
    mats = []
    for b in range(R.base_size):
        blocks = [t.matrices[bp] for bp in R.neighbors(b)]
        rows = sum(m.shape[0] for m in blocks)
        cols = sum(m.shape[1] for m in blocks)
        M = np.zeros((rows, cols), dtype=int)
        r = c = 0
        for m in blocks:
            M[r : r + m.shape[0], c : c + m.shape[1]] = m
            r, c = r + m.shape[0], c + m.shape[1]
        mats.append(M)
    return LinearBundleMap(t.base_map, jet_vector_bundle(R, t.source), jet_vector_bundle(R, t.target), mats)


def to_family_morphism(t: LinearBundleMap) -> FamilyMorphism:
    """A vertical linear map as a map of families of vectors."""
    F = field(t.source.q)
    return FamilyMorphism(t.source.as_family(), t.target.as_family(), tuple(F.as_function(m) for m in t.matrices))
