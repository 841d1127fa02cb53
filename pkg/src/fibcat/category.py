"""Explicit finite categories and functors.

Arrows are dense integer indices and composition is written in
diagrammatic order: ``compose(f, g)`` is "first f, then g" and is defined
exactly when ``cod(f) == dom(g)``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError, StructuralError


@dataclass(frozen=True)
class Failure:
    check: str
    message: str
    witness: tuple = ()

    def as_dict(self):
        return {"check": self.check, "message": self.message, "witness": list(self.witness)}


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[Failure, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first(self) -> Failure | None:
        return self.failures[0] if self.failures else None

    def __bool__(self):
        return self.ok

    def checks(self) -> set[str]:
        return {f.check for f in self.failures}

    def as_dict(self):
        return {"ok": self.ok, "failures": [f.as_dict() for f in self.failures]}

    @classmethod
    def single(cls, check, message, witness=()):
        return cls((Failure(check, message, tuple(witness)),))


PASS = ValidationReport()


@dataclass(frozen=True)
class FiniteCategory:
    n_objects: int
    arrows: tuple[tuple[int, int], ...]
    identity: tuple[int, ...]
    comp: Mapping[tuple[int, int], int] = field(repr=False)
    object_names: tuple[str, ...] | None = field(default=None, compare=False)
    arrow_names: tuple[str, ...] | None = field(default=None, compare=False)

    __hash__ = None  # comp is a dict

    @classmethod
    def from_names(
        cls,
        objects: Sequence[str],
        arrows: Sequence[tuple[str, str, str]],
        compose: Mapping[tuple[str, str], str] | Iterable[tuple[str, str, str]] = (),
    ) -> FiniteCategory:
        """Build a category from named data.

        Identities ``id_<obj>`` come first, in object order, followed by the
        declared arrows.  Composites involving an identity are filled in.
        """
        obj_ix = {o: i for i, o in enumerate(objects)}
        names = [f"id_{o}" for o in objects] + [a[0] for a in arrows]
        arr = [(i, i) for i in range(len(objects))]
        arr += [(obj_ix[d], obj_ix[c]) for _, d, c in arrows]
        arr_ix = {n: i for i, n in enumerate(names)}
        ident = tuple(range(len(objects)))
        comp: dict[tuple[int, int], int] = {}
        for f, (d, c) in enumerate(arr):
            comp[(f, ident[c])] = f
            comp[(ident[d], f)] = f
        items = compose.items() if isinstance(compose, Mapping) else (((f, g), h) for f, g, h in compose)
        for (f, g), h in items:
            comp[(arr_ix[f], arr_ix[g])] = arr_ix[h]
        return cls(len(objects), tuple(arr), ident, comp, tuple(objects), tuple(names))

    @property
    def n_arrows(self) -> int:
        return len(self.arrows)

    def dom(self, f: int) -> int:
        return self.arrows[f][0]

    def cod(self, f: int) -> int:
        return self.arrows[f][1]

    def compose(self, f: int, g: int) -> int:
        try:
            return self.comp[(f, g)]
        except KeyError:
            raise PreconditionError(
                f"{self.arrow_name(f)}.{self.arrow_name(g)} is undefined"
            ) from None

    def then(self, *fs: int) -> int:
        out = fs[0]
        for g in fs[1:]:
            out = self.compose(out, g)
        return out

    def is_identity(self, f: int) -> bool:
        return self.identity[self.arrows[f][0]] == f

    def object_name(self, o: int) -> str:
        return self.object_names[o] if self.object_names else str(o)

    def arrow_name(self, f: int) -> str:
        return self.arrow_names[f] if self.arrow_names else str(f)

    @cached_property
    def _hom(self) -> dict[tuple[int, int], tuple[int, ...]]:
        table = defaultdict(list)
        for f, (d, c) in enumerate(self.arrows):
            table[(d, c)].append(f)
        return {k: tuple(v) for k, v in table.items()}

    def hom(self, X: int, Y: int) -> tuple[int, ...]:
        return self._hom.get((X, Y), ())

    @cached_property
    def _out(self) -> dict[int, tuple[int, ...]]:
        table = defaultdict(list)
        for f, (d, _) in enumerate(self.arrows):
            table[d].append(f)
        return {k: tuple(v) for k, v in table.items()}

    def arrows_from(self, X: int) -> tuple[int, ...]:
        return self._out.get(X, ())

    @cached_property
    def _in(self) -> dict[int, tuple[int, ...]]:
        table = defaultdict(list)
        for f, (_, c) in enumerate(self.arrows):
            table[c].append(f)
        return {k: tuple(v) for k, v in table.items()}

    def arrows_into(self, Y: int) -> tuple[int, ...]:
        return self._in.get(Y, ())

    def arrow_index(self, name: str) -> int:
        return self.arrow_names.index(name)

    def object_index(self, name: str) -> int:
        return self.object_names.index(name)

    def inverse(self, f: int) -> int | None:
        d, c = self.arrows[f]
        for g in self.hom(c, d):
            if self.comp.get((f, g)) == self.identity[d] and self.comp.get((g, f)) == self.identity[c]:
                return g
        return None

    def is_invertible(self, f: int) -> bool:
        return self.inverse(f) is not None


def opposite(cat: FiniteCategory) -> FiniteCategory:
    comp = {(g, f): h for (f, g), h in cat.comp.items()}
    return FiniteCategory(
        cat.n_objects,
        tuple((c, d) for d, c in cat.arrows),
        cat.identity,
        comp,
        cat.object_names,
        cat.arrow_names,
    )


def _check_structure(cat: FiniteCategory) -> None:
    n, m = cat.n_objects, cat.n_arrows
    if len(cat.identity) != n:
        raise StructuralError(f"identity table has {len(cat.identity)} entries for {n} objects")
    for f, (d, c) in enumerate(cat.arrows):
        if not (0 <= d < n and 0 <= c < n):
            raise StructuralError(f"arrow {f} has endpoint out of range: {(d, c)}")
    for o, i in enumerate(cat.identity):
        if not 0 <= i < m:
            raise StructuralError(f"identity of object {o} is out-of-range arrow {i}")
    for (f, g), h in cat.comp.items():
        if not (0 <= f < m and 0 <= g < m and 0 <= h < m):
            raise StructuralError(f"composition entry {(f, g)} -> {h} out of range")


def validate_category(cat: FiniteCategory) -> ValidationReport:
    """Check the category axioms exhaustively; report the first violation.

    Raises StructuralError for out-of-range indices.
    """
    _check_structure(cat)
    name = cat.arrow_name
    for o, i in enumerate(cat.identity):
        if cat.arrows[i] != (o, o):
            return ValidationReport.single(
                "identity", f"identity of {cat.object_name(o)} is not an endomorphism of it", (i,)
            )
    for f, (d, c) in enumerate(cat.arrows):
        for pair, side in (((f, cat.identity[c]), "right"), ((cat.identity[d], f), "left")):
            got = cat.comp.get(pair)
            if got != f:
                return ValidationReport.single(
                    "unit-law",
                    f"{side} unit law fails: {name(pair[0])}.{name(pair[1])} = "
                    f"{'undefined' if got is None else name(got)}, expected {name(f)}",
                    (*pair, got),
                )
    for (f, g), h in cat.comp.items():
        if cat.cod(f) != cat.dom(g):
            return ValidationReport.single(
                "composition-domain", f"{name(f)}.{name(g)} defined for non-composable pair", (f, g, h)
            )
        if cat.dom(h) != cat.dom(f) or cat.cod(h) != cat.cod(g):
            return ValidationReport.single(
                "composition-typing", f"{name(f)}.{name(g)} = {name(h)} has wrong endpoints", (f, g, h)
            )
    for f in range(cat.n_arrows):
        for g in cat.arrows_from(cat.cod(f)):
            if (f, g) not in cat.comp:
                return ValidationReport.single(
                    "composition-domain", f"{name(f)}.{name(g)} undefined for composable pair", (f, g)
                )
    for (f, g), fg in cat.comp.items():
        for h in cat.arrows_from(cat.cod(g)):
            lhs = cat.comp[(fg, h)]
            rhs = cat.comp[(f, cat.comp[(g, h)])]
            if lhs != rhs:
                return ValidationReport.single(
                    "associativity",
                    f"({name(f)}.{name(g)}).{name(h)} = {name(lhs)} but "
                    f"{name(f)}.({name(g)}.{name(h)}) = {name(rhs)}",
                    (f, g, h),
                )
    return PASS


@dataclass(frozen=True, eq=False)
class CatFunctor:
    source: FiniteCategory
    target: FiniteCategory
    obj_map: tuple[int, ...]
    arr_map: tuple[int, ...]
    name: str | None = None

    def __call__(self, f: int) -> int:
        return self.arr_map[f]

    def on_object(self, X: int) -> int:
        return self.obj_map[X]

    def __eq__(self, other):
        if not isinstance(other, CatFunctor):
            return NotImplemented
        return (
            self.obj_map == other.obj_map
            and self.arr_map == other.arr_map
            and self.source == other.source
            and self.target == other.target
        )

    __hash__ = object.__hash__

    @cached_property
    def cache(self) -> dict:
        """Memo table for derived data (Cartesian verdicts, lifts)."""
        return {}

    @cached_property
    def _hom_over(self) -> dict[tuple[int, int, int], tuple[int, ...]]:
        table = defaultdict(list)
        for f, (d, c) in enumerate(self.source.arrows):
            table[(self.arr_map[f], d, c)].append(f)
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def _objects_over(self) -> dict[int, tuple[int, ...]]:
        table = defaultdict(list)
        for X, A in enumerate(self.obj_map):
            table[A].append(X)
        return {k: tuple(v) for k, v in table.items()}

    def objects_over(self, A: int) -> tuple[int, ...]:
        return self._objects_over.get(A, ())

    def members_over(self, alpha: int, X: int, Y: int) -> tuple[int, ...]:
        return self._hom_over.get((alpha, X, Y), ())

    def is_vertical(self, f: int) -> bool:
        return self.target.is_identity(self.arr_map[f])

    def then(self, other: CatFunctor) -> CatFunctor:
        """Diagrammatic composite: first self, then other."""
        return CatFunctor(
            self.source,
            other.target,
            tuple(other.obj_map[o] for o in self.obj_map),
            tuple(other.arr_map[f] for f in self.arr_map),
        )


def identity_functor(cat: FiniteCategory) -> CatFunctor:
    return CatFunctor(cat, cat, tuple(range(cat.n_objects)), tuple(range(cat.n_arrows)), "id")


def validate_functor(F: CatFunctor) -> ValidationReport:
    """Check identities, endpoints and composition; report the first violation."""
    S, T = F.source, F.target
    if len(F.obj_map) != S.n_objects or len(F.arr_map) != S.n_arrows:
        raise StructuralError("functor tables do not match the source category")
    if any(not 0 <= o < T.n_objects for o in F.obj_map):
        raise StructuralError("object map out of range")
    if any(not 0 <= f < T.n_arrows for f in F.arr_map):
        raise StructuralError("arrow map out of range")
    for o, i in enumerate(S.identity):
        if F.arr_map[i] != T.identity[F.obj_map[o]]:
            return ValidationReport.single(
                "identity", f"identity of {S.object_name(o)} not sent to an identity", (i, F.arr_map[i])
            )
    for f, (d, c) in enumerate(S.arrows):
        Ff = F.arr_map[f]
        if T.arrows[Ff] != (F.obj_map[d], F.obj_map[c]):
            return ValidationReport.single(
                "endpoints",
                f"image of {S.arrow_name(f)} is {T.arrow_name(Ff)} with endpoints "
                f"{T.arrows[Ff]}, expected {(F.obj_map[d], F.obj_map[c])}",
                (f, Ff),
            )
    for (f, g), h in S.comp.items():
        got = T.comp.get((F.arr_map[f], F.arr_map[g]))
        if got != F.arr_map[h]:
            return ValidationReport.single(
                "composition",
                f"F({S.arrow_name(f)}.{S.arrow_name(g)}) != F({S.arrow_name(f)}).F({S.arrow_name(g)})",
                (f, g),
            )
    return PASS


def is_isomorphism(F: CatFunctor) -> bool:
    return (
        len(set(F.obj_map)) == F.target.n_objects == F.source.n_objects
        and len(set(F.arr_map)) == F.target.n_arrows == F.source.n_arrows
    )


@dataclass(frozen=True)
class HomSet:
    base_arrow: int
    source: int
    target: int
    members: tuple[int, ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def hom_over(pi: CatFunctor, alpha: int, X: int, Y: int) -> HomSet:
    """The arrows X -> Y lying over ``alpha``, in ascending index order."""
    base = pi.target
    if pi.obj_map[X] != base.dom(alpha) or pi.obj_map[Y] != base.cod(alpha):
        raise PreconditionError(
            f"objects {X}, {Y} do not lie over the endpoints of base arrow {base.arrow_name(alpha)}"
        )
    return HomSet(alpha, X, Y, pi.members_over(alpha, X, Y))


@dataclass(frozen=True)
class Fiber:
    """A fibre category with its embedding into the total category."""

    base_object: int
    category: FiniteCategory
    objects: tuple[int, ...]
    arrows: tuple[int, ...]

    def local_arrow(self, f: int) -> int:
        return self.arrows.index(f)

    def local_object(self, X: int) -> int:
        return self.objects.index(X)


def fiber(pi: CatFunctor, A: int) -> Fiber:
    """Objects over A and arrows over the identity of A."""
    base, total = pi.target, pi.source
    if not 0 <= A < base.n_objects:
        raise StructuralError(f"base object {A} out of range")
    key = ("fiber", A)
    if key in pi.cache:
        return pi.cache[key]
    objects = pi.objects_over(A)
    oix = {X: i for i, X in enumerate(objects)}
    idA = base.identity[A]
    arrows = tuple(f for f in range(total.n_arrows) if pi.arr_map[f] == idA)
    aix = {f: i for i, f in enumerate(arrows)}
    comp = {}
    for f in arrows:
        for g in arrows:
            if total.cod(f) == total.dom(g):
                comp[(aix[f], aix[g])] = aix[total.comp[(f, g)]]
    cat = FiniteCategory(
        len(objects),
        tuple((oix[total.dom(f)], oix[total.cod(f)]) for f in arrows),
        tuple(aix[total.identity[X]] for X in objects),
        comp,
        tuple(total.object_name(X) for X in objects),
        tuple(total.arrow_name(f) for f in arrows),
    )
    result = Fiber(A, cat, objects, arrows)
    pi.cache[key] = result
    return result
