"""Cartesian arrows, lifts, cleavages and vh factorizations for finite functors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

from .category import CatFunctor
from .errors import InternalConsistencyError, NotAFibration, PreconditionError


@dataclass(frozen=True)
class CartesianWitness:
    """A (xi, Z) at which post-composition by h fails to be a bijection."""

    xi: int
    Z: int
    source_members: tuple[int, ...]
    target_members: tuple[int, ...]
    images: tuple[int, ...]

    def as_dict(self):
        return {
            "xi": self.xi,
            "Z": self.Z,
            "hom_xi": list(self.source_members),
            "hom_xi_alpha": list(self.target_members),
            "images": list(self.images),
        }


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: object = None

    def __bool__(self):
        return self.holds


def _bijective(images, target) -> bool:
    return len(set(images)) == len(images) == len(target)


def is_cartesian(pi: CatFunctor, h: int) -> Verdict:
    """Decide whether ``h`` is Cartesian for ``pi`` by the full universal property.

    Quantifies over every base arrow xi into pi(dom h), identities included,
    and every object Z over dom(xi).
    """
    key = ("cartesian", h)
    if key in pi.cache:
        return pi.cache[key]
    total, base = pi.source, pi.target
    alpha = pi.arr_map[h]
    X, Y = total.arrows[h]
    A = base.dom(alpha)
    verdict = Verdict(True)
    for xi in range(base.n_arrows):
        if base.cod(xi) != A:
            continue
        xa = base.comp[(xi, alpha)]
        for Z in pi.objects_over(base.dom(xi)):
            src = pi.members_over(xi, Z, X)
            tgt = pi.members_over(xa, Z, Y)
            images = tuple(total.comp[(k, h)] for k in src)
            if not _bijective(images, tgt):
                verdict = Verdict(False, CartesianWitness(xi, Z, src, tgt, images))
                break
        if not verdict:
            break
    pi.cache[key] = verdict
    return verdict


def is_precartesian(pi: CatFunctor, h: int, side: Literal["cartesian", "cocartesian"] = "cartesian") -> Verdict:
    """Weakened universal property quantifying only over one fibre.

    ``cartesian``: h is terminal in X_A over alpha into Y.
    ``cocartesian``: h is initial among arrows over alpha out of dom h.
    """
    total, base = pi.source, pi.target
    alpha = pi.arr_map[h]
    X, Y = total.arrows[h]
    A, B = base.arrows[alpha]
    if side == "cartesian":
        idA = base.identity[A]
        for Z in pi.objects_over(A):
            src = pi.members_over(idA, Z, X)
            tgt = pi.members_over(alpha, Z, Y)
            images = tuple(total.comp[(k, h)] for k in src)
            if not _bijective(images, tgt):
                return Verdict(False, CartesianWitness(idA, Z, src, tgt, images))
        return Verdict(True)
    if side == "cocartesian":
        idB = base.identity[B]
        for Yp in pi.objects_over(B):
            for g in pi.members_over(alpha, X, Yp):
                factors = [w for w in pi.members_over(idB, Y, Yp) if total.comp[(h, w)] == g]
                if len(factors) != 1:
                    return Verdict(False, {"competitor": g, "factorizations": factors})
        return Verdict(True)
    raise ValueError(f"unknown side {side!r}")


def cartesian_lift(pi: CatFunctor, alpha: int, Y: int) -> int | None:
    """Lowest-indexed Cartesian arrow over alpha with codomain Y, or None.

    Over an identity the identity arrow of Y is returned.
    """
    base = pi.target
    if pi.obj_map[Y] != base.cod(alpha):
        raise PreconditionError(f"object {Y} does not lie over the codomain of base arrow {alpha}")
    if base.is_identity(alpha):
        return pi.source.identity[Y]
    candidates = sorted(
        f for X in pi.objects_over(base.dom(alpha)) for f in pi.members_over(alpha, X, Y)
    )
    for f in candidates:
        if is_cartesian(pi, f):
            return f
    return None


def cartesian_lifts(pi: CatFunctor, alpha: int, Y: int) -> list[int]:
    """All Cartesian arrows over alpha with codomain Y, ascending."""
    base = pi.target
    return sorted(
        f
        for X in pi.objects_over(base.dom(alpha))
        for f in pi.members_over(alpha, X, Y)
        if is_cartesian(pi, f)
    )


def missing_lifts(pi: CatFunctor) -> list[tuple[int, int]]:
    base = pi.target
    return [
        (alpha, Y)
        for alpha in range(base.n_arrows)
        for Y in pi.objects_over(base.cod(alpha))
        if cartesian_lift(pi, alpha, Y) is None
    ]


def is_fibration(pi: CatFunctor) -> Verdict:
    missing = missing_lifts(pi)
    return Verdict(not missing, missing or None)


@dataclass(frozen=True)
class Cleavage:
    fibration: CatFunctor = field(repr=False, compare=False)
    choice: Mapping[tuple[int, int], int]

    def lift(self, alpha: int, Y: int) -> int:
        try:
            return self.choice[(alpha, Y)]
        except KeyError:
            raise NotAFibration(alpha, Y) from None

    def pullback_object(self, alpha: int, Y: int) -> int:
        """alpha*(Y), the domain of the chosen lift."""
        return self.fibration.source.dom(self.lift(alpha, Y))

    @classmethod
    def from_choice(cls, pi: CatFunctor, choice: Mapping[tuple[int, int], int]) -> Cleavage:
        base, total = pi.target, pi.source
        for alpha in range(base.n_arrows):
            for Y in pi.objects_over(base.cod(alpha)):
                if (alpha, Y) not in choice:
                    raise NotAFibration(alpha, Y, f"cleavage has no lift for {(alpha, Y)}")
        for (alpha, Y), h in choice.items():
            if pi.arr_map[h] != alpha or total.cod(h) != Y:
                raise PreconditionError(f"chosen arrow {h} is not over {alpha} into {Y}")
            if not is_cartesian(pi, h):
                raise PreconditionError(f"chosen arrow {h} is not Cartesian")
            if base.is_identity(alpha) and h != total.identity[Y]:
                raise PreconditionError(f"lift of an identity must be the identity, got {h}")
        return cls(pi, dict(choice))


def make_cleavage(pi: CatFunctor, prefer: Literal["lowest", "highest"] = "lowest") -> Cleavage:
    """Tabulate a choice of Cartesian lifts; raises NotAFibration if one is missing.

    ``lowest`` is the canonical tie-break.  ``highest`` is an alternative
    choice used to test independence from the cleavage.
    """
    key = ("cleavage", prefer)
    if key in pi.cache:
        return pi.cache[key]
    base, total = pi.target, pi.source
    choice = {}
    for alpha in range(base.n_arrows):
        for Y in pi.objects_over(base.cod(alpha)):
            if base.is_identity(alpha):
                choice[(alpha, Y)] = total.identity[Y]
                continue
            lifts = cartesian_lifts(pi, alpha, Y)
            if not lifts:
                raise NotAFibration(alpha, Y)
            choice[(alpha, Y)] = lifts[0] if prefer == "lowest" else lifts[-1]
    cleavage = Cleavage(pi, choice)
    pi.cache[key] = cleavage
    return cleavage


def vertical_factor(pi: CatFunctor, z: int, h: int) -> int:
    """The unique vertical v with v.h = z, for Cartesian h over pi(z)."""
    total, base = pi.source, pi.target
    A = base.dom(pi.arr_map[z])
    found = [
        v
        for v in pi.members_over(base.identity[A], total.dom(z), total.dom(h))
        if total.comp[(v, h)] == z
    ]
    if len(found) != 1:
        raise InternalConsistencyError(
            f"expected exactly one vertical factor of {total.arrow_name(z)} through "
            f"{total.arrow_name(h)}, found {found}"
        )
    return found[0]


@dataclass(frozen=True)
class VhPair:
    vertical: int
    horizontal: int
    fibration: CatFunctor = field(repr=False, compare=False)

    @property
    def composite(self) -> int:
        return self.fibration.source.comp[(self.vertical, self.horizontal)]

    @property
    def base_arrow(self) -> int:
        return self.fibration.arr_map[self.horizontal]


def vh_factorize(pi: CatFunctor, cleavage: Cleavage, z: int) -> VhPair:
    """z = v.h with h the chosen lift of pi(z) into cod(z)."""
    h = cleavage.lift(pi.arr_map[z], pi.source.cod(z))
    return VhPair(vertical_factor(pi, z, h), h, pi)


def vh_factorizations(pi: CatFunctor, z: int) -> list[VhPair]:
    """Every vh pair composing to z (not only the cleavage-chosen one)."""
    total = pi.source
    alpha = pi.arr_map[z]
    out = []
    for h in cartesian_lifts(pi, alpha, total.cod(z)):
        for v in pi.members_over(pi.target.identity[pi.target.dom(alpha)], total.dom(z), total.dom(h)):
            if total.comp[(v, h)] == z:
                out.append(VhPair(v, h, pi))
    return out


def vh_pairs_equivalent(p1: VhPair, p2: VhPair) -> int | None:
    """The unique vertical Cartesian s with v1.s = v2 and s.h2 = h1, or None."""
    pi = p1.fibration
    total, base = pi.source, pi.target
    A = base.dom(pi.arr_map[p1.horizontal])
    if pi.arr_map[p2.horizontal] != pi.arr_map[p1.horizontal]:
        return None
    found = [
        s
        for s in pi.members_over(base.identity[A], total.dom(p1.horizontal), total.dom(p2.horizontal))
        if total.comp.get((p1.vertical, s)) == p2.vertical
        and total.comp[(s, p2.horizontal)] == p1.horizontal
        and is_cartesian(pi, s)
    ]
    if len(found) > 1:
        raise InternalConsistencyError(f"equivalence witness not unique: {found}")
    if found and not total.is_invertible(found[0]):
        raise InternalConsistencyError(f"equivalence witness {found[0]} is not invertible")
    return found[0] if found else None


def compose_vh_pairs(pi: CatFunctor, p1: VhPair, p2: VhPair, cleavage: Cleavage | None = None) -> VhPair:
    """Represent z1.z2 as (v1.w, k.h2) by interpolating a square k, w.

    k is the chosen lift of pi(h1) with codomain dom(h2) and w the unique
    vertical with w.k = h1.v2.
    """
    total = pi.source
    if total.cod(p1.horizontal) != total.dom(p2.vertical):
        raise PreconditionError("vh pairs are not composable")
    cleavage = cleavage or make_cleavage(pi)
    k = cleavage.lift(pi.arr_map[p1.horizontal], total.dom(p2.horizontal))
    w = vertical_factor(pi, total.comp[(p1.horizontal, p2.vertical)], k)
    result = VhPair(total.comp[(p1.vertical, w)], total.comp[(k, p2.horizontal)], pi)
    expected = total.comp[(p1.composite, p2.composite)]
    if result.composite != expected:
        raise InternalConsistencyError("interpolation square does not close")
    return result


# Property scans over a whole fibration.  Each returns counterexamples.

def lemma1_counterexamples(pi: CatFunctor) -> list[tuple[int, int, int]]:
    """Triples (k, k', h) with k = k'.h, k and h Cartesian, k' not."""
    total = pi.source
    bad = []
    for (kp, h), k in total.comp.items():
        if is_cartesian(pi, k) and is_cartesian(pi, h) and not is_cartesian(pi, kp):
            bad.append((k, kp, h))
    return bad


def monicity_counterexamples(pi: CatFunctor) -> list[tuple[int, int, int]]:
    """(k, k', h): h Cartesian, k != k' parallel over one base arrow, k.h = k'.h."""
    total = pi.source
    bad = []
    for h in range(total.n_arrows):
        if not is_cartesian(pi, h):
            continue
        seen: dict[tuple[int, int, int], int] = {}
        for k in total.arrows_into(total.dom(h)):
            key = (pi.arr_map[k], total.comp[(k, h)], total.dom(k))
            other = seen.get(key)
            if other is not None:
                bad.append((other, k, h))
            else:
                seen[key] = k
    return bad


def vertical_cartesian_not_invertible(pi: CatFunctor) -> list[int]:
    total = pi.source
    return [
        f for f in range(total.n_arrows) if pi.is_vertical(f) and is_cartesian(pi, f) and not total.is_invertible(f)
    ]


def cartesian_not_precartesian(pi: CatFunctor) -> list[int]:
    return [h for h in range(pi.source.n_arrows) if is_cartesian(pi, h) and not is_precartesian(pi, h)]
