"""Companions, conjoints, equipments and the equivalence notions used by the classifiers."""

from __future__ import annotations

from dataclasses import dataclass

from app.core.dblcat import FiniteDoubleCategory, hop


@dataclass(frozen=True)
class CompanionPair:
    """`hmor` is a companion of `vmor`; `unit`/`counit` are the two witnessing squares.

    For companions `unit` has boundary `(f, id, u, id)` and `counit` `(id, f, id, u)`.
    For conjoints they are `(f, id, id, u)` and `(id, f, u, id)` respectively.
    """

    vmor: str
    hmor: str
    unit: str
    counit: str


@dataclass(frozen=True)
class EquipmentCheck:
    ok: bool
    missing: str | None = None
    vmor: str | None = None


@dataclass(frozen=True)
class WeakInverse:
    gamma: str
    eta: str
    eta2: str
    epsilon: str
    epsilon2: str


@dataclass(frozen=True)
class VerticalEquivalence:
    inverse: str
    unit: str
    counit: str


def find_companions(A: FiniteDoubleCategory, u: str) -> list[CompanionPair]:
    """All (f, phi, psi) with psi beside phi equal to e_f and psi over phi equal to id_u."""
    a, b = A.vmors[u]
    found = []
    for f in A.hhom(a, b):
        for phi in A.squares_with(f, A.idh[b], u, A.idv[b]):
            for psi in A.squares_with(A.idh[a], f, A.idv[a], u):
                if A.hcomp_sq.get((psi, phi)) == A.esq[f] and A.vcomp_sq.get((psi, phi)) == A.idsq[u]:
                    found.append(CompanionPair(u, f, phi, psi))
    return found


def find_conjoints(A: FiniteDoubleCategory, u: str) -> list[CompanionPair]:
    """Companions of u in the horizontal opposite, read back in A."""
    return find_companions(hop(A), u)


def is_companion_pair(A: FiniteDoubleCategory, pair: CompanionPair) -> bool:
    return pair in find_companions(A, pair.vmor)


def is_equipment(A: FiniteDoubleCategory) -> EquipmentCheck:
    for u in A.vmors:
        if not find_companions(A, u):
            return EquipmentCheck(False, "companion", u)
        if not find_conjoints(A, u):
            return EquipmentCheck(False, "conjoint", u)
    return EquipmentCheck(True)


def vertical_isomorphism(A: FiniteDoubleCategory, f: str, g: str) -> str | None:
    """A vertically invertible square with identity sides from f to g, if any."""
    a, b = A.hmors[f]
    for s in A.squares_with(f, g, A.idv[a], A.idv[b]):
        if A.is_vertically_invertible(s):
            return s
    return None


def horizontal_isomorphism(A: FiniteDoubleCategory, u: str, w: str) -> str | None:
    """A horizontally invertible square with identity top and bottom from u to w, if any."""
    a, b = A.vmors[u]
    for s in A.squares_with(A.idh[a], A.idh[b], u, w):
        if A.is_horizontally_invertible(s):
            return s
    return None


def is_vertical_equivalence(A: FiniteDoubleCategory, u: str) -> VerticalEquivalence | None:
    """An inverse v with u;v and v;u isomorphic to identities in the vertical 2-category."""
    a, b = A.vmors[u]
    for v in A.vhom(b, a):
        unit = horizontal_isomorphism(A, A.idv[a], A.vc(u, v))
        if unit is None:
            continue
        counit = horizontal_isomorphism(A, A.vc(v, u), A.idv[b])
        if counit is not None:
            return VerticalEquivalence(v, unit, counit)
    return None


def _invertible_globes(A: FiniteDoubleCategory, obj: str, left: str, right: str) -> list[str]:
    return [
        s for s in A.squares_with(A.idh[obj], A.idh[obj], left, right) if A.is_horizontally_invertible(s)
    ]


def is_weakly_vertically_invertible(A: FiniteDoubleCategory, alpha: str) -> WeakInverse | None:
    """Search for gamma and four horizontally invertible squares exhibiting alpha as an equivalence.

    With alpha = (a, a', u, u'), gamma has boundary (a', a, v, v'); the witnesses are
    eta: e => v;u and eta2: e => v';u' at the bottom corners, epsilon: u;v => e and
    epsilon2: u';v' => e at the top corners.
    """
    bd = A.boundary(alpha)
    top_l, top_r, bot_l, bot_r = A.corners(alpha)
    for v in A.vhom(bot_l, top_l):
        for v2 in A.vhom(bot_r, top_r):
            gammas = A.squares_with(bd.bottom, bd.top, v, v2)
            if not gammas:
                continue
            etas = _invertible_globes(A, bot_l, A.idv[bot_l], A.vc(v, bd.left))
            eta2s = _invertible_globes(A, bot_r, A.idv[bot_r], A.vc(v2, bd.right))
            epss = _invertible_globes(A, top_l, A.vc(bd.left, v), A.idv[top_l])
            eps2s = _invertible_globes(A, top_r, A.vc(bd.right, v2), A.idv[top_r])
            if not (etas and eta2s and epss and eps2s):
                continue
            for gamma in gammas:
                lower = A.vcs(gamma, alpha)
                upper = A.vcs(alpha, gamma)
                for eta in etas:
                    for eta2 in eta2s:
                        if A.hcs(eta, lower) != A.hcs(A.esq[bd.bottom], eta2):
                            continue
                        for eps in epss:
                            for eps2 in eps2s:
                                if A.hcs(eps, A.esq[bd.top]) == A.hcs(upper, eps2):
                                    return WeakInverse(gamma, eta, eta2, eps, eps2)
    return None
