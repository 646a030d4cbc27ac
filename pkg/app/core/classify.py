"""Lifting search and the explicit characterizations of fibrations and equivalences of double categories."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from app.core.dblcat import DoubleFunctor, FiniteDoubleCategory, to_terminal
from app.core.equipment import (
    CompanionPair,
    find_companions,
    find_conjoints,
    horizontal_isomorphism,
    is_equipment,
    is_vertical_equivalence,
    is_weakly_vertically_invertible,
)
from app.core.logger import APP_LOGGER
from app.core.presentation import (
    GenKey,
    ShapeInclusion,
    ShapeMap,
    evaluate,
    has_hom,
    iter_homs,
    postcompose,
)
from app.core.shapes import anodyne_maps, builtin_inclusion, builtin_shape, generating_cofibrations

NAIVE_CONDITIONS = ("f1", "f2", "f3", "f4", "f5")
BIEQUIVALENCE_CONDITIONS = ("w1", "w2", "w3", "w4")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failing: str | None = None
    witness: tuple[Any, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "failing": self.failing, "witness": [str(w) for w in self.witness]}


@dataclass(frozen=True)
class LiftingResult:
    ok: bool
    inclusion: str
    problems: int = 0
    top: ShapeMap | None = None
    bottom: ShapeMap | None = None

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ok": self.ok, "inclusion": self.inclusion, "problems": self.problems}
        if self.top is not None and self.bottom is not None:
            out["unsolvable"] = {"top": self.top.describe(), "bottom": self.bottom.describe()}
        return out


# --- lifting -----------------------------------------------------------------------------


def _preimages(F: DoubleFunctor) -> dict[str, dict[str, list[str]]]:
    out: dict[str, dict[str, list[str]]] = {"obj": {}, "hmor": {}, "vmor": {}, "sq": {}}
    for sort, comp in (("obj", F.obj), ("hmor", F.hmor), ("vmor", F.vmor), ("sq", F.sq)):
        for x, y in comp.items():
            out[sort].setdefault(y, []).append(x)
    return out


def _pins(i: ShapeInclusion, values: Mapping[GenKey, str]) -> dict[GenKey, set[str]] | None:
    """Restrictions on codomain generators forced by `values` on domain generators."""
    pins: dict[GenKey, set[str]] = {}
    for key in i.domain.generator_keys:
        expr = i.mapping[key]
        if expr.op != "gen":
            continue
        target = expr.args
        wanted = {values[key]}
        if target in pins:
            pins[target] &= wanted
            if not pins[target]:
                return None
        else:
            pins[target] = wanted
    return pins


def _agrees(i: ShapeInclusion, X: FiniteDoubleCategory, values: Mapping[GenKey, str]):
    def accept(assign: dict[GenKey, str]) -> bool:
        return all(evaluate(i.mapping[k], X, assign) == values[k] for k in i.domain.generator_keys)

    return accept


def has_rlp(F: DoubleFunctor, i: ShapeInclusion) -> LiftingResult:
    """Every commuting square from i to F has a diagonal filler."""
    A, B = F.source, F.target
    P, Q = i.domain, i.codomain
    pre = _preimages(F)
    problems = 0
    for a in iter_homs(P, A):
        Fa = postcompose(F, a)
        pins = _pins(i, Fa.assignment)
        if pins is None:
            continue
        for b in iter_homs(Q, B, allowed=pins, accept=_agrees(i, B, Fa.assignment)):
            problems += 1
            lift_pins = _pins(i, a.assignment)
            if lift_pins is None:
                return LiftingResult(False, i.name, problems, a, b)
            allowed: dict[GenKey, set[str]] = {}
            for key in Q.generator_keys:
                options = set(pre[key[0]].get(b[key], ()))
                if key in lift_pins:
                    options &= lift_pins[key]
                allowed[key] = options
            if not has_hom(Q, A, allowed=allowed, accept=_agrees(i, A, a.assignment)):
                APP_LOGGER.debug(f"No lift of {F.name} against {i.name} after {problems} problem(s)")
                return LiftingResult(False, i.name, problems, a, b)
    return LiftingResult(True, i.name, problems)


def rlp_against(F: DoubleFunctor, inclusions: list[ShapeInclusion]) -> dict[str, LiftingResult]:
    return {i.name: has_rlp(F, i) for i in inclusions}


def rlp_generating_cofibrations(F: DoubleFunctor) -> dict[str, LiftingResult]:
    return rlp_against(F, generating_cofibrations())


def rlp_anodyne(F: DoubleFunctor) -> dict[str, LiftingResult]:
    return rlp_against(F, anodyne_maps())


# --- companion lifting ---------------------------------------------------------------------


def companion_lifts(A: FiniteDoubleCategory, u: str, conjoint: bool = False) -> list[CompanionPair]:
    """Extensions of `u: V2 -> A` along the inclusion into the free companion (or conjoint) pair."""
    i = builtin_inclusion("j_conjoint" if conjoint else "j_companion")
    a, b = A.vmors[u]
    Q = i.codomain
    allowed = {("vmor", "u"): {u}, ("obj", "0"): {a}, ("obj", "1"): {b}}
    unit, counit = ("eps", "eta") if conjoint else ("phi", "psi")
    return [CompanionPair(u, x[("hmor", "f")], x[("sq", unit)], x[("sq", counit)]) for x in iter_homs(Q, A, allowed=allowed)]


def horizontal_companion_lifts(A: FiniteDoubleCategory, f: str, conjoint: bool = False) -> list[CompanionPair]:
    """Extensions of `f: H2 -> A` along the inclusion into the free companion (or conjoint) pair."""
    i = builtin_inclusion("h_conjoint" if conjoint else "h_companion")
    a, b = A.hmors[f]
    src, tgt = ("1", "0") if conjoint else ("0", "1")
    allowed = {("hmor", "f"): {f}, ("obj", src): {a}, ("obj", tgt): {b}}
    unit, counit = ("eps", "eta") if conjoint else ("phi", "psi")
    return [
        CompanionPair(x[("vmor", "u")], f, x[("sq", unit)], x[("sq", counit)])
        for x in iter_homs(i.codomain, A, allowed=allowed)
    ]


# --- trivial fibrations ----------------------------------------------------------------------


def _boundaries(A: FiniteDoubleCategory):
    shape = builtin_shape("square_boundary")
    for x in iter_homs(shape, A):
        yield x[("hmor", "f")], x[("hmor", "g")], x[("vmor", "u")], x[("vmor", "v")]


def is_trivial_fibration(F: DoubleFunctor) -> Verdict:
    """Surjective on objects, full on both kinds of morphisms, fully faithful on squares."""
    A, B = F.source, F.target
    hit = set(F.obj.values())
    for y in B.objects:
        if y not in hit:
            return Verdict(False, "surjective_objects", (y,))
    for a in A.objects:
        for c in A.objects:
            images = {F.hmor[f] for f in A.hhom(a, c)}
            for g in B.hhom(F.obj[a], F.obj[c]):
                if g not in images:
                    return Verdict(False, "full_horizontal", (a, c, g))
            images = {F.vmor[u] for u in A.vhom(a, c)}
            for w in B.vhom(F.obj[a], F.obj[c]):
                if w not in images:
                    return Verdict(False, "full_vertical", (a, c, w))
    for f, g, u, v in _boundaries(A):
        upstairs = A.squares_with(f, g, u, v)
        downstairs = B.squares_with(F.hmor[f], F.hmor[g], F.vmor[u], F.vmor[v])
        images = [F.sq[s] for s in upstairs]
        if len(set(images)) != len(images):
            return Verdict(False, "faithful_squares", (f, g, u, v))
        if set(images) != set(downstairs):
            return Verdict(False, "full_squares", (f, g, u, v))
    return Verdict(True)


def is_surjective_equivalence(F: DoubleFunctor) -> Verdict:
    """On horizontal categories only: surjective on objects, fully faithful on horizontal morphisms."""
    A, B = F.source, F.target
    hit = set(F.obj.values())
    for y in B.objects:
        if y not in hit:
            return Verdict(False, "surjective_objects", (y,))
    for a in A.objects:
        for c in A.objects:
            images = [F.hmor[f] for f in A.hhom(a, c)]
            if len(set(images)) != len(images):
                return Verdict(False, "faithful_horizontal", (a, c))
            if set(images) != set(B.hhom(F.obj[a], F.obj[c])):
                return Verdict(False, "full_horizontal", (a, c))
    return Verdict(True)


# --- naive fibrations --------------------------------------------------------------------------


def _f1(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    for a in A.objects:
        for w in B.vmors:
            if B.vmors[w][1] != F.obj[a] or is_vertical_equivalence(B, w) is None:
                continue
            lifted = any(
                F.vmor[u] == w and is_vertical_equivalence(A, u) is not None
                for u in A.vmors
                if A.vmors[u][1] == a
            )
            if not lifted:
                return Verdict(False, "f1", (a, w))
    return Verdict(True)


def _f2(F: DoubleFunctor, conjoint: bool = False) -> Verdict:
    A, B = F.source, F.target
    search = find_conjoints if conjoint else find_companions
    tag = "f3" if conjoint else "f2"
    for u in A.vmors:
        upstairs = {(F.hmor[p.hmor], F.sq[p.unit], F.sq[p.counit]) for p in search(A, u)}
        for q in search(B, F.vmor[u]):
            if (q.hmor, q.unit, q.counit) not in upstairs:
                return Verdict(False, tag, (u, q.hmor, q.unit, q.counit))
    return Verdict(True)


def _f4(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    for f, (a, c) in A.hmors.items():
        Ff = F.hmor[f]
        lifted = {
            F.sq[s]
            for s in A.squares
            if A.is_h_globular(s) and A.boundary(s).bottom == f and A.is_vertically_invertible(s)
        }
        for beta in B.squares:
            bd = B.boundary(beta)
            if bd.bottom != Ff or not B.is_h_globular(beta) or not B.is_vertically_invertible(beta):
                continue
            if beta not in lifted:
                return Verdict(False, "f4", (f, beta))
    return Verdict(True)


def _f5(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    for u in A.vmors:
        Fu = F.vmor[u]
        lifted = {
            F.sq[s]
            for s in A.squares
            if A.is_v_globular(s) and A.boundary(s).right == u and A.is_horizontally_invertible(s)
        }
        for beta in B.squares:
            bd = B.boundary(beta)
            if bd.right != Fu or not B.is_v_globular(beta) or not B.is_horizontally_invertible(beta):
                continue
            if beta not in lifted:
                return Verdict(False, "f5", (u, beta))
    return Verdict(True)


def naive_fibration_conditions(F: DoubleFunctor) -> dict[str, Verdict]:
    return {
        "f1": _f1(F),
        "f2": _f2(F),
        "f3": _f2(F, conjoint=True),
        "f4": _f4(F),
        "f5": _f5(F),
    }


def is_naive_fibration(F: DoubleFunctor) -> Verdict:
    for tag, verdict in naive_fibration_conditions(F).items():
        if not verdict:
            return verdict
    return Verdict(True)


# --- double biequivalences ------------------------------------------------------------------


def _w1(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    images = set(F.obj.values())
    for y in B.objects:
        found = any(
            B.vmors[w][1] in images and is_vertical_equivalence(B, w) is not None
            for w in B.vmors
            if B.vmors[w][0] == y
        )
        if not found:
            return Verdict(False, "w1", (y,))
    return Verdict(True)


def _w2(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    for a in A.objects:
        for c in A.objects:
            for w in B.vhom(F.obj[a], F.obj[c]):
                if not any(horizontal_isomorphism(B, w, F.vmor[u]) is not None for u in A.vhom(a, c)):
                    return Verdict(False, "w2", (a, c, w))
    return Verdict(True)


def _w3(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    images = {F.hmor[g] for g in A.hmors}
    for f in B.hmors:
        found = False
        for beta in B.squares:
            bd = B.boundary(beta)
            if bd.top != f or bd.bottom not in images:
                continue
            if is_vertical_equivalence(B, bd.left) is None or is_vertical_equivalence(B, bd.right) is None:
                continue
            if is_weakly_vertically_invertible(B, beta) is not None:
                found = True
                break
        if not found:
            return Verdict(False, "w3", (f,))
    return Verdict(True)


def _w3_prime(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    for a in A.objects:
        for c in A.objects:
            for f in B.hhom(F.obj[a], F.obj[c]):
                found = any(
                    B.is_vertically_invertible(s)
                    for g in A.hhom(a, c)
                    for s in B.squares_with(f, F.hmor[g], B.idv[F.obj[a]], B.idv[F.obj[c]])
                )
                if not found:
                    return Verdict(False, "w3'", (a, c, f))
    return Verdict(True)


def _w4(F: DoubleFunctor) -> Verdict:
    A, B = F.source, F.target
    for f, g, u, v in _boundaries(A):
        upstairs = A.squares_with(f, g, u, v)
        images = [F.sq[s] for s in upstairs]
        downstairs = set(B.squares_with(F.hmor[f], F.hmor[g], F.vmor[u], F.vmor[v]))
        if len(set(images)) != len(images) or set(images) != downstairs:
            return Verdict(False, "w4", (f, g, u, v))
    return Verdict(True)


def biequivalence_conditions(F: DoubleFunctor, include_w3_prime: bool = False) -> dict[str, Verdict]:
    out = {"w1": _w1(F), "w2": _w2(F), "w3": _w3(F), "w4": _w4(F)}
    if include_w3_prime:
        out["w3'"] = _w3_prime(F)
    return out


def is_double_biequivalence(F: DoubleFunctor) -> Verdict:
    for tag in BIEQUIVALENCE_CONDITIONS:
        verdict = {"w1": _w1, "w2": _w2, "w3": _w3, "w4": _w4}[tag](F)
        if not verdict:
            return verdict
    return Verdict(True)


# --- aggregate ---------------------------------------------------------------------------------


@dataclass
class Classification:
    functor: str
    verdicts: dict[str, Any] = field(default_factory=dict)
    consistency: dict[str, bool] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return all(self.consistency.values())

    def as_dict(self) -> dict[str, Any]:
        return {
            "functor": self.functor,
            "verdicts": {k: self.verdicts[k] for k in sorted(self.verdicts)},
            "consistency": {k: self.consistency[k] for k in sorted(self.consistency)},
            "consistent": self.consistent,
        }


def classify(F: DoubleFunctor, with_lifting: bool = False) -> Classification:
    """All predicate verdicts, with the implications that must hold between equipments."""
    source_eq = is_equipment(F.source)
    target_eq = is_equipment(F.target)
    both = source_eq.ok and target_eq.ok
    tf = is_trivial_fibration(F)
    naive = naive_fibration_conditions(F)
    bieq = biequivalence_conditions(F, include_w3_prime=both)
    nf_ok = all(v.ok for v in naive.values())
    we_ok = all(bieq[t].ok for t in BIEQUIVALENCE_CONDITIONS)
    out = Classification(functor=F.name or f"{F.source.name}->{F.target.name}")
    out.verdicts.update(
        {
            "source_equipment": source_eq.ok,
            "target_equipment": target_eq.ok,
            "trivial_fibration": tf.as_dict(),
            "naive_fibration": nf_ok,
            "double_biequivalence": we_ok,
        }
    )
    out.verdicts.update({tag: v.as_dict() for tag, v in naive.items()})
    out.verdicts.update({tag: v.as_dict() for tag, v in bieq.items()})
    if both:
        f145 = naive["f1"].ok and naive["f4"].ok and naive["f5"].ok
        out.consistency["naive_iff_f1_f4_f5"] = nf_ok == f145
        out.consistency["trivial_iff_naive_and_biequivalence"] = tf.ok == (nf_ok and we_ok)
        out.consistency["trivial_implies_biequivalence"] = (not tf.ok) or we_ok
        with_w3_prime = all(bieq[t].ok for t in ("w1", "w2", "w3'", "w4"))
        out.consistency["biequivalence_via_w3_prime"] = we_ok == with_w3_prime
    if with_lifting:
        lifts = rlp_generating_cofibrations(F)
        out.verdicts["rlp_I"] = {k: v.as_dict() for k, v in lifts.items()}
        out.consistency["trivial_iff_rlp_I"] = tf.ok == all(v.ok for v in lifts.values())
        anodyne = rlp_anodyne(F)
        out.verdicts["rlp_J"] = {k: v.as_dict() for k, v in anodyne.items()}
    APP_LOGGER.info(
        f"Classified {out.functor}: TF={tf.ok} NF={nf_ok} WE={we_ok} consistent={out.consistent}"
    )
    return out


def is_naive_fibrant(A: FiniteDoubleCategory) -> bool:
    """A -> 1 lifts against every anodyne map."""
    F = to_terminal(A)
    return all(r.ok for r in rlp_anodyne(F).values())
