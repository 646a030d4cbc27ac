"""Finite strict double categories and 2-categories: data, law checking and constructions.

Composition tables are fully materialized and stored in diagrammatic order: `hcomp_h[(f, g)]` is
`f` followed by `g`, `hcomp_sq[(a, b)]` puts `a` left of `b`, `vcomp_sq[(a, b)]` puts `a` above `b`.
A square's boundary is `(top, bottom, left, right)`; with corners named
`tl, tr, bl, br` the top runs `tl -> tr`, the left runs `tl -> bl`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, NamedTuple

from app.core.errors import LawViolation, NonComposablePair, ValidationReport
from app.core.logger import APP_LOGGER

MAX_WITNESSES_PER_LAW = 20


class Boundary(NamedTuple):
    top: str
    bottom: str
    left: str
    right: str


# --- 2-categories ------------------------------------------------------------------


@dataclass(frozen=True)
class Finite2Category:
    """A finite strict 2-category.

    `comp` composes 1-cells, `vcomp2` stacks 2-cells (first then second), `hcomp2` pastes 2-cells
    side by side along a shared object.
    """

    name: str
    objects: tuple[str, ...]
    onecells: Mapping[str, tuple[str, str]]
    twocells: Mapping[str, tuple[str, str]]
    comp: Mapping[tuple[str, str], str]
    vcomp2: Mapping[tuple[str, str], str]
    hcomp2: Mapping[tuple[str, str], str]
    id1: Mapping[str, str]
    id2: Mapping[str, str]

    @cached_property
    def cells_between(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out: dict[tuple[str, str], list[str]] = {}
        for f, ends in self.onecells.items():
            out.setdefault(ends, []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def twocells_between(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out: dict[tuple[str, str], list[str]] = {}
        for a, ends in self.twocells.items():
            out.setdefault(ends, []).append(a)
        return {k: tuple(v) for k, v in out.items()}

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self.cells_between.get((a, b), ())

    def hom2(self, f: str, g: str) -> tuple[str, ...]:
        return self.twocells_between.get((f, g), ())

    def is_invertible_1cell(self, f: str) -> bool:
        a, b = self.onecells[f]
        return any(
            self.comp[(f, g)] == self.id1[a] and self.comp[(g, f)] == self.id1[b] for g in self.hom(b, a)
        )

    @classmethod
    def from_category(
        cls,
        name: str,
        objects: Iterable[str],
        arrows: Mapping[str, tuple[str, str]],
        comp: Mapping[tuple[str, str], str],
        identities: Mapping[str, str],
    ) -> "Finite2Category":
        """A 1-category seen as a 2-category with identity 2-cells only."""
        twocells = {f"1_{f}": (f, f) for f in arrows}
        id2 = {f: f"1_{f}" for f in arrows}
        vcomp2 = {(f"1_{f}", f"1_{f}"): f"1_{f}" for f in arrows}
        hcomp2 = {(f"1_{f}", f"1_{g}"): f"1_{h}" for (f, g), h in comp.items()}
        return cls(name, tuple(objects), dict(arrows), twocells, dict(comp), vcomp2, hcomp2, dict(identities), id2)

    @classmethod
    def from_preorder(
        cls,
        name: str,
        objects: Iterable[str],
        leq: Iterable[tuple[str, str]],
        labels: Mapping[tuple[str, str], str] | None = None,
    ) -> "Finite2Category":
        """The thin category of a preorder; `leq` is closed reflexively and transitively."""
        objs = tuple(objects)
        rel = set(leq) | {(a, a) for a in objs}
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in list(product(rel, rel)):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        labels = dict(labels or {})
        names: dict[tuple[str, str], str] = {}
        for a in objs:
            for b in objs:
                if (a, b) in rel:
                    names[(a, b)] = f"id_{a}" if a == b else labels.get((a, b), f"{a}{b}")
        arrows = {names[k]: k for k in names}
        comp = {}
        for (a, b), f in names.items():
            for c in objs:
                if (b, c) in rel:
                    comp[(f, names[(b, c)])] = names[(a, c)]
        return cls.from_category(name, objs, arrows, comp, {a: names[(a, a)] for a in objs})

    @classmethod
    def locally_posetal(
        cls,
        base: "Finite2Category",
        leq: Iterable[tuple[str, str]],
        name: str | None = None,
    ) -> "Finite2Category":
        """Add a 2-cell `f~g` whenever `f <= g` for parallel 1-cells of a 1-category."""
        rel = set(leq) | {(f, f) for f in base.onecells}
        changed = True
        while changed:
            changed = False
            for (f, g), (h, k) in list(product(rel, rel)):
                if g == h and (f, k) not in rel:
                    rel.add((f, k))
                    changed = True
        for f, g in rel:
            if base.onecells[f] != base.onecells[g]:
                raise LawViolation(f"2-cell {f} <= {g} between non-parallel 1-cells")

        def cell(f: str, g: str) -> str:
            return f"1_{f}" if f == g else f"{f}~{g}"

        twocells = {cell(f, g): (f, g) for f, g in sorted(rel)}
        vcomp2 = {}
        for (f, g), (h, k) in product(sorted(rel), sorted(rel)):
            if g == h:
                vcomp2[(cell(f, g), cell(h, k))] = cell(f, k)
        hcomp2 = {}
        for (f, g), (h, k) in product(sorted(rel), sorted(rel)):
            if (f, h) in base.comp:
                left, right = base.comp[(f, h)], base.comp[(g, k)]
                if (left, right) not in rel:
                    raise LawViolation(f"2-cells {f}~{g} and {h}~{k} do not compose")
                hcomp2[(cell(f, g), cell(h, k))] = cell(left, right)
        return cls(
            name or f"{base.name}+2",
            base.objects,
            dict(base.onecells),
            twocells,
            dict(base.comp),
            vcomp2,
            hcomp2,
            dict(base.id1),
            {f: cell(f, f) for f in base.onecells},
        )


def validate_2category(C: Finite2Category) -> ValidationReport:
    report = ValidationReport(subject=f"2-category {C.name}")
    for f, (a, b) in C.onecells.items():
        if a not in C.objects or b not in C.objects:
            report.add("LawViolation", f"1-cell {f} has unknown endpoint", f)
    for a in C.objects:
        if C.onecells.get(C.id1.get(a, ""), None) != (a, a):
            report.add("LawViolation", f"identity of {a} is not a loop on {a}", a)
    for alpha, (f, g) in C.twocells.items():
        if C.onecells.get(f) is None or C.onecells.get(f) != C.onecells.get(g):
            report.add("LawViolation", f"2-cell {alpha} between non-parallel 1-cells", alpha)
    if not report.ok:
        return report

    for (f, (a, b)), (g, (c, d)) in product(C.onecells.items(), C.onecells.items()):
        if b == c and C.onecells.get(C.comp.get((f, g), "")) != (a, d):
            report.add("NonComposablePair", f"composite {f};{g} missing or ill-typed", f, g)
    for (x, (f, g)), (y, (h, k)) in product(C.twocells.items(), C.twocells.items()):
        if g == h and C.twocells.get(C.vcomp2.get((x, y), "")) != (f, k):
            report.add("NonComposablePair", f"vertical composite {x};{y} missing or ill-typed", x, y)
        if C.onecells[f][1] == C.onecells[h][0]:
            want = (C.comp[(f, h)], C.comp[(g, k)])
            if C.twocells.get(C.hcomp2.get((x, y), "")) != want:
                report.add("NonComposablePair", f"horizontal composite {x}*{y} missing or ill-typed", x, y)
    if not report.ok:
        return report

    for f, (a, b) in C.onecells.items():
        if C.comp[(C.id1[a], f)] != f or C.comp[(f, C.id1[b])] != f:
            report.add("LawViolation", f"unit law fails at {f}", f)
    for x, (f, g) in C.twocells.items():
        if C.vcomp2[(C.id2[f], x)] != x or C.vcomp2[(x, C.id2[g])] != x:
            report.add("LawViolation", f"vertical unit law fails at {x}", x)
        a, b = C.onecells[f]
        if C.hcomp2[(C.id2[C.id1[a]], x)] != x or C.hcomp2[(x, C.id2[C.id1[b]])] != x:
            report.add("LawViolation", f"horizontal unit law fails at {x}", x)
    for (f, g), h in C.comp.items():
        if C.hcomp2[(C.id2[f], C.id2[g])] != C.id2[h]:
            report.add("LawViolation", f"identity 2-cells do not compose at {f};{g}", f, g)
    if not report.ok:
        return report

    for (f, g), fg in C.comp.items():
        for h, (s, _) in C.onecells.items():
            if s != C.onecells[g][1]:
                continue
            if C.comp[(fg, h)] != C.comp[(f, C.comp[(g, h)])]:
                report.add("LawViolation", f"associativity fails at {f},{g},{h}", f, g, h)
    for (x, y), xy in C.vcomp2.items():
        for z in C.twocells:
            if C.twocells[y][1] == C.twocells[z][0]:
                if C.vcomp2[(xy, z)] != C.vcomp2[(x, C.vcomp2[(y, z)])]:
                    report.add("LawViolation", f"vertical associativity fails at {x},{y},{z}", x, y, z)
    for (x, y), xy in C.hcomp2.items():
        end = C.onecells[C.twocells[y][0]][1]
        for z, (f, _) in C.twocells.items():
            if C.onecells[f][0] == end:
                if C.hcomp2[(xy, z)] != C.hcomp2[(x, C.hcomp2[(y, z)])]:
                    report.add("LawViolation", f"horizontal associativity fails at {x},{y},{z}", x, y, z)
    for (x, x2), (y, y2) in product(C.vcomp2.items(), C.vcomp2.items()):
        if (x[0], y[0]) in C.hcomp2 and (x[1], y[1]) in C.hcomp2:
            lhs = C.hcomp2[(x2, y2)]
            rhs = C.vcomp2[(C.hcomp2[(x[0], y[0])], C.hcomp2[(x[1], y[1])])]
            if lhs != rhs:
                report.add("LawViolation", f"interchange fails at {x},{y}", x, y)
    return report


def walking_arrow() -> Finite2Category:
    return Finite2Category.from_preorder("2", ("0", "1"), [("0", "1")], {("0", "1"): "f"})


def chain3() -> Finite2Category:
    return Finite2Category.from_preorder(
        "3", ("0", "1", "2"), [("0", "1"), ("1", "2")], {("0", "1"): "a", ("1", "2"): "b", ("0", "2"): "c"}
    )


def chaotic(n: int) -> Finite2Category:
    objs = tuple(str(i) for i in range(n))
    return Finite2Category.from_preorder(f"chaotic{n}", objs, [(a, b) for a in objs for b in objs])


def cyclic_group(n: int, obj: str = "*") -> Finite2Category:
    """The cyclic group of order n as a one-object category with generator `g1`."""
    names = [f"id_{obj}"] + [f"g{k}" for k in range(1, n)]
    arrows = {f: (obj, obj) for f in names}
    comp = {(names[i], names[j]): names[(i + j) % n] for i in range(n) for j in range(n)}
    return Finite2Category.from_category(f"Z{n}", (obj,), arrows, comp, {obj: names[0]})


def locally_chaotic(base: Finite2Category, name: str | None = None) -> Finite2Category:
    """Exactly one 2-cell between any two parallel 1-cells."""
    pairs = [(f, g) for f, e in base.onecells.items() for g, e2 in base.onecells.items() if e == e2]
    return Finite2Category.locally_posetal(base, pairs, name or f"{base.name}-lc")


def suspension_iso() -> Finite2Category:
    """Two objects, two parallel 1-cells f, g and an invertible 2-cell between them."""
    arrows = {"id_0": ("0", "0"), "id_1": ("1", "1"), "f": ("0", "1"), "g": ("0", "1")}
    comp = {("id_0", "id_0"): "id_0", ("id_1", "id_1"): "id_1"}
    for h in ("f", "g"):
        comp[("id_0", h)] = h
        comp[(h, "id_1")] = h
    base = Finite2Category.from_category("SigmaI", ("0", "1"), arrows, comp, {"0": "id_0", "1": "id_1"})
    return Finite2Category.locally_posetal(base, [("f", "g"), ("g", "f")], "SigmaI")


# --- double categories ---------------------------------------------------------------


@dataclass(frozen=True)
class FiniteDoubleCategory:
    name: str
    objects: tuple[str, ...]
    hmors: Mapping[str, tuple[str, str]]
    vmors: Mapping[str, tuple[str, str]]
    squares: Mapping[str, Boundary]
    hcomp_h: Mapping[tuple[str, str], str]
    vcomp_v: Mapping[tuple[str, str], str]
    hcomp_sq: Mapping[tuple[str, str], str]
    vcomp_sq: Mapping[tuple[str, str], str]
    idh: Mapping[str, str]
    idv: Mapping[str, str]
    esq: Mapping[str, str]
    idsq: Mapping[str, str]

    # lookups

    def boundary(self, s: str) -> Boundary:
        return self.squares[s]

    def corners(self, s: str) -> tuple[str, str, str, str]:
        b = self.squares[s]
        return self.hmors[b.top][0], self.hmors[b.top][1], self.hmors[b.bottom][0], self.hmors[b.bottom][1]

    def hc(self, f: str, g: str) -> str:
        try:
            return self.hcomp_h[(f, g)]
        except KeyError:
            raise NonComposablePair(f"{self.name}: horizontal morphisms {f}, {g} do not compose") from None

    def vc(self, u: str, w: str) -> str:
        try:
            return self.vcomp_v[(u, w)]
        except KeyError:
            raise NonComposablePair(f"{self.name}: vertical morphisms {u}, {w} do not compose") from None

    def hcs(self, a: str, b: str) -> str:
        try:
            return self.hcomp_sq[(a, b)]
        except KeyError:
            raise NonComposablePair(f"{self.name}: squares {a}, {b} do not compose horizontally") from None

    def vcs(self, a: str, b: str) -> str:
        try:
            return self.vcomp_sq[(a, b)]
        except KeyError:
            raise NonComposablePair(f"{self.name}: squares {a}, {b} do not compose vertically") from None

    @cached_property
    def _by_boundary(self) -> dict[Boundary, tuple[str, ...]]:
        out: dict[Boundary, list[str]] = {}
        for s, b in self.squares.items():
            out.setdefault(b, []).append(s)
        return {k: tuple(v) for k, v in out.items()}

    def squares_with(self, top: str, bottom: str, left: str, right: str) -> tuple[str, ...]:
        return self._by_boundary.get(Boundary(top, bottom, left, right), ())

    @cached_property
    def _hhom(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out: dict[tuple[str, str], list[str]] = {}
        for f, ends in self.hmors.items():
            out.setdefault(ends, []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _vhom(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out: dict[tuple[str, str], list[str]] = {}
        for u, ends in self.vmors.items():
            out.setdefault(ends, []).append(u)
        return {k: tuple(v) for k, v in out.items()}

    def hhom(self, a: str, b: str) -> tuple[str, ...]:
        return self._hhom.get((a, b), ())

    def vhom(self, a: str, b: str) -> tuple[str, ...]:
        return self._vhom.get((a, b), ())

    @cached_property
    def identity_hmors(self) -> frozenset[str]:
        return frozenset(self.idh.values())

    @cached_property
    def identity_vmors(self) -> frozenset[str]:
        return frozenset(self.idv.values())

    @cached_property
    def identity_squares(self) -> frozenset[str]:
        return frozenset(self.esq.values()) | frozenset(self.idsq.values())

    def is_h_globular(self, s: str) -> bool:
        b = self.squares[s]
        return b.left in self.identity_vmors and b.right in self.identity_vmors

    def is_v_globular(self, s: str) -> bool:
        b = self.squares[s]
        return b.top in self.identity_hmors and b.bottom in self.identity_hmors

    @cached_property
    def _horizontal_inverses(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for s, b in self.squares.items():
            if not self.is_v_globular(s):
                continue
            for t in self.squares_with(b.top, b.bottom, b.right, b.left):
                if self.hcomp_sq.get((s, t)) == self.idsq[b.left] and self.hcomp_sq.get((t, s)) == self.idsq[b.right]:
                    out[s] = t
                    break
        return out

    def horizontal_inverse(self, s: str) -> str | None:
        """Inverse of a square with identity top and bottom under horizontal composition."""
        return self._horizontal_inverses.get(s)

    @cached_property
    def _vertical_inverses(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for s, b in self.squares.items():
            if not self.is_h_globular(s):
                continue
            for t in self.squares_with(b.bottom, b.top, b.left, b.right):
                if self.vcomp_sq.get((s, t)) == self.esq[b.top] and self.vcomp_sq.get((t, s)) == self.esq[b.bottom]:
                    out[s] = t
                    break
        return out

    def vertical_inverse(self, s: str) -> str | None:
        """Inverse of a square with identity left and right under vertical composition."""
        return self._vertical_inverses.get(s)

    def is_horizontally_invertible(self, s: str) -> bool:
        return self.horizontal_inverse(s) is not None

    def is_vertically_invertible(self, s: str) -> bool:
        return self.vertical_inverse(s) is not None

    def size(self) -> dict[str, int]:
        return {
            "objects": len(self.objects),
            "hmors": len(self.hmors),
            "vmors": len(self.vmors),
            "squares": len(self.squares),
        }

    def renamed(self, name: str) -> "FiniteDoubleCategory":
        return FiniteDoubleCategory(
            name, self.objects, self.hmors, self.vmors, self.squares, self.hcomp_h, self.vcomp_v,
            self.hcomp_sq, self.vcomp_sq, self.idh, self.idv, self.esq, self.idsq,
        )


class _LawLog:
    def __init__(self, report: ValidationReport):
        self.report = report
        self.counts: dict[str, int] = {}

    def add(self, code: str, law: str, message: str, *witnesses: object) -> None:
        n = self.counts.get(law, 0)
        self.counts[law] = n + 1
        if n < MAX_WITNESSES_PER_LAW:
            self.report.add(code, f"{law}: {message}", law, *witnesses)


def _check_typing(A: FiniteDoubleCategory, log: _LawLog) -> None:
    objs = set(A.objects)
    for kind, table in (("hmor", A.hmors), ("vmor", A.vmors)):
        for f, (a, b) in table.items():
            if a not in objs or b not in objs:
                log.add("LawViolation", "typing", f"{kind} {f} has unknown endpoint", f)
    for s, b in A.squares.items():
        if b.top not in A.hmors or b.bottom not in A.hmors or b.left not in A.vmors or b.right not in A.vmors:
            log.add("LawViolation", "typing", f"square {s} has an unknown boundary cell", s)
            continue
        tl, tr = A.hmors[b.top]
        bl, br = A.hmors[b.bottom]
        if A.vmors[b.left] != (tl, bl) or A.vmors[b.right] != (tr, br):
            log.add("LawViolation", "typing", f"square {s} has inconsistent corners", s)
    for a in objs:
        if A.hmors.get(A.idh.get(a, "")) != (a, a):
            log.add("LawViolation", "typing", f"horizontal identity of {a} is not a loop on {a}", a)
        if A.vmors.get(A.idv.get(a, "")) != (a, a):
            log.add("LawViolation", "typing", f"vertical identity of {a} is not a loop on {a}", a)
    if not log.report.ok:
        return
    for f, (a, b) in A.hmors.items():
        want = Boundary(f, f, A.idv[a], A.idv[b])
        if A.squares.get(A.esq.get(f, "")) != want:
            log.add("LawViolation", "typing", f"vertical identity square of {f} has the wrong boundary", f)
    for u, (a, b) in A.vmors.items():
        want = Boundary(A.idh[a], A.idh[b], u, u)
        if A.squares.get(A.idsq.get(u, "")) != want:
            log.add("LawViolation", "typing", f"horizontal identity square of {u} has the wrong boundary", u)


def _check_totality(A: FiniteDoubleCategory, log: _LawLog) -> None:
    for (f, (a, b)), (g, (c, d)) in product(A.hmors.items(), A.hmors.items()):
        if b != c:
            continue
        h = A.hcomp_h.get((f, g))
        if h is None:
            log.add("NonComposablePair", "totality", f"missing horizontal composite {f};{g}", f, g)
        elif A.hmors.get(h) != (a, d):
            log.add("LawViolation", "typing", f"horizontal composite {f};{g} = {h} has wrong endpoints", f, g, h)
    for (u, (a, b)), (w, (c, d)) in product(A.vmors.items(), A.vmors.items()):
        if b != c:
            continue
        x = A.vcomp_v.get((u, w))
        if x is None:
            log.add("NonComposablePair", "totality", f"missing vertical composite {u};{w}", u, w)
        elif A.vmors.get(x) != (a, d):
            log.add("LawViolation", "typing", f"vertical composite {u};{w} = {x} has wrong endpoints", u, w, x)
    if not log.report.ok:
        return
    for (s, bs), (t, bt) in product(A.squares.items(), A.squares.items()):
        if bs.right == bt.left:
            r = A.hcomp_sq.get((s, t))
            want = Boundary(A.hcomp_h[(bs.top, bt.top)], A.hcomp_h[(bs.bottom, bt.bottom)], bs.left, bt.right)
            if r is None:
                log.add("NonComposablePair", "totality", f"missing horizontal composite of squares {s},{t}", s, t)
            elif A.squares.get(r) != want:
                log.add("LawViolation", "boundary", f"horizontal composite {s},{t} = {r} has the wrong boundary", s, t, r)
        if bs.bottom == bt.top:
            r = A.vcomp_sq.get((s, t))
            want = Boundary(bs.top, bt.bottom, A.vcomp_v[(bs.left, bt.left)], A.vcomp_v[(bs.right, bt.right)])
            if r is None:
                log.add("NonComposablePair", "totality", f"missing vertical composite of squares {s},{t}", s, t)
            elif A.squares.get(r) != want:
                log.add("LawViolation", "boundary", f"vertical composite {s},{t} = {r} has the wrong boundary", s, t, r)
    extra_h = [k for k in A.hcomp_h if k[0] not in A.hmors or k[1] not in A.hmors or A.hmors[k[0]][1] != A.hmors[k[1]][0]]
    extra_v = [k for k in A.vcomp_v if k[0] not in A.vmors or k[1] not in A.vmors or A.vmors[k[0]][1] != A.vmors[k[1]][0]]
    for k in extra_h + extra_v:
        log.add("NonComposablePair", "totality", f"table entry for non-composable pair {k}", *k)


def _check_units(A: FiniteDoubleCategory, log: _LawLog) -> None:
    for f, (a, b) in A.hmors.items():
        if A.hcomp_h[(A.idh[a], f)] != f or A.hcomp_h[(f, A.idh[b])] != f:
            log.add("LawViolation", "unit", f"horizontal identities are not units at {f}", f)
    for u, (a, b) in A.vmors.items():
        if A.vcomp_v[(A.idv[a], u)] != u or A.vcomp_v[(u, A.idv[b])] != u:
            log.add("LawViolation", "unit", f"vertical identities are not units at {u}", u)
    for s, b in A.squares.items():
        if A.hcomp_sq[(A.idsq[b.left], s)] != s or A.hcomp_sq[(s, A.idsq[b.right])] != s:
            log.add("LawViolation", "unit", f"horizontal identity squares are not units at {s}", s)
        if A.vcomp_sq[(A.esq[b.top], s)] != s or A.vcomp_sq[(s, A.esq[b.bottom])] != s:
            log.add("LawViolation", "unit", f"vertical identity squares are not units at {s}", s)


def _check_identity_coherence(A: FiniteDoubleCategory, log: _LawLog) -> None:
    for (f, g), h in A.hcomp_h.items():
        if A.hcomp_sq[(A.esq[f], A.esq[g])] != A.esq[h]:
            log.add("LawViolation", "identity", f"identity squares do not compose along {f};{g}", f, g)
    for (u, w), x in A.vcomp_v.items():
        if A.vcomp_sq[(A.idsq[u], A.idsq[w])] != A.idsq[x]:
            log.add("LawViolation", "identity", f"identity squares do not compose along {u};{w}", u, w)
    for a in A.objects:
        if A.esq[A.idh[a]] != A.idsq[A.idv[a]]:
            log.add("LawViolation", "identity", f"the two identity squares of {a} differ", a)


def _check_associativity(A: FiniteDoubleCategory, log: _LawLog) -> None:
    def run(table: Mapping[tuple[str, str], str], name: str) -> None:
        by_first: dict[str, list[tuple[str, str]]] = {}
        for (x, y), xy in table.items():
            by_first.setdefault(x, []).append((y, xy))
        for (x, y), xy in table.items():
            for z, yz in by_first.get(y, ()):
                if table.get((xy, z)) != table.get((x, yz)):
                    log.add("LawViolation", "associativity", f"{name} composition is not associative at {x},{y},{z}", x, y, z)

    run(A.hcomp_h, "horizontal")
    run(A.vcomp_v, "vertical")
    run(A.hcomp_sq, "horizontal square")
    run(A.vcomp_sq, "vertical square")


def _check_interchange(A: FiniteDoubleCategory, log: _LawLog) -> None:
    below: dict[str, list[str]] = {}
    for s, b in A.squares.items():
        below.setdefault(b.top, []).append(s)
    for (a, b), ab in A.hcomp_sq.items():
        ba, bb = A.squares[a], A.squares[b]
        for c in below.get(ba.bottom, ()):
            for d in below.get(bb.bottom, ()):
                if A.squares[c].right != A.squares[d].left:
                    continue
                lhs = A.vcomp_sq[(ab, A.hcomp_sq[(c, d)])]
                rhs = A.hcomp_sq[(A.vcomp_sq[(a, c)], A.vcomp_sq[(b, d)])]
                if lhs != rhs:
                    log.add("LawViolation", "interchange", f"interchange fails on the grid {a} {b} / {c} {d}", a, b, c, d)


def validate_double_category(A: FiniteDoubleCategory) -> ValidationReport:
    """Check typing, totality, units, identity coherence, associativity and interchange in that order."""
    report = ValidationReport(subject=f"double category {A.name}")
    log = _LawLog(report)
    for stage in (_check_typing, _check_totality, _check_units, _check_identity_coherence, _check_associativity, _check_interchange):
        stage(A, log)
        if not report.ok:
            APP_LOGGER.debug(f"{A.name}: {stage.__name__} reported {len(report.violations)} violation(s)")
            return report
    report.details.update(A.size())
    return report


# --- double functors -----------------------------------------------------------------


@dataclass(frozen=True)
class DoubleFunctor:
    source: FiniteDoubleCategory
    target: FiniteDoubleCategory
    obj: Mapping[str, str]
    hmor: Mapping[str, str]
    vmor: Mapping[str, str]
    sq: Mapping[str, str]
    name: str = ""

    def key(self) -> tuple:
        return (
            tuple(self.obj[x] for x in self.source.objects),
            tuple(self.hmor[f] for f in self.source.hmors),
            tuple(self.vmor[u] for u in self.source.vmors),
            tuple(self.sq[s] for s in self.source.squares),
        )

    def describe(self) -> dict[str, dict[str, str]]:
        return {"obj": dict(self.obj), "hmor": dict(self.hmor), "vmor": dict(self.vmor), "sq": dict(self.sq)}


def validate_double_functor(F: DoubleFunctor) -> ValidationReport:
    A, B = F.source, F.target
    report = ValidationReport(subject=f"double functor {F.name or '<anon>'}")
    for label, dom, comp, cod in (
        ("obj", A.objects, F.obj, set(B.objects)),
        ("hmor", A.hmors, F.hmor, B.hmors),
        ("vmor", A.vmors, F.vmor, B.vmors),
        ("sq", A.squares, F.sq, B.squares),
    ):
        for x in dom:
            if x not in comp:
                report.add("ActionNotTotal", f"{label} component undefined at {x}", x)
            elif comp[x] not in cod:
                report.add("LawViolation", f"{label} component sends {x} outside the target", x, comp[x])
    if not report.ok:
        return report
    for f, (a, b) in A.hmors.items():
        if B.hmors[F.hmor[f]] != (F.obj[a], F.obj[b]):
            report.add("LawViolation", f"endpoints of {f} not preserved", f)
    for u, (a, b) in A.vmors.items():
        if B.vmors[F.vmor[u]] != (F.obj[a], F.obj[b]):
            report.add("LawViolation", f"endpoints of {u} not preserved", u)
    for s, bd in A.squares.items():
        want = Boundary(F.hmor[bd.top], F.hmor[bd.bottom], F.vmor[bd.left], F.vmor[bd.right])
        if B.squares[F.sq[s]] != want:
            report.add("LawViolation", f"boundary of {s} not preserved", s)
    if not report.ok:
        return report
    for a in A.objects:
        if F.hmor[A.idh[a]] != B.idh[F.obj[a]] or F.vmor[A.idv[a]] != B.idv[F.obj[a]]:
            report.add("LawViolation", f"identities at {a} not preserved", a)
    for f in A.hmors:
        if F.sq[A.esq[f]] != B.esq[F.hmor[f]]:
            report.add("LawViolation", f"identity square of {f} not preserved", f)
    for u in A.vmors:
        if F.sq[A.idsq[u]] != B.idsq[F.vmor[u]]:
            report.add("LawViolation", f"identity square of {u} not preserved", u)
    for (f, g), h in A.hcomp_h.items():
        if B.hcomp_h[(F.hmor[f], F.hmor[g])] != F.hmor[h]:
            report.add("LawViolation", f"horizontal composite {f};{g} not preserved", f, g)
    for (u, w), x in A.vcomp_v.items():
        if B.vcomp_v[(F.vmor[u], F.vmor[w])] != F.vmor[x]:
            report.add("LawViolation", f"vertical composite {u};{w} not preserved", u, w)
    for (s, t), r in A.hcomp_sq.items():
        if B.hcomp_sq[(F.sq[s], F.sq[t])] != F.sq[r]:
            report.add("LawViolation", f"horizontal composite of squares {s},{t} not preserved", s, t)
    for (s, t), r in A.vcomp_sq.items():
        if B.vcomp_sq[(F.sq[s], F.sq[t])] != F.sq[r]:
            report.add("LawViolation", f"vertical composite of squares {s},{t} not preserved", s, t)
    return report


def identity_functor(A: FiniteDoubleCategory) -> DoubleFunctor:
    return DoubleFunctor(
        A, A,
        {x: x for x in A.objects}, {f: f for f in A.hmors}, {u: u for u in A.vmors}, {s: s for s in A.squares},
        name=f"id_{A.name}",
    )


def compose_functors(G: DoubleFunctor, F: DoubleFunctor) -> DoubleFunctor:
    """G after F."""
    return DoubleFunctor(
        F.source, G.target,
        {x: G.obj[y] for x, y in F.obj.items()},
        {x: G.hmor[y] for x, y in F.hmor.items()},
        {x: G.vmor[y] for x, y in F.vmor.items()},
        {x: G.sq[y] for x, y in F.sq.items()},
        name=f"{G.name}.{F.name}",
    )


def to_terminal(A: FiniteDoubleCategory, T: FiniteDoubleCategory | None = None) -> DoubleFunctor:
    T = T or terminal()
    (x,) = T.objects
    (f,) = T.hmors
    (u,) = T.vmors
    (s,) = T.squares
    return DoubleFunctor(
        A, T,
        {a: x for a in A.objects}, {g: f for g in A.hmors}, {w: u for w in A.vmors}, {t: s for t in A.squares},
        name=f"{A.name}->1",
    )


def is_functor_isomorphism(F: DoubleFunctor) -> bool:
    A, B = F.source, F.target
    return all(
        len(set(comp.values())) == len(comp) == len(cod)
        for comp, cod in ((F.obj, B.objects), (F.hmor, B.hmors), (F.vmor, B.vmors), (F.sq, B.squares))
    )


# --- constructions ---------------------------------------------------------------------


def horizontal_embedding(C: Finite2Category, vid_prefix: str = "idv_", name: str | None = None) -> FiniteDoubleCategory:
    """Objects and 1-cells of C horizontally, identity verticals, 2-cells as squares."""
    idv = {a: f"{vid_prefix}{a}" for a in C.objects}
    vmors = {idv[a]: (a, a) for a in C.objects}
    squares = {x: Boundary(f, g, idv[C.onecells[f][0]], idv[C.onecells[f][1]]) for x, (f, g) in C.twocells.items()}
    return FiniteDoubleCategory(
        name=name or f"H{C.name}",
        objects=C.objects,
        hmors=dict(C.onecells),
        vmors=vmors,
        squares=squares,
        hcomp_h=dict(C.comp),
        vcomp_v={(idv[a], idv[a]): idv[a] for a in C.objects},
        hcomp_sq=dict(C.hcomp2),
        vcomp_sq=dict(C.vcomp2),
        idh=dict(C.id1),
        idv=idv,
        esq=dict(C.id2),
        idsq={idv[a]: C.id2[C.id1[a]] for a in C.objects},
    )


def transpose(A: FiniteDoubleCategory, name: str | None = None) -> FiniteDoubleCategory:
    """Swap the horizontal and vertical directions."""
    return FiniteDoubleCategory(
        name=name or f"{A.name}^t",
        objects=A.objects,
        hmors=dict(A.vmors),
        vmors=dict(A.hmors),
        squares={s: Boundary(b.left, b.right, b.top, b.bottom) for s, b in A.squares.items()},
        hcomp_h=dict(A.vcomp_v),
        vcomp_v=dict(A.hcomp_h),
        hcomp_sq=dict(A.vcomp_sq),
        vcomp_sq=dict(A.hcomp_sq),
        idh=dict(A.idv),
        idv=dict(A.idh),
        esq=dict(A.idsq),
        idsq=dict(A.esq),
    )


def vertical_embedding(C: Finite2Category, name: str | None = None) -> FiniteDoubleCategory:
    return transpose(horizontal_embedding(C, vid_prefix="idh_"), name=name or f"V{C.name}")


def sq_of_2cat(C: Finite2Category, name: str | None = None) -> FiniteDoubleCategory:
    """Squares `<f|g|u|v|x>` are 2-cells `x: f;v => u;g`; both directions carry the 1-cells of C."""

    def sq_name(f: str, g: str, u: str, v: str, x: str) -> str:
        return f"<{f}|{g}|{u}|{v}|{x}>"

    squares: dict[str, Boundary] = {}
    cell_of: dict[str, str] = {}
    for f, (a, b) in C.onecells.items():
        for u, (a2, c) in C.onecells.items():
            if a2 != a:
                continue
            for v, (b2, d) in C.onecells.items():
                if b2 != b:
                    continue
                for g in C.hom(c, d):
                    for x in C.hom2(C.comp[(f, v)], C.comp[(u, g)]):
                        s = sq_name(f, g, u, v, x)
                        squares[s] = Boundary(f, g, u, v)
                        cell_of[s] = x
    lookup = {(b, cell_of[s]): s for s, b in squares.items()}

    hcomp_sq: dict[tuple[str, str], str] = {}
    vcomp_sq: dict[tuple[str, str], str] = {}
    for (s, bs), (t, bt) in product(squares.items(), squares.items()):
        if bs.right == bt.left:
            x = C.vcomp2[(C.hcomp2[(C.id2[bs.top], cell_of[t])], C.hcomp2[(cell_of[s], C.id2[bt.bottom])])]
            bd = Boundary(C.comp[(bs.top, bt.top)], C.comp[(bs.bottom, bt.bottom)], bs.left, bt.right)
            hcomp_sq[(s, t)] = lookup[(bd, x)]
        if bs.bottom == bt.top:
            x = C.vcomp2[(C.hcomp2[(cell_of[s], C.id2[bt.right])], C.hcomp2[(C.id2[bs.left], cell_of[t])])]
            bd = Boundary(bs.top, bt.bottom, C.comp[(bs.left, bt.left)], C.comp[(bs.right, bt.right)])
            vcomp_sq[(s, t)] = lookup[(bd, x)]

    esq = {}
    for f, (a, b) in C.onecells.items():
        esq[f] = lookup[(Boundary(f, f, C.id1[a], C.id1[b]), C.id2[f])]
    idsq = {}
    for u, (a, c) in C.onecells.items():
        idsq[u] = lookup[(Boundary(C.id1[a], C.id1[c], u, u), C.id2[u])]
    return FiniteDoubleCategory(
        name=name or f"Sq{C.name}",
        objects=C.objects,
        hmors=dict(C.onecells),
        vmors=dict(C.onecells),
        squares=squares,
        hcomp_h=dict(C.comp),
        vcomp_v=dict(C.comp),
        hcomp_sq=hcomp_sq,
        vcomp_sq=vcomp_sq,
        idh=dict(C.id1),
        idv=dict(C.id1),
        esq=esq,
        idsq=idsq,
    )


def hop(A: FiniteDoubleCategory) -> FiniteDoubleCategory:
    """Horizontal opposite: horizontal morphisms reversed, left and right boundaries swapped."""
    name = A.name[: -len("^hop")] if A.name.endswith("^hop") else f"{A.name}^hop"
    return FiniteDoubleCategory(
        name=name,
        objects=A.objects,
        hmors={f: (b, a) for f, (a, b) in A.hmors.items()},
        vmors=dict(A.vmors),
        squares={s: Boundary(b.top, b.bottom, b.right, b.left) for s, b in A.squares.items()},
        hcomp_h={(g, f): h for (f, g), h in A.hcomp_h.items()},
        vcomp_v=dict(A.vcomp_v),
        hcomp_sq={(t, s): r for (s, t), r in A.hcomp_sq.items()},
        vcomp_sq=dict(A.vcomp_sq),
        idh=dict(A.idh),
        idv=dict(A.idv),
        esq=dict(A.esq),
        idsq=dict(A.idsq),
    )


def extract_2category(A: FiniteDoubleCategory, direction: str = "horizontal") -> Finite2Category:
    """Objects, morphisms of one direction, and squares whose other-direction sides are identities."""
    if direction == "vertical":
        C = extract_2category(transpose(A), "horizontal")
        return Finite2Category(f"V({A.name})", C.objects, C.onecells, C.twocells, C.comp, C.vcomp2, C.hcomp2, C.id1, C.id2)
    if direction != "horizontal":
        raise ValueError(f"direction must be 'horizontal' or 'vertical', got {direction!r}")
    globular = {s: (b.top, b.bottom) for s, b in A.squares.items() if A.is_h_globular(s)}
    return Finite2Category(
        name=f"H({A.name})",
        objects=A.objects,
        onecells=dict(A.hmors),
        twocells=globular,
        comp=dict(A.hcomp_h),
        vcomp2={k: v for k, v in A.vcomp_sq.items() if k[0] in globular and k[1] in globular},
        hcomp2={k: v for k, v in A.hcomp_sq.items() if k[0] in globular and k[1] in globular},
        id1=dict(A.idh),
        id2=dict(A.esq),
    )


def _pair(x: str, y: str) -> str:
    return f"({x},{y})"


def product_dblcat(A: FiniteDoubleCategory, B: FiniteDoubleCategory, name: str | None = None) -> FiniteDoubleCategory:
    def pair_table(ta: Mapping[tuple[str, str], str], tb: Mapping[tuple[str, str], str]) -> dict[tuple[str, str], str]:
        return {
            (_pair(x1, y1), _pair(x2, y2)): _pair(xa, yb)
            for (x1, x2), xa in ta.items()
            for (y1, y2), yb in tb.items()
        }

    return FiniteDoubleCategory(
        name=name or f"{A.name}x{B.name}",
        objects=tuple(_pair(a, b) for a in A.objects for b in B.objects),
        hmors={_pair(f, g): (_pair(fa, ga), _pair(fb, gb)) for f, (fa, fb) in A.hmors.items() for g, (ga, gb) in B.hmors.items()},
        vmors={_pair(u, w): (_pair(ua, wa), _pair(ub, wb)) for u, (ua, ub) in A.vmors.items() for w, (wa, wb) in B.vmors.items()},
        squares={
            _pair(s, t): Boundary(_pair(bs.top, bt.top), _pair(bs.bottom, bt.bottom), _pair(bs.left, bt.left), _pair(bs.right, bt.right))
            for s, bs in A.squares.items()
            for t, bt in B.squares.items()
        },
        hcomp_h=pair_table(A.hcomp_h, B.hcomp_h),
        vcomp_v=pair_table(A.vcomp_v, B.vcomp_v),
        hcomp_sq=pair_table(A.hcomp_sq, B.hcomp_sq),
        vcomp_sq=pair_table(A.vcomp_sq, B.vcomp_sq),
        idh={_pair(a, b): _pair(A.idh[a], B.idh[b]) for a in A.objects for b in B.objects},
        idv={_pair(a, b): _pair(A.idv[a], B.idv[b]) for a in A.objects for b in B.objects},
        esq={_pair(f, g): _pair(A.esq[f], B.esq[g]) for f in A.hmors for g in B.hmors},
        idsq={_pair(u, w): _pair(A.idsq[u], B.idsq[w]) for u in A.vmors for w in B.vmors},
    )


def product_projections(
    A: FiniteDoubleCategory, B: FiniteDoubleCategory, P: FiniteDoubleCategory | None = None
) -> tuple[DoubleFunctor, DoubleFunctor]:
    P = P or product_dblcat(A, B)

    def component(xs: Iterable[str], ys: Iterable[str], index: int) -> dict[str, str]:
        return {_pair(x, y): (x, y)[index] for x in xs for y in ys}

    def proj(index: int, X: FiniteDoubleCategory) -> DoubleFunctor:
        return DoubleFunctor(
            P, X,
            component(A.objects, B.objects, index),
            component(A.hmors, B.hmors, index),
            component(A.vmors, B.vmors, index),
            component(A.squares, B.squares, index),
            name=f"{P.name}->{X.name}",
        )

    return proj(0, A), proj(1, B)


def codiagonal(A: FiniteDoubleCategory, S: FiniteDoubleCategory | None = None) -> DoubleFunctor:
    """The fold map A + A -> A."""
    S = S or coproduct_dblcat(A, A)

    def fold(cells: Iterable[str]) -> dict[str, str]:
        return {f"{x}@{t}": x for x in cells for t in ("l", "r")}

    return DoubleFunctor(
        S, A, fold(A.objects), fold(A.hmors), fold(A.vmors), fold(A.squares), name=f"{S.name}->{A.name}"
    )


def coproduct_dblcat(
    A: FiniteDoubleCategory,
    B: FiniteDoubleCategory,
    name: str | None = None,
    tags: tuple[str, str] = ("l", "r"),
) -> FiniteDoubleCategory:
    """Disjoint union; every cell of A is renamed `cell@l`, every cell of B `cell@r`."""
    parts = ((A, tags[0]), (B, tags[1]))

    def tag(x: str, t: str) -> str:
        return f"{x}@{t}"

    def merge(getter) -> dict:
        out: dict = {}
        for D, t in parts:
            for k, v in getter(D).items():
                key = tuple(tag(x, t) for x in k) if isinstance(k, tuple) else tag(k, t)
                if isinstance(v, Boundary):
                    val = Boundary(*(tag(x, t) for x in v))
                elif isinstance(v, tuple):
                    val = tuple(tag(x, t) for x in v)
                else:
                    val = tag(v, t)
                out[key] = val
        return out

    return FiniteDoubleCategory(
        name=name or f"{A.name}+{B.name}",
        objects=tuple(tag(a, t) for D, t in parts for a in D.objects),
        hmors=merge(lambda D: D.hmors),
        vmors=merge(lambda D: D.vmors),
        squares=merge(lambda D: D.squares),
        hcomp_h=merge(lambda D: D.hcomp_h),
        vcomp_v=merge(lambda D: D.vcomp_v),
        hcomp_sq=merge(lambda D: D.hcomp_sq),
        vcomp_sq=merge(lambda D: D.vcomp_sq),
        idh=merge(lambda D: D.idh),
        idv=merge(lambda D: D.idv),
        esq=merge(lambda D: D.esq),
        idsq=merge(lambda D: D.idsq),
    )


def discrete(objects: Iterable[str], name: str = "discrete") -> FiniteDoubleCategory:
    objs = tuple(objects)
    return FiniteDoubleCategory(
        name=name,
        objects=objs,
        hmors={f"id_{a}": (a, a) for a in objs},
        vmors={f"idv_{a}": (a, a) for a in objs},
        squares={f"sq_{a}": Boundary(f"id_{a}", f"id_{a}", f"idv_{a}", f"idv_{a}") for a in objs},
        hcomp_h={(f"id_{a}", f"id_{a}"): f"id_{a}" for a in objs},
        vcomp_v={(f"idv_{a}", f"idv_{a}"): f"idv_{a}" for a in objs},
        hcomp_sq={(f"sq_{a}", f"sq_{a}"): f"sq_{a}" for a in objs},
        vcomp_sq={(f"sq_{a}", f"sq_{a}"): f"sq_{a}" for a in objs},
        idh={a: f"id_{a}" for a in objs},
        idv={a: f"idv_{a}" for a in objs},
        esq={f"id_{a}": f"sq_{a}" for a in objs},
        idsq={f"idv_{a}": f"sq_{a}" for a in objs},
    )


def terminal() -> FiniteDoubleCategory:
    return discrete(("*",), name="1")


def initial() -> FiniteDoubleCategory:
    return discrete((), name="0")


def horizontal_category(name: str, objects, arrows, comp, identities) -> FiniteDoubleCategory:
    return horizontal_embedding(Finite2Category.from_category(name, objects, arrows, comp, identities), name=name)


def iso_comma(F: DoubleFunctor, name: str | None = None) -> tuple[FiniteDoubleCategory, DoubleFunctor, DoubleFunctor]:
    """Iso-comma of F: C -> D against the identity of D, for horizontally embedded categories.

    Objects are triples `(c, d, p)` with `p: Fc -> d` invertible in D; morphisms are pairs
    `(f, g)` with `Ff;p' = p;g`. Returns the apex with its projections to C and D.
    """
    C, D = F.source, F.target
    for X in (C, D):
        if any(s not in X.identity_squares for s in X.squares) or len(X.vmors) != len(X.objects):
            raise LawViolation(f"iso_comma needs horizontally embedded categories, {X.name} is not one")
    DC = extract_2category(D)
    objects: list[tuple[str, str, str]] = []
    for c in C.objects:
        for d in D.objects:
            for p in D.hhom(F.obj[c], d):
                if DC.is_invertible_1cell(p):
                    objects.append((c, d, p))
    obj_name = {o: f"({o[0]},{o[1]},{o[2]})" for o in objects}
    arrows: dict[str, tuple[str, str]] = {}
    parts: dict[str, tuple[str, str]] = {}
    for i, o1 in enumerate(objects):
        for j, o2 in enumerate(objects):
            for f in C.hhom(o1[0], o2[0]):
                for g in D.hhom(o1[1], o2[1]):
                    if D.hc(F.hmor[f], o2[2]) == D.hc(o1[2], g):
                        n = f"({f},{g})[{i}>{j}]"
                        arrows[n] = (obj_name[o1], obj_name[o2])
                        parts[n] = (f, g)
    lookup = {(arrows[n], parts[n]): n for n in arrows}
    comp = {}
    for m1, (a, b) in arrows.items():
        for m2, (b2, c) in arrows.items():
            if b == b2:
                f = C.hc(parts[m1][0], parts[m2][0])
                g = D.hc(parts[m1][1], parts[m2][1])
                comp[(m1, m2)] = lookup[((a, c), (f, g))]
    identities = {}
    for o in objects:
        identities[obj_name[o]] = lookup[((obj_name[o], obj_name[o]), (C.idh[o[0]], D.idh[o[1]]))]
    apex = horizontal_category(name or f"iso({F.name})", [obj_name[o] for o in objects], arrows, comp, identities)

    def projection(index: int, X: FiniteDoubleCategory, label: str) -> DoubleFunctor:
        obj = {obj_name[o]: o[index] for o in objects}
        hmor = {m: parts[m][index] for m in arrows}
        vmor = {apex.idv[a]: X.idv[obj[a]] for a in apex.objects}
        sq = {apex.esq[m]: X.esq[hmor[m]] for m in arrows}
        return DoubleFunctor(apex, X, obj, hmor, vmor, sq, name=f"{apex.name}->{label}")

    return apex, projection(0, C, C.name), projection(1, D, D.name)
