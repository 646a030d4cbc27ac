"""Shape diagrams on the signatures and the nerve of a double category."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Mapping

from app.core.corpus import FunctorSpan, corpus_doubles
from app.core.dblcat import DoubleFunctor, FiniteDoubleCategory
from app.core.errors import MismatchAt, UnknownBuiltin, ValidationReport
from app.core.logger import APP_LOGGER
from app.core.presentation import (
    ShapeInclusion,
    ShapeMap,
    ShapePresentation,
    check_shape_map,
    iter_homs,
    postcompose,
    precompose,
)
from app.core.presheaf import NatTransf, Presheaf, Span, boundary_weight, is_l_structure, matching_object
from app.core.shapes import builtin_inclusion, builtin_shape, shape_map
from app.core.signature import ArrowWord, FoldsSignature, builtin_signature


@dataclass(frozen=True)
class ShapeDiagram:
    """D(K) per kind and, per generating arrow K -> K', a shape map D(K') -> D(K)."""

    name: str
    signature: FoldsSignature
    shapes: Mapping[str, ShapePresentation]
    arrows: Mapping[tuple[str, str], ShapeInclusion]

    def shape(self, kind: str) -> ShapePresentation:
        return self.shapes[kind]

    def arrow(self, source: str, name: str) -> ShapeInclusion:
        return self.arrows[(source, name)]

    def realize(self, x: ShapeMap, word: ArrowWord) -> ShapeMap | None:
        """Restrict a map out of D(word.source) along the word."""
        return _realize(self, x, word.source, word.names)


def validate_diagram(D: ShapeDiagram) -> ValidationReport:
    sig = D.signature
    report = ValidationReport(subject=f"diagram {D.name}")
    for kind in sig.kinds:
        if kind not in D.shapes:
            report.add("UnknownKind", f"no shape for kind {kind}", kind)
    for arrow in sig.arrows:
        i = D.arrows.get((arrow.source, arrow.name))
        if i is None:
            report.add("UnknownArrow", f"no shape map for {arrow.source}.{arrow.name}", arrow.name)
            continue
        if i.domain is not D.shapes.get(arrow.target) or i.codomain is not D.shapes.get(arrow.source):
            report.add("IllTypedRelation", f"shape map for {arrow} has the wrong ends", arrow.name)
    return report


# --- builtin diagrams ------------------------------------------------------------------------

_IDENTITY_SQUARE = "map: a |-> a\nmap: b |-> b\nmap: c |-> c\nmap: d |-> d\nmap: f |-> f\nmap: g |-> g\nmap: u |-> u\nmap: v |-> v\nmap: s |-> s"
_IDENTITY_H2 = "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f"
_IDENTITY_SIGMA2 = "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f\nmap: g |-> g\nmap: alpha |-> alpha"

_CAT_SHAPES = {"O": "point", "A": "H2", "I'": "point", "T'": "chain3", "E'": "H2"}
_CAT_ARROWS = {
    ("A", "s"): "map: x |-> 0",
    ("A", "t"): "map: x |-> 1",
    ("I'", "i"): "map: 0 |-> x\nmap: 1 |-> x\nmap: f |-> idh(x)",
    ("T'", "l"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> a",
    ("T'", "r"): "map: 0 |-> 1\nmap: 1 |-> 2\nmap: f |-> b",
    ("T'", "c"): "map: 0 |-> 0\nmap: 1 |-> 2\nmap: f |-> c",
    ("E'", "l"): _IDENTITY_H2,
    ("E'", "r"): _IDENTITY_H2,
}

_TWOCAT_SHAPES = {
    "C_0": "point",
    "C_1": "H2",
    "C_2": "Sigma2",
    "T": "HT",
    "I_1": "HA",
    "I_2'": "H2",
    "V'": "Sigma3",
    "H'": "H_iso",
    "E'": "Sigma2",
}
_TWOCAT_ARROWS = {
    ("C_1", "s"): "map: x |-> 0",
    ("C_1", "t"): "map: x |-> 1",
    ("C_2", "s"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f",
    ("C_2", "t"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> g",
    ("T", "l"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> a",
    ("T", "r"): "map: 0 |-> 1\nmap: 1 |-> 2\nmap: f |-> b",
    ("T", "c"): "map: 0 |-> 0\nmap: 1 |-> 2\nmap: f |-> c",
    ("I_1", "i"): "map: 0 |-> x\nmap: 1 |-> x\nmap: f |-> e",
    ("I_2'", "i"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f\nmap: g |-> f\nmap: alpha |-> e(f)",
    ("V'", "l"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f\nmap: g |-> g\nmap: alpha |-> alpha",
    ("V'", "r"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> g\nmap: g |-> k\nmap: alpha |-> beta",
    ("V'", "c"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f\nmap: g |-> k\nmap: alpha |-> v(alpha,beta)",
    ("E'", "l"): _IDENTITY_SIGMA2,
    ("E'", "r"): _IDENTITY_SIGMA2,
    ("H'", "l"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f1\nmap: g |-> g1\nmap: alpha |-> alpha",
    ("H'", "r"): "map: 0 |-> 1\nmap: 1 |-> 2\nmap: f |-> f2\nmap: g |-> g2\nmap: alpha |-> beta",
    ("H'", "c"): "map: 0 |-> 0\nmap: 1 |-> 2\nmap: f |-> k\nmap: g |-> k2\nmap: alpha |-> v(v(thetas,h(alpha,beta)),thetat)",
    ("H'", "s"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: 2 |-> 2\nmap: a |-> f1\nmap: b |-> f2\nmap: c |-> k\nmap: theta |-> vinv(thetas)",
    ("H'", "t"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: 2 |-> 2\nmap: a |-> g1\nmap: b |-> g2\nmap: c |-> k2\nmap: theta |-> thetat",
}

_DBLCAT_SHAPES = {
    "O": "point",
    "H": "H2",
    "V": "V2",
    "S": "square",
    "I_H": "HA",
    "T_H": "HT",
    "I_V": "VA",
    "T_V": "VT",
    "I_hor'": "V2",
    "I_ver'": "H2",
    "H_comp'": "C_H",
    "V_comp'": "C_V",
    "E'": "square",
}
_DBLCAT_ARROWS = {
    ("H", "s"): "map: x |-> 0",
    ("H", "t"): "map: x |-> 1",
    ("V", "s"): "map: x |-> 0",
    ("V", "t"): "map: x |-> 1",
    ("S", "u"): "map: 0 |-> a\nmap: 1 |-> b\nmap: f |-> f",
    ("S", "d"): "map: 0 |-> c\nmap: 1 |-> d\nmap: f |-> g",
    ("S", "l"): "map: 0 |-> a\nmap: 1 |-> c\nmap: u |-> u",
    ("S", "r"): "map: 0 |-> b\nmap: 1 |-> d\nmap: u |-> v",
    ("I_H", "i_H"): "map: 0 |-> x\nmap: 1 |-> x\nmap: f |-> e",
    ("T_H", "l"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> a",
    ("T_H", "r"): "map: 0 |-> 1\nmap: 1 |-> 2\nmap: f |-> b",
    ("T_H", "c"): "map: 0 |-> 0\nmap: 1 |-> 2\nmap: f |-> c",
    ("I_V", "i_V"): "map: 0 |-> x\nmap: 1 |-> x\nmap: u |-> e",
    ("T_V", "u"): "map: 0 |-> 0\nmap: 1 |-> 1\nmap: u |-> a",
    ("T_V", "d"): "map: 0 |-> 1\nmap: 1 |-> 2\nmap: u |-> b",
    ("T_V", "c"): "map: 0 |-> 0\nmap: 1 |-> 2\nmap: u |-> c",
    ("I_hor'", "i_shor"): (
        "map: a |-> 0\nmap: b |-> 0\nmap: c |-> 1\nmap: d |-> 1\n"
        "map: f |-> idh(0)\nmap: g |-> idh(1)\nmap: u |-> u\nmap: v |-> u\nmap: s |-> id(u)"
    ),
    ("I_hor'", "u"): "map: x |-> 0\nmap: e |-> idh(0)\nmap: theta |-> e(idh(0))",
    ("I_hor'", "d"): "map: x |-> 1\nmap: e |-> idh(1)\nmap: theta |-> e(idh(1))",
    ("I_ver'", "i_sver"): (
        "map: a |-> 0\nmap: b |-> 1\nmap: c |-> 0\nmap: d |-> 1\n"
        "map: f |-> f\nmap: g |-> f\nmap: u |-> idv(0)\nmap: v |-> idv(1)\nmap: s |-> e(f)"
    ),
    ("I_ver'", "l"): "map: x |-> 0\nmap: e |-> idv(0)\nmap: theta |-> id(idv(0))",
    ("I_ver'", "r"): "map: x |-> 1\nmap: e |-> idv(1)\nmap: theta |-> id(idv(1))",
    ("H_comp'", "l"): (
        "map: a |-> p0\nmap: b |-> p1\nmap: c |-> q0\nmap: d |-> q1\n"
        "map: f |-> a1\nmap: g |-> b1\nmap: u |-> v0\nmap: v |-> v1\nmap: s |-> alpha"
    ),
    ("H_comp'", "r"): (
        "map: a |-> p1\nmap: b |-> p2\nmap: c |-> q1\nmap: d |-> q2\n"
        "map: f |-> a2\nmap: g |-> b2\nmap: u |-> v1\nmap: v |-> v2\nmap: s |-> beta"
    ),
    ("H_comp'", "c"): (
        "map: a |-> p0\nmap: b |-> p2\nmap: c |-> q0\nmap: d |-> q2\n"
        "map: f |-> k\nmap: g |-> k2\nmap: u |-> v0\nmap: v |-> v2\n"
        "map: s |-> v(v(thetat,h(alpha,beta)),thetab)"
    ),
    ("H_comp'", "u"): "map: 0 |-> p0\nmap: 1 |-> p1\nmap: 2 |-> p2\nmap: a |-> a1\nmap: b |-> a2\nmap: c |-> k\nmap: theta |-> vinv(thetat)",
    ("H_comp'", "d"): "map: 0 |-> q0\nmap: 1 |-> q1\nmap: 2 |-> q2\nmap: a |-> b1\nmap: b |-> b2\nmap: c |-> k2\nmap: theta |-> thetab",
    ("V_comp'", "u"): (
        "map: a |-> p0\nmap: b |-> q0\nmap: c |-> p1\nmap: d |-> q1\n"
        "map: f |-> h0\nmap: g |-> h1\nmap: u |-> a1\nmap: v |-> b1\nmap: s |-> alpha"
    ),
    ("V_comp'", "d"): (
        "map: a |-> p1\nmap: b |-> q1\nmap: c |-> p2\nmap: d |-> q2\n"
        "map: f |-> h1\nmap: g |-> h2\nmap: u |-> a2\nmap: v |-> b2\nmap: s |-> beta"
    ),
    ("V_comp'", "c"): (
        "map: a |-> p0\nmap: b |-> q0\nmap: c |-> p2\nmap: d |-> q2\n"
        "map: f |-> h0\nmap: g |-> h2\nmap: u |-> k\nmap: v |-> k2\n"
        "map: s |-> h(h(thetal,v(alpha,beta)),thetar)"
    ),
    ("V_comp'", "l"): "map: 0 |-> p0\nmap: 1 |-> p1\nmap: 2 |-> p2\nmap: a |-> a1\nmap: b |-> a2\nmap: c |-> k\nmap: theta |-> hinv(thetal)",
    ("V_comp'", "r"): "map: 0 |-> q0\nmap: 1 |-> q1\nmap: 2 |-> q2\nmap: a |-> b1\nmap: b |-> b2\nmap: c |-> k2\nmap: theta |-> thetar",
    ("E'", "b"): _IDENTITY_SQUARE,
    ("E'", "f"): _IDENTITY_SQUARE,
}

_DIAGRAMS = {
    "cat": (_CAT_SHAPES, _CAT_ARROWS),
    "twocat": (_TWOCAT_SHAPES, _TWOCAT_ARROWS),
    "dblcat": (_DBLCAT_SHAPES, _DBLCAT_ARROWS),
}
DIAGRAM_NAMES = tuple(_DIAGRAMS)


@lru_cache(maxsize=None)
def builtin_diagram(name: str) -> ShapeDiagram:
    if name not in _DIAGRAMS:
        raise UnknownBuiltin(f"No builtin diagram {name!r}; expected one of {', '.join(DIAGRAM_NAMES)}")
    shapes_by_kind, bodies = _DIAGRAMS[name]
    sig = builtin_signature(name)
    arrows = {}
    for arrow in sig.arrows:
        body = bodies[(arrow.source, arrow.name)]
        dom, cod = shapes_by_kind[arrow.target], shapes_by_kind[arrow.source]
        arrows[(arrow.source, arrow.name)] = shape_map(dom, cod, body, name=f"D({arrow.source}.{arrow.name})")
    D = ShapeDiagram(
        name=name,
        signature=sig,
        shapes={k: builtin_shape(v) for k, v in shapes_by_kind.items()},
        arrows=arrows,
    )
    validate_diagram(D).raise_if_failed()
    return D


# --- nerve -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Nerve:
    """The presheaf K -> Hom(D(K), X) with the shape map behind every element."""

    presheaf: Presheaf
    diagram: ShapeDiagram
    target: FiniteDoubleCategory
    maps: Mapping[str, ShapeMap]
    index: Mapping[tuple[str, tuple[str, ...]], str]

    def element_of(self, kind: str, x: ShapeMap) -> str:
        return self.index[(kind, x.key())]


def nerve(X: FiniteDoubleCategory, D: ShapeDiagram) -> Nerve:
    sig = D.signature
    carrier: dict[str, list[str]] = {}
    maps: dict[str, ShapeMap] = {}
    index: dict[tuple[str, tuple[str, ...]], str] = {}
    for kind in sig.kinds:
        names = []
        for n, x in enumerate(iter_homs(D.shapes[kind], X)):
            element = f"{kind}#{n}"
            names.append(element)
            maps[element] = x
            index[(kind, x.key())] = element
        carrier[kind] = names
    action: dict[tuple[str, str], str] = {}
    for arrow in sig.arrows:
        i = D.arrows[(arrow.source, arrow.name)]
        for element in carrier[arrow.source]:
            y = precompose(maps[element], i)
            if y is None:
                raise MismatchAt(f"{D.name}: {arrow} is undefined on {element} of {X.name}")
            try:
                action[(arrow.name, element)] = index[(arrow.target, y.key())]
            except KeyError:
                raise MismatchAt(f"{D.name}: restriction of {element} along {arrow} is not a map out of D({arrow.target})") from None
    presheaf = Presheaf.build(sig, carrier, action, name=f"N_{D.name}({X.name})")
    APP_LOGGER.debug(f"Nerve of {X.name} under {D.name}: {presheaf.size()} elements")
    return Nerve(presheaf, D, X, maps, index)


def nerve_map(F: DoubleFunctor, D: ShapeDiagram, source: Nerve | None = None, target: Nerve | None = None) -> NatTransf:
    source = source or nerve(F.source, D)
    target = target or nerve(F.target, D)
    components = {}
    for element, x in source.maps.items():
        kind = source.presheaf.kind_of(element)
        components[element] = target.element_of(kind, postcompose(F, x))
    return NatTransf(source.presheaf, target.presheaf, components, name=f"N({F.name})")


# --- relation cross-check ----------------------------------------------------------------------


def _realize(D: ShapeDiagram, x: ShapeMap, source: str, names: Iterable[str]) -> ShapeMap | None:
    sig = D.signature
    kind = source
    for name in names:
        arrow = sig.arrow(kind, name)
        x = precompose(x, D.arrows[(kind, name)])
        if x is None:
            return None
        kind = arrow.target
    return x


@dataclass
class CrossCheckReport:
    signature: str
    violated: list[dict[str, Any]] = field(default_factory=list)
    degenerate: list[str] = field(default_factory=list)
    unparseable: list[dict[str, str]] = field(default_factory=list)
    invalid_images: list[dict[str, str]] = field(default_factory=list)
    extra_equalities: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.violated or self.degenerate or self.unparseable or self.invalid_images)

    def as_dict(self) -> dict[str, Any]:
        return {
            "signature": self.signature,
            "ok": self.ok,
            "violated": self.violated,
            "degenerate": self.degenerate,
            "unparseable": self.unparseable,
            "invalid_images": self.invalid_images,
            "extra_equalities": self.extra_equalities,
        }


def cross_check(
    sig: FoldsSignature,
    D: ShapeDiagram,
    witnesses: Iterable[FiniteDoubleCategory],
    unparseable: Iterable[tuple[str, str, str]] = (),
) -> CrossCheckReport:
    """Realize every relation of `sig` through D over the witnesses.

    Also reports shape maps whose restrictions are not valid maps, and equalities that hold in
    every witness between canonical words of `sig` that the relations do not identify.
    """
    report = CrossCheckReport(signature=sig.name)
    report.unparseable = [{"kind": k, "line": line, "reason": why} for k, line, why in unparseable]
    witnesses = list(witnesses)
    elements: dict[str, list[ShapeMap]] = {
        kind: [x for X in witnesses for x in iter_homs(D.shapes[kind], X)] for kind in sig.kinds
    }

    for (kind, name), i in D.arrows.items():
        for x in elements[kind]:
            y = precompose(x, i)
            if y is None or not check_shape_map(y):
                report.invalid_images.append({"arrow": f"{kind}.{name}", "target": x.target.name})
                break

    for rel in sig.relations:
        if rel.lhs == rel.rhs:
            report.degenerate.append(str(rel))
            continue
        for x in elements[rel.source]:
            left = _realize(D, x, rel.source, rel.lhs)
            right = _realize(D, x, rel.source, rel.rhs)
            if left is None or right is None or left.key() != right.key():
                report.violated.append({"relation": str(rel), "witness": x.target.name, "element": x.describe()})
                break

    for kind in sig.kinds:
        behaviours: dict[tuple, list[ArrowWord]] = {}
        for word in sig.fan(kind):
            realized = []
            for x in elements[kind]:
                y = _realize(D, x, kind, word.names)
                realized.append(None if y is None else y.key())
            behaviours.setdefault((word.target, tuple(realized)), []).append(word)
        for (_, _), words in behaviours.items():
            if len(words) > 1 and elements[kind]:
                report.extra_equalities.append(f"{kind}: " + " = ".join(str(w) for w in words))
    if report.violated:
        APP_LOGGER.warning(f"{sig.name}: {len(report.violated)} relation(s) fail through diagram {D.name}")
    return report


def validate_relations(
    sig: FoldsSignature, witnesses: Iterable[FiniteDoubleCategory] | None = None
) -> ValidationReport:
    """Relations of `sig` that fail through the builtin diagram of the same name.

    Signatures without a builtin diagram, or whose kinds and arrows differ from it, are left
    unchecked and say so in the details.
    """
    report = ValidationReport(subject=f"signature {sig.name}")
    report.details["diagram"] = None
    if sig.name not in _DIAGRAMS:
        return report
    D = builtin_diagram(sig.name)
    arrows = {(a.source, a.name, a.target) for a in sig.arrows}
    if set(sig.kinds) != set(D.shapes) or arrows != {(a.source, a.name, a.target) for a in D.signature.arrows}:
        APP_LOGGER.warning(f"{sig.name}: kinds or arrows differ from diagram {D.name}; relations not cross-checked")
        return report
    cross = cross_check(sig, D, corpus_doubles() if witnesses is None else witnesses)
    for v in cross.violated:
        report.add("RelationViolated", f"{v['relation']} fails through {D.name} over {v['witness']}", v["relation"], v["element"])
    report.details["diagram"] = D.name
    report.details["extra_equalities"] = len(cross.extra_equalities)
    return report


# --- latching table ----------------------------------------------------------------------------

LATCHING_TABLE: dict[str, tuple[str, dict[str, int]]] = {
    "O": ("i_empty", {}),
    "H": ("i_hpoints", {"O": 2}),
    "V": ("i_vpoints", {"O": 2}),
    "S": ("i_boundary", {"H": 2, "V": 2, "O": 4}),
    "E'": ("i_parallel", {"S": 2, "H": 2, "V": 2, "O": 4}),
}


@dataclass
class LatchingReport:
    rows: list[dict[str, Any]] = field(default_factory=list)
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "rows": self.rows, "mismatches": self.mismatches}

    def raise_if_failed(self) -> None:
        if self.mismatches:
            raise MismatchAt(self.mismatches[0])


def check_latching_table(D: ShapeDiagram, corpus: Iterable[FiniteDoubleCategory]) -> LatchingReport:
    """Compare the nerve's carriers and matching objects with the latching inclusions."""
    report = LatchingReport()
    sig = D.signature
    for kind, (inclusion_name, expected) in LATCHING_TABLE.items():
        weight = boundary_weight(sig, kind)
        counts = {k: len(v) for k, v in weight.carrier.items() if v}
        if counts != expected:
            report.mismatches.append(f"{kind}: boundary weight has {counts}, expected {expected}")
        i = builtin_inclusion(inclusion_name)
        if D.shapes[kind] is not i.codomain:
            report.mismatches.append(f"{kind}: D({kind}) is {D.shapes[kind].name}, expected {i.codomain.name}")
    if not report.ok:
        return report

    for X in corpus:
        N = nerve(X, D)
        check = is_l_structure(N.presheaf)
        if not check.ok:
            report.mismatches.append(f"nerve of {X.name} is not an L-structure at {check.kind}")
        for kind, (inclusion_name, _) in LATCHING_TABLE.items():
            i = builtin_inclusion(inclusion_name)
            carrier = N.presheaf.elements(kind)
            cod_count = sum(1 for _ in iter_homs(i.codomain, X))
            dom_count = sum(1 for _ in iter_homs(i.domain, X))
            M = matching_object(N.presheaf, kind)
            row = {
                "kind": kind,
                "target": X.name,
                "carrier": len(carrier),
                "homs_codomain": cod_count,
                "matching": len(M),
                "homs_domain": dom_count,
            }
            report.rows.append(row)
            if cod_count != len(carrier):
                report.mismatches.append(f"{kind} at {X.name}: {len(carrier)} elements, {cod_count} maps out of {i.codomain.name}")
            if dom_count != len(M):
                report.mismatches.append(f"{kind} at {X.name}: matching object has {len(M)} families, {dom_count} maps out of {i.domain.name}")
            by_restriction: dict[tuple, set[tuple]] = {}
            by_family: dict[tuple, set[tuple]] = {}
            for element in carrier:
                restricted = precompose(N.maps[element], i)
                r = restricted.key() if restricted is not None else None
                fam = M.matching_map[element]
                by_restriction.setdefault(r, set()).add(fam)
                by_family.setdefault(fam, set()).add(r)
            if any(len(v) != 1 for v in by_restriction.values()) or any(len(v) != 1 for v in by_family.values()):
                report.mismatches.append(f"{kind} at {X.name}: restriction and matching map disagree")
    return report


def nerve_span(span: FunctorSpan) -> Span:
    """The span of nerves along the diagram the functor span names."""
    D = builtin_diagram(span.diagram)
    apex = nerve(span.apex, D)
    left = nerve_map(span.left, D, source=apex)
    right = nerve_map(span.right, D, source=apex)
    return Span(apex.presheaf, left, right, name=span.name or f"{span.left.name}|{span.right.name}")
