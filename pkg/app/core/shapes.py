"""Builtin shape presentations and the generating cofibrations and anodyne maps."""

from __future__ import annotations

from functools import lru_cache

from app.core.errors import UnknownBuiltin
from app.core.presentation import ShapeInclusion, ShapePresentation, parse_inclusion_body, parse_presentation

_SHAPES: dict[str, str] = {
    "empty": """
        name: empty
    """,
    "point": """
        name: point
        objects: x
    """,
    "two_points": """
        name: two_points
        objects: 0 1
    """,
    "H2": """
        name: H2
        objects: 0 1
        hmor: f: 0 -> 1
    """,
    "V2": """
        name: V2
        objects: 0 1
        vmor: u: 0 => 1
    """,
    "chain3": """
        name: chain3
        objects: 0 1 2
        hmor: a: 0 -> 1
        hmor: b: 1 -> 2
        hmor: c: 0 -> 2
        relation: h(a,b) = c
    """,
    "square_boundary": """
        name: square_boundary
        objects: a b c d
        hmor: f: a -> b
        hmor: g: c -> d
        vmor: u: a => c
        vmor: v: b => d
    """,
    "square": """
        name: square
        objects: a b c d
        hmor: f: a -> b
        hmor: g: c -> d
        vmor: u: a => c
        vmor: v: b => d
        sq: s [top=f bottom=g left=u right=v]
    """,
    "parallel_squares": """
        name: parallel_squares
        objects: a b c d
        hmor: f: a -> b
        hmor: g: c -> d
        vmor: u: a => c
        vmor: v: b => d
        sq: s1 [top=f bottom=g left=u right=v]
        sq: s2 [top=f bottom=g left=u right=v]
    """,
    # loop isomorphic to the identity
    "HA": """
        name: HA
        objects: x
        hmor: e: x -> x
        sq: theta [top=e bottom=idh(x) left=idv(x) right=idv(x)]
        invertible: theta vertical
    """,
    "VA": """
        name: VA
        objects: x
        vmor: e: x => x
        sq: theta [top=idh(x) bottom=idh(x) left=e right=idv(x)]
        invertible: theta horizontal
    """,
    # triangle commuting up to an invertible square
    "HT": """
        name: HT
        objects: 0 1 2
        hmor: a: 0 -> 1
        hmor: b: 1 -> 2
        hmor: c: 0 -> 2
        sq: theta [top=h(a,b) bottom=c left=idv(0) right=idv(2)]
        invertible: theta vertical
    """,
    "VT": """
        name: VT
        objects: 0 1 2
        vmor: a: 0 => 1
        vmor: b: 1 => 2
        vmor: c: 0 => 2
        sq: theta [top=idh(0) bottom=idh(2) left=v(a,b) right=c]
        invertible: theta horizontal
    """,
    "C_H": """
        name: C_H
        objects: p0 p1 p2 q0 q1 q2
        hmor: k: p0 -> p2
        hmor: a1: p0 -> p1
        hmor: a2: p1 -> p2
        hmor: b1: q0 -> q1
        hmor: b2: q1 -> q2
        hmor: k2: q0 -> q2
        vmor: v0: p0 => q0
        vmor: v1: p1 => q1
        vmor: v2: p2 => q2
        sq: alpha [top=a1 bottom=b1 left=v0 right=v1]
        sq: beta [top=a2 bottom=b2 left=v1 right=v2]
        sq: thetat [top=k bottom=h(a1,a2) left=idv(p0) right=idv(p2)]
        sq: thetab [top=h(b1,b2) bottom=k2 left=idv(q0) right=idv(q2)]
        invertible: thetat vertical
        invertible: thetab vertical
    """,
    "C_V": """
        name: C_V
        objects: p0 p1 p2 q0 q1 q2
        vmor: k: p0 => p2
        vmor: a1: p0 => p1
        vmor: a2: p1 => p2
        vmor: b1: q0 => q1
        vmor: b2: q1 => q2
        vmor: k2: q0 => q2
        hmor: h0: p0 -> q0
        hmor: h1: p1 -> q1
        hmor: h2: p2 -> q2
        sq: alpha [top=h0 bottom=h1 left=a1 right=b1]
        sq: beta [top=h1 bottom=h2 left=a2 right=b2]
        sq: thetal [top=idh(p0) bottom=idh(p2) left=k right=v(a1,a2)]
        sq: thetar [top=idh(q0) bottom=idh(q2) left=v(b1,b2) right=k2]
        invertible: thetal horizontal
        invertible: thetar horizontal
    """,
    "Sigma2": """
        name: Sigma2
        objects: 0 1
        hmor: f: 0 -> 1
        hmor: g: 0 -> 1
        sq: alpha [top=f bottom=g left=idv(0) right=idv(1)]
    """,
    "Sigma3": """
        name: Sigma3
        objects: 0 1
        hmor: f: 0 -> 1
        hmor: g: 0 -> 1
        hmor: k: 0 -> 1
        sq: alpha [top=f bottom=g left=idv(0) right=idv(1)]
        sq: beta [top=g bottom=k left=idv(0) right=idv(1)]
    """,
    # two horizontally composable 2-cells and invertible comparisons with their composite
    "H_iso": """
        name: H_iso
        objects: 0 1 2
        hmor: f1: 0 -> 1
        hmor: g1: 0 -> 1
        hmor: f2: 1 -> 2
        hmor: g2: 1 -> 2
        hmor: k: 0 -> 2
        hmor: k2: 0 -> 2
        sq: alpha [top=f1 bottom=g1 left=idv(0) right=idv(1)]
        sq: beta [top=f2 bottom=g2 left=idv(1) right=idv(2)]
        sq: thetas [top=k bottom=h(f1,f2) left=idv(0) right=idv(2)]
        sq: thetat [top=h(g1,g2) bottom=k2 left=idv(0) right=idv(2)]
        invertible: thetas vertical
        invertible: thetat vertical
    """,
    # walking adjoint equivalence in the vertical direction
    "VE_adj": """
        name: VE_adj
        objects: 0 1
        vmor: u: 0 => 1
        vmor: w: 1 => 0
        sq: eta [top=idh(0) bottom=idh(0) left=idv(0) right=v(u,w)]
        sq: eps [top=idh(1) bottom=idh(1) left=v(w,u) right=idv(1)]
        invertible: eta horizontal
        invertible: eps horizontal
        relation: h(v(eta,id(u)),v(id(u),eps)) = id(u)
        relation: h(v(id(w),eta),v(eps,id(w))) = id(w)
    """,
    # free companion pair
    "Sq2": """
        name: Sq2
        objects: 0 1
        hmor: f: 0 -> 1
        vmor: u: 0 => 1
        sq: phi [top=f bottom=idh(1) left=u right=idv(1)]
        sq: psi [top=idh(0) bottom=f left=idv(0) right=u]
        relation: h(psi,phi) = e(f)
        relation: v(psi,phi) = id(u)
    """,
    # free conjoint pair
    "Sq2hop": """
        name: Sq2hop
        objects: 0 1
        hmor: f: 1 -> 0
        vmor: u: 0 => 1
        sq: eps [top=f bottom=idh(1) left=idv(1) right=u]
        sq: eta [top=idh(0) bottom=f left=u right=idv(0)]
        relation: h(eps,eta) = e(f)
        relation: v(eta,eps) = id(u)
    """,
    "HSigmaI": """
        name: HSigmaI
        objects: 0 1
        hmor: f: 0 -> 1
        hmor: g: 0 -> 1
        sq: theta [top=f bottom=g left=idv(0) right=idv(1)]
        invertible: theta vertical
    """,
    "VSigmaI": """
        name: VSigmaI
        objects: 0 1
        vmor: u: 0 => 1
        vmor: w: 0 => 1
        sq: theta [top=idh(0) bottom=idh(1) left=u right=w]
        invertible: theta horizontal
    """,
}

_INCLUSIONS: dict[str, tuple[str, str, str]] = {
    "i_empty": ("empty", "point", ""),
    "i_hpoints": ("two_points", "H2", "map: 0 |-> 0\nmap: 1 |-> 1"),
    "i_vpoints": ("two_points", "V2", "map: 0 |-> 0\nmap: 1 |-> 1"),
    "i_boundary": (
        "square_boundary",
        "square",
        "map: a |-> a\nmap: b |-> b\nmap: c |-> c\nmap: d |-> d\n"
        "map: f |-> f\nmap: g |-> g\nmap: u |-> u\nmap: v |-> v",
    ),
    "i_parallel": (
        "parallel_squares",
        "square",
        "map: a |-> a\nmap: b |-> b\nmap: c |-> c\nmap: d |-> d\n"
        "map: f |-> f\nmap: g |-> g\nmap: u |-> u\nmap: v |-> v\n"
        "map: s1 |-> s\nmap: s2 |-> s",
    ),
    "j_equivalence": ("point", "VE_adj", "map: x |-> 1"),
    "j_companion": ("V2", "Sq2", "map: 0 |-> 0\nmap: 1 |-> 1\nmap: u |-> u"),
    "j_conjoint": ("V2", "Sq2hop", "map: 0 |-> 0\nmap: 1 |-> 1\nmap: u |-> u"),
    "j_hiso": ("H2", "HSigmaI", "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f"),
    "j_viso": ("V2", "VSigmaI", "map: 0 |-> 0\nmap: 1 |-> 1\nmap: u |-> u"),
    "h_companion": ("H2", "Sq2", "map: 0 |-> 0\nmap: 1 |-> 1\nmap: f |-> f"),
    "h_conjoint": ("H2", "Sq2hop", "map: 0 |-> 1\nmap: 1 |-> 0\nmap: f |-> f"),
}

GENERATING_COFIBRATIONS = ("i_empty", "i_hpoints", "i_vpoints", "i_boundary", "i_parallel")
ANODYNE_MAPS = ("j_equivalence", "j_companion", "j_conjoint", "j_hiso", "j_viso")


def shape_names() -> tuple[str, ...]:
    return tuple(_SHAPES)


@lru_cache(maxsize=None)
def builtin_shape(name: str) -> ShapePresentation:
    try:
        text = _SHAPES[name]
    except KeyError:
        raise UnknownBuiltin(f"No builtin shape {name!r}") from None
    return parse_presentation(text, path=f"builtin:{name}")


@lru_cache(maxsize=None)
def builtin_inclusion(name: str) -> ShapeInclusion:
    try:
        dom, cod, body = _INCLUSIONS[name]
    except KeyError:
        raise UnknownBuiltin(f"No builtin shape map {name!r}") from None
    return parse_inclusion_body(body, builtin_shape(dom), builtin_shape(cod), path=f"builtin:{name}", name=name)


def shape_map(domain: str, codomain: str, body: str, name: str = "") -> ShapeInclusion:
    """A map between builtin shapes given by `map:` lines."""
    return parse_inclusion_body(body, builtin_shape(domain), builtin_shape(codomain), name=name or f"{domain}->{codomain}")


def generating_cofibrations() -> list[ShapeInclusion]:
    return [builtin_inclusion(n) for n in GENERATING_COFIBRATIONS]


def anodyne_maps() -> list[ShapeInclusion]:
    return [builtin_inclusion(n) for n in ANODYNE_MAPS]
