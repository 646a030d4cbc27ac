"""Line-oriented text formats for signatures, presheaves, double categories, functors and spans.

Every format is one directive per line, `head: rest`. Lines starting with `#` are comments.
References to other files are relative paths, resolved against the referencing file, or
`builtin:<name>`.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterator

from app.core.corpus import (
    FunctorSpan,
    builtin_double,
    builtin_functor,
    builtin_span,
    double_names,
    functor_names,
    span_names,
)
from app.core.dblcat import Boundary, DoubleFunctor, FiniteDoubleCategory
from app.core.errors import FormatError, UnknownBuiltin
from app.core.presentation import (
    ShapeInclusion,
    ShapePresentation,
    format_presentation,
    parse_inclusion_body,
    parse_presentation,
)
from app.core.presheaf import NatTransf, Presheaf
from app.core.shapes import builtin_inclusion, builtin_shape, shape_names
from app.core.signature import BUILTIN_SIGNATURES, FoldsSignature, builtin_signature, make_signature

BUILTIN = "builtin:"
_DBL_DIRECTIVES = {"hcomp", "vcomp", "hcomp-sq", "vcomp-sq", "idh", "idv", "e", "id"}
_SUFFIX_FORMATS = {".sig": "signature", ".psh": "presheaf", ".dbl": "dblcat", ".fun": "functor", ".span": "span"}
_MAPSTO = re.compile(r"^(\S+)\s*\|->\s*(\S+)$")
_HMOR = re.compile(r"^(\S+)\s*:\s*(\S+)\s*->\s*(\S+)$")
_VMOR = re.compile(r"^(\S+)\s*:\s*(\S+)\s*=>\s*(\S+)$")
_SQ = re.compile(r"^(\S+)\s*\[\s*top=(\S+)\s+bottom=(\S+)\s+left=(\S+)\s+right=(\S+)\s*\]$")
_COMP = re.compile(r"^(\S+)\s+\.\s+(\S+)\s+=\s+(\S+)$")
_DESIGNATION = re.compile(r"^(\S+)\s+=\s+(\S+)$")


def _directives(text: str) -> Iterator[tuple[int, str, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            head, rest = line, ""
        yield lineno, head.strip(), rest.strip()


def read_text(path: Path | str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except UnicodeDecodeError as exc:
        raise FormatError(f"not UTF-8 text ({exc.reason} at byte {exc.start})", path=str(path)) from exc


def write_text(path: Path | str, text: str) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    return target


def _resolve(ref: str, base: Path | None) -> Path:
    p = Path(ref)
    if not p.is_absolute() and base is not None:
        p = base / p
    return p


def _builtin_name(ref: str) -> str | None:
    return ref[len(BUILTIN):] if ref.startswith(BUILTIN) else None


def detect_format(text: str, path: Path | str | None = None) -> str:
    """An explicit `format:` header wins, then a known file suffix, then the directives present."""
    heads = {head for _, head, _ in _directives(text)}
    if "format" in heads:
        for _, head, rest in _directives(text):
            if head == "format":
                return rest
    if path is not None and Path(path).suffix in _SUFFIX_FORMATS:
        return _SUFFIX_FORMATS[Path(path).suffix]
    if "kinds" in heads:
        return "signature"
    if "signature" in heads:
        return "presheaf"
    if "domain" in heads:
        return "inclusion"
    if "diagram" in heads or {"left", "right"} <= heads:
        return "span"
    if {"source", "target"} <= heads:
        return "nattransf" if any(h.startswith("at ") for h in heads) else "functor"
    if heads & _DBL_DIRECTIVES:
        return "dblcat"
    return "presentation"


# --- signatures -------------------------------------------------------------------------------


def parse_signature(text: str, path: str | None = None) -> FoldsSignature:
    name = Path(path).stem if path else "signature"
    kinds: list[str] = []
    relsymbols: list[str] = []
    arrows: list[tuple[str, str, str]] = []
    relations: list[tuple[str, str]] = []
    section = None
    for lineno, head, rest in _directives(text):
        if head in ("name", "kinds", "relsymbols") and section is None or head in ("arrows", "relations"):
            if head == "name":
                name = rest
            elif head == "kinds":
                kinds = rest.split()
            elif head == "relsymbols":
                relsymbols = rest.split()
            else:
                section = head
            continue
        if section == "arrows":
            m = re.match(r"^(\S+)\s*->\s*(\S+)$", rest)
            if not m:
                raise FormatError(f"bad arrow line {head}: {rest!r}", path=path, line=lineno)
            arrows.append((head, m.group(1), m.group(2)))
        elif section == "relations":
            if "=" in head:
                # no leading kind: the first arrow name must be unambiguous
                body = head if not rest else f"{head}:{rest}"
                first = body.split(".", 1)[0].strip()
                sources = {s for n, s, _ in arrows if n == first}
                if len(sources) != 1:
                    raise FormatError(f"relation {body!r} needs a source kind", path=path, line=lineno)
                relations.append((sources.pop(), body))
            else:
                if "=" not in rest:
                    raise FormatError(f"relation without '=': {rest!r}", path=path, line=lineno)
                relations.append((head, rest))
        else:
            raise FormatError(f"unknown directive {head!r}", path=path, line=lineno)
    if not kinds:
        raise FormatError("signature without kinds", path=path)
    return make_signature(name, kinds, relsymbols, arrows, relations)


def format_signature(sig: FoldsSignature) -> str:
    lines = [f"name: {sig.name}", f"kinds: {' '.join(sig.kinds)}"]
    lines.append(f"relsymbols: {' '.join(k for k in sig.kinds if k in sig.relation_kinds)}")
    lines.append("arrows:")
    lines += [f"  {a.name}: {a.source} -> {a.target}" for a in sig.arrows]
    lines.append("relations:")
    lines += [f"  {r.source}: {' . '.join(r.lhs)} = {' . '.join(r.rhs)}" for r in sig.relations]
    return "\n".join(lines) + "\n"


def load_signature(ref: str, base: Path | None = None) -> FoldsSignature:
    name = _builtin_name(ref)
    if name is not None:
        if name not in BUILTIN_SIGNATURES:
            raise UnknownBuiltin(f"No builtin signature {name!r}")
        return builtin_signature(name)
    p = _resolve(ref, base)
    return parse_signature(read_text(p), path=str(p))


# --- presheaves and natural transformations ---------------------------------------------------


def parse_presheaf(text: str, path: str | None = None, base: Path | None = None) -> Presheaf:
    sig: FoldsSignature | None = None
    carrier: dict[str, list[str]] = {}
    action: dict[tuple[str, str], str] = {}
    name = Path(path).stem if path else "presheaf"
    for lineno, head, rest in _directives(text):
        if head == "signature":
            sig = load_signature(rest, base)
        elif head == "name":
            name = rest
        elif head.startswith("arrow "):
            arrow = head[len("arrow "):].strip()
            m = re.match(r"^(\S+)\s*->\s*(\S+)$", rest)
            if not m:
                raise FormatError(f"bad action line {head}: {rest!r}", path=path, line=lineno)
            action[(arrow, m.group(1))] = m.group(2)
        else:
            carrier.setdefault(head, []).extend(rest.split())
    if sig is None:
        raise FormatError("presheaf without a signature line", path=path)
    return Presheaf.build(sig, carrier, action, name=name)


def format_presheaf(X: Presheaf, signature_ref: str | None = None) -> str:
    sig = X.signature
    ref = signature_ref or f"{BUILTIN}{sig.name}"
    lines = [f"signature: {ref}", f"name: {X.name}"]
    lines += [f"{kind}: {' '.join(X.elements(kind))}" for kind in sig.kinds]
    for kind in sig.kinds:
        for arrow in sig.arrows_from(kind):
            lines += [f"arrow {arrow.name}: {e} -> {X.apply(arrow.name, e)}" for e in X.elements(kind)]
    return "\n".join(lines) + "\n"


def load_presheaf(ref: str, base: Path | None = None) -> Presheaf:
    p = _resolve(ref, base)
    return parse_presheaf(read_text(p), path=str(p), base=p.parent)


def parse_nat_transf(text: str, path: str | None = None, base: Path | None = None) -> NatTransf:
    source = target = None
    components: dict[str, str] = {}
    for lineno, head, rest in _directives(text):
        if head == "source":
            source = load_presheaf(rest, base)
        elif head == "target":
            target = load_presheaf(rest, base)
        elif head.startswith("at "):
            m = _MAPSTO.match(rest)
            if not m:
                raise FormatError(f"bad component line {head}: {rest!r}", path=path, line=lineno)
            components[m.group(1)] = m.group(2)
        else:
            raise FormatError(f"unknown directive {head!r}", path=path, line=lineno)
    if source is None or target is None:
        raise FormatError("natural transformation needs source and target", path=path)
    return NatTransf(source, target, components, name=Path(path).stem if path else "")


def format_nat_transf(f: NatTransf, source_ref: str, target_ref: str) -> str:
    lines = [f"source: {source_ref}", f"target: {target_ref}"]
    for kind in f.source.signature.kinds:
        lines += [f"at {kind}: {e} |-> {f.components[e]}" for e in f.source.elements(kind)]
    return "\n".join(lines) + "\n"


# --- double categories and functors -----------------------------------------------------------


def parse_double_category(text: str, path: str | None = None) -> FiniteDoubleCategory:
    """Read a double category; laws are checked separately by validate_double_category."""
    name = Path(path).stem if path else "double"
    objects: list[str] = []
    hmors: dict[str, tuple[str, str]] = {}
    vmors: dict[str, tuple[str, str]] = {}
    squares: dict[str, Boundary] = {}
    tables: dict[str, dict] = {k: {} for k in ("hcomp", "vcomp", "hcomp-sq", "vcomp-sq", "idh", "idv", "e", "id")}
    for lineno, head, rest in _directives(text):
        if head == "format":
            continue
        if head == "name":
            name = rest
        elif head == "objects":
            objects.extend(rest.split())
        elif head == "hmor" or head == "vmor":
            m = (_HMOR if head == "hmor" else _VMOR).match(rest)
            if not m:
                raise FormatError(f"bad {head} line {rest!r}", path=path, line=lineno)
            (hmors if head == "hmor" else vmors)[m.group(1)] = (m.group(2), m.group(3))
        elif head == "sq":
            m = _SQ.match(rest)
            if not m:
                raise FormatError(f"bad sq line {rest!r}", path=path, line=lineno)
            squares[m.group(1)] = Boundary(*m.group(2, 3, 4, 5))
        elif head in ("hcomp", "vcomp", "hcomp-sq", "vcomp-sq"):
            m = _COMP.match(rest)
            if not m:
                raise FormatError(f"bad {head} line {rest!r}", path=path, line=lineno)
            tables[head][(m.group(1), m.group(2))] = m.group(3)
        elif head in ("idh", "idv", "e", "id"):
            m = _DESIGNATION.match(rest)
            if not m:
                raise FormatError(f"bad {head} line {rest!r}", path=path, line=lineno)
            tables[head][m.group(1)] = m.group(2)
        else:
            raise FormatError(f"unknown directive {head!r}", path=path, line=lineno)
    return FiniteDoubleCategory(
        name=name,
        objects=tuple(objects),
        hmors=hmors,
        vmors=vmors,
        squares=squares,
        hcomp_h=tables["hcomp"],
        vcomp_v=tables["vcomp"],
        hcomp_sq=tables["hcomp-sq"],
        vcomp_sq=tables["vcomp-sq"],
        idh=tables["idh"],
        idv=tables["idv"],
        esq=tables["e"],
        idsq=tables["id"],
    )


def format_double_category(A: FiniteDoubleCategory) -> str:
    lines = [f"name: {A.name}", f"objects: {' '.join(A.objects)}"]
    lines += [f"hmor: {f}: {a} -> {b}" for f, (a, b) in A.hmors.items()]
    lines += [f"vmor: {u}: {a} => {b}" for u, (a, b) in A.vmors.items()]
    lines += [f"sq: {s} [top={b.top} bottom={b.bottom} left={b.left} right={b.right}]" for s, b in A.squares.items()]
    for head, table in (("hcomp", A.hcomp_h), ("vcomp", A.vcomp_v), ("hcomp-sq", A.hcomp_sq), ("vcomp-sq", A.vcomp_sq)):
        lines += [f"{head}: {x} . {y} = {z}" for (x, y), z in table.items()]
    for head, table in (("idh", A.idh), ("idv", A.idv), ("e", A.esq), ("id", A.idsq)):
        lines += [f"{head}: {x} = {y}" for x, y in table.items()]
    return "\n".join(lines) + "\n"


def load_double(ref: str, base: Path | None = None) -> FiniteDoubleCategory:
    name = _builtin_name(ref)
    if name is not None:
        return builtin_double(name)
    p = _resolve(ref, base)
    return parse_double_category(read_text(p), path=str(p))


def parse_functor(text: str, path: str | None = None, base: Path | None = None) -> DoubleFunctor:
    source = target = None
    comps: dict[str, dict[str, str]] = {"obj": {}, "hmor": {}, "vmor": {}, "sq": {}}
    for lineno, head, rest in _directives(text):
        if head == "source":
            source = load_double(rest, base)
        elif head == "target":
            target = load_double(rest, base)
        elif head in comps:
            m = _MAPSTO.match(rest)
            if not m:
                raise FormatError(f"bad {head} line {rest!r}", path=path, line=lineno)
            comps[head][m.group(1)] = m.group(2)
        elif head not in ("format", "name"):
            raise FormatError(f"unknown directive {head!r}", path=path, line=lineno)
    if source is None or target is None:
        raise FormatError("double functor needs source and target", path=path)
    return DoubleFunctor(source, target, comps["obj"], comps["hmor"], comps["vmor"], comps["sq"],
                         name=Path(path).stem if path else f"{source.name}->{target.name}")


def format_functor(F: DoubleFunctor, source_ref: str, target_ref: str) -> str:
    lines = ["format: functor", f"source: {source_ref}", f"target: {target_ref}"]
    for head, comp in (("obj", F.obj), ("hmor", F.hmor), ("vmor", F.vmor), ("sq", F.sq)):
        lines += [f"{head}: {x} |-> {y}" for x, y in comp.items()]
    return "\n".join(lines) + "\n"


def load_functor(ref: str, base: Path | None = None) -> DoubleFunctor:
    name = _builtin_name(ref)
    if name is not None:
        return builtin_functor(name)
    p = _resolve(ref, base)
    return parse_functor(read_text(p), path=str(p), base=p.parent)


# --- shapes and spans -------------------------------------------------------------------------


def load_presentation(ref: str, base: Path | None = None) -> ShapePresentation:
    name = _builtin_name(ref)
    if name is not None:
        return builtin_shape(name)
    p = _resolve(ref, base)
    return parse_presentation(read_text(p), path=str(p))


def parse_shape_inclusion(text: str, path: str | None = None, base: Path | None = None) -> ShapeInclusion:
    domain = codomain = None
    for _, head, rest in _directives(text):
        if head == "domain":
            domain = load_presentation(rest, base)
        elif head == "codomain":
            codomain = load_presentation(rest, base)
    if domain is None or codomain is None:
        raise FormatError("shape map needs domain and codomain", path=path)
    return parse_inclusion_body(text, domain, codomain, path=path, name=Path(path).stem if path else "")


def load_inclusion(ref: str, base: Path | None = None) -> ShapeInclusion:
    name = _builtin_name(ref)
    if name is not None:
        return builtin_inclusion(name)
    p = _resolve(ref, base)
    return parse_shape_inclusion(read_text(p), path=str(p), base=p.parent)


def parse_span(text: str, path: str | None = None, base: Path | None = None) -> FunctorSpan:
    fields: dict[str, str] = {}
    for lineno, head, rest in _directives(text):
        if head not in ("diagram", "left", "right", "name"):
            raise FormatError(f"unknown directive {head!r}", path=path, line=lineno)
        fields[head] = rest
    if "left" not in fields or "right" not in fields:
        raise FormatError("span needs left and right functors", path=path)
    left, right = load_functor(fields["left"], base), load_functor(fields["right"], base)
    if left.source is not right.source and left.source.name != right.source.name:
        raise FormatError(f"span legs start at {left.source.name} and {right.source.name}", path=path)
    return FunctorSpan(fields.get("diagram", "dblcat"), left, right, name=fields.get("name", Path(path).stem if path else ""))


def load_span(ref: str, base: Path | None = None) -> FunctorSpan:
    name = _builtin_name(ref)
    if name is not None:
        return builtin_span(name)
    p = _resolve(ref, base)
    return parse_span(read_text(p), path=str(p), base=p.parent)


def load_any(ref: str) -> tuple[str, object]:
    """Load a file or builtin of any format, returning `(format, object)`."""
    name = _builtin_name(ref)
    if name is not None:
        for fmt, names, loader in (
            ("signature", BUILTIN_SIGNATURES, load_signature),
            ("dblcat", double_names(), load_double),
            ("functor", functor_names(), load_functor),
            ("span", span_names(), load_span),
            ("presentation", shape_names(), load_presentation),
        ):
            if name in names:
                return fmt, loader(ref)
        raise UnknownBuiltin(f"No builtin named {name!r}")
    p = Path(ref)
    text = read_text(p)
    fmt = detect_format(text, p)
    base = p.parent
    parsers = {
        "signature": lambda: parse_signature(text, path=str(p)),
        "presheaf": lambda: parse_presheaf(text, path=str(p), base=base),
        "nattransf": lambda: parse_nat_transf(text, path=str(p), base=base),
        "dblcat": lambda: parse_double_category(text, path=str(p)),
        "functor": lambda: parse_functor(text, path=str(p), base=base),
        "presentation": lambda: parse_presentation(text, path=str(p)),
        "inclusion": lambda: parse_shape_inclusion(text, path=str(p), base=base),
        "span": lambda: parse_span(text, path=str(p), base=base),
    }
    if fmt not in parsers:
        raise FormatError(f"unknown format {fmt!r}", path=str(p))
    return fmt, parsers[fmt]()


__all__ = [
    "detect_format",
    "format_double_category",
    "format_functor",
    "format_nat_transf",
    "format_presentation",
    "format_presheaf",
    "format_signature",
    "load_any",
    "load_double",
    "load_functor",
    "load_inclusion",
    "load_presentation",
    "load_presheaf",
    "load_signature",
    "load_span",
    "parse_double_category",
    "parse_functor",
    "parse_nat_transf",
    "parse_presheaf",
    "parse_shape_inclusion",
    "parse_signature",
    "parse_span",
    "read_text",
    "write_text",
]
