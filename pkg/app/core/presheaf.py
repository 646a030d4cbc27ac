"""Finite set-valued functors on a signature, their maps, matching objects and fiberwise surjections."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Iterator, Mapping, Sequence

from app.core.errors import UnknownKind, ValidationReport
from app.core.logger import APP_LOGGER
from app.core.signature import ArrowWord, FoldsSignature

Family = tuple[str, ...]


@dataclass(frozen=True)
class Presheaf:
    """Carrier sets per kind with the action of every generating arrow.

    Element names form one global namespace: carriers are pairwise disjoint. The action is keyed
    by `(arrow name, element)`; the element determines the source kind.
    """

    signature: FoldsSignature
    carrier: Mapping[str, tuple[str, ...]]
    action: Mapping[tuple[str, str], str]
    name: str = ""

    @classmethod
    def build(
        cls,
        signature: FoldsSignature,
        carrier: Mapping[str, Sequence[str]],
        action: Mapping[tuple[str, str], str],
        name: str = "",
    ) -> "Presheaf":
        full = {kind: tuple(carrier.get(kind, ())) for kind in signature.kinds}
        for kind in carrier:
            if kind not in full:
                full[kind] = tuple(carrier[kind])
        return cls(signature=signature, carrier=full, action=dict(action), name=name)

    @cached_property
    def _kind_of(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for kind, elems in self.carrier.items():
            for e in elems:
                out.setdefault(e, kind)
        return out

    def elements(self, kind: str) -> tuple[str, ...]:
        return self.carrier.get(kind, ())

    def kind_of(self, element: str) -> str:
        try:
            return self._kind_of[element]
        except KeyError:
            raise UnknownKind(f"Element {element!r} is not in presheaf {self.name or '<anon>'}") from None

    def __contains__(self, element: object) -> bool:
        return element in self._kind_of

    def size(self) -> int:
        return sum(len(v) for v in self.carrier.values())

    def apply(self, arrow_name: str, element: str) -> str:
        return self.action[(arrow_name, element)]

    def apply_word(self, names: Sequence[str], element: str) -> str:
        for name in names:
            element = self.action[(name, element)]
        return element

    def generating_family(self, element: str) -> Family:
        kind = self.kind_of(element)
        return tuple(self.action[(a.name, element)] for a in self.signature.arrows_from(kind))

    def full_family(self, element: str) -> Family:
        kind = self.kind_of(element)
        return tuple(self.apply_word(w.names, element) for w in self.signature.fan(kind))

    @cached_property
    def _family_index(self) -> dict[str, dict[Family, tuple[str, ...]]]:
        index: dict[str, dict[Family, list[str]]] = {}
        for kind in self.signature.kinds:
            bucket: dict[Family, list[str]] = {}
            for e in self.elements(kind):
                bucket.setdefault(self.generating_family(e), []).append(e)
            index[kind] = bucket
        return {k: {f: tuple(v) for f, v in b.items()} for k, b in index.items()}

    def fiber(self, kind: str, generating_family: Family) -> tuple[str, ...]:
        """Elements of `kind` whose generating-arrow images are `generating_family`."""
        return self._family_index.get(kind, {}).get(tuple(generating_family), ())

    def relabel(self, rename: Callable[[str], str], name: str | None = None) -> tuple["Presheaf", "NatTransf"]:
        """Isomorphic copy with renamed elements, and the isomorphism into it."""
        mapping = {e: rename(e) for e in self._kind_of}
        carrier = {k: tuple(mapping[e] for e in v) for k, v in self.carrier.items()}
        action = {(a, mapping[e]): mapping[t] for (a, e), t in self.action.items()}
        copy = Presheaf(self.signature, carrier, action, name if name is not None else f"{self.name}'")
        return copy, NatTransf(self, copy, mapping, name=f"relabel:{self.name}")


@dataclass(frozen=True)
class NatTransf:
    source: Presheaf
    target: Presheaf
    components: Mapping[str, str]
    name: str = ""

    def __call__(self, element: str) -> str:
        return self.components[element]

    def map_family(self, family: Sequence[str]) -> Family:
        return tuple(self.components[e] for e in family)


@dataclass(frozen=True)
class Span:
    """Two maps out of a common apex, optionally with a context interpreted into the apex."""

    apex: Presheaf
    left: NatTransf
    right: NatTransf
    context: Presheaf | None = None
    interpretation: NatTransf | None = None
    name: str = ""

    def feet(self) -> tuple[Presheaf, Presheaf]:
        return self.left.target, self.right.target

    def foot_interpretations(self) -> tuple[NatTransf | None, NatTransf | None]:
        if self.interpretation is None:
            return None, None
        return compose(self.left, self.interpretation), compose(self.right, self.interpretation)


@dataclass(frozen=True)
class MatchingObject:
    kind: str
    words: tuple[ArrowWord, ...]
    families: tuple[Family, ...]
    matching_map: Mapping[str, Family] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.families)

    def as_dicts(self) -> list[dict[str, str]]:
        return [{str(w): e for w, e in zip(self.words, fam)} for fam in self.families]


@dataclass(frozen=True)
class LStructureCheck:
    ok: bool
    kind: str | None = None
    witnesses: tuple[str, ...] = ()


@dataclass(frozen=True)
class SurjectivityCheck:
    ok: bool
    kind: str | None = None
    element: str | None = None
    family: Family = ()


# --- construction helpers -----------------------------------------------------------


def terminal_presheaf(sig: FoldsSignature) -> Presheaf:
    carrier = {k: (f"{k}#0",) for k in sig.kinds}
    action = {(a.name, f"{a.source}#0"): f"{a.target}#0" for a in sig.arrows}
    return Presheaf.build(sig, carrier, action, name="terminal")


def _word_presheaf(sig: FoldsSignature, kind: str, include_identity: bool) -> Presheaf:
    sig.require_kind(kind)
    words = list(sig.fan(kind))
    if include_identity:
        words.insert(0, ArrowWord(kind, (), kind))
    carrier: dict[str, list[str]] = {k: [] for k in sig.kinds}
    for w in words:
        carrier[w.target].append(str(w))
    action: dict[tuple[str, str], str] = {}
    for w in words:
        for arrow in sig.arrows_from(w.target):
            composite = sig.canonical(ArrowWord(kind, w.names + (arrow.name,), arrow.target))
            action[(arrow.name, str(w))] = str(composite)
    label = "L" if include_identity else "dL"
    return Presheaf.build(sig, carrier, action, name=f"{label}_{kind}")


def representable(sig: FoldsSignature, kind: str) -> Presheaf:
    """The presheaf H -> L(kind, H), acting by postcomposition."""
    return _word_presheaf(sig, kind, include_identity=True)


def boundary_weight(sig: FoldsSignature, kind: str) -> Presheaf:
    """The subpresheaf of the representable without the identity of `kind`."""
    return _word_presheaf(sig, kind, include_identity=False)


def identity_transf(X: Presheaf) -> NatTransf:
    return NatTransf(X, X, {e: e for e in X._kind_of}, name=f"id:{X.name}")


def compose(g: NatTransf, f: NatTransf) -> NatTransf:
    """g after f."""
    return NatTransf(f.source, g.target, {e: g.components[f.components[e]] for e in f.components}, name=f"{g.name}*{f.name}")


def is_isomorphism(f: NatTransf) -> bool:
    for kind in f.source.signature.kinds:
        src = f.source.elements(kind)
        image = {f.components[e] for e in src}
        if len(image) != len(src) or image != set(f.target.elements(kind)):
            return False
    return True


# --- validation ---------------------------------------------------------------------


def validate_presheaf(X: Presheaf, sig: FoldsSignature | None = None) -> ValidationReport:
    sig = sig or X.signature
    report = ValidationReport(subject=f"presheaf {X.name or '<anon>'}")
    owner: dict[str, str] = {}
    for kind, elems in X.carrier.items():
        if not sig.has_kind(kind):
            report.add("UnknownKind", f"carrier for unknown kind {kind!r}", kind)
            continue
        for e in elems:
            if e in owner:
                report.add("NotDisjoint", f"element {e!r} appears in {owner[e]} and {kind}", e)
            owner[e] = kind
    if not report.ok:
        return report

    for (arrow_name, element), value in X.action.items():
        kind = owner.get(element)
        if kind is None:
            report.add("ActionNotTotal", f"action of {arrow_name!r} on unknown element {element!r}", element)
            continue
        if all(a.name != arrow_name for a in sig.arrows_from(kind)):
            report.add("UnknownArrow", f"no arrow {arrow_name!r} out of {kind}", arrow_name, element)
    for kind in sig.kinds:
        for arrow in sig.arrows_from(kind):
            for e in X.elements(kind):
                value = X.action.get((arrow.name, e))
                if value is None:
                    report.add("ActionNotTotal", f"{arrow.name} undefined on {e}", arrow.name, e)
                elif owner.get(value) != arrow.target:
                    report.add("ActionNotTotal", f"{arrow.name}({e}) = {value} is not in {arrow.target}", arrow.name, e, value)
    if not report.ok:
        return report

    for rel in sig.relations:
        for e in X.elements(rel.source):
            left = X.apply_word(rel.lhs, e)
            right = X.apply_word(rel.rhs, e)
            if left != right:
                report.add("RelationViolated", f"{rel} fails at {e}: {left} != {right}", str(rel), e)
    return report


def validate_nat_transf(f: NatTransf) -> ValidationReport:
    report = ValidationReport(subject=f"natural transformation {f.name or '<anon>'}")
    sig = f.source.signature
    for kind in sig.kinds:
        for e in f.source.elements(kind):
            image = f.components.get(e)
            if image is None:
                report.add("ActionNotTotal", f"component undefined at {e}", e)
                continue
            if image not in f.target or f.target.kind_of(image) != kind:
                report.add("UnknownKind", f"{e} in {kind} is sent to {image!r} outside {kind}", e, image)
    if not report.ok:
        return report
    for kind in sig.kinds:
        for arrow in sig.arrows_from(kind):
            for e in f.source.elements(kind):
                lhs = f.components[f.source.apply(arrow.name, e)]
                rhs = f.target.apply(arrow.name, f.components[e])
                if lhs != rhs:
                    report.add("NotNatural", f"naturality fails for {arrow.name} at {e}", arrow.name, e)
    return report


# --- matching objects ---------------------------------------------------------------


def _family_constraints(sig: FoldsSignature, kind: str) -> tuple[dict[str, int], list[list[tuple[tuple[str, ...], tuple[str, ...]]]]]:
    arrows = sig.arrows_from(kind)
    position = {a.name: i for i, a in enumerate(arrows)}
    table = sig._canonical_tables[kind]
    constraints: list[list[tuple[tuple[str, ...], tuple[str, ...]]]] = [[] for _ in arrows]
    for word, canon in table.items():
        if word == canon:
            continue
        level = max(position[word[0]], position[canon[0]])
        constraints[level].append((word, canon))
    return position, constraints


def _generating_families(
    X: Presheaf,
    kind: str,
    allowed: Sequence[Sequence[str]] | None = None,
) -> Iterator[Family]:
    sig = X.signature
    arrows = sig.arrows_from(kind)
    position, constraints = _family_constraints(sig, kind)
    candidates = [allowed[i] if allowed is not None else X.elements(a.target) for i, a in enumerate(arrows)]
    chosen: list[str] = []

    def consistent(level: int) -> bool:
        for word, canon in constraints[level]:
            lhs = X.apply_word(word[1:], chosen[position[word[0]]])
            rhs = X.apply_word(canon[1:], chosen[position[canon[0]]])
            if lhs != rhs:
                return False
        return True

    def backtrack(level: int) -> Iterator[Family]:
        if level == len(arrows):
            yield tuple(chosen)
            return
        for x in candidates[level]:
            chosen.append(x)
            if consistent(level):
                yield from backtrack(level + 1)
            chosen.pop()

    yield from backtrack(0)


def compatible_families(X: Presheaf, kind: str, allowed: Sequence[Sequence[str]] | None = None) -> list[Family]:
    """Generating families of `kind` in X, one element per generating arrow in declared order."""
    X.signature.require_kind(kind)
    return list(_generating_families(X, kind, allowed))


def expand_family(X: Presheaf, kind: str, generating: Family) -> Family:
    sig = X.signature
    position = {a.name: i for i, a in enumerate(sig.arrows_from(kind))}
    return tuple(X.apply_word(w.names[1:], generating[position[w.names[0]]]) for w in sig.fan(kind))


def matching_object(X: Presheaf, kind: str) -> MatchingObject:
    """Compatible families indexed by the canonical words out of `kind`, plus the matching map."""
    sig = X.signature
    sig.require_kind(kind)
    families = tuple(expand_family(X, kind, g) for g in _generating_families(X, kind))
    matching_map = {e: X.full_family(e) for e in X.elements(kind)}
    return MatchingObject(kind=kind, words=sig.fan(kind), families=families, matching_map=matching_map)


def is_compatible_family(X: Presheaf, kind: str, generating: Sequence[str]) -> bool:
    """Whether one element per generating arrow out of `kind` extends to a compatible family."""
    sig = X.signature
    arrows = sig.arrows_from(kind)
    if len(generating) != len(arrows):
        return False
    for arrow, e in zip(arrows, generating):
        if e not in X or X.kind_of(e) != arrow.target:
            return False
    allowed = [(e,) for e in generating]
    return any(True for _ in _generating_families(X, kind, allowed=allowed))


def is_l_structure(X: Presheaf) -> LStructureCheck:
    """Matching maps at relation kinds must be injective."""
    sig = X.signature
    for kind in sig.kinds:
        if not sig.is_relation_kind(kind):
            continue
        seen: dict[Family, str] = {}
        for e in X.elements(kind):
            fam = X.generating_family(e)
            if fam in seen:
                return LStructureCheck(False, kind, (seen[fam], e))
            seen[fam] = e
    return LStructureCheck(True)


def is_fiberwise_surjective(rho: NatTransf) -> SurjectivityCheck:
    X, Y = rho.source, rho.target
    sig = X.signature
    order = sorted(sig.kinds, key=lambda k: (sig.degree(k), sig.kinds.index(k)))
    for kind in order:
        hit = {(rho(x), X.generating_family(x)) for x in X.elements(kind)}
        for fam in _generating_families(X, kind):
            pushed = rho.map_family(fam)
            for y in Y.fiber(kind, pushed):
                if (y, fam) not in hit:
                    APP_LOGGER.debug(f"Fiberwise surjectivity fails at {kind}: {y} over {fam}")
                    return SurjectivityCheck(False, kind, y, fam)
    return SurjectivityCheck(True)


def brute_force_matching(X: Presheaf, kind: str) -> set[Family]:
    """Natural transformations from the boundary weight into X, enumerated naively."""
    sig = X.signature
    weight = boundary_weight(sig, kind)
    words = sig.fan(kind)
    names = [str(w) for w in words]
    pools = [X.elements(w.target) for w in words]
    found: set[Family] = set()
    for choice in product(*pools):
        assign = dict(zip(names, choice))
        natural = True
        for w_name in names:
            for arrow in sig.arrows_from(weight.kind_of(w_name)):
                if X.apply(arrow.name, assign[w_name]) != assign[weight.apply(arrow.name, w_name)]:
                    natural = False
                    break
            if not natural:
                break
        if natural:
            found.add(tuple(choice))
    return found
