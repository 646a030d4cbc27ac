"""FOLDS signatures: finite inverse categories presented by generating arrows and relations."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from app.core.errors import (
    DegreeCycle,
    IllTypedRelation,
    UnknownArrow,
    UnknownKind,
    ValidationReport,
)
from app.core.logger import APP_LOGGER

BUILTIN_SIGNATURES = ("cat", "twocat", "dblcat")
APPLICATIVE_DOT = "·"


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str

    def __str__(self) -> str:
        return f"{self.name}: {self.source} -> {self.target}"


@dataclass(frozen=True)
class ArrowWord:
    """A composable sequence of generating arrows, read left to right (diagrammatic order)."""

    source: str
    names: tuple[str, ...]
    target: str

    @property
    def is_identity(self) -> bool:
        return not self.names

    def __str__(self) -> str:
        if not self.names:
            return f"id_{self.source}"
        return ".".join(self.names)


@dataclass(frozen=True)
class Relation:
    source: str
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.source}: {' . '.join(self.lhs)} = {' . '.join(self.rhs)}"


class _UnionFind:
    def __init__(self) -> None:
        self._parent: dict[tuple[str, ...], tuple[str, ...]] = {}

    def add(self, item: tuple[str, ...]) -> None:
        self._parent.setdefault(item, item)

    def find(self, item: tuple[str, ...]) -> tuple[str, ...]:
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a: tuple[str, ...], b: tuple[str, ...]) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self._parent[rb] = ra


@dataclass(frozen=True)
class FoldsSignature:
    name: str
    kinds: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    relations: tuple[Relation, ...]
    relation_kinds: frozenset[str]

    # --- lookup -------------------------------------------------------------

    @cached_property
    def _arrow_index(self) -> dict[tuple[str, str], int]:
        return {(a.source, a.name): idx for idx, a in enumerate(self.arrows)}

    @cached_property
    def _out_arrows(self) -> dict[str, tuple[Arrow, ...]]:
        out: dict[str, list[Arrow]] = {k: [] for k in self.kinds}
        for arrow in self.arrows:
            out.setdefault(arrow.source, []).append(arrow)
        return {k: tuple(v) for k, v in out.items()}

    def has_kind(self, kind: str) -> bool:
        return kind in self._out_arrows

    def require_kind(self, kind: str) -> None:
        if kind not in self._out_arrows:
            raise UnknownKind(f"Unknown kind {kind!r} in signature {self.name!r}")

    def arrows_from(self, kind: str) -> tuple[Arrow, ...]:
        self.require_kind(kind)
        return self._out_arrows[kind]

    def arrow(self, source: str, name: str) -> Arrow:
        idx = self._arrow_index.get((source, name))
        if idx is None:
            raise UnknownArrow(f"No arrow {name!r} out of kind {source!r}")
        return self.arrows[idx]

    def is_relation_kind(self, kind: str) -> bool:
        return kind in self.relation_kinds

    def word(self, source: str, names: Sequence[str]) -> ArrowWord:
        """Resolve a sequence of arrow names starting at `source`."""
        self.require_kind(source)
        current = source
        for name in names:
            current = self.arrow(current, name).target
        return ArrowWord(source, tuple(names), current)

    # --- graph and degrees ----------------------------------------------------

    @cached_property
    def graph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.kinds)
        for arrow in self.arrows:
            graph.add_edge(arrow.source, arrow.target, key=arrow.name)
        return graph

    def find_cycle(self) -> list[tuple[str, str]] | None:
        try:
            cycle = nx.find_cycle(self.graph)
        except nx.NetworkXNoCycle:
            return None
        return [(edge[0], edge[1]) for edge in cycle]

    @cached_property
    def degrees(self) -> dict[str, int]:
        """Length of the longest generating-arrow path from each kind to a sink."""
        if not nx.is_directed_acyclic_graph(self.graph):
            raise DegreeCycle(f"Signature {self.name!r} has a non-identity endomorphism word")
        degree: dict[str, int] = {}
        for kind in reversed(list(nx.topological_sort(self.graph))):
            targets = [degree[t] for _, t in self.graph.out_edges(kind)]
            degree[kind] = (max(targets) + 1) if targets else 0
        return {k: degree[k] for k in self.kinds}

    def degree(self, kind: str) -> int:
        self.require_kind(kind)
        return self.degrees[kind]

    # --- words modulo relations ---------------------------------------------------

    def _word_key(self, source: str, names: tuple[str, ...]) -> tuple[int, tuple[int, ...]]:
        indices = []
        current = source
        for name in names:
            idx = self._arrow_index[(current, name)]
            indices.append(idx)
            current = self.arrows[idx].target
        return (len(names), tuple(indices))

    def _enumerate_words(self, source: str) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
        """All non-identity words out of `source` with the kinds they pass through."""
        _ = self.degrees  # ensures termination
        found: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
        stack: list[tuple[tuple[str, ...], tuple[str, ...]]] = [((), (source,))]
        while stack:
            names, path = stack.pop()
            for arrow in self._out_arrows.get(path[-1], ()):
                next_names = names + (arrow.name,)
                next_path = path + (arrow.target,)
                found.append((next_names, next_path))
                stack.append((next_names, next_path))
        return found

    @cached_property
    def _relations_by_source(self) -> dict[str, list[Relation]]:
        grouped: dict[str, list[Relation]] = {}
        for rel in self.relations:
            grouped.setdefault(rel.source, []).append(rel)
        return grouped

    @cached_property
    def _canonical_tables(self) -> dict[str, dict[tuple[str, ...], tuple[str, ...]]]:
        tables: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
        for kind in self.kinds:
            words = self._enumerate_words(kind)
            uf = _UnionFind()
            for names, _ in words:
                uf.add(names)
            for names, path in words:
                for i in range(len(names)):
                    for rel in self._relations_by_source.get(path[i], ()):
                        for side, other in ((rel.lhs, rel.rhs), (rel.rhs, rel.lhs)):
                            n = len(side)
                            if names[i : i + n] == side:
                                rewritten = names[:i] + other + names[i + n :]
                                uf.add(rewritten)
                                uf.union(names, rewritten)
            classes: dict[tuple[str, ...], list[tuple[str, ...]]] = {}
            for names, _ in words:
                classes.setdefault(uf.find(names), []).append(names)
            table: dict[tuple[str, ...], tuple[str, ...]] = {}
            for members in classes.values():
                best = min(members, key=lambda w: self._word_key(kind, w))
                for member in members:
                    table[member] = best
            tables[kind] = table
        return tables

    def canonical(self, word: ArrowWord) -> ArrowWord:
        if word.is_identity:
            return word
        table = self._canonical_tables[word.source]
        names = table.get(word.names)
        if names is None:
            # validates the word and reports the failing arrow
            self.word(word.source, word.names)
            raise UnknownArrow(f"Word {word} is not composable from {word.source}")
        return ArrowWord(word.source, names, word.target)

    def equal(self, a: ArrowWord, b: ArrowWord) -> bool:
        if a.source != b.source or a.target != b.target:
            return False
        return self.canonical(a).names == self.canonical(b).names

    @cached_property
    def _fans(self) -> dict[str, tuple[ArrowWord, ...]]:
        fans: dict[str, tuple[ArrowWord, ...]] = {}
        for kind in self.kinds:
            reps = sorted(set(self._canonical_tables[kind].values()), key=lambda w: self._word_key(kind, w))
            fans[kind] = tuple(self.word(kind, names) for names in reps)
        return fans

    def fan(self, kind: str) -> tuple[ArrowWord, ...]:
        """Canonical representatives of every non-identity morphism out of `kind`."""
        self.require_kind(kind)
        return self._fans[kind]

    def hom_words(self, source: str, target: str) -> tuple[ArrowWord, ...]:
        self.require_kind(target)
        words = tuple(w for w in self.fan(source) if w.target == target)
        if source == target:
            return (ArrowWord(source, (), source),) + words
        return words

    def dependencies(self, kind: str) -> tuple[str, ...]:
        """Generating-arrow targets of `kind`, in declared order."""
        return tuple(a.target for a in self.arrows_from(kind))


# --- validation -------------------------------------------------------------


def validate_signature(sig: FoldsSignature) -> ValidationReport:
    report = ValidationReport(subject=f"signature {sig.name}")
    kinds = set(sig.kinds)
    if len(kinds) != len(sig.kinds):
        report.add("IllTypedRelation", "duplicate kind names", *sorted(k for k in kinds if sig.kinds.count(k) > 1))
    for kind in sorted(sig.relation_kinds - kinds):
        report.add("UnknownKind", f"relation symbol {kind!r} is not a kind", kind)
    seen: set[tuple[str, str]] = set()
    for arrow in sig.arrows:
        for end in (arrow.source, arrow.target):
            if end not in kinds:
                report.add("UnknownKind", f"arrow {arrow.name!r} mentions unknown kind {end!r}", arrow)
        if (arrow.source, arrow.name) in seen:
            report.add("IllTypedRelation", f"arrow {arrow.name!r} declared twice out of {arrow.source!r}", arrow)
        seen.add((arrow.source, arrow.name))
        if arrow.target in sig.relation_kinds:
            report.add("RelationNotMaximal", f"relation symbol {arrow.target!r} is the target of {arrow.name!r}", arrow)
    if not report.ok:
        return report

    cycle = sig.find_cycle()
    if cycle is not None:
        report.add("DegreeCycle", "non-identity endomorphism word exists", *cycle)
        return report

    for rel in sig.relations:
        if not rel.lhs or not rel.rhs:
            report.add("IllTypedRelation", f"empty side in relation {rel}", rel)
            continue
        try:
            left = sig.word(rel.source, rel.lhs)
            right = sig.word(rel.source, rel.rhs)
        except (UnknownArrow, UnknownKind) as exc:
            report.add("IllTypedRelation", f"relation {rel} is not composable: {exc}", rel)
            continue
        if left.target != right.target:
            report.add("IllTypedRelation", f"relation {rel} has sides ending at {left.target} and {right.target}", rel)
    if report.ok:
        report.details["degrees"] = dict(sig.degrees)
        APP_LOGGER.debug(f"Validated signature {sig.name}: degrees {sig.degrees}")
    return report


# --- applicative transcription ------------------------------------------------------


def parse_applicative(text: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Read `a·b = c·d` (a after b) into diagrammatic name sequences."""
    if "=" not in text:
        raise IllTypedRelation(f"Relation {text!r} has no '='")
    left, right = text.split("=", 1)

    def side(chunk: str) -> tuple[str, ...]:
        names = [n.strip() for n in chunk.split(APPLICATIVE_DOT)]
        if not all(names):
            raise IllTypedRelation(f"Empty arrow name in {text!r}")
        return tuple(reversed(names))

    return side(left), side(right)


def make_signature(
    name: str,
    kinds: Iterable[str],
    relation_kinds: Iterable[str],
    arrows: Iterable[tuple[str, str, str]],
    relations: Iterable[tuple[str, str]],
) -> FoldsSignature:
    """Build a signature from `(name, src, dst)` arrows and `(src, "a . b = c . d")` relations."""
    rels: list[Relation] = []
    for source, text in relations:
        left, right = text.split("=", 1)
        rels.append(
            Relation(
                source,
                tuple(n.strip() for n in left.split(".") if n.strip()),
                tuple(n.strip() for n in right.split(".") if n.strip()),
            )
        )
    return FoldsSignature(
        name=name,
        kinds=tuple(kinds),
        arrows=tuple(Arrow(n, s, t) for n, s, t in arrows),
        relations=tuple(rels),
        relation_kinds=frozenset(relation_kinds),
    )


# --- builtin signatures -------------------------------------------------------------

_CAT_ARROWS = [
    ("s", "A", "O"), ("t", "A", "O"),
    ("i", "I'", "A"),
    ("l", "T'", "A"), ("r", "T'", "A"), ("c", "T'", "A"),
    ("l", "E'", "A"), ("r", "E'", "A"),
]
_CAT_RELATIONS = [
    ("I'", "i . s = i . t"),
    ("T'", "l . s = c . s"),
    ("T'", "c . t = r . t"),
    ("T'", "l . t = r . s"),
    ("E'", "l . s = r . s"),
    ("E'", "l . t = r . t"),
]
_CAT_VERBATIM = [
    ("I'", "s·i = t·i"),
    ("T'", "s·l = s·l"),
    ("T'", "t·c = t·r"),
    ("T'", "t·l = s·r"),
    ("E'", "s·l = s·r"),
    ("E'", "t·l = t·r"),
]

_TWOCAT_ARROWS = [
    ("s", "C_1", "C_0"), ("t", "C_1", "C_0"),
    ("s", "C_2", "C_1"), ("t", "C_2", "C_1"),
    ("l", "T", "C_1"), ("r", "T", "C_1"), ("c", "T", "C_1"),
    ("i", "I_1", "C_1"),
    ("i", "I_2'", "C_2"),
    ("l", "V'", "C_2"), ("r", "V'", "C_2"), ("c", "V'", "C_2"),
    ("l", "E'", "C_2"), ("r", "E'", "C_2"),
    ("l", "H'", "C_2"), ("r", "H'", "C_2"), ("c", "H'", "C_2"),
    ("s", "H'", "T"), ("t", "H'", "T"),
]
_TWOCAT_RELATIONS = [
    ("C_2", "s . s = t . s"),
    ("C_2", "s . t = t . t"),
    ("T", "l . s = c . s"),
    ("T", "c . t = r . t"),
    ("T", "l . t = r . s"),
    ("I_1", "i . s = i . t"),
    ("V'", "c . s = l . s"),
    ("V'", "c . t = r . t"),
    ("V'", "l . t = r . s"),
    ("I_2'", "i . s = i . t"),
    ("E'", "l . s = r . s"),
    ("E'", "l . t = r . t"),
    ("H'", "l . s = s . l"),
    ("H'", "r . s = s . r"),
    ("H'", "c . s = s . c"),
    ("H'", "l . t = t . l"),
    ("H'", "r . t = t . r"),
    ("H'", "c . t = t . c"),
]
_TWOCAT_VERBATIM = [
    ("I_1", "s·i = t·i"),
    ("T", "s·l = s·l"),
    ("T", "t·c = t·r"),
    ("T", "t·l = s·r"),
    ("C_2", "s·s = s·t"),
    ("C_2", "t·s = t·t"),
    ("V'", "s·c = s·l"),
    ("V'", "t·c = t·r"),
    ("V'", "t·l = s·r"),
    ("I_2'", "s·i = t·i"),
    ("E'", "s·l = s·r"),
    ("E'", "t·l = t·r"),
    ("H'", "s·l = l·s"),
    ("H'", "s·r = r·s"),
    ("H'", "s·c = c·s"),
    ("H'", "t·l = l·t"),
    ("H'", "t·r = r·t"),
    ("H'", "t·c = c·t"),
]

_DBLCAT_KINDS = (
    "O", "H", "V", "S", "I_H", "T_H", "I_V", "T_V",
    "I_hor'", "I_ver'", "H_comp'", "V_comp'", "E'",
)
_DBLCAT_ARROWS = [
    ("s", "H", "O"), ("t", "H", "O"),
    ("s", "V", "O"), ("t", "V", "O"),
    ("u", "S", "H"), ("d", "S", "H"),
    ("l", "S", "V"), ("r", "S", "V"),
    ("i_H", "I_H", "H"),
    ("l", "T_H", "H"), ("r", "T_H", "H"), ("c", "T_H", "H"),
    ("i_V", "I_V", "V"),
    ("u", "T_V", "V"), ("d", "T_V", "V"), ("c", "T_V", "V"),
    ("i_shor", "I_hor'", "S"), ("u", "I_hor'", "I_H"), ("d", "I_hor'", "I_H"),
    ("i_sver", "I_ver'", "S"), ("l", "I_ver'", "I_V"), ("r", "I_ver'", "I_V"),
    ("l", "H_comp'", "S"), ("r", "H_comp'", "S"), ("c", "H_comp'", "S"),
    ("u", "H_comp'", "T_H"), ("d", "H_comp'", "T_H"),
    ("u", "V_comp'", "S"), ("d", "V_comp'", "S"), ("c", "V_comp'", "S"),
    ("l", "V_comp'", "T_V"), ("r", "V_comp'", "T_V"),
    ("b", "E'", "S"), ("f", "E'", "S"),
]
_DBLCAT_RELATIONS = [
    ("I_V", "i_V . s = i_V . t"),
    ("T_V", "u . s = c . s"),
    ("T_V", "d . t = c . t"),
    ("T_V", "u . t = d . s"),
    ("I_H", "i_H . s = i_H . t"),
    ("T_H", "l . s = c . s"),
    ("T_H", "r . t = c . t"),
    ("T_H", "l . t = r . s"),
    ("S", "u . s = l . s"),
    ("S", "u . t = r . s"),
    ("S", "d . s = l . t"),
    ("S", "d . t = r . t"),
    ("I_hor'", "i_shor . u = u . i_H"),
    ("I_hor'", "i_shor . d = d . i_H"),
    ("I_hor'", "i_shor . l = i_shor . r"),
    ("I_ver'", "i_sver . l = l . i_V"),
    ("I_ver'", "i_sver . r = r . i_V"),
    ("I_ver'", "i_sver . u = i_sver . d"),
    ("E'", "b . u = f . u"),
    ("E'", "b . d = f . d"),
    ("E'", "b . l = f . l"),
    ("E'", "b . r = f . r"),
    ("V_comp'", "u . u = c . u"),
    ("V_comp'", "d . d = c . d"),
    ("V_comp'", "u . d = d . u"),
    ("V_comp'", "u . l = l . u"),
    ("V_comp'", "d . l = l . d"),
    ("V_comp'", "c . l = l . c"),
    ("V_comp'", "u . r = r . u"),
    ("V_comp'", "d . r = r . d"),
    ("V_comp'", "c . r = r . c"),
    ("H_comp'", "c . l = l . l"),
    ("H_comp'", "c . r = r . r"),
    ("H_comp'", "r . l = l . r"),
    ("H_comp'", "c . u = u . c"),
    ("H_comp'", "l . u = u . l"),
    ("H_comp'", "r . d = d . r"),
    ("H_comp'", "c . d = d . c"),
    ("H_comp'", "r . u = u . r"),
    ("H_comp'", "l . d = d . l"),
]
_DBLCAT_VERBATIM = [
    ("I_V", "s·i_V = t·i_V"),
    ("T_V", "s·u = s·c"),
    ("T_V", "t·d = t·c"),
    ("T_V", "t·u = s·c"),
    ("I_H", "s·i_H = t·i_H"),
    ("T_H", "s·l = s·c"),
    ("T_H", "t·r = t·c"),
    ("T_H", "t·l = s·r"),
    ("S", "s·u = s·l"),
    ("S", "t·u = s·r"),
    ("S", "s·d = t·l"),
    ("S", "t·d = t·r"),
    ("I_hor'", "u·u_shor = i_H·u"),
    ("I_hor'", "d·i_shor = i_H·d"),
    ("I_hor'", "l·i_shor = r·i_shor"),
    ("I_ver'", "l·i_sver = i_V·l"),
    ("I_ver'", "r·i_sver = i_V·r"),
    ("I_ver'", "r·i_sver = l·i_sver"),
    ("E'", "u·b = u·f"),
    ("E'", "d·b = d·f"),
    ("E'", "l·b = l·f"),
    ("E'", "r·b = r·f"),
    ("V_comp'", "u·u = u·c"),
    ("V_comp'", "d·d = d·c"),
    ("V_comp'", "d·u = u·d"),
    ("V_comp'", "l·u = u·l"),
    ("V_comp'", "l·d = d·l"),
    ("V_comp'", "l·c = c·l"),
    ("V_comp'", "r·u = u·r"),
    ("V_comp'", "r·d = d·r"),
    ("V_comp'", "r·c = c·r"),
    ("H_comp'", "l·c = l·l"),
    ("H_comp'", "r·c = r·r"),
    ("H_comp'", "l·t = l·r"),
    ("H_comp'", "u·c = c·u"),
    ("H_comp'", "u·l = l·u"),
    ("H_comp'", "d·r = r·d"),
    ("H_comp'", "d·c = c·d"),
    ("H_comp'", "u·r = r·u"),
    ("H_comp'", "d·l = l·d"),
]

_BUILTIN_DATA = {
    "cat": (("O", "A", "I'", "T'", "E'"), ("I'", "T'", "E'"), _CAT_ARROWS, _CAT_RELATIONS, _CAT_VERBATIM),
    "twocat": (
        ("C_0", "C_1", "C_2", "T", "I_1", "I_2'", "V'", "H'", "E'"),
        ("I_2'", "V'", "H'", "E'"),
        _TWOCAT_ARROWS,
        _TWOCAT_RELATIONS,
        _TWOCAT_VERBATIM,
    ),
    "dblcat": (
        _DBLCAT_KINDS,
        ("I_hor'", "I_ver'", "H_comp'", "V_comp'", "E'"),
        _DBLCAT_ARROWS,
        _DBLCAT_RELATIONS,
        _DBLCAT_VERBATIM,
    ),
}

_BUILTIN_CACHE: dict[str, FoldsSignature] = {}


def builtin_signature(name: str) -> FoldsSignature:
    if name not in _BUILTIN_DATA:
        raise UnknownKind(f"No builtin signature {name!r}; expected one of {', '.join(BUILTIN_SIGNATURES)}")
    if name not in _BUILTIN_CACHE:
        kinds, rel_kinds, arrows, relations, _ = _BUILTIN_DATA[name]
        sig = make_signature(name, kinds, rel_kinds, arrows, relations)
        validate_signature(sig).raise_if_failed()
        _BUILTIN_CACHE[name] = sig
    return _BUILTIN_CACHE[name]


def _verbatim_relations(name: str) -> list[tuple[str, str]]:
    """The relation lists as originally published, typos included, in applicative notation."""
    if name not in _BUILTIN_DATA:
        raise UnknownKind(f"No builtin signature {name!r}")
    return list(_BUILTIN_DATA[name][4])


def verbatim_signature(name: str) -> tuple[FoldsSignature, list[tuple[str, str, str]]]:
    """Builtin kinds and arrows with the published relation list.

    Returns the signature built from every line that resolves, plus `(kind, line, reason)` for
    the lines that do not.
    """
    base = builtin_signature(name)
    relations: list[Relation] = []
    unparseable: list[tuple[str, str, str]] = []
    for kind, text in _verbatim_relations(name):
        try:
            lhs, rhs = parse_applicative(text)
            left = base.word(kind, lhs)
            right = base.word(kind, rhs)
        except (UnknownArrow, UnknownKind, IllTypedRelation) as exc:
            unparseable.append((kind, text, str(exc)))
            continue
        if left.target != right.target:
            unparseable.append((kind, text, f"sides end at {left.target} and {right.target}"))
            continue
        relations.append(Relation(kind, lhs, rhs))
    sig = FoldsSignature(
        name=f"{name}-verbatim",
        kinds=base.kinds,
        arrows=base.arrows,
        relations=tuple(relations),
        relation_kinds=base.relation_kinds,
    )
    return sig, unparseable
