"""Presented double categories and the generator-assignment solver.

A presentation lists generators per sort with boundaries, equations between composition trees
and invertibility constraints. A map out of a presentation is an assignment of generators that
respects boundaries, equations and constraints; `hom_solver` enumerates all of them by
backtracking, one-cells first and squares last.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Collection, Iterator, Mapping, Sequence

from app.core.dblcat import Boundary, DoubleFunctor, FiniteDoubleCategory
from app.core.errors import FormatError, LawViolation, ValidationReport
from app.core.logger import APP_LOGGER

SORTS = ("obj", "hmor", "vmor", "sq")
INVERTIBILITY = ("horizontal", "vertical")

GenKey = tuple[str, str]


@dataclass(frozen=True)
class Expr:
    """A composition tree. `op` is `gen` (args: sort, name) or one of the operators below."""

    op: str
    args: tuple = ()

    def __str__(self) -> str:
        if self.op == "gen":
            return self.args[1]
        if self.op in ("idh", "idv", "e", "id", "hinv", "vinv"):
            return f"{self.op}({self.args[0]})"
        return f"{self.op}({self.args[0]},{self.args[1]})"

    def generators(self) -> Iterator[GenKey]:
        if self.op == "gen":
            yield (self.args[0], self.args[1])
            return
        for a in self.args:
            yield from a.generators()


def gen(sort: str, name: str) -> Expr:
    return Expr("gen", (sort, name))


def idh(obj: str) -> Expr:
    return Expr("idh", (gen("obj", obj),))


def idv(obj: str) -> Expr:
    return Expr("idv", (gen("obj", obj),))


def hc(x: Expr, y: Expr) -> Expr:
    return Expr("h", (x, y))


def vc(x: Expr, y: Expr) -> Expr:
    return Expr("v", (x, y))


def esq(f: Expr) -> Expr:
    return Expr("e", (f,))


def idsq(u: Expr) -> Expr:
    return Expr("id", (u,))


def hinv(s: Expr) -> Expr:
    return Expr("hinv", (s,))


def vinv(s: Expr) -> Expr:
    return Expr("vinv", (s,))


_UNARY = {"idh": "obj", "idv": "obj", "e": "hmor", "id": "vmor", "hinv": "sq", "vinv": "sq"}
_BINARY = ("h", "v")
_TOKEN = re.compile(r"\s*([(),]|[^\s(),]+)")


def parse_expr(text: str, sorts: Mapping[str, str]) -> Expr:
    """Parse `h(a,v(b,c))`-style trees; `sorts` maps generator names to their sort."""
    tokens = [m.group(1) for m in _TOKEN.finditer(text)]
    pos = 0

    def expect(tok: str) -> None:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            found = tokens[pos] if pos < len(tokens) else "end of input"
            raise FormatError(f"expected {tok!r} in {text!r}, found {found!r}")
        pos += 1

    def parse() -> Expr:
        nonlocal pos
        if pos >= len(tokens):
            raise FormatError(f"unexpected end of expression {text!r}")
        head = tokens[pos]
        pos += 1
        if pos < len(tokens) and tokens[pos] == "(" and (head in _UNARY or head in _BINARY):
            expect("(")
            first = parse()
            if head in _BINARY:
                expect(",")
                second = parse()
                expect(")")
                return Expr(head, (first, second))
            expect(")")
            return Expr(head, (first,))
        if head in "(),":
            raise FormatError(f"unexpected {head!r} in {text!r}")
        if head not in sorts:
            raise FormatError(f"unknown generator {head!r} in {text!r}")
        return gen(sorts[head], head)

    expr = parse()
    if pos != len(tokens):
        raise FormatError(f"trailing input in expression {text!r}")
    _check_operand_sorts(expr)
    return expr


def expr_sort(expr: Expr) -> str:
    if expr.op == "gen":
        return expr.args[0]
    if expr.op == "idh":
        return "hmor"
    if expr.op == "idv":
        return "vmor"
    if expr.op in ("h", "v"):
        return expr_sort(expr.args[0])
    return "sq"


def _check_operand_sorts(expr: Expr) -> None:
    if expr.op == "gen":
        return
    for a in expr.args:
        _check_operand_sorts(a)
    if expr.op in _UNARY and expr_sort(expr.args[0]) != _UNARY[expr.op]:
        raise FormatError(f"{expr.op} applied to a {expr_sort(expr.args[0])}: {expr}")
    if expr.op == "h":
        sorts = {expr_sort(a) for a in expr.args}
        if len(sorts) != 1 or sorts & {"obj", "vmor"}:
            raise FormatError(f"h needs two horizontal morphisms or two squares: {expr}")
    if expr.op == "v":
        sorts = {expr_sort(a) for a in expr.args}
        if len(sorts) != 1 or sorts & {"obj", "hmor"}:
            raise FormatError(f"v needs two vertical morphisms or two squares: {expr}")


@dataclass(frozen=True)
class ShapePresentation:
    name: str
    objects: tuple[str, ...]
    hgens: Mapping[str, tuple[str, str]]
    vgens: Mapping[str, tuple[str, str]]
    sqgens: Mapping[str, tuple[Expr, Expr, Expr, Expr]]
    relations: tuple[tuple[Expr, Expr], ...] = ()
    invertible: Mapping[str, frozenset[str]] = field(default_factory=dict)

    @cached_property
    def generator_keys(self) -> tuple[GenKey, ...]:
        return (
            tuple(("obj", a) for a in self.objects)
            + tuple(("hmor", f) for f in self.hgens)
            + tuple(("vmor", u) for u in self.vgens)
            + tuple(("sq", s) for s in self.sqgens)
        )

    @cached_property
    def sorts(self) -> dict[str, str]:
        """Generator name to sort, for names that are unambiguous."""
        out: dict[str, str] = {}
        seen: dict[str, int] = {}
        for sort, name in self.generator_keys:
            seen[name] = seen.get(name, 0) + 1
            out[name] = sort
        return {k: v for k, v in out.items() if seen[k] == 1}

    def parse(self, text: str) -> Expr:
        return parse_expr(text, self.sorts)

    def ends(self, expr: Expr) -> tuple[str, ...]:
        """Endpoint objects: `(src, tgt)` for morphisms, corners `(tl, tr, bl, br)` for squares."""
        op = expr.op
        if op == "gen":
            sort, name = expr.args
            if sort == "obj":
                return (name,)
            if sort == "hmor":
                return self.hgens[name]
            if sort == "vmor":
                return self.vgens[name]
            top, bottom, _, _ = self.sqgens[name]
            return self.ends(top) + self.ends(bottom)
        if op in ("idh", "idv"):
            a = expr.args[0].args[1]
            return (a, a)
        if op in ("e", "id"):
            a, b = self.ends(expr.args[0])
            return (a, b, a, b) if op == "e" else (a, a, b, b)
        if op == "hinv":
            tl, tr, bl, br = self.ends(expr.args[0])
            return (tl, tr, bl, br)
        if op == "vinv":
            return self.ends(expr.args[0])
        x, y = (self.ends(a) for a in expr.args)
        if expr_sort(expr) != "sq":
            if x[1] != y[0]:
                raise LawViolation(f"{self.name}: {expr} composes non-adjacent morphisms")
            return (x[0], y[1])
        if op == "h":
            if (x[1], x[3]) != (y[0], y[2]):
                raise LawViolation(f"{self.name}: {expr} composes squares that do not share a side")
            return (x[0], y[1], x[2], y[3])
        if (x[2], x[3]) != (y[0], y[1]):
            raise LawViolation(f"{self.name}: {expr} composes squares that do not share a side")
        return (x[0], x[1], y[2], y[3])


def validate_presentation(S: ShapePresentation) -> ValidationReport:
    report = ValidationReport(subject=f"presentation {S.name}")
    objs = set(S.objects)
    for table, label in ((S.hgens, "hmor"), (S.vgens, "vmor")):
        for g, (a, b) in table.items():
            if a not in objs or b not in objs:
                report.add("LawViolation", f"{label} generator {g} has unknown endpoint", g)
    if not report.ok:
        return report
    for s, (top, bottom, left, right) in S.sqgens.items():
        try:
            if [expr_sort(top), expr_sort(bottom), expr_sort(left), expr_sort(right)] != ["hmor", "hmor", "vmor", "vmor"]:
                report.add("IllTypedRelation", f"square generator {s} has a boundary of the wrong sort", s)
                continue
            t, b, l, r = S.ends(top), S.ends(bottom), S.ends(left), S.ends(right)
        except (LawViolation, KeyError) as exc:
            report.add("IllTypedRelation", f"square generator {s}: {exc}", s)
            continue
        if l != (t[0], b[0]) or r != (t[1], b[1]):
            report.add("IllTypedRelation", f"square generator {s} has inconsistent corners", s)
    for lhs, rhs in S.relations:
        try:
            if expr_sort(lhs) != expr_sort(rhs) or S.ends(lhs) != S.ends(rhs):
                report.add("IllTypedRelation", f"relation {lhs} = {rhs} is not well-typed", str(lhs), str(rhs))
        except (LawViolation, KeyError) as exc:
            report.add("IllTypedRelation", f"relation {lhs} = {rhs}: {exc}", str(lhs), str(rhs))
    for s, modes in S.invertible.items():
        if s not in S.sqgens or not set(modes) <= set(INVERTIBILITY):
            report.add("IllTypedRelation", f"bad invertibility constraint on {s}", s)
    return report


# --- evaluation --------------------------------------------------------------------------


def evaluate(expr: Expr, X: FiniteDoubleCategory, assignment: Mapping[GenKey, str]) -> str | None:
    """The cell of X denoted by `expr`, or None when a composite or inverse does not exist."""
    op = expr.op
    if op == "gen":
        return assignment.get(expr.args)
    args = [evaluate(a, X, assignment) for a in expr.args]
    if any(a is None for a in args):
        return None
    if op == "idh":
        return X.idh.get(args[0])
    if op == "idv":
        return X.idv.get(args[0])
    if op == "e":
        return X.esq.get(args[0])
    if op == "id":
        return X.idsq.get(args[0])
    if op == "hinv":
        return X.horizontal_inverse(args[0])
    if op == "vinv":
        return X.vertical_inverse(args[0])
    sort = expr_sort(expr)
    if op == "h":
        return (X.hcomp_sq if sort == "sq" else X.hcomp_h).get((args[0], args[1]))
    return (X.vcomp_sq if sort == "sq" else X.vcomp_v).get((args[0], args[1]))


@dataclass(frozen=True)
class ShapeMap:
    """A map out of a presentation, recorded on generators."""

    shape: ShapePresentation
    target: FiniteDoubleCategory
    assignment: Mapping[GenKey, str]

    def key(self) -> tuple[str, ...]:
        return tuple(self.assignment[g] for g in self.shape.generator_keys)

    def __getitem__(self, item: GenKey) -> str:
        return self.assignment[item]

    def at(self, expr: Expr) -> str | None:
        return evaluate(expr, self.target, self.assignment)

    def describe(self) -> dict[str, str]:
        return {f"{sort}:{name}": self.assignment[(sort, name)] for sort, name in self.shape.generator_keys}


@dataclass(frozen=True)
class ShapeInclusion:
    """A map of presentations, sending each domain generator to a codomain expression."""

    domain: ShapePresentation
    codomain: ShapePresentation
    mapping: Mapping[GenKey, Expr]
    name: str = ""

    def image(self, key: GenKey) -> Expr:
        return self.mapping[key]


def validate_inclusion(i: ShapeInclusion) -> ValidationReport:
    P, Q = i.domain, i.codomain
    report = ValidationReport(subject=f"shape map {i.name or '<anon>'}")
    for key in P.generator_keys:
        if key not in i.mapping:
            report.add("ActionNotTotal", f"no image for {key[0]} generator {key[1]}", key[1])
            continue
        expr = i.mapping[key]
        if expr_sort(expr) != key[0]:
            report.add("IllTypedRelation", f"{key[1]} is sent to {expr} of sort {expr_sort(expr)}", key[1])
    if not report.ok:
        return report

    def image_ends(expr: Expr) -> tuple[str, ...]:
        return tuple(Q.ends(i.mapping[("obj", a)])[0] for a in P.ends(expr))

    for key in P.generator_keys:
        if key[0] == "obj":
            continue
        try:
            if Q.ends(i.mapping[key]) != image_ends(Expr("gen", key)):
                report.add("IllTypedRelation", f"image of {key[1]} has the wrong endpoints", key[1])
        except (LawViolation, KeyError) as exc:
            report.add("IllTypedRelation", f"image of {key[1]}: {exc}", key[1])
    return report


def precompose(x: ShapeMap, i: ShapeInclusion) -> ShapeMap | None:
    """x after i, or None when some image expression is not defined in the target."""
    out: dict[GenKey, str] = {}
    for key in i.domain.generator_keys:
        value = x.at(i.mapping[key])
        if value is None:
            return None
        out[key] = value
    return ShapeMap(i.domain, x.target, out)


def postcompose(F: DoubleFunctor, x: ShapeMap) -> ShapeMap:
    tables = {"obj": F.obj, "hmor": F.hmor, "vmor": F.vmor, "sq": F.sq}
    return ShapeMap(x.shape, F.target, {k: tables[k[0]][v] for k, v in x.assignment.items()})


def check_shape_map(x: ShapeMap) -> bool:
    """Whether an arbitrary generator assignment is a valid map out of the presentation."""
    S, X = x.shape, x.target
    try:
        for a in S.objects:
            if x.assignment[("obj", a)] not in X.objects:
                return False
        for f, (a, b) in S.hgens.items():
            if X.hmors.get(x.assignment[("hmor", f)]) != (x.assignment[("obj", a)], x.assignment[("obj", b)]):
                return False
        for u, (a, b) in S.vgens.items():
            if X.vmors.get(x.assignment[("vmor", u)]) != (x.assignment[("obj", a)], x.assignment[("obj", b)]):
                return False
        for s, bd in S.sqgens.items():
            want = tuple(x.at(e) for e in bd)
            if X.squares.get(x.assignment[("sq", s)]) != want:
                return False
    except KeyError:
        return False
    for s, modes in S.invertible.items():
        value = x.assignment[("sq", s)]
        if "horizontal" in modes and not X.is_horizontally_invertible(value):
            return False
        if "vertical" in modes and not X.is_vertically_invertible(value):
            return False
    for lhs, rhs in S.relations:
        left, right = x.at(lhs), x.at(rhs)
        if left is None or left != right:
            return False
    return True


# --- solver ------------------------------------------------------------------------------


class _Plan:
    """Step order and the checks that become decidable after each step."""

    def __init__(self, S: ShapePresentation):
        self.steps: list[GenKey] = [("hmor", f) for f in S.hgens] + [("vmor", u) for u in S.vgens]
        touched = {a for ends in list(S.hgens.values()) + list(S.vgens.values()) for a in ends}
        self.steps += [("obj", a) for a in S.objects if a not in touched]
        self.steps += [("sq", s) for s in S.sqgens]
        ready: dict[GenKey, int] = {}
        for i, key in enumerate(self.steps):
            ready[key] = i
            if key[0] == "hmor":
                ends = S.hgens[key[1]]
            elif key[0] == "vmor":
                ends = S.vgens[key[1]]
            else:
                continue
            for a in ends:
                ready.setdefault(("obj", a), i)
        self.ready = ready
        self.relations_at: list[list[tuple[Expr, Expr]]] = [[] for _ in self.steps]
        for lhs, rhs in S.relations:
            keys = list(lhs.generators()) + list(rhs.generators())
            level = max((ready[k] for k in keys), default=0)
            if self.steps:
                self.relations_at[level].append((lhs, rhs))


def hom_solver(
    S: ShapePresentation,
    X: FiniteDoubleCategory,
    allowed: Mapping[GenKey, Collection[str]] | None = None,
    accept: Callable[[dict[GenKey, str]], bool] | None = None,
    limit: int | None = None,
) -> list[ShapeMap]:
    """All maps S -> X, in deterministic order.

    `allowed` restricts the value of individual generators; `accept` filters complete
    assignments; `limit` stops after that many solutions.
    """
    return list(iter_homs(S, X, allowed=allowed, accept=accept, limit=limit))


def iter_homs(
    S: ShapePresentation,
    X: FiniteDoubleCategory,
    allowed: Mapping[GenKey, Collection[str]] | None = None,
    accept: Callable[[dict[GenKey, str]], bool] | None = None,
    limit: int | None = None,
) -> Iterator[ShapeMap]:
    plan = _Plan(S)
    allowed = allowed or {}
    for key, values in allowed.items():
        if key[0] == "obj" and not values:
            return
    if not plan.steps:
        if not S.relations and (accept is None or accept({})):
            yield ShapeMap(S, X, {})
        return
    assign: dict[GenKey, str] = {}
    count = 0

    def bind_object(a: str, value: str, undo: list[GenKey]) -> bool:
        key = ("obj", a)
        current = assign.get(key)
        if current is not None:
            return current == value
        if key in allowed and value not in allowed[key]:
            return False
        assign[key] = value
        undo.append(key)
        return True

    def candidates(key: GenKey) -> Iterator[str]:
        sort, name = key
        pool: Sequence[str]
        if sort == "hmor" or sort == "vmor":
            a, b = (S.hgens if sort == "hmor" else S.vgens)[name]
            table = X.hmors if sort == "hmor" else X.vmors
            oa, ob = assign.get(("obj", a)), assign.get(("obj", b))
            if oa is not None and ob is not None:
                pool = X.hhom(oa, ob) if sort == "hmor" else X.vhom(oa, ob)
            else:
                pool = [g for g, (p, q) in table.items() if (oa is None or p == oa) and (ob is None or q == ob)]
        elif sort == "obj":
            pool = X.objects
        else:
            bd = [evaluate(e, X, assign) for e in S.sqgens[name]]
            if any(v is None for v in bd):
                return
            pool = X.squares_with(*bd)
            modes = S.invertible.get(name, frozenset())
            if "horizontal" in modes:
                pool = [s for s in pool if X.is_horizontally_invertible(s)]
            if "vertical" in modes:
                pool = [s for s in pool if X.is_vertically_invertible(s)]
        restrict = allowed.get(key)
        for value in pool:
            if restrict is None or value in restrict:
                yield value

    def relations_hold(level: int) -> bool:
        for lhs, rhs in plan.relations_at[level]:
            left = evaluate(lhs, X, assign)
            if left is None or left != evaluate(rhs, X, assign):
                return False
        return True

    def search(level: int) -> Iterator[ShapeMap]:
        nonlocal count
        if level == len(plan.steps):
            if accept is None or accept(assign):
                count += 1
                yield ShapeMap(S, X, dict(assign))
            return
        key = plan.steps[level]
        for value in candidates(key):
            undo: list[GenKey] = []
            ok = True
            if key[0] in ("hmor", "vmor"):
                table = X.hmors if key[0] == "hmor" else X.vmors
                a, b = (S.hgens if key[0] == "hmor" else S.vgens)[key[1]]
                p, q = table[value]
                ok = bind_object(a, p, undo) and bind_object(b, q, undo)
            elif key[0] == "obj" and key in allowed and value not in allowed[key]:
                ok = False
            if ok:
                assign[key] = value
                undo.append(key)
                if relations_hold(level):
                    yield from search(level + 1)
                    if limit is not None and count >= limit:
                        for k in undo:
                            assign.pop(k, None)
                        return
            for k in undo:
                assign.pop(k, None)

    yield from search(0)


def count_homs(S: ShapePresentation, X: FiniteDoubleCategory) -> int:
    return sum(1 for _ in iter_homs(S, X))


def has_hom(S: ShapePresentation, X: FiniteDoubleCategory, **kwargs) -> bool:
    return any(True for _ in iter_homs(S, X, limit=1, **kwargs))


# --- canonical presentations --------------------------------------------------------------


def presentation_of(A: FiniteDoubleCategory) -> ShapePresentation:
    """Every cell of A a generator, every table entry and identity designation an equation."""
    sqgens = {
        s: (gen("hmor", b.top), gen("hmor", b.bottom), gen("vmor", b.left), gen("vmor", b.right))
        for s, b in A.squares.items()
    }
    rels: list[tuple[Expr, Expr]] = []
    for a in A.objects:
        rels.append((idh(a), gen("hmor", A.idh[a])))
        rels.append((idv(a), gen("vmor", A.idv[a])))
    for f, s in A.esq.items():
        rels.append((esq(gen("hmor", f)), gen("sq", s)))
    for u, s in A.idsq.items():
        rels.append((idsq(gen("vmor", u)), gen("sq", s)))
    for (f, g), h in A.hcomp_h.items():
        rels.append((hc(gen("hmor", f), gen("hmor", g)), gen("hmor", h)))
    for (u, w), x in A.vcomp_v.items():
        rels.append((vc(gen("vmor", u), gen("vmor", w)), gen("vmor", x)))
    for (s, t), r in A.hcomp_sq.items():
        rels.append((hc(gen("sq", s), gen("sq", t)), gen("sq", r)))
    for (s, t), r in A.vcomp_sq.items():
        rels.append((vc(gen("sq", s), gen("sq", t)), gen("sq", r)))
    return ShapePresentation(
        name=A.name,
        objects=A.objects,
        hgens=dict(A.hmors),
        vgens=dict(A.vmors),
        sqgens=sqgens,
        relations=tuple(rels),
    )


def as_double_functor(x: ShapeMap, source: FiniteDoubleCategory, name: str = "") -> DoubleFunctor:
    """Read a map out of the canonical presentation of `source` as a double functor."""
    pick = lambda sort: {n: v for (s, n), v in x.assignment.items() if s == sort}  # noqa: E731
    return DoubleFunctor(source, x.target, pick("obj"), pick("hmor"), pick("vmor"), pick("sq"), name=name)


def double_functors(A: FiniteDoubleCategory, X: FiniteDoubleCategory) -> list[DoubleFunctor]:
    """Every strict double functor A -> X."""
    S = presentation_of(A)
    found = [as_double_functor(x, A, name=f"{A.name}->{X.name}#{n}") for n, x in enumerate(iter_homs(S, X))]
    APP_LOGGER.debug(f"double_functors({A.name}, {X.name}): {len(found)} found")
    return found


def functor_as_map(F: DoubleFunctor) -> ShapeMap:
    S = presentation_of(F.source)
    tables = {"obj": F.obj, "hmor": F.hmor, "vmor": F.vmor, "sq": F.sq}
    return ShapeMap(S, F.target, {k: tables[k[0]][k[1]] for k in S.generator_keys})


def inclusion_from_functor(F: DoubleFunctor) -> ShapeInclusion:
    """A double functor between finite double categories as a map of canonical presentations."""
    P, Q = presentation_of(F.source), presentation_of(F.target)
    tables = {"obj": F.obj, "hmor": F.hmor, "vmor": F.vmor, "sq": F.sq}
    return ShapeInclusion(P, Q, {k: gen(k[0], tables[k[0]][k[1]]) for k in P.generator_keys}, name=F.name)


# --- text format ------------------------------------------------------------------------------

_HMOR = re.compile(r"^(\S+)\s*:\s*(\S+)\s*->\s*(\S+)$")
_VMOR = re.compile(r"^(\S+)\s*:\s*(\S+)\s*=>\s*(\S+)$")
_SQ = re.compile(r"^(\S+)\s*\[(.*)\]$")
_FIELD = re.compile(r"(top|bottom|left|right)\s*=\s*(\S+)")


def parse_presentation(text: str, path: str | None = None) -> ShapePresentation:
    """Read the presentation format: double-category generator lines plus
    `invertible: s horizontal|vertical` and `relation: tree = tree` lines."""
    name = "shape"
    objects: list[str] = []
    hgens: dict[str, tuple[str, str]] = {}
    vgens: dict[str, tuple[str, str]] = {}
    raw_squares: list[tuple[int, str, dict[str, str]]] = []
    raw_relations: list[tuple[int, str]] = []
    invertible: dict[str, set[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        head, rest = head.strip(), rest.strip()
        if head == "name":
            name = rest
        elif head == "objects":
            objects.extend(rest.split())
        elif head == "hmor":
            m = _HMOR.match(rest)
            if not m:
                raise FormatError(f"bad hmor line {line!r}", path=path, line=lineno)
            hgens[m.group(1)] = (m.group(2), m.group(3))
        elif head == "vmor":
            m = _VMOR.match(rest)
            if not m:
                raise FormatError(f"bad vmor line {line!r}", path=path, line=lineno)
            vgens[m.group(1)] = (m.group(2), m.group(3))
        elif head == "sq":
            m = _SQ.match(rest)
            if not m:
                raise FormatError(f"bad sq line {line!r}", path=path, line=lineno)
            fields = dict(_FIELD.findall(m.group(2)))
            if set(fields) != {"top", "bottom", "left", "right"}:
                raise FormatError(f"square {m.group(1)} needs top, bottom, left and right", path=path, line=lineno)
            raw_squares.append((lineno, m.group(1), fields))
        elif head == "invertible":
            parts = rest.split()
            if len(parts) < 2 or not set(parts[1:]) <= set(INVERTIBILITY):
                raise FormatError(f"bad invertible line {line!r}", path=path, line=lineno)
            invertible.setdefault(parts[0], set()).update(parts[1:])
        elif head == "relation":
            raw_relations.append((lineno, rest))
        else:
            raise FormatError(f"unknown directive {head!r}", path=path, line=lineno)

    sorts: dict[str, str] = {a: "obj" for a in objects}
    for table, sort in ((hgens, "hmor"), (vgens, "vmor")):
        for g in table:
            if g in sorts:
                raise FormatError(f"generator name {g!r} used twice", path=path)
            sorts[g] = sort
    for lineno, s, _ in raw_squares:
        if s in sorts:
            raise FormatError(f"generator name {s!r} used twice", path=path, line=lineno)
        sorts[s] = "sq"

    def expr(text_: str, lineno: int) -> Expr:
        try:
            return parse_expr(text_, sorts)
        except FormatError as exc:
            raise FormatError(str(exc), path=path, line=lineno) from None

    sqgens = {
        s: (expr(f["top"], ln), expr(f["bottom"], ln), expr(f["left"], ln), expr(f["right"], ln))
        for ln, s, f in raw_squares
    }
    relations = []
    for lineno, body in raw_relations:
        if "=" not in body:
            raise FormatError(f"relation without '=': {body!r}", path=path, line=lineno)
        lhs, rhs = body.split("=", 1)
        relations.append((expr(lhs.strip(), lineno), expr(rhs.strip(), lineno)))
    S = ShapePresentation(
        name=name,
        objects=tuple(objects),
        hgens=hgens,
        vgens=vgens,
        sqgens=sqgens,
        relations=tuple(relations),
        invertible={k: frozenset(v) for k, v in invertible.items()},
    )
    report = validate_presentation(S)
    if not report.ok:
        raise FormatError(report.first.message, path=path)
    return S


def format_presentation(S: ShapePresentation) -> str:
    lines = [f"name: {S.name}", f"objects: {' '.join(S.objects)}"]
    lines += [f"hmor: {f}: {a} -> {b}" for f, (a, b) in S.hgens.items()]
    lines += [f"vmor: {u}: {a} => {b}" for u, (a, b) in S.vgens.items()]
    for s, (t, b, l, r) in S.sqgens.items():
        lines.append(f"sq: {s} [top={t} bottom={b} left={l} right={r}]")
    for s, modes in S.invertible.items():
        lines.append(f"invertible: {s} {' '.join(sorted(modes))}")
    lines += [f"relation: {lhs} = {rhs}" for lhs, rhs in S.relations]
    return "\n".join(lines) + "\n"


def parse_inclusion_body(
    text: str,
    domain: ShapePresentation,
    codomain: ShapePresentation,
    path: str | None = None,
    name: str = "",
) -> ShapeInclusion:
    """`map: gen |-> expr` lines; other directives are ignored."""
    mapping: dict[GenKey, Expr] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line.startswith("map:"):
            continue
        body = line[len("map:"):]
        if "|->" not in body:
            raise FormatError(f"map line without '|->': {line!r}", path=path, line=lineno)
        src, dst = (p.strip() for p in body.split("|->", 1))
        sort = domain.sorts.get(src)
        if sort is None:
            raise FormatError(f"unknown domain generator {src!r}", path=path, line=lineno)
        try:
            mapping[(sort, src)] = codomain.parse(dst)
        except FormatError as exc:
            raise FormatError(str(exc), path=path, line=lineno) from None
    i = ShapeInclusion(domain, codomain, mapping, name=name)
    report = validate_inclusion(i)
    if not report.ok:
        raise FormatError(report.first.message, path=path)
    return i


def boundary_of(S: ShapePresentation, s: str) -> Boundary:
    return Boundary(*(str(e) for e in S.sqgens[s]))
