"""FOLDS formulae: syntax, well-formedness, satisfaction, random sentences and invariance checks."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Union

from app.core.errors import (
    ArityMismatch,
    ContextMismatch,
    DependencyViolation,
    FormulaSyntaxError,
    IncompatibleFamily,
    InterpretationMismatch,
    ShadowingError,
    UndeclaredVariable,
)
from app.core.logger import APP_LOGGER
from app.core.presheaf import (
    NatTransf,
    Presheaf,
    Span,
    compatible_families,
    is_compatible_family,
    is_fiberwise_surjective,
)
from app.core.signature import FoldsSignature

DEFAULT_WEIGHTS = (0.4, 0.4, 0.2)  # connective, quantifier, atom


# --- syntax tree ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Sort:
    """A kind with one variable per generating arrow out of it, in declared order."""

    kind: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Atom:
    kind: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: Sort
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    body: "Formula"


Formula = Union[Top, Bottom, Atom, And, Or, Implies, Forall, Exists]
_BINARY = {And: "/\\", Or: "\\/", Implies: "->"}


@dataclass(frozen=True)
class Context:
    """Declared variables in dependency order."""

    variables: tuple[tuple[str, Sort], ...] = ()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.variables)

    def sorts(self) -> dict[str, Sort]:
        return dict(self.variables)

    def __contains__(self, name: object) -> bool:
        return any(v == name for v, _ in self.variables)

    def __len__(self) -> int:
        return len(self.variables)

    def extend(self, name: str, sort: Sort) -> "Context":
        return Context(self.variables + ((name, sort),))

    def presheaf(self, sig: FoldsSignature) -> Presheaf:
        """The context as a presheaf: variables are elements, sort arguments give the action."""
        carrier: dict[str, list[str]] = {}
        action: dict[tuple[str, str], str] = {}
        for name, sort in self.variables:
            carrier.setdefault(sort.kind, []).append(name)
            for arrow, arg in zip(sig.arrows_from(sort.kind), sort.args):
                action[(arrow.name, name)] = arg
        return Presheaf.build(sig, carrier, action, name="context")


@dataclass(frozen=True)
class Sequent:
    context: Context
    formula: Formula

    def __str__(self) -> str:
        return format_sequent(self)


def depends_on(sorts: Mapping[str, Sort], y: str, x: str) -> bool:
    """Whether x occurs in the transitive dependencies of y."""
    stack = list(sorts[y].args) if y in sorts else []
    seen: set[str] = set()
    while stack:
        v = stack.pop()
        if v == x:
            return True
        if v in seen:
            continue
        seen.add(v)
        if v in sorts:
            stack.extend(sorts[v].args)
    return False


def depth(phi: Formula) -> int:
    if isinstance(phi, (Top, Bottom, Atom)):
        return 0
    if isinstance(phi, (Forall, Exists)):
        return 1 + depth(phi.body)
    return 1 + max(depth(phi.left), depth(phi.right))


# --- printing ---------------------------------------------------------------------------------


def _format_sort(sort: Sort) -> str:
    return f"{sort.kind}({','.join(sort.args)})" if sort.args else sort.kind


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Atom):
        return f"{phi.kind}({','.join(phi.args)})"
    if isinstance(phi, (Forall, Exists)):
        q = "forall" if isinstance(phi, Forall) else "exists"
        return f"{q} {phi.var}:{_format_sort(phi.sort)}. {format_formula(phi.body)}"

    def operand(psi: Formula) -> str:
        text = format_formula(psi)
        return f"({text})" if isinstance(psi, (Forall, Exists)) else text

    return f"({operand(phi.left)} {_BINARY[type(phi)]} {operand(phi.right)})"


def format_sequent(seq: Sequent) -> str:
    decls = ", ".join(f"{v}:{_format_sort(s)}" for v, s in seq.context.variables)
    body = format_formula(seq.formula)
    return f"{decls} |- {body}" if decls else body


# --- parsing ----------------------------------------------------------------------------------

_ALIASES = {"∀": "forall", "∃": "exists", "∧": "/\\", "∨": "\\/", "→": "->", "⊤": "true", "⊥": "false", "⊢": "|-"}
_TOKEN = re.compile(r"\s*(/\\|\\/|->|\|-|[(),.:]|[∀∃∧∨→⊤⊥⊢]|[A-Za-z0-9_']+)")
_KEYWORDS = {"forall", "exists", "true", "false"}


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos:].strip()[:1]!r} at offset {pos} in {text!r}")
        tok = m.group(1)
        tokens.append(_ALIASES.get(tok, tok))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, sig: FoldsSignature):
        self.text = text
        self.sig = sig
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError(f"unexpected end of formula {self.text!r}")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise FormulaSyntaxError(f"expected {tok!r}, found {got!r} in {self.text!r}")

    def ident(self) -> str:
        tok = self.take()
        if not re.fullmatch(r"[A-Za-z0-9_']+", tok) or tok in _KEYWORDS:
            raise FormulaSyntaxError(f"expected a name, found {tok!r} in {self.text!r}")
        return tok

    def args(self) -> tuple[str, ...]:
        if self.peek() != "(":
            return ()
        self.expect("(")
        out = [self.ident()]
        while self.peek() == ",":
            self.take()
            out.append(self.ident())
        self.expect(")")
        return tuple(out)

    def sort(self) -> Sort:
        kind = self.ident()
        return Sort(kind, self.args())

    def context(self) -> Context | None:
        if "|-" not in self.tokens:
            return None
        decls: list[tuple[str, Sort]] = []
        while self.peek() != "|-":
            name = self.ident()
            self.expect(":")
            decls.append((name, self.sort()))
            if self.peek() == ",":
                self.take()
        self.expect("|-")
        return Context(tuple(decls))

    def formula(self) -> Formula:
        if self.peek() in ("forall", "exists"):
            return self.quantified()
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def quantified(self) -> Formula:
        q = self.take()
        var = self.ident()
        self.expect(":")
        sort = self.sort()
        self.expect(".")
        body = self.formula()
        return Forall(var, sort, body) if q == "forall" else Exists(var, sort, body)

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek() == "\\/":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek() == "/\\":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok in ("forall", "exists"):
            return self.quantified()
        if tok == "true":
            self.take()
            return Top()
        if tok == "false":
            self.take()
            return Bottom()
        kind = self.ident()
        args = self.args()
        if not args:
            raise FormulaSyntaxError(f"atom {kind} without arguments in {self.text!r}")
        return Atom(kind, args)


def parse_formula(text: str, sig: FoldsSignature) -> Sequent:
    """Parse `[decls |-] formula`; without a declaration prefix, free variables of kinds with no
    dependencies are inferred from their first use."""
    parser = _Parser(text, sig)
    context = parser.context()
    phi = parser.formula()
    if parser.peek() is not None:
        raise FormulaSyntaxError(f"trailing input {parser.peek()!r} in {text!r}")
    if context is None:
        context = Context()
        inferred = _Checker(sig, infer=True)
        inferred.check(context, phi)
        context = inferred.context
    else:
        check_context(sig, context)
    check_formula(sig, context, phi)
    return Sequent(context, phi)


# --- well-formedness --------------------------------------------------------------------------


class _Checker:
    def __init__(self, sig: FoldsSignature, infer: bool = False):
        self.sig = sig
        self.infer = infer
        self.context = Context()

    def family(self, scope: Context, kind: str, args: tuple[str, ...], what: str) -> None:
        sig = self.sig
        sig.require_kind(kind)
        arrows = sig.arrows_from(kind)
        if len(args) != len(arrows):
            raise ArityMismatch(f"{what} {kind} takes {len(arrows)} argument(s), got {len(args)}")
        sorts = scope.sorts()
        for arrow, arg in zip(arrows, args):
            if arg not in sorts:
                if self.infer and not sig.arrows_from(arrow.target):
                    scope = self._declare(scope, arg, Sort(arrow.target))
                    sorts = scope.sorts()
                else:
                    raise UndeclaredVariable(f"{arg!r} is not declared before its use in {what} {kind}")
            if sorts[arg].kind != arrow.target:
                raise IncompatibleFamily(
                    f"argument {arg} of {kind} at {arrow.name} has kind {sorts[arg].kind}, expected {arrow.target}"
                )
        if not is_compatible_family(scope.presheaf(sig), kind, args):
            raise IncompatibleFamily(f"arguments ({', '.join(args)}) are not a compatible family for {kind}")

    def _declare(self, scope: Context, name: str, sort: Sort) -> Context:
        self.context = self.context.extend(name, sort)
        return Context(((name, sort),) + scope.variables)

    def check(self, scope: Context, phi: Formula) -> None:
        # the inferred context is rebuilt as the walk declares free variables
        self._walk(scope, phi)

    def _scope(self, scope: Context) -> Context:
        declared = [v for v in self.context.variables if v[0] not in scope]
        return Context(tuple(declared) + scope.variables)

    def _walk(self, scope: Context, phi: Formula) -> None:
        scope = self._scope(scope)
        if isinstance(phi, (Top, Bottom)):
            return
        if isinstance(phi, Atom):
            if not self.sig.is_relation_kind(phi.kind):
                raise FormulaSyntaxError(f"{phi.kind} is not a relation symbol")
            self.family(scope, phi.kind, phi.args, "atom")
            return
        if isinstance(phi, (Forall, Exists)):
            if self.sig.is_relation_kind(phi.sort.kind):
                raise FormulaSyntaxError(f"cannot quantify over relation symbol {phi.sort.kind}")
            self.family(scope, phi.sort.kind, phi.sort.args, "sort")
            scope = self._scope(scope)
            if phi.var in scope:
                sorts = scope.sorts()
                dependents = [y for y in sorts if depends_on(sorts, y, phi.var)]
                if dependents:
                    raise DependencyViolation(
                        f"cannot quantify over {phi.var}: {', '.join(dependents)} depend(s) on it"
                    )
                raise ShadowingError(f"variable {phi.var} is already declared")
            self._walk(scope.extend(phi.var, phi.sort), phi.body)
            return
        self._walk(scope, phi.left)
        self._walk(scope, phi.right)


def check_context(sig: FoldsSignature, context: Context) -> None:
    checker = _Checker(sig)
    scope = Context()
    for name, sort in context.variables:
        if name in scope:
            raise ShadowingError(f"variable {name} is declared twice")
        if sig.is_relation_kind(sort.kind):
            raise FormulaSyntaxError(f"{name} cannot range over relation symbol {sort.kind}")
        checker.family(scope, sort.kind, sort.args, "sort")
        scope = scope.extend(name, sort)


def check_formula(sig: FoldsSignature, context: Context, phi: Formula) -> None:
    """Raise the matching FormulaError unless phi is well formed over the context."""
    _Checker(sig).check(context, phi)


def _free_names(phi: Formula) -> set[str]:
    if isinstance(phi, (Top, Bottom)):
        return set()
    if isinstance(phi, Atom):
        return set(phi.args)
    if isinstance(phi, (Forall, Exists)):
        return (_free_names(phi.body) - {phi.var}) | set(phi.sort.args)
    return _free_names(phi.left) | _free_names(phi.right)


def free_vars(phi: Formula, context: Context = Context()) -> Context:
    """Free variables of phi closed under dependency, in context order."""
    sorts = context.sorts()
    names = _free_names(phi)
    stack = list(names)
    while stack:
        v = stack.pop()
        for dep in sorts.get(v, Sort("")).args:
            if dep not in names:
                names.add(dep)
                stack.append(dep)
    missing = names - set(sorts)
    if missing:
        raise UndeclaredVariable(f"free variable(s) {', '.join(sorted(missing))} are not in the context")
    return Context(tuple((v, s) for v, s in context.variables if v in names))


def is_sentence(phi: Formula) -> bool:
    return not _free_names(phi)


# --- satisfaction -----------------------------------------------------------------------------

Interpretation = Union[Mapping[str, str], NatTransf]


def satisfies(M: Presheaf, phi: Formula, alpha: Interpretation | None = None, context: Context = Context()) -> bool:
    """Truth of phi in M; quantifiers range over the fiber above the interpreted dependencies."""
    values = dict(alpha.components if isinstance(alpha, NatTransf) else (alpha or {}))
    missing = _free_names(phi) - set(values)
    if missing:
        raise InterpretationMismatch(f"no value for free variable(s) {', '.join(sorted(missing))}")
    for name, sort in context.variables:
        if name in values and (values[name] not in M or M.kind_of(values[name]) != sort.kind):
            raise InterpretationMismatch(f"{name} is sent to {values[name]!r}, not an element of {sort.kind}")
    return _eval(M, phi, values)


def _eval(M: Presheaf, phi: Formula, env: dict[str, str]) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Atom):
        return bool(M.fiber(phi.kind, tuple(env[a] for a in phi.args)))
    if isinstance(phi, And):
        return _eval(M, phi.left, env) and _eval(M, phi.right, env)
    if isinstance(phi, Or):
        return _eval(M, phi.left, env) or _eval(M, phi.right, env)
    if isinstance(phi, Implies):
        return (not _eval(M, phi.left, env)) or _eval(M, phi.right, env)
    fiber = M.fiber(phi.sort.kind, tuple(env[a] for a in phi.sort.args))
    test = all if isinstance(phi, Forall) else any
    return test(_eval(M, phi.body, {**env, phi.var: e}) for e in fiber)


# --- sentence generation ----------------------------------------------------------------------


class _Generator:
    def __init__(self, sig: FoldsSignature, rng: random.Random, weights: tuple[float, float, float]):
        self.sig = sig
        self.rng = rng
        self.weights = weights
        self.counter = 0
        self.sorts = [k for k in sig.kinds if not sig.is_relation_kind(k)]
        self.relations = [k for k in sig.kinds if sig.is_relation_kind(k)]

    def options(self, scope: Context, kinds: list[str]) -> list[tuple[str, tuple[str, ...]]]:
        X = scope.presheaf(self.sig)
        return [(k, fam) for k in kinds for fam in compatible_families(X, k)]

    def fresh(self) -> str:
        name = f"x{self.counter}"
        self.counter += 1
        return name

    def formula(self, scope: Context, budget: int) -> Formula:
        choices: list[str] = []
        weights: list[float] = []
        atoms = self.options(scope, self.relations)
        quantifiable = self.options(scope, self.sorts) if budget > 0 else []
        if budget > 0:
            choices.append("connective")
            weights.append(self.weights[0])
        if quantifiable:
            choices.append("quantifier")
            weights.append(self.weights[1])
        if atoms:
            choices.append("atom")
            weights.append(self.weights[2])
        if not choices:
            return Top() if self.rng.random() < 0.5 else Bottom()
        pick = self.rng.choices(choices, weights=weights)[0]
        if pick == "atom":
            kind, fam = self.rng.choice(atoms)
            return Atom(kind, fam)
        if pick == "quantifier":
            kind, fam = self.rng.choice(quantifiable)
            var = self.fresh()
            sort = Sort(kind, fam)
            body = self.formula(scope.extend(var, sort), budget - 1)
            return (Forall if self.rng.random() < 0.5 else Exists)(var, sort, body)
        op = self.rng.choice((And, Or, Implies))
        return op(self.formula(scope, budget - 1), self.formula(scope, budget - 1))


def generate_sentences(
    sig: FoldsSignature,
    depth: int,
    count: int,
    seed: int,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
) -> list[Formula]:
    """`count` closed formulae of connective/quantifier depth at most `depth`, fixed by `seed`."""
    if depth < 0 or count < 0:
        raise ValueError("depth and count must be nonnegative")
    rng = random.Random(seed)
    gen = _Generator(sig, rng, weights)
    out = []
    for _ in range(count):
        gen.counter = 0
        out.append(gen.formula(Context(), depth))
    APP_LOGGER.debug(f"Generated {count} sentence(s) over {sig.name} at depth <= {depth} (seed {seed})")
    return out


# --- invariance -------------------------------------------------------------------------------

AGREE = "agree"
DISAGREE = "DISAGREE"
NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class InvarianceVerdict:
    status: str
    left: bool | None = None
    right: bool | None = None
    reason: str = ""

    def __str__(self) -> str:
        if self.status == AGREE:
            return f"agree({str(self.left).lower()}/{str(self.right).lower()})"
        if self.status == DISAGREE:
            return f"DISAGREE({str(self.left).lower()}/{str(self.right).lower()})"
        return f"NotApplicable: {self.reason}"


def span_legs_surjective(span: Span) -> str:
    """Empty when both legs are fiberwise surjective, else a reason."""
    for side, leg in (("left", span.left), ("right", span.right)):
        check = is_fiberwise_surjective(leg)
        if not check.ok:
            return f"{side} leg is not fiberwise surjective at {check.kind}"
    return ""


def check_invariance(
    span: Span,
    phi: Formula,
    context: Context = Context(),
    legs_checked: bool = False,
) -> InvarianceVerdict:
    """Evaluate phi in both feet of the span under the interpretations it carries."""
    if not legs_checked:
        reason = span_legs_surjective(span)
        if reason:
            return InvarianceVerdict(NOT_APPLICABLE, reason=reason)
    M, N = span.feet()
    alpha: dict[str, str] = {}
    beta: dict[str, str] = {}
    free = _free_names(phi)
    if free:
        if span.interpretation is None:
            raise ContextMismatch(f"free variable(s) {', '.join(sorted(free))} but the span carries no interpretation")
        missing = free - set(span.interpretation.components)
        if missing:
            raise ContextMismatch(f"free variable(s) {', '.join(sorted(missing))} are outside the span context")
        left_i, right_i = span.foot_interpretations()
        alpha, beta = dict(left_i.components), dict(right_i.components)
    left = satisfies(M, phi, alpha, context)
    right = satisfies(N, phi, beta, context)
    if left != right:
        APP_LOGGER.error(f"Invariance fails along {span.name}: {format_formula(phi)} is {left} vs {right}")
        return InvarianceVerdict(DISAGREE, left, right)
    return InvarianceVerdict(AGREE, left, right)


@dataclass
class InvarianceReport:
    span: str
    status: str = AGREE
    reason: str = ""
    agreements: int = 0
    true_count: int = 0
    disagreements: list[dict[str, Any]] = field(default_factory=list)
    depths: list[int] = field(default_factory=list)
    foot_sizes: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == AGREE and not self.disagreements

    def as_dict(self) -> dict[str, Any]:
        return {
            "span": self.span,
            "status": self.status,
            "reason": self.reason,
            "sentences": len(self.depths),
            "agreements": self.agreements,
            "true": self.true_count,
            "disagreements": self.disagreements,
            "foot_sizes": self.foot_sizes,
        }


def invariance_sweep(span: Span, sentences: Iterable[Formula], object_kind: str | None = None) -> InvarianceReport:
    """Check every sentence along the span, testing the legs once."""
    report = InvarianceReport(span=span.name)
    M, N = span.feet()
    if object_kind is not None:
        report.foot_sizes = {
            "left": {object_kind: len(M.elements(object_kind))},
            "right": {object_kind: len(N.elements(object_kind))},
        }
    reason = span_legs_surjective(span)
    if reason:
        APP_LOGGER.warning(f"Invariance along {span.name} not applicable: {reason}")
        report.status, report.reason = NOT_APPLICABLE, reason
        return report
    for phi in sentences:
        verdict = check_invariance(span, phi, legs_checked=True)
        report.depths.append(depth(phi))
        if verdict.status == AGREE:
            report.agreements += 1
            report.true_count += int(bool(verdict.left))
        else:
            report.status = DISAGREE
            report.disagreements.append(
                {"formula": format_formula(phi), "left": verdict.left, "right": verdict.right}
            )
    APP_LOGGER.info(f"Invariance along {span.name}: {report.agreements}/{len(report.depths)} agree")
    return report
