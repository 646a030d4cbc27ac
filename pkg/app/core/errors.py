"""Exception hierarchy and validation reports shared by the core modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class DoublefoldError(ValueError):
    """Base class for every error raised by the core modules."""


class FormatError(DoublefoldError):
    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")
        self.path = path
        self.line = line


class UnknownBuiltin(DoublefoldError):
    pass


class UnknownKind(DoublefoldError):
    pass


class UnknownArrow(DoublefoldError):
    pass


class DegreeCycle(DoublefoldError):
    pass


class RelationNotMaximal(DoublefoldError):
    pass


class IllTypedRelation(DoublefoldError):
    pass


class ActionNotTotal(DoublefoldError):
    pass


class NonComposablePair(DoublefoldError):
    pass


class LawViolation(DoublefoldError):
    pass


class NotDisjoint(DoublefoldError):
    pass


class RelationViolated(DoublefoldError):
    pass


class NotNatural(DoublefoldError):
    pass


class MismatchAt(DoublefoldError):
    pass


class FormulaError(DoublefoldError):
    pass


class FormulaSyntaxError(FormulaError):
    pass


class ArityMismatch(FormulaError):
    pass


class DependencyViolation(FormulaError):
    pass


class IncompatibleFamily(FormulaError):
    pass


class ShadowingError(FormulaError):
    pass


class UndeclaredVariable(FormulaError):
    pass


class InterpretationMismatch(FormulaError):
    pass


class ContextMismatch(FormulaError):
    pass


ERROR_CODES: dict[str, type[DoublefoldError]] = {
    "UnknownKind": UnknownKind,
    "UnknownArrow": UnknownArrow,
    "DegreeCycle": DegreeCycle,
    "RelationNotMaximal": RelationNotMaximal,
    "IllTypedRelation": IllTypedRelation,
    "ActionNotTotal": ActionNotTotal,
    "NonComposablePair": NonComposablePair,
    "LawViolation": LawViolation,
    "NotDisjoint": NotDisjoint,
    "RelationViolated": RelationViolated,
    "NotNatural": NotNatural,
    "MismatchAt": MismatchAt,
}


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    witnesses: tuple[Any, ...] = ()

    def as_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "witnesses": [str(w) for w in self.witnesses]}


@dataclass
class ValidationReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def add(self, code: str, message: str, *witnesses: Any) -> None:
        self.violations.append(Violation(code, message, tuple(witnesses)))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def raise_if_failed(self) -> None:
        if self.ok:
            return
        first = self.violations[0]
        exc_type = ERROR_CODES.get(first.code, DoublefoldError)
        raise exc_type(f"{self.subject}: {first.message}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [v.as_dict() for v in self.violations],
            "details": {k: self.details[k] for k in sorted(self.details)},
        }
