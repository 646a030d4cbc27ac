"""Builtin double categories, functors and spans, addressable as `builtin:<name>`, and the corpora
the verification sweeps run over."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

from app.core.dblcat import (
    DoubleFunctor,
    FiniteDoubleCategory,
    chain3,
    chaotic,
    codiagonal,
    coproduct_dblcat,
    cyclic_group,
    discrete,
    hop,
    horizontal_embedding,
    identity_functor,
    initial,
    iso_comma,
    locally_chaotic,
    product_dblcat,
    product_projections,
    sq_of_2cat,
    suspension_iso,
    terminal,
    to_terminal,
    vertical_embedding,
    walking_arrow,
)
from app.core.errors import UnknownBuiltin
from app.core.presentation import double_functors

_DOUBLES: dict[str, Callable[[], FiniteDoubleCategory]] = {
    "1": terminal,
    "0": initial,
    "1+1": lambda: coproduct_dblcat(terminal(), terminal(), name="1+1"),
    "discrete2": lambda: discrete(("a", "b"), name="discrete2"),
    "H2": lambda: horizontal_embedding(walking_arrow(), name="H2"),
    "V2": lambda: vertical_embedding(walking_arrow(), name="V2"),
    "H3": lambda: horizontal_embedding(chain3(), name="H3"),
    "V3": lambda: vertical_embedding(chain3(), name="V3"),
    "H2+H2": lambda: coproduct_dblcat(builtin_double("H2"), builtin_double("H2"), name="H2+H2"),
    "chaotic2": lambda: horizontal_embedding(chaotic(2), name="chaotic2"),
    "chaotic3": lambda: horizontal_embedding(chaotic(3), name="chaotic3"),
    "Vchaotic2": lambda: vertical_embedding(chaotic(2), name="Vchaotic2"),
    "H2xV2": lambda: product_dblcat(builtin_double("H2"), builtin_double("V2"), name="H2xV2"),
    "Sq2": lambda: sq_of_2cat(walking_arrow(), name="Sq2"),
    "Sq2hop": lambda: hop(builtin_double("Sq2")).renamed("Sq2hop"),
    "Sq3": lambda: sq_of_2cat(chain3(), name="Sq3"),
    "SqI": lambda: sq_of_2cat(chaotic(2), name="SqI"),
    "HSigmaI": lambda: horizontal_embedding(suspension_iso(), name="HSigmaI"),
    "Z2": lambda: horizontal_embedding(cyclic_group(2), name="Z2"),
    "Z2chaotic": lambda: horizontal_embedding(locally_chaotic(cyclic_group(2)), name="Z2chaotic"),
}


@lru_cache(maxsize=None)
def builtin_double(name: str) -> FiniteDoubleCategory:
    try:
        factory = _DOUBLES[name]
    except KeyError:
        raise UnknownBuiltin(f"No builtin double category {name!r}") from None
    return factory()


def double_names() -> tuple[str, ...]:
    return tuple(_DOUBLES)


def _pick(source: str, target: str, **obj: str) -> DoubleFunctor:
    """The first double functor between builtins sending the given objects as requested."""
    for F in double_functors(builtin_double(source), builtin_double(target)):
        if all(F.obj[k] == v for k, v in obj.items()):
            return F
    raise UnknownBuiltin(f"No double functor {source} -> {target} with {obj}")


def _named(F: DoubleFunctor, name: str) -> DoubleFunctor:
    return DoubleFunctor(F.source, F.target, F.obj, F.hmor, F.vmor, F.sq, name=name)


_FUNCTORS: dict[str, Callable[[], DoubleFunctor]] = {
    "V2->1": lambda: to_terminal(builtin_double("V2")),
    "H2->1": lambda: to_terminal(builtin_double("H2")),
    "1+1->1": lambda: to_terminal(builtin_double("1+1")),
    "chaotic2->1": lambda: to_terminal(builtin_double("chaotic2")),
    "chaotic3->1": lambda: to_terminal(builtin_double("chaotic3")),
    "SqI->1": lambda: to_terminal(builtin_double("SqI")),
    "Sq2->1": lambda: to_terminal(builtin_double("Sq2")),
    "HSigmaI->1": lambda: to_terminal(builtin_double("HSigmaI")),
    "Z2chaotic->1": lambda: to_terminal(builtin_double("Z2chaotic")),
    "1->chaotic2": lambda: _named(_pick("1", "chaotic2", **{"*": "0"}), "1->chaotic2"),
    "1->H2": lambda: _named(_pick("1", "H2", **{"*": "0"}), "1->H2"),
    "H2->chaotic2": lambda: _named(_pick("H2", "chaotic2", **{"0": "0", "1": "1"}), "H2->chaotic2"),
    "chaotic3->chaotic2": lambda: _named(
        _pick("chaotic3", "chaotic2", **{"0": "0", "1": "1", "2": "1"}), "chaotic3->chaotic2"
    ),
    "id:SqI": lambda: identity_functor(builtin_double("SqI")),
    "id:H2": lambda: identity_functor(builtin_double("H2")),
    "H2xV2->H2": lambda: product_projections(builtin_double("H2"), builtin_double("V2"), builtin_double("H2xV2"))[0],
    "H2xV2->V2": lambda: product_projections(builtin_double("H2"), builtin_double("V2"), builtin_double("H2xV2"))[1],
    "H2+H2->H2": lambda: codiagonal(builtin_double("H2"), builtin_double("H2+H2")),
}


@lru_cache(maxsize=None)
def builtin_functor(name: str) -> DoubleFunctor:
    try:
        factory = _FUNCTORS[name]
    except KeyError:
        raise UnknownBuiltin(f"No builtin double functor {name!r}") from None
    return factory()


def functor_names() -> tuple[str, ...]:
    return tuple(_FUNCTORS)


@dataclass(frozen=True)
class FunctorSpan:
    """Two double functors out of a common apex, read through a shape diagram."""

    diagram: str
    left: DoubleFunctor
    right: DoubleFunctor
    name: str = ""

    @property
    def apex(self) -> FiniteDoubleCategory:
        return self.left.source


def span_of_functor(F: DoubleFunctor, diagram: str = "dblcat") -> FunctorSpan:
    """The span `A <- A -> B` with the identity as its left leg."""
    return FunctorSpan(diagram, identity_functor(F.source), F, name=F.name)


def _iso_comma_span(target: str, point: str) -> FunctorSpan:
    F = builtin_functor(point)
    _, left, right = iso_comma(F, name=f"iso({point})")
    return FunctorSpan("cat", left, right, name=f"iso_comma:{target}")


_SPANS: dict[str, Callable[[], FunctorSpan]] = {
    "iso_comma_chaotic2": lambda: _iso_comma_span("chaotic2", "1->chaotic2"),
    "SqI->1": lambda: span_of_functor(builtin_functor("SqI->1")),
    "V2->1": lambda: span_of_functor(builtin_functor("V2->1")),
    "id:SqI": lambda: span_of_functor(builtin_functor("id:SqI")),
}


@lru_cache(maxsize=None)
def builtin_span(name: str) -> FunctorSpan:
    try:
        factory = _SPANS[name]
    except KeyError:
        raise UnknownBuiltin(f"No builtin span {name!r}") from None
    return factory()


def span_names() -> tuple[str, ...]:
    return tuple(_SPANS)


# --- corpora for the verification sweeps ------------------------------------------------------

DOUBLE_CORPUS = (
    "1", "0", "1+1", "discrete2", "H2", "V2", "H3", "V3", "chaotic2", "Vchaotic2",
    "H2xV2", "Sq2", "Sq2hop", "Sq3", "SqI", "HSigmaI", "Z2", "Z2chaotic",
)
CATEGORY_CORPUS = ("0", "1", "1+1", "H2", "H3", "chaotic2", "chaotic3", "Z2")

# pairs whose double functors are all enumerated for the lifting sweep
FUNCTOR_PAIRS = (
    ("1", "1"), ("1+1", "1"), ("1", "1+1"), ("discrete2", "1"), ("0", "1"), ("0", "H2"),
    ("H2", "1"), ("V2", "1"), ("chaotic2", "1"), ("Vchaotic2", "1"),
    ("1", "H2"), ("1", "V2"), ("1", "chaotic2"), ("1+1", "H2"), ("1+1", "chaotic2"),
    ("H2", "chaotic2"), ("H2", "H2"), ("V2", "V2"), ("H2", "HSigmaI"), ("HSigmaI", "H2"),
    ("HSigmaI", "1"), ("H2xV2", "1"), ("Sq2", "1"), ("SqI", "1"), ("Sq2hop", "1"), ("H3", "H2"),
)
CATEGORY_FUNCTOR_PAIRS = (
    ("1", "1"), ("1+1", "1"), ("1", "1+1"), ("H2", "1"), ("chaotic2", "1"), ("chaotic3", "1"),
    ("1", "chaotic2"), ("H2", "chaotic2"), ("chaotic3", "chaotic2"), ("chaotic2", "chaotic2"),
    ("Z2", "1"), ("Z2", "Z2"), ("H3", "H2"),
)
# a trivial fibration whose nerve map misses a fiber; kept out of the nerve sweep
NERVE_COUNTEREXAMPLES = ("Z2chaotic->1",)


def corpus_doubles() -> list[FiniteDoubleCategory]:
    return [builtin_double(n) for n in DOUBLE_CORPUS]


EXTRA_FUNCTORS = ("H2xV2->H2", "H2xV2->V2", "H2+H2->H2", "Z2chaotic->1")


def corpus_functors(pairs=FUNCTOR_PAIRS, extras=EXTRA_FUNCTORS) -> list[DoubleFunctor]:
    out: list[DoubleFunctor] = []
    for source, target in pairs:
        for k, F in enumerate(double_functors(builtin_double(source), builtin_double(target))):
            out.append(_named(F, f"{source}->{target}#{k}"))
    for name in extras:
        out.append(builtin_functor(name))
    return out


def category_functors() -> list[DoubleFunctor]:
    return corpus_functors(CATEGORY_FUNCTOR_PAIRS, extras=())


# --- seeded table perturbations for the law-checker sweep -------------------------------------

_TABLES = (
    ("hcomp_h", "hmors", "idh"),
    ("vcomp_v", "vmors", "idv"),
    ("hcomp_sq", "squares", "idsq"),
    ("vcomp_sq", "squares", "esq"),
)


@dataclass(frozen=True)
class Mutation:
    double: str
    table: str
    key: tuple[str, str]
    old: str
    new: str
    mutant: FiniteDoubleCategory

    def describe(self) -> str:
        return f"{self.double}.{self.table}[{self.key[0]}, {self.key[1]}]: {self.old} -> {self.new}"


def perturb(name: str, rng: random.Random) -> Mutation | None:
    """Redirect one composite that has an identity operand to another cell of the same sort.

    Every such change breaks a unit law or the typing of the composite, so the law checker must
    reject the result.
    """
    A = builtin_double(name)
    choices = []
    for table, cells, units in _TABLES:
        unit_cells = set(getattr(A, units).values())
        pool = sorted(getattr(A, cells))
        if len(pool) < 2:
            continue
        for key, value in sorted(getattr(A, table).items()):
            if key[0] in unit_cells or key[1] in unit_cells:
                choices.append((table, key, value, pool))
    if not choices:
        return None
    table, key, old, pool = rng.choice(choices)
    new = rng.choice([c for c in pool if c != old])
    mutant = replace(A, name=f"{A.name}~", **{table: {**getattr(A, table), key: new}})
    return Mutation(name, table, key, old, new, mutant)


def mutations(count: int, seed: int = 0) -> list[Mutation]:
    rng = random.Random(seed)
    names = [n for n in DOUBLE_CORPUS if builtin_double(n).size()["hmors"] >= 2]
    out: list[Mutation] = []
    while len(out) < count:
        m = perturb(rng.choice(names), rng)
        if m is not None:
            out.append(m)
    return out
