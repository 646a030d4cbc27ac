from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.corpus import DOUBLE_CORPUS, builtin_double, double_names, mutations
from app.core.dblcat import (
    chaotic,
    coproduct_dblcat,
    hop,
    identity_functor,
    is_functor_isomorphism,
    product_dblcat,
    sq_of_2cat,
    terminal,
    to_terminal,
    transpose,
    validate_2category,
    validate_double_category,
    validate_double_functor,
    walking_arrow,
)


@pytest.mark.parametrize("name", double_names())
def test_builtin_double_categories_satisfy_the_laws(name):
    report = validate_double_category(builtin_double(name))
    assert report.ok, [v.message for v in report.violations]


def test_builtin_2categories_validate():
    for C in (walking_arrow(), chaotic(2), chaotic(3)):
        assert validate_2category(C).ok


@pytest.mark.parametrize("mutation", mutations(50, seed=0), ids=lambda m: m.describe())
def test_seeded_mutations_are_caught(mutation):
    report = validate_double_category(mutation.mutant)
    assert not report.ok


def test_mutations_are_deterministic():
    first = [m.describe() for m in mutations(10, seed=3)]
    again = [m.describe() for m in mutations(10, seed=3)]
    assert first == again


def test_missing_composite_is_a_totality_violation():
    A = builtin_double("H2")
    key = next(k for k, v in A.hcomp_h.items() if v == "f")
    table = {k: v for k, v in A.hcomp_h.items() if k != key}
    report = validate_double_category(replace(A, hcomp_h=table))
    assert report.first.code == "NonComposablePair"


def test_sizes_of_small_builtins():
    assert builtin_double("1").size() == {"objects": 1, "hmors": 1, "vmors": 1, "squares": 1}
    assert builtin_double("H2").size() == {"objects": 2, "hmors": 3, "vmors": 2, "squares": 3}
    assert builtin_double("V2").size() == {"objects": 2, "hmors": 2, "vmors": 3, "squares": 3}
    assert builtin_double("0").size() == {"objects": 0, "hmors": 0, "vmors": 0, "squares": 0}


def test_product_and_coproduct_sizes():
    H2, V2 = builtin_double("H2"), builtin_double("V2")
    P = product_dblcat(H2, V2)
    assert P.size() == {"objects": 4, "hmors": 6, "vmors": 6, "squares": 9}
    S = coproduct_dblcat(H2, H2)
    assert S.size() == {"objects": 4, "hmors": 6, "vmors": 4, "squares": 6}
    assert validate_double_category(P).ok and validate_double_category(S).ok


def test_transpose_swaps_directions():
    H2 = builtin_double("H2")
    T = transpose(H2)
    assert validate_double_category(T).ok
    assert len(T.vmors) == len(H2.hmors)
    assert len(T.hmors) == len(H2.vmors)


def test_sq_of_walking_arrow():
    Sq2 = sq_of_2cat(walking_arrow())
    assert validate_double_category(Sq2).ok
    assert len(Sq2.hmors) == len(Sq2.vmors) == 3


def test_identity_and_terminal_functors_are_valid():
    for name in ("H2", "Sq2", "SqI"):
        A = builtin_double(name)
        assert validate_double_functor(identity_functor(A)).ok
        assert is_functor_isomorphism(identity_functor(A))
        assert validate_double_functor(to_terminal(A)).ok
    assert is_functor_isomorphism(to_terminal(terminal()))


@settings(max_examples=len(DOUBLE_CORPUS), deadline=None)
@given(st.sampled_from(DOUBLE_CORPUS))
def test_hop_is_an_involution(name):
    A = builtin_double(name)
    B = hop(hop(A))
    assert validate_double_category(hop(A)).ok
    assert B.objects == A.objects
    assert dict(B.hmors) == dict(A.hmors)
    assert dict(B.squares) == dict(A.squares)
    assert dict(B.hcomp_sq) == dict(A.hcomp_sq)
