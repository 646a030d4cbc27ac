from __future__ import annotations

import pytest

from app.core.classify import (
    classify,
    companion_lifts,
    has_rlp,
    horizontal_companion_lifts,
    is_double_biequivalence,
    is_naive_fibrant,
    is_naive_fibration,
    is_surjective_equivalence,
    is_trivial_fibration,
    naive_fibration_conditions,
    rlp_generating_cofibrations,
)
from app.core.corpus import builtin_double, builtin_functor, corpus_doubles, corpus_functors
from app.core.equipment import find_companions, find_conjoints, is_equipment
from app.core.shapes import GENERATING_COFIBRATIONS, builtin_inclusion


def test_vertical_arrow_to_point():
    F = builtin_functor("V2->1")
    tf = is_trivial_fibration(F)
    assert not tf
    assert tf.failing == "full_horizontal"
    conditions = naive_fibration_conditions(F)
    assert conditions["f1"].ok
    assert not conditions["f2"].ok
    assert is_naive_fibration(F).failing == "f2"
    assert is_double_biequivalence(F).failing == "w2"


def test_vertical_arrow_to_point_has_no_lift_against_endpoints():
    result = has_rlp(builtin_functor("V2->1"), builtin_inclusion("i_hpoints"))
    assert not result.ok
    assert result.inclusion == "i_hpoints"
    assert result.problems >= 1
    assert "unsolvable" in result.as_dict()


@pytest.mark.parametrize("name", ["SqI->1", "Z2chaotic->1", "id:SqI", "id:H2"])
def test_trivial_fibrations(name):
    assert is_trivial_fibration(builtin_functor(name)).ok


@pytest.mark.parametrize(
    "name, failing",
    [("1+1->1", "full_horizontal"), ("H2->1", "full_vertical"), ("chaotic2->1", "full_vertical")],
)
def test_not_trivial_fibrations(name, failing):
    assert is_trivial_fibration(builtin_functor(name)).failing == failing


def test_suspension_to_point_is_not_a_trivial_fibration():
    assert not is_trivial_fibration(builtin_functor("HSigmaI->1"))


def test_trivial_fibration_lifts_against_every_generating_cofibration():
    results = rlp_generating_cofibrations(builtin_functor("SqI->1"))
    assert set(results) == set(GENERATING_COFIBRATIONS)
    assert all(r.ok for r in results.values())


def test_surjective_equivalence_of_horizontal_categories():
    assert is_surjective_equivalence(builtin_functor("chaotic2->1")).ok
    assert is_surjective_equivalence(builtin_functor("1+1->1")).failing == "full_horizontal"
    assert is_surjective_equivalence(builtin_functor("H2->1")).failing == "full_horizontal"


def test_identity_on_an_equipment_classifies_consistently():
    result = classify(builtin_functor("id:SqI"))
    assert result.verdicts["source_equipment"] and result.verdicts["target_equipment"]
    assert result.verdicts["trivial_fibration"]["ok"]
    assert result.verdicts["naive_fibration"]
    assert result.verdicts["double_biequivalence"]
    assert "w3'" in result.verdicts
    assert result.consistency
    assert result.consistent


def test_classification_outside_equipments_has_no_consistency_flags():
    result = classify(builtin_functor("V2->1"), with_lifting=True)
    assert not result.verdicts["source_equipment"]
    assert result.consistency == {"trivial_iff_rlp_I": True}
    assert result.consistent
    assert not result.verdicts["rlp_I"]["i_hpoints"]["ok"]
    assert set(result.as_dict()) == {"functor", "verdicts", "consistency", "consistent"}


def test_trivial_fibration_between_equipments_is_naive_and_biequivalence():
    result = classify(builtin_functor("SqI->1"))
    assert result.verdicts["trivial_fibration"]["ok"]
    assert result.verdicts["naive_fibration"] and result.verdicts["double_biequivalence"]
    assert result.consistent


def test_corpus_functors_between_equipments_are_consistent():
    for F in corpus_functors():
        result = classify(F)
        assert result.consistent, (F.name, result.consistency)


def test_naive_fibrant_objects():
    assert is_naive_fibrant(builtin_double("H2"))
    assert not is_naive_fibrant(builtin_double("V2"))


def test_companion_lifts_match_companion_search():
    A = builtin_double("SqI")
    for u in A.vmors:
        assert len(companion_lifts(A, u)) == 1
        assert companion_lifts(A, u) == find_companions(A, u)
        assert len(companion_lifts(A, u, conjoint=True)) == len(find_conjoints(A, u))


def test_horizontal_arrow_without_vertical_partner():
    assert horizontal_companion_lifts(builtin_double("H2"), "f") == []


@pytest.mark.parametrize("name", ["H2->1", "1+1->1"])
def test_either_biequivalence_definition_gives_the_same_verdict(name):
    result = classify(builtin_functor(name))
    assert result.verdicts["source_equipment"] and result.verdicts["target_equipment"]
    assert not result.verdicts["double_biequivalence"]
    assert result.consistency["biequivalence_via_w3_prime"]
    assert result.consistent


def test_w3_and_w3_prime_may_differ_individually():
    verdicts = classify(builtin_functor("H2->1")).verdicts
    assert verdicts["w3"]["ok"]
    assert not verdicts["w3'"]["ok"]
    assert verdicts["w3'"]["failing"] == "w3'"
    assert not verdicts["w2"]["ok"]


def test_trivial_fibrations_are_exactly_the_maps_lifting_against_I():
    for F in corpus_functors():
        tf = is_trivial_fibration(F).ok
        rlp = all(r.ok for r in rlp_generating_cofibrations(F).values())
        assert tf == rlp, F.name


def test_equipments_are_exactly_the_naive_fibrant_objects():
    for A in corpus_doubles():
        assert is_equipment(A).ok == is_naive_fibrant(A), A.name


def test_companion_lifts_count_companions_and_conjoints_over_the_corpus():
    for A in corpus_doubles():
        for u in A.vmors:
            assert len(companion_lifts(A, u)) == len(find_companions(A, u)), (A.name, u)
            assert len(companion_lifts(A, u, conjoint=True)) == len(find_conjoints(A, u)), (A.name, u)
