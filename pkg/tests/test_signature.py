from __future__ import annotations

import pytest

from app.core.errors import DegreeCycle, UnknownArrow, UnknownKind
from app.core.signature import (
    ArrowWord,
    builtin_signature,
    make_signature,
    parse_applicative,
    validate_signature,
    verbatim_signature,
)


def _graph_sig(relations=(("I", "i . s = i . t"),)):
    return make_signature(
        "graph",
        ["O", "A", "I"],
        ["I"],
        [("s", "A", "O"), ("t", "A", "O"), ("i", "I", "A")],
        relations,
    )


@pytest.mark.parametrize("name", ["cat", "twocat", "dblcat"])
def test_builtin_signatures_validate(name):
    report = validate_signature(builtin_signature(name))
    assert report.ok, report.violations


def test_cat_degrees(cat_sig):
    assert cat_sig.degrees == {"O": 0, "A": 1, "I'": 2, "T'": 2, "E'": 2}


def test_dblcat_degrees(dblcat_sig):
    assert dblcat_sig.degree("O") == 0
    assert dblcat_sig.degree("H") == dblcat_sig.degree("V") == 1
    assert dblcat_sig.degree("S") == 2
    assert dblcat_sig.degree("E'") == 3
    assert dblcat_sig.degree("H_comp'") == 3


def test_relation_identifies_words():
    sig = _graph_sig()
    left = sig.word("I", ("i", "s"))
    right = sig.word("I", ("i", "t"))
    assert sig.equal(left, right)
    assert sig.canonical(right).names == ("i", "s")


def test_fan_collapses_related_words():
    sig = _graph_sig()
    # i, i.s = i.t
    assert [w.names for w in sig.fan("I")] == [("i",), ("i", "s")]
    assert len(_graph_sig(relations=()).fan("I")) == 3


def test_hom_words_include_identity():
    sig = _graph_sig()
    assert sig.hom_words("A", "A") == (ArrowWord("A", (), "A"),)
    assert len(sig.hom_words("A", "O")) == 2


def test_cycle_is_reported():
    sig = make_signature("loop", ["X", "Y"], [], [("f", "X", "Y"), ("g", "Y", "X")], [])
    report = validate_signature(sig)
    assert not report.ok
    assert report.first.code == "DegreeCycle"
    with pytest.raises(DegreeCycle):
        report.raise_if_failed()


def test_relation_symbol_must_be_maximal():
    sig = make_signature("bad", ["O", "R", "Z"], ["R"], [("p", "R", "O"), ("q", "Z", "R")], [])
    report = validate_signature(sig)
    assert [v.code for v in report.violations] == ["RelationNotMaximal"]


def test_ill_typed_relation():
    sig = _graph_sig(relations=(("I", "i = i . s"),))
    report = validate_signature(sig)
    assert report.first.code == "IllTypedRelation"


def test_unknown_kind_and_arrow():
    sig = _graph_sig()
    with pytest.raises(UnknownKind):
        sig.arrows_from("Q")
    with pytest.raises(UnknownArrow):
        sig.arrow("A", "i")


def test_parse_applicative_reverses_order():
    assert parse_applicative("s·l = t·r") == (("l", "s"), ("r", "t"))


def test_verbatim_cat_has_a_degenerate_line():
    sig, unparseable = verbatim_signature("cat")
    assert not unparseable
    assert any(r.lhs == r.rhs for r in sig.relations)
