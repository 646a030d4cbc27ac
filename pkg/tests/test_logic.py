from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.corpus import builtin_span
from app.core.errors import (
    ArityMismatch,
    ContextMismatch,
    DependencyViolation,
    FormulaError,
    FormulaSyntaxError,
    IncompatibleFamily,
    InterpretationMismatch,
    ShadowingError,
    UndeclaredVariable,
    UnknownKind,
)
from app.core.logic import (
    AGREE,
    NOT_APPLICABLE,
    Atom,
    Context,
    Exists,
    Forall,
    Sort,
    check_formula,
    check_invariance,
    depth,
    format_formula,
    format_sequent,
    free_vars,
    generate_sentences,
    invariance_sweep,
    is_sentence,
    parse_formula,
    satisfies,
)
from app.core.nerve import nerve_span
from app.core.presheaf import NatTransf, Span, identity_transf
from app.core.signature import builtin_signature
from app.core.textio import load_presheaf, read_text

DATA = Path(__file__).resolve().parents[1] / "data"
CAT = builtin_signature("cat")
ONE_LOOP = load_presheaf(str(DATA / "one_loop.psh"))


@pytest.fixture
def one_loop():
    return ONE_LOOP


def test_parse_sentence(cat_sig):
    seq = parse_formula("forall x:O. exists f:A(x,x). I'(f)", cat_sig)
    assert len(seq.context) == 0
    assert seq.formula == Forall("x", Sort("O"), Exists("f", Sort("A", ("x", "x")), Atom("I'", ("f",))))
    assert is_sentence(seq.formula)
    assert depth(seq.formula) == 2


def test_unicode_connectives_match_ascii(cat_sig):
    ascii_form = parse_formula("forall x:O. exists f:A(x,x). (I'(f) /\\ true)", cat_sig)
    unicode_form = parse_formula("∀x:O. ∃f:A(x,x). (I'(f) ∧ ⊤)", cat_sig)
    assert ascii_form == unicode_form


def test_format_then_parse_is_stable(cat_sig):
    text = "x:O, y:O, f:A(x,y) |- exists g:A(y,x). (forall h:A(x,x). T'(f,g,h) -> I'(h))"
    seq = parse_formula(text, cat_sig)
    assert parse_formula(format_sequent(seq), cat_sig) == seq
    assert seq.context.names == ("x", "y", "f")


def test_free_object_variables_are_inferred(cat_sig):
    seq = parse_formula("exists f:A(x,y). true", cat_sig)
    assert seq.context.names == ("x", "y")
    assert free_vars(seq.formula, seq.context).names == ("x", "y")


def test_dependent_free_variables_need_a_declaration(cat_sig):
    with pytest.raises(UndeclaredVariable):
        parse_formula("I'(f)", cat_sig)


@pytest.mark.parametrize(
    "text, error",
    [
        ("forall x:O true", FormulaSyntaxError),
        ("forall x:O. exists f:A(x). true", ArityMismatch),
        ("x:O, y:O, f:A(x,y), g:A(x,y) |- exists h:A(x,y). T'(f,g,h)", IncompatibleFamily),
        ("x:O |- exists f:A(x,x). I'(x)", IncompatibleFamily),
        ("forall x:O. forall x:O. true", ShadowingError),
        ("forall x:O. forall f:A(x,x). forall x:O. true", DependencyViolation),
        ("forall p:I'(q). true", FormulaSyntaxError),
        ("true true", FormulaSyntaxError),
    ],
)
def test_ill_formed_formulae(cat_sig, text, error):
    with pytest.raises(error):
        parse_formula(text, cat_sig)


def test_formula_errors_share_a_base(cat_sig):
    with pytest.raises(FormulaError):
        parse_formula("forall x:O. forall x:O. true", cat_sig)


def test_unknown_kind(cat_sig):
    with pytest.raises(UnknownKind):
        parse_formula("forall x:Q. true", cat_sig)


def test_satisfaction_in_one_loop(one_loop, data_dir):
    sig = one_loop.signature
    loops_marked = parse_formula(read_text(data_dir / "loops.fml"), sig)
    assert satisfies(one_loop, loops_marked.formula)
    all_marked = parse_formula("forall x:O. forall a:A(x,x). I(a)", sig)
    assert not satisfies(one_loop, all_marked.formula)


def test_satisfaction_under_an_assignment(one_loop):
    seq = parse_formula("x:O, a:A(x,x) |- I(a)", one_loop.signature)
    assert satisfies(one_loop, seq.formula, {"x": "x", "a": "l"}, seq.context)
    assert not satisfies(one_loop, seq.formula, {"x": "x", "a": "m"}, seq.context)


def test_assignment_must_cover_free_variables(one_loop):
    seq = parse_formula("x:O, a:A(x,x) |- I(a)", one_loop.signature)
    with pytest.raises(InterpretationMismatch):
        satisfies(one_loop, seq.formula, {}, seq.context)
    with pytest.raises(InterpretationMismatch):
        satisfies(one_loop, seq.formula, {"x": "x", "a": "x"}, seq.context)


def test_sentence_generation_is_seeded(cat_sig):
    first = [format_formula(p) for p in generate_sentences(cat_sig, 3, 20, seed=7)]
    again = [format_formula(p) for p in generate_sentences(cat_sig, 3, 20, seed=7)]
    assert first == again
    assert len(first) == 20
    with pytest.raises(ValueError):
        generate_sentences(cat_sig, -1, 5, seed=0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), budget=st.integers(min_value=0, max_value=4))
def test_generated_sentences_are_closed_and_well_formed(seed, budget):
    for phi in generate_sentences(CAT, budget, 5, seed):
        assert is_sentence(phi)
        assert depth(phi) <= budget
        check_formula(CAT, Context(), phi)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_truth_is_invariant_under_relabelling(seed):
    copy, _ = ONE_LOOP.relabel(lambda e: f"{e}_copy")
    for phi in generate_sentences(ONE_LOOP.signature, 3, 10, seed):
        assert satisfies(ONE_LOOP, phi) == satisfies(copy, phi)


def _relabel_span(M, context=None, interpretation=None):
    copy, iso = M.relabel(lambda e: f"{e}'")
    return Span(M, identity_transf(M), iso, context, interpretation, name="relabel")


def test_open_formula_along_an_isomorphism(one_loop):
    seq = parse_formula("x:O, a:A(x,x) |- I(a)", one_loop.signature)
    C = seq.context.presheaf(one_loop.signature)
    alpha = NatTransf(C, one_loop, {"x": "x", "a": "m"})
    span = _relabel_span(one_loop, C, alpha)
    verdict = check_invariance(span, seq.formula, seq.context)
    assert verdict.status == AGREE
    assert verdict.left is False and verdict.right is False


def test_open_formula_needs_an_interpretation(one_loop):
    seq = parse_formula("x:O, a:A(x,x) |- I(a)", one_loop.signature)
    with pytest.raises(ContextMismatch):
        check_invariance(_relabel_span(one_loop), seq.formula, seq.context)


def test_invariance_along_a_trivial_fibration():
    span = nerve_span(builtin_span("SqI->1"))
    sentences = generate_sentences(span.apex.signature, 3, 30, seed=0)
    report = invariance_sweep(span, sentences, object_kind="O")
    assert report.ok
    assert report.as_dict()["sentences"] == 30
    assert report.foot_sizes == {"left": {"O": 2}, "right": {"O": 1}}


def test_invariance_is_not_applicable_without_surjective_legs():
    span = nerve_span(builtin_span("V2->1"))
    report = invariance_sweep(span, generate_sentences(span.apex.signature, 2, 5, seed=0))
    assert report.status == NOT_APPLICABLE
    assert "right leg" in report.reason
    assert report.agreements == 0
