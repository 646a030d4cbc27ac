from __future__ import annotations

import pytest

from app.core.classify import is_surjective_equivalence, is_trivial_fibration
from app.core.corpus import (
    NERVE_COUNTEREXAMPLES,
    builtin_double,
    builtin_functor,
    builtin_span,
    category_functors,
    corpus_doubles,
    corpus_functors,
)
from app.core.errors import RelationViolated, UnknownBuiltin
from app.core.nerve import (
    DIAGRAM_NAMES,
    builtin_diagram,
    check_latching_table,
    cross_check,
    nerve,
    nerve_map,
    nerve_span,
    validate_diagram,
    validate_relations,
)
from app.core.presheaf import is_fiberwise_surjective, is_isomorphism, is_l_structure
from app.core.signature import builtin_signature, verbatim_signature
from app.core.textio import format_signature, load_signature, parse_signature


@pytest.mark.parametrize("name", DIAGRAM_NAMES)
def test_builtin_diagrams_validate(name):
    assert validate_diagram(builtin_diagram(name)).ok


def test_unknown_diagram():
    with pytest.raises(UnknownBuiltin):
        builtin_diagram("tricat")


def test_walking_arrow_nerve_counts():
    N = nerve(builtin_double("H2"), builtin_diagram("cat")).presheaf
    counts = {kind: len(N.elements(kind)) for kind in N.signature.kinds}
    assert counts == {"O": 2, "A": 3, "I'": 2, "T'": 4, "E'": 3}


@pytest.mark.parametrize("diagram", DIAGRAM_NAMES)
def test_nerve_of_the_point_is_terminal(diagram):
    N = nerve(builtin_double("1"), builtin_diagram(diagram)).presheaf
    assert all(len(N.elements(kind)) == 1 for kind in N.signature.kinds)


@pytest.mark.parametrize("name", ["H2", "V2", "Sq2", "SqI", "HSigmaI", "Z2chaotic"])
def test_nerves_are_l_structures(name):
    for diagram in ("cat", "dblcat"):
        N = nerve(builtin_double(name), builtin_diagram(diagram))
        assert is_l_structure(N.presheaf).ok


def test_nerve_map_of_an_identity_is_an_isomorphism():
    F = builtin_functor("id:SqI")
    assert is_isomorphism(nerve_map(F, builtin_diagram("dblcat")))


@pytest.mark.parametrize("name", ["SqI->1", "id:SqI", "id:H2"])
def test_trivial_fibrations_give_fiberwise_surjections(name):
    rho = nerve_map(builtin_functor(name), builtin_diagram("dblcat"))
    assert is_fiberwise_surjective(rho).ok


def test_equivalence_of_categories_gives_a_fiberwise_surjection():
    rho = nerve_map(builtin_functor("chaotic2->1"), builtin_diagram("cat"))
    assert is_fiberwise_surjective(rho).ok


def test_horizontal_identity_witnesses_are_not_lifted():
    # both loops are isomorphic to the unit but only the unit is a horizontal identity
    rho = nerve_map(builtin_functor("Z2chaotic->1"), builtin_diagram("dblcat"))
    check = is_fiberwise_surjective(rho)
    assert not check.ok
    assert check.kind == "I_hor'"


def test_non_fibration_is_not_fiberwise_surjective():
    rho = nerve_map(builtin_functor("V2->1"), builtin_diagram("dblcat"))
    assert not is_fiberwise_surjective(rho).ok


def test_nerve_span_feet():
    span = nerve_span(builtin_span("SqI->1"))
    M, N = span.feet()
    assert len(M.elements("O")) == 2
    assert len(N.elements("O")) == 1


@pytest.mark.parametrize("name", ["cat", "dblcat"])
def test_relations_hold_through_the_diagram(name):
    report = cross_check(builtin_signature(name), builtin_diagram(name), corpus_doubles())
    assert report.ok, report.as_dict()


def test_published_cat_relations_contain_a_degenerate_line():
    sig, unparseable = verbatim_signature("cat")
    report = cross_check(sig, builtin_diagram("cat"), corpus_doubles(), unparseable)
    assert report.degenerate
    assert not report.ok
    assert report.as_dict()["ok"] is False


def test_latching_table_over_the_corpus():
    report = check_latching_table(builtin_diagram("dblcat"), [builtin_double(n) for n in ("H2", "V2", "SqI", "Z2")])
    assert report.ok, report.mismatches
    assert {row["kind"] for row in report.rows} == {"O", "H", "V", "S", "E'"}
    for row in report.rows:
        assert row["carrier"] == row["homs_codomain"]
        assert row["matching"] == row["homs_domain"]


def test_signature_relations_are_checked_through_their_diagram():
    sig = builtin_signature("dblcat")
    assert validate_relations(sig).details["diagram"] == "dblcat"
    assert validate_relations(sig).ok
    wrong = parse_signature(format_signature(sig) + "  S: u . s = r . s\n")
    report = validate_relations(wrong)
    assert not report.ok
    assert report.first.code == "RelationViolated"
    assert "S: u . s = r . s" in report.first.message
    with pytest.raises(RelationViolated):
        report.raise_if_failed()


def test_signature_without_a_diagram_is_not_cross_checked(data_dir):
    report = validate_relations(load_signature(str(data_dir / "reflexive_graph.sig")))
    assert report.ok
    assert report.details["diagram"] is None


def test_every_corpus_trivial_fibration_has_a_fiberwise_surjective_nerve_map():
    D = builtin_diagram("dblcat")
    for F in corpus_functors():
        if F.name in NERVE_COUNTEREXAMPLES or not is_trivial_fibration(F).ok:
            continue
        assert is_fiberwise_surjective(nerve_map(F, D)).ok, F.name


def test_every_surjective_equivalence_has_a_fiberwise_surjective_cat_nerve_map():
    D = builtin_diagram("cat")
    for F in category_functors():
        if is_surjective_equivalence(F).ok:
            assert is_fiberwise_surjective(nerve_map(F, D)).ok, F.name
