from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.errors import NotDisjoint, NotNatural, RelationViolated
from app.core.presheaf import (
    NatTransf,
    Presheaf,
    boundary_weight,
    brute_force_matching,
    compatible_families,
    identity_transf,
    is_compatible_family,
    is_fiberwise_surjective,
    is_isomorphism,
    is_l_structure,
    matching_object,
    representable,
    terminal_presheaf,
    validate_nat_transf,
    validate_presheaf,
)
from app.core.signature import make_signature

GRAPH = make_signature(
    "reflexive_graph",
    ["O", "A", "I"],
    ["I"],
    [("s", "A", "O"), ("t", "A", "O"), ("i", "I", "A")],
    [("I", "i . s = i . t")],
)


def graph(vertices, edges, marked=(), name="g") -> Presheaf:
    """Edges are (source, target) pairs; `marked` lists edge indices carrying an I element."""
    carrier = {
        "O": [f"v{k}" for k in range(vertices)],
        "A": [f"e{k}" for k in range(len(edges))],
        "I": [f"m{k}" for k in range(len(marked))],
    }
    action = {}
    for k, (a, b) in enumerate(edges):
        action[("s", f"e{k}")] = f"v{a}"
        action[("t", f"e{k}")] = f"v{b}"
    for k, e in enumerate(marked):
        action[("i", f"m{k}")] = f"e{e}"
    return Presheaf.build(GRAPH, carrier, action, name=name)


@st.composite
def graphs(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=5))
    loops = [k for k, (a, b) in enumerate(edges) if a == b]
    marked = draw(st.lists(st.sampled_from(loops), unique=True)) if loops else []
    return graph(n, edges, marked)


def test_valid_graph_presheaf():
    X = graph(2, [(0, 0), (0, 1)], marked=[0])
    assert validate_presheaf(X).ok
    assert is_l_structure(X).ok
    assert X.fiber("A", ("v0", "v1")) == ("e1",)
    assert X.generating_family("m0") == ("e0",)


def test_relation_violation_is_reported():
    X = graph(2, [(0, 1)], marked=[0])
    report = validate_presheaf(X)
    assert report.first.code == "RelationViolated"
    with pytest.raises(RelationViolated):
        report.raise_if_failed()


def test_missing_action_is_reported():
    X = Presheaf.build(GRAPH, {"O": ["x"], "A": ["a"]}, {("s", "a"): "x"})
    report = validate_presheaf(X)
    assert not report.ok
    assert report.first.code == "ActionNotTotal"


def test_shared_element_names_are_rejected():
    X = Presheaf.build(GRAPH, {"O": ["x"], "A": ["x"]}, {})
    assert validate_presheaf(X).first.code == "NotDisjoint"
    with pytest.raises(NotDisjoint):
        validate_presheaf(X).raise_if_failed()


def test_duplicate_relation_elements_break_l_structure():
    X = graph(1, [(0, 0)], marked=[0, 0])
    check = is_l_structure(X)
    assert not check.ok
    assert check.kind == "I"


def test_matching_object_of_loops():
    X = graph(2, [(0, 0), (0, 1), (1, 1)])
    M = matching_object(X, "I")
    assert [str(w) for w in M.words] == ["i", "i.s"]
    assert set(M.families) == {("e0", "v0"), ("e2", "v1")}
    assert compatible_families(X, "I") == [("e0",), ("e2",)]
    assert is_compatible_family(X, "I", ("e0",))
    assert not is_compatible_family(X, "I", ("e1",))


def test_representable_and_boundary_weight():
    L = representable(GRAPH, "I")
    assert L.elements("I") == ("id_I",)
    assert L.elements("A") == ("i",)
    assert L.elements("O") == ("i.s",)
    dL = boundary_weight(GRAPH, "I")
    assert dL.elements("I") == ()
    assert validate_presheaf(L).ok and validate_presheaf(dL).ok


def test_terminal_presheaf_is_valid():
    T = terminal_presheaf(GRAPH)
    assert validate_presheaf(T).ok
    assert T.size() == 3


def test_identity_is_fiberwise_surjective_and_iso():
    X = graph(2, [(0, 0), (0, 1)], marked=[0])
    f = identity_transf(X)
    assert validate_nat_transf(f).ok
    assert is_isomorphism(f)
    assert is_fiberwise_surjective(f).ok


def test_collapse_is_not_fiberwise_surjective():
    # two vertices with an edge between them, mapped onto a single looped vertex
    X = graph(2, [(0, 1)])
    Y = graph(1, [(0, 0)], marked=[0])
    f = NatTransf(X, Y, {"v0": "v0", "v1": "v0", "e0": "e0"})
    assert validate_nat_transf(f).ok
    check = is_fiberwise_surjective(f)
    assert not check.ok
    # no edge v0 -> v0 upstairs covers the loop
    assert check.kind == "A"


def test_non_natural_map_is_reported():
    X = graph(2, [(0, 1)])
    Y = graph(2, [(0, 1)])
    f = NatTransf(X, Y, {"v0": "v1", "v1": "v0", "e0": "e0"})
    assert validate_nat_transf(f).first.code == "NotNatural"
    with pytest.raises(NotNatural):
        validate_nat_transf(f).raise_if_failed()


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_matching_object_agrees_with_brute_force(X):
    assert validate_presheaf(X).ok
    for kind in GRAPH.kinds:
        assert set(matching_object(X, kind).families) == brute_force_matching(X, kind)


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_relabelling_is_an_isomorphism(X):
    Y, f = X.relabel(lambda e: f"{e}'")
    assert validate_presheaf(Y).ok
    assert validate_nat_transf(f).ok
    assert is_isomorphism(f)
    assert is_fiberwise_surjective(f).ok
