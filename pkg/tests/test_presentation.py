from __future__ import annotations

import pytest

from app.core.corpus import builtin_double, builtin_functor
from app.core.errors import FormatError
from app.core.presentation import (
    check_shape_map,
    count_homs,
    double_functors,
    functor_as_map,
    has_hom,
    iter_homs,
    parse_expr,
    parse_presentation,
    postcompose,
    precompose,
    presentation_of,
    validate_inclusion,
    validate_presentation,
)
from app.core.shapes import ANODYNE_MAPS, GENERATING_COFIBRATIONS, builtin_inclusion, builtin_shape, shape_names


@pytest.mark.parametrize("name", shape_names())
def test_builtin_shapes_validate(name):
    assert validate_presentation(builtin_shape(name)).ok


@pytest.mark.parametrize("name", GENERATING_COFIBRATIONS + ANODYNE_MAPS)
def test_builtin_inclusions_validate(name):
    assert validate_inclusion(builtin_inclusion(name)).ok


@pytest.mark.parametrize(
    "shape, target, expected",
    [
        ("point", "H2", 2),
        ("H2", "H2", 3),
        ("V2", "H2", 2),
        ("V2", "V2", 3),
        ("chain3", "H2", 4),
        ("H2", "chaotic2", 4),
        ("empty", "H2", 1),
        ("Sq2", "SqI", 4),
    ],
)
def test_hom_counts(shape, target, expected):
    assert count_homs(builtin_shape(shape), builtin_double(target)) == expected


def test_no_companion_in_a_vertical_arrow():
    assert not has_hom(builtin_shape("Sq2"), builtin_double("V2"), allowed={("vmor", "u"): {"f"}})


def test_enumeration_is_deterministic():
    S, X = builtin_shape("chain3"), builtin_double("H3")
    first = [x.key() for x in iter_homs(S, X)]
    assert first == [x.key() for x in iter_homs(S, X)]
    assert len(first) == len(set(first))


@pytest.mark.parametrize(
    "source, target, expected",
    [("1", "chaotic2", 2), ("H2", "chaotic2", 4), ("chaotic2", "1", 1), ("H2", "H2", 3), ("1+1", "H2", 4)],
)
def test_double_functor_counts(source, target, expected):
    assert len(double_functors(builtin_double(source), builtin_double(target))) == expected


def test_canonical_presentation_recovers_functors():
    F = builtin_functor("H2->chaotic2")
    x = functor_as_map(F)
    assert check_shape_map(x)
    assert validate_presentation(presentation_of(F.source)).ok


def test_restriction_along_the_endpoint_inclusion():
    i = builtin_inclusion("i_hpoints")
    H2 = builtin_double("H2")
    (x,) = iter_homs(builtin_shape("H2"), H2, allowed={("hmor", "f"): {"f"}})
    y = precompose(x, i)
    assert y is not None
    assert y.assignment == {("obj", "0"): "0", ("obj", "1"): "1"}


def test_postcompose_lands_in_the_target():
    F = builtin_functor("H2->1")
    (x,) = iter_homs(builtin_shape("H2"), F.source, allowed={("hmor", "f"): {"f"}})
    y = postcompose(F, x)
    assert y.target is F.target
    assert check_shape_map(y)


def test_parse_presentation_with_relation():
    S = parse_presentation(
        """
        name: loop
        objects: a
        hmor: f: a -> a
        relation: h(f,f) = idh(a)
        """
    )
    assert validate_presentation(S).ok
    # both elements of Z2 square to the identity
    assert count_homs(S, builtin_double("1")) == 1
    assert count_homs(S, builtin_double("Z2")) == 2


def test_parse_expr_rejects_sort_errors():
    with pytest.raises(FormatError):
        parse_expr("h(a,f)", {"a": "obj", "f": "hmor"})
