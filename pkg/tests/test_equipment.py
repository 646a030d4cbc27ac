from __future__ import annotations

import pytest

from app.core.corpus import DOUBLE_CORPUS, builtin_double
from app.core.dblcat import hop
from app.core.equipment import (
    find_companions,
    find_conjoints,
    is_companion_pair,
    is_equipment,
    is_vertical_equivalence,
    vertical_isomorphism,
)


@pytest.mark.parametrize("name", ["1", "H2", "H3", "chaotic2", "SqI", "HSigmaI", "Z2"])
def test_equipments(name):
    assert is_equipment(builtin_double(name)).ok


@pytest.mark.parametrize(
    "name, missing",
    [("V2", "companion"), ("Vchaotic2", "companion"), ("H2xV2", "companion"), ("Sq2hop", "companion"), ("Sq2", "conjoint"), ("Sq3", "conjoint")],
)
def test_not_equipments(name, missing):
    check = is_equipment(builtin_double(name))
    assert not check.ok
    assert check.missing == missing
    assert check.vmor is not None


@pytest.mark.parametrize("name", DOUBLE_CORPUS)
def test_equipment_is_invariant_under_hop(name):
    A = builtin_double(name)
    assert is_equipment(A).ok == is_equipment(hop(A)).ok


def test_sq_of_walking_arrow_is_the_free_companion_pair():
    A = builtin_double("Sq2")
    assert len(find_companions(A, "f")) == 1
    assert find_conjoints(A, "f") == []
    assert len(find_conjoints(builtin_double("Sq2hop"), "f")) == 1


def test_every_vertical_of_sq_chaotic_has_one_companion_and_conjoint():
    A = builtin_double("SqI")
    for u in A.vmors:
        (pair,) = find_companions(A, u)
        assert pair.hmor == u
        assert is_companion_pair(A, pair)
        assert len(find_conjoints(A, u)) == 1


def test_identity_companions_in_horizontal_embedding():
    A = builtin_double("H2")
    for a in A.objects:
        (pair,) = find_companions(A, A.idv[a])
        assert pair.hmor == A.idh[a]
        assert pair.unit == pair.counit == A.esq[A.idh[a]]


def test_vertical_arrow_has_no_companion():
    A = builtin_double("V2")
    (u,) = [u for u, (a, b) in A.vmors.items() if a != b]
    assert find_companions(A, u) == []


def test_vertical_isomorphism_in_suspension():
    A = builtin_double("HSigmaI")
    assert vertical_isomorphism(A, "f", "g") is not None
    assert vertical_isomorphism(A, "f", "f") == A.esq["f"]


def test_vertical_equivalences():
    A = builtin_double("Vchaotic2")
    for u, (a, b) in A.vmors.items():
        eq = is_vertical_equivalence(A, u)
        assert eq is not None
        assert A.vmors[eq.inverse] == (b, a)
    V2 = builtin_double("V2")
    (u,) = [u for u, (a, b) in V2.vmors.items() if a != b]
    assert is_vertical_equivalence(V2, u) is None
