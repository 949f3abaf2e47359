import numpy as np
import pytest

from anyonkit.pauli import PauliOperator
from anyonkit.toric import (
    TorusCode, classify_error, code_parameters, einarsson_check, flat_z_configuration_state,
    homology, minimum_distance, string_operator, syndrome,
)


@pytest.mark.parametrize("k", range(2, 9))
def test_code_parameters(k):
    assert code_parameters(TorusCode(k)) == (2 * k * k, 2 * k * k - 2, 4)


@pytest.mark.parametrize("k", range(2, 9))
def test_anyon_phase(k):
    assert einarsson_check(TorusCode(k)) == -1


@pytest.mark.parametrize("k", [2, 3])
def test_distance_exhaustive(k):
    res = minimum_distance(TorusCode(k))
    assert res.distance == k
    assert classify_error(TorusCode(k), res.witness) == "logical"


def test_distance_split_search_k4():
    assert minimum_distance(TorusCode(4), mode="split").distance == 4


def test_stabilizers_commute_and_logicals_anticommute_in_pairs():
    code = TorusCode(3)
    S = code.stabilizers()
    assert all(a.commutes_with(b) for a in S for b in S)
    L = code.logicals()
    assert all(s.commutes_with(l) for s in S for l in L.values())
    assert not L["X1"].commutes_with(L["Z1"]) and not L["X2"].commutes_with(L["Z2"])
    assert L["X1"].commutes_with(L["Z2"]) and L["X2"].commutes_with(L["Z1"])


def test_error_classification():
    code = TorusCode(3)
    assert classify_error(code, PauliOperator.single(code.n, 0, "Z")) == "detectable"
    assert classify_error(code, code.face_stabilizers()[4]) == "stabilizer"
    assert classify_error(code, code.logicals()["Z2"]) == "logical"
    with pytest.raises(ValueError):
        homology(code, PauliOperator.single(code.n, 0, "X"))


def test_string_operator_creates_defects_at_its_ends():
    code = TorusCode(4)
    path = [code.h(1, 0), code.h(1, 1), code.h(1, 2)]
    s = syndrome(code, string_operator(code, path, "z"))
    assert s.violated_vertices == {code.site(1, 0), code.site(1, 3)} and not s.violated_faces
    with pytest.raises(ValueError):
        string_operator(code, [code.h(0, 0), code.h(2, 2)], "z")


def test_protected_space_is_four_dimensional_on_small_torus():
    code = TorusCode(2)
    states = np.array([flat_z_configuration_state(code, a, b) for a in (0, 1) for b in (0, 1)])
    assert np.allclose(states @ states.conj().T, np.eye(4))
    for S in code.stabilizers():
        M = S.to_matrix()
        assert np.allclose(M @ states.T, states.T)


def test_size_caps():
    with pytest.raises(ValueError):
        TorusCode(1)
    with pytest.raises(ValueError):
        TorusCode(32)
