import numpy as np
import pytest

from anyonkit.pauli import PauliOperator, group_commutator


def random_pauli(rng, n):
    return PauliOperator(n, int(rng.integers(0, 2 ** n)), int(rng.integers(0, 2 ** n)),
                         int(rng.integers(0, 4)))


def test_product_matches_matrices():
    rng = np.random.default_rng(0)
    for _ in range(30):
        P, Q = random_pauli(rng, 3), random_pauli(rng, 3)
        assert np.allclose((P * Q).to_matrix(), P.to_matrix() @ Q.to_matrix())


def test_inverse_and_commutation_match_matrices():
    rng = np.random.default_rng(1)
    for _ in range(30):
        P, Q = random_pauli(rng, 3), random_pauli(rng, 3)
        assert np.allclose(P.inverse().to_matrix() @ P.to_matrix(), np.eye(8))
        commute = np.allclose(P.to_matrix() @ Q.to_matrix(), Q.to_matrix() @ P.to_matrix())
        assert P.commutes_with(Q) == commute


def test_y_label():
    Y = PauliOperator.from_label("Y")
    assert np.allclose(Y.to_matrix(), [[0, -1j], [1j, 0]])


def test_single_qubit_commutator_is_minus_one():
    X, Z = PauliOperator.from_label("X"), PauliOperator.from_label("Z")
    assert group_commutator(X, Z).scalar() == -1


def test_string_round_trip():
    rng = np.random.default_rng(2)
    for n in (1, 5, 18):
        P = random_pauli(rng, n)
        assert PauliOperator.from_string(P.to_string(), n) == P
    assert PauliOperator.from_label("XZ").to_string() == "i^0|1|2"


def test_errors():
    with pytest.raises(ValueError):
        PauliOperator.from_label("XQ")
    with pytest.raises(ValueError):
        PauliOperator(2, x=4)
    with pytest.raises(ValueError):
        PauliOperator.from_label("X") * PauliOperator.from_label("XX")
    with pytest.raises(ValueError):
        PauliOperator.from_label("X").scalar()
