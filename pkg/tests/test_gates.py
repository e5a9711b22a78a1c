import numpy as np
import pytest

from ccsim import gates as G
from ccsim.circuit import Circuit, validate
from ccsim.errors import CircuitError
from ccsim.statevector import circuit_unitary

s = 1 / np.sqrt(2)


def test_elementary_matrices():
    assert np.allclose(G.unitary_of(G.h(0)), s * np.array([[1, 1], [1, -1]]))
    assert np.allclose(G.unitary_of(G.r(0, 1)), np.diag([1, -1]))
    assert np.allclose(G.unitary_of(G.cz(0, 1)), np.diag([1, 1, 1, -1]))
    assert np.allclose(G.unitary_of(G.t(0)), np.diag([1, np.exp(1j * np.pi / 4)]))
    assert np.allclose(G.unitary_of(G.p(0)), np.diag([1, 1j]))


def test_cnot_first_qubit_is_control():
    u = G.unitary_of(G.cnot(0, 1))
    assert np.allclose(u, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


@pytest.mark.parametrize("gate", [
    G.x(0), G.cnot(0, 1), G.cnot(1, 0), G.cr(0, 1, 2), G.cr(1, 0, 3, -1), G.cr(0, 1, 1),
    G.cr(0, 1, 0), G.cr(0, 1, 7), G.z(1), G.pdg(0),
])
def test_derived_expansion_matches(gate):
    expanded = Circuit(2, G.expand(gate))
    direct = G.embed_matrix(G.unitary_of(gate), list(gate.qubits), 2)
    assert np.max(np.abs(circuit_unitary(expanded) - direct)) <= 1e-12
    assert all(g.is_elementary for g in G.expand(gate))


def test_duplicate_qubit_rejected():
    with pytest.raises(CircuitError, match="duplicate qubit"):
        G.cz(2, 2)


def test_composite_validation():
    with pytest.raises(CircuitError):
        G.composite((0,), np.array([[1, 1], [0, 1]]))
    with pytest.raises(CircuitError):
        G.composite((0, 1), np.eye(2))
    with pytest.raises(CircuitError):
        G.composite(tuple(range(10)), np.eye(1 << 10))


def test_adjoint():
    assert G.adjoint(G.r(0, 3)) == G.r(0, 3, -1)
    assert G.adjoint(G.h(0)) == G.h(0)
    u = np.array([[1, 0], [0, 1j]])
    assert np.allclose(G.unitary_of(G.adjoint(G.composite((0,), u))), u.conj().T)


def test_gates_are_hashable_and_readonly():
    g = G.composite((0,), np.eye(2))
    assert hash(g) == hash(G.composite((0,), np.eye(2)))
    with pytest.raises(ValueError):
        G.unitary_of(g)[0, 0] = 2


def test_validate_reports_out_of_range():
    with pytest.raises(CircuitError):
        Circuit(2, [G.h(3)])
    assert validate(Circuit(2, [G.h(1)])) == []
