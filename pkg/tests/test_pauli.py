import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccsim import constructions as K, gates as G, pauli, statevector as sv
from ccsim.circuit import INPUT, ZERO, Circuit, product
from ccsim.errors import DomainError
from ccsim.pauli import PauliString

from conftest import CLIFFORD, random_circuit, random_state

GENERATORS = [G.h(0), G.p(0), G.pdg(0), G.z(0), G.x(0), G.cz(0, 1), G.cnot(0, 1), G.cnot(1, 0),
              G.cr(0, 1, 1), G.r(1, 2, -1)]


def test_single_qubit_rules():
    H = G.h(0)
    assert str(pauli.conjugate(PauliString.parse("X"), H)) == "+Z"
    assert str(pauli.conjugate(PauliString.parse("Z"), H)) == "+X"
    # P^dag X P = -Y; P X P^dag = +Y
    assert str(pauli.conjugate(PauliString.parse("X"), G.p(0))) == "-Y"
    assert str(pauli.conjugate(PauliString.parse("X"), G.pdg(0))) == "+Y"
    assert str(pauli.conjugate(PauliString.parse("XI"), G.cz(0, 1))) == "+XZ"


@pytest.mark.parametrize("gate", GENERATORS)
def test_tables_match_matrices(gate, backend):
    u = G.embed_matrix(G.unitary_of(gate), list(gate.qubits), 2)
    for letters in itertools.product(range(4), repeat=2):
        p = PauliString(0, letters)
        q = pauli.conjugate(p, gate)
        assert np.allclose(q.matrix(), u.conj().T @ p.matrix() @ u, atol=1e-12)
        back = pauli.conjugate(q, G.adjoint(gate))
        assert back == p


def test_non_clifford_rejected():
    with pytest.raises(DomainError) as info:
        pauli.strong_sim(Circuit(1, [G.h(0), G.t(0)], (INPUT,), (0,)), (0,), "0")
    assert info.value.gate_index == 1


def test_expectation_examples():
    phi = K.magic_state()
    assert pauli.expectation_product(PauliString.parse("Z"), (0,), []) == 1
    assert pauli.expectation_product(PauliString.parse("Z"), (1,), []) == -1
    assert pauli.expectation_product(PauliString.parse("Z"), (), [phi]) == pytest.approx(0, abs=1e-15)
    assert pauli.expectation_product(PauliString.parse("X"), (), [phi]) == pytest.approx(np.cos(np.pi / 4))


def test_small_examples():
    assert pauli.strong_sim(Circuit(2, [], (INPUT, INPUT), (0, 1)), (1, 0), "10") == 1
    assert pauli.strong_sim(Circuit(1, [G.h(0)], (ZERO,), (0,)), (), "0") == pytest.approx(0.5)
    bell = Circuit(2, [G.h(0), G.cnot(0, 1)], (ZERO, ZERO), (0, 1))
    assert pauli.strong_sim_marginal(bell, (), (1,), "1") == pytest.approx(0.5)
    assert pauli.strong_sim_marginal(bell, (), (), "") == pytest.approx(1.0)
    res = pauli.strong_sim(Circuit(1, [G.h(0)], (ZERO,), (0,)), (), "0", audit=True)
    assert [v for _, v in res.terms] == pytest.approx([1.0, 0.0])


def _random_clifford_instance(rng):
    n_in = int(rng.integers(1, 4))
    n_anc = int(rng.integers(0, 4))
    n = n_in + n_anc
    roles = [INPUT] * n_in
    for _ in range(n_anc):
        roles.append([ZERO, product(K.magic_state()), product(random_state(rng))][int(rng.integers(3))])
    c = random_circuit(rng, n, int(rng.integers(0, 15)), kinds=CLIFFORD)
    l = int(rng.integers(1, min(3, n) + 1))
    outs = tuple(int(q) for q in rng.choice(n, l, replace=False))
    c = Circuit(n, c.gates, tuple(roles), outs)
    x = tuple(int(v) for v in rng.integers(0, 2, n_in))
    return c, x


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    c, x = _random_clifford_instance(rng)
    fast = pauli.strong_sim_distribution(c, x)
    slow = sv.output_distribution(c, x, c.outputs)
    assert sv.max_abs_difference(fast, slow) <= 1e-9
    assert fast.total() == pytest.approx(1.0, abs=1e-9)


def test_eight_qubit_instance_both_backends(backend):
    rng = np.random.default_rng(5)
    phi = product(K.magic_state())
    c = random_circuit(rng, 8, 40, kinds=CLIFFORD)
    c = Circuit(8, c.gates, (INPUT,) * 6 + (phi, phi), (1, 4, 7))
    x = (1, 0, 1, 1, 0, 0)
    assert sv.max_abs_difference(pauli.strong_sim_distribution(c, x),
                                 sv.output_distribution(c, x, c.outputs)) <= 1e-9
    for qs in ((0,), (2, 6)):
        assert sv.max_abs_difference(pauli.strong_sim_distribution(c, x, qs),
                                     sv.output_distribution(c, x, qs)) <= 1e-9


@pytest.mark.parametrize("l", [0, 1, 2, 3])
def test_projector_identity(l):
    proj = np.zeros((1 << l, 1 << l))
    proj[0, 0] = 1
    assert np.max(np.abs(pauli.projector_from_subsets(l) - proj)) <= 1e-12
