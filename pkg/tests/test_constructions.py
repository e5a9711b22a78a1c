import numpy as np
import pytest

from ccsim import analysis as A, constructions as K, gates as G, statevector as sv
from ccsim.circuit import INPUT, ZERO, Circuit, depth, layer_decomposition
from ccsim.errors import CircuitError, DomainError

from conftest import random_circuit


def _bits(v, n):
    return tuple(int(c) for c in format(v, f"0{n}b")) if n else ()


@pytest.mark.parametrize("b", range(1, 7))
def test_or_reduction_semantics(b):
    m = K.or_width(b)
    assert m == int(np.ceil(np.log2(b + 1)))
    for c in (K.or_reduction_noncommuting(b), K.or_reduction_commuting(b)):
        for v in range(1 << b):
            p = sv.output_distribution(c, _bits(v, b))["0" * m]
            assert p == pytest.approx(1.0 if v == 0 else 0.0, abs=1e-9)


def test_or_reduction_shape():
    mid = K.or_reduction_middle(3)
    assert len(mid.gates) == 6 and all(g.kind == "CR" for g in mid.gates)
    com = K.or_reduction_commuting(3)
    assert len(com.gates) == 6 and all(g.kind == "U" for g in com.gates)
    assert A.check_c_local(com, 2).ok
    assert all(len(A.gate_support(g)) == 2 for g in com.gates)


@pytest.mark.parametrize("b", range(1, 6))
def test_or_variants_same_unitary(b):
    u1 = sv.circuit_unitary(K.or_reduction_noncommuting(b))
    u2 = sv.circuit_unitary(K.or_reduction_commuting(b))
    assert np.max(np.abs(u1 - u2)) <= 1e-9


@pytest.mark.parametrize("variant", ["cz", "cnot"])
@pytest.mark.parametrize("elementary", [True, False])
def test_teleport_gadget(variant, elementary):
    tp = K.teleport_gadget(elementary, variant)
    for prefix, bits, want in (([], (0,), {"0": 1.0}), ([], (1,), {"1": 1.0}),
                               ([G.h(0)], (0,), {"0": 0.5, "1": 0.5})):
        c = Circuit(3, prefix + list(tp.gates), tp.roles, tp.outputs, tp.postselect)
        d = sv.conditional_distribution(c, bits, {0: 0, 1: 0}, (2,))
        for k, v in want.items():
            assert d[k] == pytest.approx(v, abs=1e-12)
        assert sv.condition_probability(sv.run(c, bits), {0: 0, 1: 0}) == pytest.approx(0.25)


def test_teleport_preserves_arbitrary_state():
    tp = K.teleport_gadget()
    prep = [G.h(0), G.t(0), G.h(0), G.p(0)]
    c = Circuit(3, prep + list(tp.gates), (ZERO,) * 3)
    st, prob = sv.postselected_state(c, (), {0: 0, 1: 0})
    ref = sv.run(Circuit(1, prep, (ZERO,))).amplitudes
    out = st.amplitudes.reshape(2, 2, 2)[0, 0, :]
    assert abs(abs(np.vdot(ref, out)) - 1) <= 1e-12


def test_small_example_counts():
    cc = K.compress_depth3(K.small_example())
    assert cc.b == 6 and len(cc.postselection_qubits) == 7
    assert depth(cc.circuit) == 3
    assert [len(layer) for layer in cc.layers] == [3, 2, 3]


def _check_compression(c, cc, tol=1e-9):
    a = cc.circuit
    n_in = c.n_inputs
    for v in range(1 << n_in):
        x = _bits(v, n_in)
        st = sv.run(a, x)
        tq = {q: 0 for q in cc.teleport_qubits}
        assert sv.condition_probability(st, tq) == pytest.approx(2.0 ** -cc.b, abs=tol)
        got = sv.conditional_distribution(a, x, tq, a.outputs + a.postselect[:len(c.postselect)])
        want = sv.output_distribution(c, x, c.outputs + c.postselect)
        assert sv.max_abs_difference(got, want) <= tol


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("trailing", [True, False])
def test_compression_random(seed, trailing):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, 3, int(rng.integers(1, 5)), n_inputs=2, outputs=(0,), postselect=(1,))
    cc = K.compress_depth3(c, teleport_measured=trailing)
    assert depth(cc.circuit) <= 3
    _check_compression(c, cc)


def test_compression_rejects_wide_gates():
    c = Circuit(3, [G.composite((0, 1, 2), np.eye(8))], (INPUT,) * 3, (0,))
    with pytest.raises(CircuitError):
        K.compress_depth3(c)


def test_compression_layers_structure():
    rng = np.random.default_rng(3)
    c = random_circuit(rng, 3, 4, outputs=(0,), postselect=(1,))
    cc = K.compress_depth3(c)
    gates = cc.circuit.gates
    assert all(gates[i].label == "tp1" for i in cc.layers[0])
    assert all(gates[i].label == "tp2" for i in cc.layers[2])


def _toy_a():
    return K.compress_depth3(K.small_example()).circuit


def test_build_en_identities():
    a = _toy_a()
    lay = K.en_layout(a)
    assert lay.b == 6 and lay.m == 3
    e = K.build_En(a)
    e_short = K.build_En(a, include_inverse=False)
    for v in range(4):
        x = _bits(v, 2)
        de = sv.output_distribution(e, x, lay.outputs)
        ds = sv.output_distribution(e_short, x, lay.outputs)
        da = sv.output_distribution(a, x, lay.postselect + (lay.q_out,))
        z = "0" * (lay.b + 1)
        assert de["000" + "1"] == pytest.approx(da[z + "1"], abs=1e-9)
        assert de["000" + "0"] == pytest.approx(da[z + "0"], abs=1e-9)
        assert sv.max_abs_difference(de, ds) <= 1e-9


def test_en_small_b_sizes():
    a = Circuit(4, [G.h(0)], (INPUT, ZERO, ZERO, ZERO), outputs=(3,), postselect=(0, 1, 2))
    e = K.build_En(a)
    assert len(e.outputs) == 3  # b=2 -> m=2, plus the flag
    with pytest.raises(CircuitError):
        K.build_En(Circuit(2, [], (INPUT, ZERO), outputs=(0,)))


def test_conjugated_circuit():
    a = _toy_a()
    com = K.build_commuting_En(a)
    assert A.check_pairwise_commuting(com).ok
    loc = A.check_c_local(com, 5)
    assert loc.ok and loc.max_size == 5
    assert not A.check_c_local(com, 4).ok
    e = K.build_En(a)
    lay = K.en_layout(a)
    for v in range(4):
        x = _bits(v, 2)
        assert sv.max_abs_difference(sv.output_distribution(com, x, lay.outputs),
                                     sv.output_distribution(e, x, lay.outputs)) <= 1e-9


def test_cnot_gadget_breaks_five_locality():
    # the textbook gadget gives the same conditional semantics but wider light cones
    cc = K.compress_depth3(K.small_example(), variant="cnot")
    loc = A.check_c_local(K.build_commuting_En(cc.circuit), 5)
    assert loc.max_size > 5


def test_nine_qubit_bound_random():
    rng = np.random.default_rng(11)
    for _ in range(5):
        c = random_circuit(rng, 3, 3, n_inputs=2, outputs=(0,), postselect=(1,))
        a = K.compress_depth3(c, variant="cnot").circuit
        if a.n_qubits > 12:
            continue
        assert A.check_c_local(K.build_commuting_En(a), 9).ok


def test_magic_state_and_compile():
    phi = K.magic_state()
    assert np.allclose(phi, (1 / np.sqrt(2), np.exp(1j * np.pi / 4) / np.sqrt(2)))
    c = Circuit(1, [G.h(0), G.t(0)], (ZERO,), outputs=(0,))
    mc = K.magic_compile(c)
    st, prob = sv.postselected_state(mc.circuit, (), {q: 0 for q in mc.gadget_qubits})
    assert prob == pytest.approx(0.5, abs=1e-12)
    out = st.amplitudes.reshape(2, 2)[:, 0]
    assert abs(abs(np.vdot(np.array(phi), out)) - 1) <= 1e-9
    with pytest.raises(DomainError):
        K.magic_compile(Circuit(1, [G.r(0, 4)], (ZERO,)))


@pytest.mark.parametrize("seed", range(6))
def test_magic_compile_random(seed):
    rng = np.random.default_rng(seed)
    kinds = ("H", "P", "CZ", "CNOT", "T")
    c = random_circuit(rng, 3, 8, kinds=kinds, n_inputs=2, outputs=(0, 2))
    n_t = sum(g.kind == "R" and g.level == 3 for g in c.gates)
    if n_t > 3:
        pytest.skip("too many T gates for this check")
    mc = K.magic_compile(c)
    for v in range(4):
        x = _bits(v, 2)
        cond = {q: 0 for q in mc.gadget_qubits}
        assert sv.condition_probability(sv.run(mc.circuit, x), cond) == pytest.approx(0.5 ** n_t)
        got = sv.conditional_distribution(mc.circuit, x, cond, c.outputs)
        assert sv.max_abs_difference(got, sv.output_distribution(c, x, c.outputs)) <= 1e-9


def test_en_prime():
    a = Circuit(4, [G.h(0), G.cnot(0, 1)], (INPUT, ZERO, ZERO, ZERO), outputs=(3,), postselect=(0, 1, 2))
    e = K.build_En_prime(a)
    assert len(e.outputs) == 3
    orr = K.or_reduction_noncommuting(3)
    assert len(e.gates) == len(a.gates) + 1 + len(orr.gates)
    ef = K.build_En_prime_fanout(a)
    lay = K.en_layout(a)
    for v in range(2):
        d1 = sv.output_distribution(e, (v,), lay.outputs)
        d2 = sv.output_distribution(ef, (v,), lay.outputs)
        assert sv.max_abs_difference(d1, d2) <= 1e-9


def test_fanout():
    base = Circuit(4, [], (INPUT, ZERO, ZERO, ZERO))
    f = K.fanout(0, [1, 2, 3], base)
    assert [g.kind for g in f.gates] == ["CNOT"] * 3 and {g.qubits[0] for g in f.gates} == {0}
    with pytest.raises(CircuitError):
        K.fanout(1, [0], Circuit(2, [], (INPUT, INPUT)))


@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_fanout_decomposition(b):
    mid = K.or_reduction_middle(b)
    dec = K.decompose_fanout_or(mid)
    c = dec.circuit
    n0, n = dec.original_qubits, c.n_qubits
    u_mid = sv.circuit_unitary(mid)
    for v in range(1 << n0 if n <= 16 else 0):
        # ancillas start in |0>; they must end there too
        amps = np.zeros(1 << n, dtype=complex)
        amps[v << (n - n0)] = 1
        st = sv.StateVector(n, amps)
        st = sv.apply(c, st)
        out = st.amplitudes.reshape(1 << n0, 1 << (n - n0))
        assert n == n0 or np.max(np.abs(out[:, 1:])) <= 1e-9
        assert np.max(np.abs(out[:, 0] - u_mid[:, v])) <= 1e-9
    audit = A.nonclifford_layer_audit(c)
    if b == 1:
        # a single level-1 controlled phase is CZ, which is Clifford
        assert audit.nonclifford_layers == []
        return
    assert audit.ok
    layers = layer_decomposition(c)
    assert sorted(layers[audit.nonclifford_layers[0]]) == list(dec.phase_gates)
