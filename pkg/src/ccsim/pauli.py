"""Strong simulation of Clifford circuits with product-state ancillas.

``Pr[C(x)=y]`` is written as ``2**-l * sum_S <psi_x| C^dag X_y Z(S) X_y C |psi_x>``
over the subsets ``S`` of the ``l`` measured qubits. Each ``X_y Z(S) X_y`` is
``(-1)**|S & y| Z(S)``, a signed Pauli string, and stays one under
conjugation by Clifford gates. All ``2**l`` strings are pushed backwards
through the gate list together, then evaluated against the product input
state one qubit at a time.

Letters are two-bit codes ``x | z << 1``: I=0, X=1, Z=2, Y=3. A string
carries ``i**phase`` in front of the tensor product of the letter matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config, kernels
from .circuit import Circuit
from .errors import ConsistencyError, DomainError, ResourceError
from .gates import Gate

LETTERS = "IXZY"
I, X, Z, Y = 0, 1, 2, 3

# single-qubit opcodes, conjugation G^dag P G
OP_H, OP_P, OP_PDG, OP_Z, OP_X = range(5)
# two-qubit opcodes follow
OP_CZ, OP_CNOT = 5, 6
N_ONE = 5

ONE_LETTER = np.array([
    [I, Z, X, Y],   # H
    [I, Y, Z, X],   # P
    [I, Y, Z, X],   # P^dag
    [I, X, Z, Y],   # Z
    [I, X, Z, Y],   # X
], dtype=np.uint8)
ONE_PHASE = np.array([
    [0, 0, 0, 2],   # H:  Y -> -Y
    [0, 2, 0, 0],   # P:  X -> -Y
    [0, 0, 0, 2],   # Pd: Y -> -X
    [0, 2, 0, 2],   # Z:  X -> -X, Y -> -Y
    [0, 0, 2, 2],   # X:  Z -> -Z, Y -> -Y
], dtype=np.uint8)
# indexed by 4 * letter(first) + letter(second)
TWO_CODE = np.array([
    [0, 9, 2, 11, 6, 15, 4, 13, 8, 1, 10, 3, 14, 7, 12, 5],    # CZ
    [0, 1, 10, 11, 5, 4, 15, 14, 8, 9, 2, 3, 13, 12, 7, 6],    # CNOT(first -> second)
], dtype=np.uint8)
TWO_PHASE = np.array([
    [0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 2, 0, 0],
    [0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 2],
], dtype=np.uint8)


@dataclass(frozen=True)
class PauliString:
    """``i**phase`` times a tensor product of I/X/Y/Z."""
    phase: int
    letters: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)
        object.__setattr__(self, "letters", tuple(int(v) for v in self.letters))

    @classmethod
    def parse(cls, text: str) -> PauliString:
        """``"+XZ"``, ``"-iYI"``, ``"ZZ"``."""
        phase = 0
        if text.startswith(("+", "-")):
            phase = 0 if text[0] == "+" else 2
            text = text[1:]
        if text.startswith("i"):
            phase += 1
            text = text[1:]
        return cls(phase, tuple(LETTERS.index(c) for c in text.replace("_", "I")))

    def __str__(self) -> str:
        sign = ("+", "+i", "-", "-i")[self.phase]
        return sign + "".join(LETTERS[v] for v in self.letters)

    def matrix(self) -> np.ndarray:
        mats = (np.eye(2), np.array([[0, 1], [1, 0]]), np.diag([1, -1]),
                np.array([[0, -1j], [1j, 0]]))
        out = np.ones((1, 1), dtype=complex)
        for v in self.letters:
            out = np.kron(out, mats[v])
        return (1j) ** self.phase * out


def clifford_ops(gate: Gate, index: int | None = None) -> list[tuple[int, int, int]]:
    """Opcode rows for ``gate``; raises :class:`DomainError` for non-Clifford gates."""
    k, qs = gate.kind, gate.qubits
    if k == "H":
        return [(OP_H, qs[0], 0)]
    if k == "X":
        return [(OP_X, qs[0], 0)]
    if k == "CZ":
        return [(OP_CZ, qs[0], qs[1])]
    if k == "CNOT":
        return [(OP_CNOT, qs[0], qs[1])]
    if k == "R":
        if gate.level == 0:
            return []
        if gate.level == 1:
            return [(OP_Z, qs[0], 0)]
        if gate.level == 2:
            return [(OP_P if gate.sign > 0 else OP_PDG, qs[0], 0)]
    if k == "CR":
        if gate.level == 0:
            return []
        if gate.level == 1:
            return [(OP_CZ, qs[0], qs[1])]
    where = "" if index is None else f" at index {index}"
    raise DomainError(f"gate {gate}{where} is not Clifford", index)


def is_clifford(gate: Gate) -> bool:
    try:
        clifford_ops(gate)
    except DomainError:
        return False
    return True


def _encode(gates: Sequence[Gate], reverse: bool) -> np.ndarray:
    rows = []
    seq = list(enumerate(gates))
    if reverse:
        seq.reverse()
    for i, g in seq:
        rows.extend(clifford_ops(g, i))
    return np.array(rows, dtype=np.int32).reshape(-1, 3)


def _sweep(letters: np.ndarray, phases: np.ndarray, gates: Sequence[Gate], reverse: bool = True):
    ops = _encode(gates, reverse)
    if len(ops):
        kernels.pauli_sweep(letters, phases, ops, ONE_LETTER, ONE_PHASE, TWO_CODE, TWO_PHASE)


def conjugate(p: PauliString, gate: Gate) -> PauliString:
    """``gate^dag p gate``, exactly."""
    letters = np.array([p.letters], dtype=np.uint8)
    phases = np.array([p.phase], dtype=np.uint8)
    _sweep(letters, phases, [gate], reverse=False)
    return PauliString(int(phases[0]), tuple(letters[0]))


def conjugate_circuit(p: PauliString, gates: Sequence[Gate]) -> PauliString:
    """``G_1^dag ... G_N^dag p G_N ... G_1`` for the gate list ``G_1 .. G_N``."""
    letters = np.array([p.letters], dtype=np.uint8)
    phases = np.array([p.phase], dtype=np.uint8)
    _sweep(letters, phases, gates, reverse=True)
    return PauliString(int(phases[0]), tuple(letters[0]))


def single_qubit_expectations(amps) -> np.ndarray:
    """``<psi|sigma|psi>`` for sigma in I, X, Z, Y (letter-code order)."""
    a, b = (complex(v) for v in amps)
    cross = a.conjugate() * b
    return np.array([abs(a) ** 2 + abs(b) ** 2, 2 * cross.real,
                     abs(a) ** 2 - abs(b) ** 2, 2 * cross.imag])


def _expectation_table(circuit: Circuit, input_bits) -> np.ndarray:
    bits = iter(int(b) for b in input_bits)
    rows = []
    for role in circuit.roles:
        if role.kind == "input":
            bit = next(bits)
            rows.append([1.0, 0.0, -1.0 if bit else 1.0, 0.0])
        else:
            rows.append(single_qubit_expectations(role.amplitudes()))
    return np.array(rows, dtype=float).reshape(len(rows), 4)


def expectation_product(p: PauliString, input_bits, ancillas, tol: float = 1e-12) -> float:
    """``<psi|p|psi>`` for ``psi = |x> (x) |a_1> (x) ... (x) |a_k>``.

    Raises :class:`ConsistencyError` if the value has an imaginary part above ``tol``.
    """
    states = [((0, 1) if int(b) else (1, 0)) for b in input_bits] + list(ancillas)
    if len(states) != len(p.letters):
        raise ValueError(f"{len(p.letters)} letters for {len(states)} qubits")
    val = complex((1j) ** p.phase)
    for v, amps in zip(p.letters, states):
        val *= single_qubit_expectations(amps)[v]
    if abs(val.imag) > tol:
        raise ConsistencyError(f"expectation of {p} has imaginary part {val.imag:.3e}")
    return float(val.real)


@dataclass
class StrongSimResult:
    probability: float
    terms: list[tuple[str, float]] | None = None


def _subset_strings(n: int, qubits: Sequence[int], y: str):
    l = len(qubits)
    masks = np.arange(1 << l, dtype=np.int64)
    letters = np.zeros((1 << l, n), dtype=np.uint8)
    ybits = int(y, 2) if l else 0
    for j, q in enumerate(qubits):
        bit = (masks >> (l - 1 - j)) & 1
        letters[:, q] = (Z * bit).astype(np.uint8)
    # X_y Z(S) X_y = (-1)^{|S & y|} Z(S)
    parity = np.array([bin(int(m) & ybits).count("1") & 1 for m in masks], dtype=np.uint8)
    phases = (2 * parity).astype(np.uint8)
    return masks, letters, phases


def _tree_sum(values: np.ndarray) -> float:
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        pairs = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            pairs.append(vals[-1])
        vals = pairs
    return float(vals[0])


def strong_sim_marginal(circuit: Circuit, input_bits, qubits: Sequence[int], y: str,
                        audit: bool = False, tol: float = 1e-12) -> float | StrongSimResult:
    """``Pr[measuring qubits gives y]`` for a Clifford circuit."""
    qubits = tuple(int(q) for q in qubits)
    y = "".join(str(int(c)) for c in y)
    if len(y) != len(qubits):
        raise ValueError(f"outcome {y!r} does not match {len(qubits)} qubits")
    if len(qubits) > config.MAX_OUTPUTS:
        raise ResourceError(f"{len(qubits)} measured qubits exceeds cap {config.MAX_OUTPUTS}")
    bits = tuple(int(b) for b in input_bits)
    if len(bits) != circuit.n_inputs:
        raise ValueError(f"expected {circuit.n_inputs} input bits, got {len(bits)}")
    ops = _encode(circuit.gates, reverse=True)
    masks, letters, phases = _subset_strings(circuit.n_qubits, qubits, y)
    if len(ops):
        kernels.pauli_sweep(letters, phases, ops, ONE_LETTER, ONE_PHASE, TWO_CODE, TWO_PHASE)
    table = _expectation_table(circuit, bits)
    n = circuit.n_qubits
    if n:
        per_qubit = table[np.arange(n)[None, :], letters]
        mags = np.prod(per_qubit, axis=1)
    else:
        mags = np.ones(len(masks))
    # i^phase: phases 1 and 3 would give imaginary terms
    odd = (phases & 1).astype(bool)
    if np.any(odd & (np.abs(mags) > tol)):
        bad = int(np.argmax(odd & (np.abs(mags) > tol)))
        raise ConsistencyError(
            f"subset term {bad} has imaginary coefficient (phase i^{phases[bad]})")
    signs = np.where(phases == 2, -1.0, 1.0)
    terms = np.where(odd, 0.0, signs * mags)
    prob = _tree_sum(terms) / (1 << len(qubits))
    if not audit:
        return prob
    l = len(qubits)
    labels = [format(int(m), f"0{l}b") if l else "" for m in masks]
    return StrongSimResult(prob, [(s, float(v)) for s, v in zip(labels, terms)])


def strong_sim(circuit: Circuit, input_bits, y: str, audit: bool = False):
    """``Pr[C(x) = y]`` over ``circuit.outputs``."""
    return strong_sim_marginal(circuit, input_bits, circuit.outputs, y, audit=audit)


def strong_sim_distribution(circuit: Circuit, input_bits, qubits: Sequence[int] | None = None):
    from .statevector import Distribution

    qs = tuple(circuit.outputs if qubits is None else qubits)
    l = len(qs)
    probs = {}
    for v in range(1 << l):
        y = format(v, f"0{l}b") if l else ""
        probs[y] = strong_sim_marginal(circuit, input_bits, qs, y)
    return Distribution(qs, probs)


def projector_from_subsets(l: int) -> np.ndarray:
    """Dense ``2**-l * sum_S Z(S)``, which equals ``|0^l><0^l|``."""
    zd = np.array([1.0, -1.0])
    total = np.zeros((1 << l, 1 << l))
    for mask in range(1 << l):
        diag = np.ones(1)
        for j in range(l):
            diag = np.kron(diag, zd if (mask >> (l - 1 - j)) & 1 else np.ones(2))
        total += np.diag(diag)
    return total / (1 << l)
