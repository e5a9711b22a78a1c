"""Dense statevector simulation: the ground truth every other route is checked against.

Bitstrings are big-endian over the listed qubits: ``"01"`` for qubits
``(3, 5)`` means qubit 3 reads 0 and qubit 5 reads 1.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import config, kernels
from .circuit import Circuit
from .errors import CircuitError, ResourceError, UnconditionableError
from .gates import Gate, unitary_of


@dataclass(frozen=True)
class Distribution:
    qubits: tuple[int, ...]
    probs: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "probs", dict(self.probs))

    def __getitem__(self, bits: str) -> float:
        return self.probs.get(bits, 0.0)

    def support(self, threshold: float = 0.0) -> dict[str, float]:
        return {k: v for k, v in self.probs.items() if v > threshold}

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(1 << len(self.qubits))
        for k, v in self.probs.items():
            vec[int(k, 2) if k else 0] = v
        return vec

    @classmethod
    def from_vector(cls, qubits, vec) -> Distribution:
        width = len(qubits)
        return cls(tuple(qubits), {format(i, f"0{width}b") if width else "": float(p)
                                   for i, p in enumerate(vec)})

    def to_json(self) -> dict:
        return {"outcomes": dict(sorted(self.probs.items())), "qubits": list(self.qubits)}

    @classmethod
    def from_json(cls, obj) -> Distribution:
        return cls(tuple(obj.get("qubits", ())), {k: float(v) for k, v in obj["outcomes"].items()})

    def table(self, threshold: float = 0.0) -> str:
        rows = [(k, v) for k, v in sorted(self.probs.items()) if v > threshold]
        width = max([len("outcome")] + [len(k) for k, _ in rows])
        lines = [f"{'outcome':<{width}}  probability"]
        lines += [f"{k:<{width}}  {v:.12f}" for k, v in rows]
        return "\n".join(lines)


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())


def _check_cap(n: int, cap: int | None):
    cap = config.MAX_QUBITS if cap is None else cap
    if n > cap:
        raise ResourceError(f"{n} qubits exceeds the dense simulation cap of {cap}")


def _bits_tuple(bits) -> tuple[int, ...]:
    if isinstance(bits, str):
        return tuple(int(c) for c in bits)
    return tuple(int(b) for b in bits)


def prepare(circuit: Circuit, input_bits=(), cap: int | None = None) -> StateVector:
    """Product state: |x_i> on inputs, |0> on zero ancillas, the given state on product ancillas."""
    _check_cap(circuit.n_qubits, cap)
    bits = _bits_tuple(input_bits)
    if len(bits) != circuit.n_inputs:
        raise CircuitError(f"expected {circuit.n_inputs} input bits, got {len(bits)}")
    it = iter(bits)
    psi = np.ones(1, dtype=complex)
    for role in circuit.roles:
        bit = next(it) if role.kind == "input" else 0
        psi = np.kron(psi, np.asarray(role.amplitudes(bit), dtype=complex))
    return StateVector(circuit.n_qubits, psi)


def apply_gate(state: StateVector, gate: Gate) -> None:
    qs = np.asarray(gate.qubits, dtype=np.int64)
    m = unitary_of(gate)
    if gate.kind in ("R", "CZ", "CR"):
        kernels.apply_diagonal(state.amplitudes, state.n_qubits, qs,
                               np.ascontiguousarray(np.diag(m)))
    else:
        kernels.apply_matrix(state.amplitudes, state.n_qubits, qs, np.ascontiguousarray(m))


def apply(circuit: Circuit, state: StateVector, check_norm: bool = True,
          tol: float | None = None) -> StateVector:
    """Run ``circuit`` on a copy of ``state``."""
    if state.n_qubits != circuit.n_qubits:
        raise CircuitError("state and circuit sizes differ")
    out = state.copy()
    tol = config.tol(tol)
    for i, g in enumerate(circuit.gates):
        apply_gate(out, g)
        if check_norm:
            drift = abs(out.norm_squared() - 1)
            if drift > tol:
                raise ArithmeticError(f"norm drifted by {drift:.3e} after gate {i} ({g})")
    return out


def run(circuit: Circuit, input_bits=(), cap: int | None = None, check_norm: bool = True) -> StateVector:
    return apply(circuit, prepare(circuit, input_bits, cap), check_norm=check_norm)


def probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Marginal probability vector over ``qubits`` (big-endian index)."""
    n = state.n_qubits
    p = (np.abs(state.amplitudes) ** 2).reshape([2] * n) if n else np.abs(state.amplitudes) ** 2
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise CircuitError("duplicate qubit in measured subset")
    rest = tuple(q for q in range(n) if q not in qubits)
    marg = p.sum(axis=rest) if rest else p
    # remaining axes are in ascending qubit order; permute to requested order
    remaining = sorted(qubits)
    marg = np.transpose(marg, [remaining.index(q) for q in qubits]) if qubits else marg
    return np.asarray(marg).reshape(-1)


def output_distribution(circuit: Circuit, input_bits=(), qubits: Sequence[int] | None = None,
                        cap: int | None = None) -> Distribution:
    qs = tuple(circuit.outputs if qubits is None else qubits)
    state = run(circuit, input_bits, cap)
    return Distribution.from_vector(qs, probabilities(state, qs))


def state_distribution(state: StateVector, qubits: Sequence[int]) -> Distribution:
    return Distribution.from_vector(tuple(qubits), probabilities(state, qubits))


def condition_probability(state: StateVector, condition: Mapping[int, int]) -> float:
    qs = list(condition)
    vec = probabilities(state, qs)
    idx = int("".join(str(condition[q]) for q in qs), 2) if qs else 0
    return float(vec[idx])


def project(state: StateVector, condition: Mapping[int, int]) -> tuple[StateVector, float]:
    """Unnormalized projection onto ``condition`` and its probability."""
    n = state.n_qubits
    psi = state.amplitudes.reshape([2] * n).copy()
    for q, bit in condition.items():
        sl = [slice(None)] * n
        sl[q] = 1 - int(bit)
        psi[tuple(sl)] = 0
    psi = psi.reshape(-1)
    return StateVector(n, psi), float(np.vdot(psi, psi).real)


def conditional_distribution(circuit: Circuit, input_bits, condition: Mapping[int, int] | tuple,
                             target: Sequence[int], cap: int | None = None,
                             min_probability: float = 0.0) -> Distribution:
    """Distribution over ``target`` given that the ``condition`` qubits read the given bits.

    ``condition`` is a ``{qubit: bit}`` map or a ``(qubits, bitstring)`` pair.
    Raises :class:`UnconditionableError` when the condition has probability
    ``<= min_probability``.
    """
    cond = _condition_map(condition)
    state = run(circuit, input_bits, cap)
    projected, prob = project(state, cond)
    if prob <= min_probability:
        raise UnconditionableError(prob)
    vec = probabilities(projected, target) / prob
    return Distribution.from_vector(tuple(target), vec)


def _condition_map(condition) -> dict[int, int]:
    if isinstance(condition, Mapping):
        return {int(q): int(b) for q, b in condition.items()}
    qubits, bits = condition
    bits = _bits_tuple(bits)
    if len(bits) != len(qubits):
        raise CircuitError("condition qubits and bits differ in length")
    return dict(zip((int(q) for q in qubits), bits))


def postselected_state(circuit: Circuit, input_bits, condition) -> tuple[StateVector, float]:
    """Normalized state after projecting ``condition``, plus its probability."""
    cond = _condition_map(condition)
    state = run(circuit, input_bits)
    projected, prob = project(state, cond)
    if prob <= 0:
        raise UnconditionableError(prob)
    projected.amplitudes /= np.sqrt(prob)
    return projected, prob


def circuit_unitary(circuit: Circuit, cap: int = 12) -> np.ndarray:
    """Full ``2**n`` unitary, built column-batched with numpy (independent of the kernels)."""
    n = circuit.n_qubits
    if n > cap:
        raise ResourceError(f"unitary of {n} qubits exceeds cap {cap}")
    dim = 1 << n
    u = np.eye(dim, dtype=complex).reshape([2] * n + [dim])
    for g in circuit.gates:
        k = g.arity
        m = unitary_of(g).reshape([2] * (2 * k))
        axes = list(g.qubits)
        u = np.tensordot(m, u, axes=(list(range(k, 2 * k)), axes))
        u = np.moveaxis(u, list(range(k)), axes)
    return u.reshape(dim, dim)


# -- sampling ----------------------------------------------------------------------

def sample(distribution: Distribution, seed, shots: int) -> Counter:
    """Seeded multinomial draw; identical ``seed`` gives identical counts."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    keys = sorted(distribution.probs)
    p = np.clip(np.array([distribution.probs[k] for k in keys], dtype=float), 0, None)
    p /= p.sum()
    draws = rng.choice(len(keys), size=shots, p=p)
    counts = np.bincount(draws, minlength=len(keys))
    return Counter({keys[i]: int(c) for i, c in enumerate(counts) if c})


def empirical(counts: Mapping[str, int], qubits=()) -> Distribution:
    total = sum(counts.values())
    return Distribution(tuple(qubits), {k: v / total for k, v in counts.items()})


def total_variation(d1, d2) -> float:
    """Half the L1 distance over the union of supports."""
    a = d1.probs if isinstance(d1, Distribution) else d1
    b = d2.probs if isinstance(d2, Distribution) else d2
    keys = set(a) | set(b)
    return 0.5 * float(sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys))


def max_abs_difference(d1, d2) -> float:
    a = d1.probs if isinstance(d1, Distribution) else d1
    b = d2.probs if isinstance(d2, Distribution) else d2
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys), default=0.0)


def load_distribution(path) -> Distribution:
    with open(path, encoding="utf-8") as fh:
        return Distribution.from_json(json.load(fh))
