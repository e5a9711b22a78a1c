"""Gate values and their matrices.

Elementary gates are ``H``, the phase shift ``R(sign * 2pi / 2**level)`` and
``CZ``. ``X``, ``CNOT`` and the controlled phase ``CR`` are derived: each has a
fixed expansion into elementary gates (:func:`expand`). ``Z``, ``P`` and the
T gate are plain ``R`` gates at levels 1, 2 and 3. ``U`` wraps an explicit
unitary on up to ``config.COMPOSITE_ARITY`` qubits.

Matrices use big-endian order over ``gate.qubits``: the first listed qubit is
the most significant bit of the row index.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import CircuitError
from .phase import DyadicPhase

ELEMENTARY = frozenset({"H", "R", "CZ"})
DERIVED = frozenset({"X", "CNOT", "CR"})
KINDS = ELEMENTARY | DERIVED | {"U"}
_ARITY = {"H": 1, "R": 1, "X": 1, "CZ": 2, "CNOT": 2, "CR": 2}

_S2 = 1 / np.sqrt(2)
H_MATRIX = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)
CNOT_MATRIX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    sign: int = 1
    level: int = 0
    # row-major tuple-of-tuples so gates stay hashable and compare exactly
    matrix: tuple[tuple[complex, ...], ...] | None = None
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"duplicate qubit in {self.kind}{self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.kind}{self.qubits}")
        if self.kind == "U":
            if self.matrix is None:
                raise CircuitError("composite gate needs a matrix")
            k = len(self.qubits)
            if not 1 <= k <= config.COMPOSITE_ARITY:
                raise CircuitError(
                    f"composite arity {k} outside [1, {config.COMPOSITE_ARITY}]")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (1 << k, 1 << k):
                raise CircuitError(f"composite on {k} qubits needs a {1 << k}x{1 << k} matrix")
            resid = np.max(np.abs(m.conj().T @ m - np.eye(1 << k)))
            if resid > 1e-9:
                raise CircuitError(f"composite matrix not unitary (residual {resid:.2e})")
        else:
            if len(self.qubits) != _ARITY[self.kind]:
                raise CircuitError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        if self.kind in ("R", "CR"):
            if self.sign not in (1, -1):
                raise CircuitError(f"phase sign must be +-1, got {self.sign}")
            if not 0 <= self.level <= config.MAX_LEVEL:
                raise CircuitError(f"phase level {self.level} outside [0, {config.MAX_LEVEL}]")

    @property
    def phase(self) -> DyadicPhase:
        return DyadicPhase.from_level(self.sign, self.level)

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def is_elementary(self) -> bool:
        return self.kind in ELEMENTARY

    def relabel(self, mapping) -> Gate:
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.sign,
                    self.level, self.matrix, self.label)

    def __str__(self) -> str:
        qs = ",".join(map(str, self.qubits))
        if self.kind in ("R", "CR"):
            return f"{self.kind}({'+' if self.sign > 0 else '-'}{self.level})[{qs}]"
        if self.kind == "U" and self.label:
            return f"U<{self.label}>[{qs}]"
        return f"{self.kind}[{qs}]"


# -- constructors ----------------------------------------------------------

def h(q):
    return Gate("H", (q,))


def r(q, level, sign=1):
    return Gate("R", (q,), sign=sign, level=level)


def z(q):
    return r(q, 1)


def p(q):
    return r(q, 2)


def pdg(q):
    return r(q, 2, -1)


def t(q):
    """R(pi/4)."""
    return r(q, 3)


def x(q):
    return Gate("X", (q,))


def cz(a, b):
    return Gate("CZ", (a, b))


def cnot(control, target):
    return Gate("CNOT", (control, target))


def cr(control, target, level, sign=1):
    """Controlled R(sign * 2pi / 2**level); level 1 is CZ."""
    return Gate("CR", (control, target), sign=sign, level=level)


def composite(qubits, matrix, label=None):
    m = np.asarray(matrix, dtype=complex)
    return Gate("U", tuple(qubits), matrix=_freeze(m), label=label)


def _freeze(m):
    return tuple(tuple(complex(v) for v in row) for row in m)


# -- semantics ----------------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def _cached_unitary(gate: Gate) -> np.ndarray:
    k = gate.kind
    if k == "H":
        m = H_MATRIX
    elif k == "R":
        m = np.diag([1, gate.phase.exp()]).astype(complex)
    elif k == "CZ":
        m = CZ_MATRIX
    elif k == "X":
        m = X_MATRIX
    elif k == "CNOT":
        m = CNOT_MATRIX
    elif k == "CR":
        m = np.diag([1, 1, 1, gate.phase.exp()]).astype(complex)
    else:
        m = np.array(gate.matrix, dtype=complex)
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


def unitary_of(gate: Gate) -> np.ndarray:
    """Dense matrix of ``gate`` over its own qubits (read-only array)."""
    return _cached_unitary(gate)


def adjoint(gate: Gate) -> Gate:
    if gate.kind in ("R", "CR"):
        return Gate(gate.kind, gate.qubits, sign=-gate.sign, level=gate.level)
    if gate.kind == "U":
        m = np.asarray(gate.matrix, dtype=complex).conj().T
        label = None if gate.label is None else (
            gate.label[:-1] if gate.label.endswith("'") else gate.label + "'")
        return Gate("U", gate.qubits, matrix=_freeze(m), label=label)
    return gate


def expand(gate: Gate) -> list[Gate]:
    """Elementary-gate expansion of a derived gate; elementary and composite gates map to themselves."""
    k = gate.kind
    if k == "X":
        (q,) = gate.qubits
        return [h(q), z(q), h(q)]
    if k == "CNOT":
        c, tg = gate.qubits
        return [h(tg), cz(c, tg), h(tg)]
    if k == "CR":
        c, tg = gate.qubits
        if gate.level == 0:
            return []
        if gate.level == 1:
            return [cz(c, tg)]
        # CR(a) = (R(a/2) x R(a/2)) . CNOT . (I x R(-a/2)) . CNOT, read right to left
        half = gate.level + 1
        if half > config.MAX_LEVEL:
            raise CircuitError(f"CR level {gate.level} cannot be halved within MAX_LEVEL")
        s = gate.sign
        return ([h(tg), cz(c, tg), h(tg), r(tg, half, -s)]
                + [h(tg), cz(c, tg), h(tg)]
                + [r(c, half, s), r(tg, half, s)])
    return [gate]


def is_diagonal(gate: Gate, tol: float = 1e-12) -> bool:
    if gate.kind in ("R", "CZ", "CR"):
        return True
    if gate.kind in ("H", "X", "CNOT"):
        return False
    m = unitary_of(gate)
    return bool(np.max(np.abs(m - np.diag(np.diag(m)))) <= tol)


def embed_matrix(matrix: np.ndarray, positions, n: int) -> np.ndarray:
    """Full 2**n matrix of ``matrix`` acting on ``positions`` (big-endian) of an n-qubit register."""
    k = len(positions)
    m = np.asarray(matrix, dtype=complex).reshape([2] * (2 * k))
    rest = [q for q in range(n) if q not in positions]
    eye = np.eye(1 << len(rest), dtype=complex).reshape([2] * (2 * len(rest)))
    full = np.tensordot(m, eye, axes=0)
    # axes are (out_pos..., in_pos..., out_rest..., in_rest...)
    order = list(positions) + rest
    out_axes = [None] * n
    in_axes = [None] * n
    for i, q in enumerate(order):
        src_out = i if i < k else 2 * k + (i - k)
        src_in = k + i if i < k else 2 * k + len(rest) + (i - k)
        out_axes[q] = src_out
        in_axes[q] = src_in
    return full.transpose(out_axes + in_axes).reshape(1 << n, 1 << n)
