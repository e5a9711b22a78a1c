"""Numerical certification passes: gate supports, pairwise commutation, c-locality."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config, gates as G
from .circuit import Circuit, layer_decomposition
from .errors import ResourceError


@dataclass(frozen=True)
class SupportSet:
    qubits: tuple[int, ...]
    restricted: np.ndarray = field(repr=False, compare=False)
    phase: complex = 1.0
    residual: float = 0.0

    def __len__(self):
        return len(self.qubits)


def _nqubits(dim: int) -> int:
    k = dim.bit_length() - 1
    if 1 << k != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return k


def qubit_is_trivial(u: np.ndarray, q: int, tol: float) -> bool:
    """True iff ``u`` commutes with X and Z on qubit ``q`` (acts as identity there)."""
    k = _nqubits(u.shape[0])
    t = u.reshape([2] * (2 * k))
    # commuting with Z_q kills the blocks that flip q; with X_q makes the kept blocks equal
    off0 = np.take(np.take(t, 0, axis=q), 1, axis=k + q - 1)
    off1 = np.take(np.take(t, 1, axis=q), 0, axis=k + q - 1)
    d0 = np.take(np.take(t, 0, axis=q), 0, axis=k + q - 1)
    d1 = np.take(np.take(t, 1, axis=q), 1, axis=k + q - 1)
    worst = max(np.max(np.abs(off0), initial=0.0), np.max(np.abs(off1), initial=0.0),
                np.max(np.abs(d0 - d1), initial=0.0))
    return bool(worst <= tol)


def support(u, tol: float | None = None) -> SupportSet:
    """Minimal qubit set outside of which ``u`` is the identity, with ``u`` restricted to it.

    Qubit indices refer to positions in ``u``'s own big-endian ordering.
    """
    tol = config.tol(tol)
    u = np.asarray(u, dtype=complex)
    k = _nqubits(u.shape[0])
    keep = tuple(q for q in range(k) if not qubit_is_trivial(u, q, tol))
    t = u.reshape([2] * (2 * k))
    idx = tuple(slice(None) if q in keep else 0 for q in range(k)) * 2
    restricted = t[idx].reshape(1 << len(keep), 1 << len(keep))
    rebuilt = G.embed_matrix(restricted, list(keep), k) if keep else restricted[0, 0] * np.eye(1 << k)
    residual = float(np.max(np.abs(rebuilt - u))) if k else 0.0
    if residual > 2 * tol:
        raise ArithmeticError(f"support reconstruction residual {residual:.3e} above {2 * tol:.1e}")
    phase = complex(restricted[0, 0]) if not keep else 1.0
    return SupportSet(keep, restricted, phase, residual)


def gate_support(gate: G.Gate, tol: float | None = None) -> tuple[int, ...]:
    """Support of ``gate`` in register indices."""
    s = support(G.unitary_of(gate), tol)
    return tuple(gate.qubits[i] for i in s.qubits)


# -- commutation -------------------------------------------------------------------

@dataclass
class CommutationReport:
    ok: bool
    witness: tuple[int, int] | None = None
    witness_residual: float = 0.0
    max_residual: float = 0.0
    pairs_checked: int = 0
    tol: float = 1e-9

    def to_json(self) -> dict:
        return {"pass": self.ok, "witness": list(self.witness) if self.witness else None,
                "witness_residual": self.witness_residual, "max_residual": self.max_residual,
                "pairs_checked": self.pairs_checked, "tol": self.tol}


def _apply_left(op: np.ndarray, positions, mat: np.ndarray, n: int) -> np.ndarray:
    """(op on positions) @ mat, for a 2**n x 2**n ``mat``."""
    k = len(positions)
    dim = 1 << n
    t = mat.reshape([2] * n + [dim])
    o = op.reshape([2] * (2 * k))
    t = np.tensordot(o, t, axes=(list(range(k, 2 * k)), list(positions)))
    t = np.moveaxis(t, list(range(k)), list(positions))
    return t.reshape(dim, dim)


def commutator_residual(g1: G.Gate, g2: G.Gate, cap: int = 12) -> float:
    """max |[U1, U2]| entry, computed on the union of the two gates' qubits."""
    union = sorted(set(g1.qubits) | set(g2.qubits))
    if not set(g1.qubits) & set(g2.qubits):
        return 0.0
    if len(union) > cap:
        raise ResourceError(f"joint support of {g1} and {g2} has {len(union)} qubits (cap {cap})")
    local = {q: i for i, q in enumerate(union)}
    n = len(union)
    p1 = [local[q] for q in g1.qubits]
    p2 = [local[q] for q in g2.qubits]
    u1, u2 = G.unitary_of(g1), G.unitary_of(g2)
    e2 = G.embed_matrix(u2, p2, n)
    e1 = G.embed_matrix(u1, p1, n)
    comm = _apply_left(u1, p1, e2, n) - _apply_left(u2, p2, e1, n)
    return float(np.max(np.abs(comm)))


def check_pairwise_commuting(c: Circuit, tol: float | None = None, cap: int = 12) -> CommutationReport:
    tol = config.tol(tol)
    report = CommutationReport(ok=True, tol=tol)
    gs = c.gates
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            try:
                res = commutator_residual(gs[i], gs[j], cap)
            except ResourceError as exc:
                raise ResourceError(f"gates {i} and {j}: {exc}") from None
            report.pairs_checked += 1
            report.max_residual = max(report.max_residual, res)
            if res > tol and report.ok:
                report.ok = False
                report.witness = (i, j)
                report.witness_residual = res
    return report


# -- locality -----------------------------------------------------------------------

@dataclass
class LocalityReport:
    ok: bool
    bound: int
    sizes: list[int]
    supports: list[tuple[int, ...]]

    @property
    def max_size(self) -> int:
        return max(self.sizes, default=0)

    def violations(self) -> list[int]:
        return [i for i, s in enumerate(self.sizes) if s > self.bound]

    def to_json(self) -> dict:
        return {"pass": self.ok, "bound": self.bound, "max_support": self.max_size,
                "sizes": self.sizes, "supports": [list(s) for s in self.supports],
                "violations": self.violations()}


def check_c_local(c: Circuit, c_bound: int, tol: float | None = None) -> LocalityReport:
    supports = [gate_support(g, tol) for g in c.gates]
    sizes = [len(s) for s in supports]
    return LocalityReport(all(s <= c_bound for s in sizes), c_bound, sizes, supports)


# -- layer audit ----------------------------------------------------------------------

@dataclass
class LayerAudit:
    depth: int
    nonclifford_layers: list[int]
    nonclifford_gates: list[int]
    layer_sizes: list[int]

    @property
    def ok(self) -> bool:
        """Exactly one layer holds non-Clifford gates."""
        return len(self.nonclifford_layers) == 1

    def to_json(self) -> dict:
        return {"pass": self.ok, "depth": self.depth, "nonclifford_layers": self.nonclifford_layers,
                "nonclifford_gates": self.nonclifford_gates}


def nonclifford_layer_audit(c: Circuit) -> LayerAudit:
    from .pauli import is_clifford

    layers = layer_decomposition(c)
    bad = [i for i, g in enumerate(c.gates) if not is_clifford(g)]
    where = sorted({li for li, layer in enumerate(layers) for i in layer if i in set(bad)})
    return LayerAudit(len(layers), where, bad, [len(layer) for layer in layers])
