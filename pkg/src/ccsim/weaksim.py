"""Weak sampling of sandwich circuits ``(F^dag (x) H^l) D (F (x) H^l)``.

``D`` acts on ``t + l`` qubits: its qubit ``i < t`` is ``F.outputs[i]`` and
its qubit ``t + j`` is the ``j``-th of the ``l`` fresh ancillas. Every gate of
``D`` must be diagonal, so ``D|z>|w> = e^{i f(z, w)}|z>|w>``. Sampling an
outcome on the ancillas needs only a sample ``z0`` from ``F`` and the small
``2**l`` sum over ``w`` at that ``z0``.
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Protocol, Sequence

import numpy as np

from . import config
from .circuit import ZERO, Circuit
from .errors import CircuitError, DomainError, ResourceError
from .gates import Gate, adjoint, h, is_diagonal, unitary_of
from .phase import DyadicPhase
from .statevector import Distribution, _bits_tuple, output_distribution

_K = config.MAX_LEVEL
_MASK = (1 << _K) - 1
BLOCK = 4096  # shots per derived rng stream


# -- phase table ---------------------------------------------------------------

@lru_cache(maxsize=4096)
def gate_phase_table(gate: Gate) -> tuple[int, ...]:
    """Dyadic numerators (over ``2**MAX_LEVEL``) of the gate's diagonal, indexed big-endian."""
    if gate.kind == "R":
        return (0, DyadicPhase.from_level(gate.sign, gate.level).numerator)
    if gate.kind == "CZ":
        return (0, 0, 0, 1 << (_K - 1))
    if gate.kind == "CR":
        return (0, 0, 0, DyadicPhase.from_level(gate.sign, gate.level).numerator)
    if gate.kind != "U" or not is_diagonal(gate):
        raise DomainError(f"gate {gate} is not diagonal")
    out = []
    for entry in np.diag(unitary_of(gate)):
        if abs(abs(entry) - 1) > 1e-9:
            raise DomainError(f"gate {gate} has a non-unit diagonal entry {entry}")
        ph = DyadicPhase.snap(float(np.angle(entry)), tol=1e-9)
        if ph is None:
            raise DomainError(f"gate {gate} has a diagonal phase with no dyadic value within 1e-9")
        out.append(ph.numerator)
    return tuple(out)


def _tables(d: Circuit) -> list[tuple[tuple[int, ...], np.ndarray]]:
    out = []
    for i, g in enumerate(d.gates):
        try:
            table = gate_phase_table(g)
        except DomainError as exc:
            raise DomainError(f"D gate {i}: {exc}", gate_index=i) from None
        out.append((g.qubits, np.array(table, dtype=np.int64)))
    return out


def phase_f(d: Circuit, z, w) -> DyadicPhase:
    """Exact phase ``f(z, w)`` with ``D|z>|w> = e^{i f}|z>|w>``."""
    bits = _bits_tuple(z) + _bits_tuple(w)
    if len(bits) != d.n_qubits:
        raise CircuitError(f"D acts on {d.n_qubits} qubits, got {len(bits)} bits")
    total = 0
    for qubits, table in _tables(d):
        idx = 0
        for q in qubits:
            idx = (idx << 1) | bits[q]
        total += int(table[idx])
    return DyadicPhase(total, _K)


def phase_vector(d: Circuit, z0, l: int) -> np.ndarray:
    """Numerators of ``f(z0, w)`` for every ``w`` in ``{0,1}^l`` (``w`` big-endian)."""
    z0 = _bits_tuple(z0)
    t = len(z0)
    if t + l != d.n_qubits:
        raise CircuitError(f"D acts on {d.n_qubits} qubits, not t + l = {t + l}")
    w = np.arange(1 << l, dtype=np.int64)
    cols = [np.full(1 << l, b, dtype=np.int64) for b in z0]
    cols += [(w >> (l - 1 - j)) & 1 for j in range(l)]
    acc = np.zeros(1 << l, dtype=np.int64)
    for qubits, table in _tables(d):
        idx = np.zeros(1 << l, dtype=np.int64)
        for q in qubits:
            idx = (idx << 1) | cols[q]
        acc = (acc + table[idx]) & _MASK
    return acc


def walsh_hadamard(vec: np.ndarray) -> np.ndarray:
    """Unnormalized transform ``out[y] = sum_w (-1)^{w.y} vec[w]``."""
    n = vec.shape[0]
    out = np.array(vec, dtype=complex)
    span = 1
    while span < n:
        out = out.reshape(-1, 2, span)
        a, b = out[:, 0, :].copy(), out[:, 1, :].copy()
        out[:, 0, :], out[:, 1, :] = a + b, a - b
        out = out.reshape(n)
        span <<= 1
    return out


def small_output_probabilities(d: Circuit, z0, l: int) -> np.ndarray:
    if l > config.MAX_OUTPUTS:
        raise ResourceError(f"l = {l} exceeds the cap {config.MAX_OUTPUTS}")
    num = phase_vector(d, z0, l)
    amps = np.exp(2j * np.pi * (num.astype(np.float64) / float(1 << _K)))
    beta = walsh_hadamard(amps) / (1 << l)
    return np.abs(beta) ** 2


def small_output_distribution(z0, d: Circuit, l: int) -> Distribution:
    """Exact distribution of ``H^l sum_w e^{i f(z0, w)}|w>/sqrt(2^l)`` over the ``l`` ancillas."""
    t = d.n_qubits - l
    return Distribution.from_vector(tuple(range(t, t + l)), small_output_probabilities(d, z0, l))


# -- sandwich ------------------------------------------------------------------

@dataclass(frozen=True)
class SandwichSpec:
    F: Circuit
    D: Circuit
    l: int
    t: int = field(init=False)
    assembled: Circuit = field(init=False, repr=False)

    def __post_init__(self):
        if not self.F.outputs:
            raise CircuitError("F needs output qubits")
        t = len(self.F.outputs)
        if self.D.n_qubits != t + self.l:
            raise CircuitError(f"D acts on {self.D.n_qubits} qubits; expected t + l = {t + self.l}")
        if self.l > config.MAX_OUTPUTS:
            raise ResourceError(f"l = {self.l} exceeds the cap {config.MAX_OUTPUTS}")
        _tables(self.D)  # diagonality check up front
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "assembled", assemble(self.F, self.D, self.l))

    @property
    def ancillas(self) -> tuple[int, ...]:
        return tuple(range(self.F.n_qubits, self.F.n_qubits + self.l))


def assemble(f: Circuit, d: Circuit, l: int) -> Circuit:
    """The full circuit on ``F``'s qubits plus ``l`` ancillas, measured on the ancillas."""
    n = f.n_qubits
    anc = list(range(n, n + l))
    mapping = list(f.outputs) + anc
    hs = [h(q) for q in anc]
    gates = (list(f.gates) + hs + [g.relabel(mapping) for g in d.gates]
             + [adjoint(g) for g in reversed(f.gates)] + hs)
    return Circuit(n + l, gates, f.roles + (ZERO,) * l, outputs=tuple(anc), name="sandwich")


def _outcome_weights(spec: SandwichSpec, x) -> np.ndarray:
    return output_distribution(spec.F, x, spec.F.outputs).to_vector()


def mixture(spec: SandwichSpec, weights: Mapping[str, float] | np.ndarray) -> Distribution:
    """``sum_z weights[z] * small_output_distribution(z)``; exact for any weight table."""
    if isinstance(weights, np.ndarray):
        items = [(format(i, f"0{spec.t}b"), float(p)) for i, p in enumerate(weights)]
    else:
        items = list(weights.items())
    acc = np.zeros(1 << spec.l)
    for z, p in items:
        if p != 0.0:
            acc += p * small_output_probabilities(spec.D, z, spec.l)
    return Distribution.from_vector(spec.ancillas, acc)


def sandwich_exact(spec: SandwichSpec, x) -> Distribution:
    """Distribution over the ancillas from ``|alpha_{x,z}|^2`` and the per-``z`` small sums."""
    return mixture(spec, _outcome_weights(spec, x))


# -- samplers ------------------------------------------------------------------

class FSampler(Protocol):
    t: int
    epsilon: float

    def __call__(self, x, rng: np.random.Generator) -> str: ...


class TableSampler:
    """Draws ``z`` from an explicit table; the table is the sampler's exact distribution."""

    def __init__(self, table: Mapping[str, float], epsilon: float = 0.0):
        if epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        keys = sorted(table)
        if not keys:
            raise ValueError("empty table")
        self.t = len(keys[0])
        self.epsilon = epsilon
        self._keys = keys
        p = np.clip(np.array([table[k] for k in keys], dtype=float), 0, None)
        self._p = p / p.sum()

    def distribution(self, x=None) -> dict[str, float]:
        return dict(zip(self._keys, self._p.tolist()))

    def __call__(self, x, rng):
        return self._keys[rng.choice(len(self._keys), p=self._p)]

    def sample_many(self, x, rng, k: int) -> list[str]:
        return [self._keys[i] for i in rng.choice(len(self._keys), size=k, p=self._p)]


class OracleFSampler:
    """Exact sampler for ``F`` backed by the statevector oracle (``epsilon = 0``).

    Samples ``F.outputs`` unless ``qubits`` names another measured set.
    """

    epsilon = 0.0

    def __init__(self, f: Circuit, qubits: Sequence[int] | None = None):
        self.f = f
        self.qubits = tuple(f.outputs if qubits is None else qubits)
        self.t = len(self.qubits)
        self._cache: dict[tuple[int, ...], TableSampler] = {}

    def _table(self, x) -> TableSampler:
        key = _bits_tuple(x)
        if key not in self._cache:
            dist = output_distribution(self.f, key, self.qubits)
            self._cache[key] = TableSampler(dist.probs)
        return self._cache[key]

    def distribution(self, x) -> dict[str, float]:
        return self._table(x).distribution()

    def __call__(self, x, rng):
        return self._table(x)(x, rng)

    def sample_many(self, x, rng, k):
        return self._table(x).sample_many(x, rng, k)


def biased_table(table: Mapping[str, float], epsilon: float, seed) -> dict[str, float]:
    """A distribution within ``epsilon`` of ``table`` on every outcome of ``{0,1}^t``.

    Mass moves in +-epsilon pairs, clipped so nothing goes negative.
    """
    rng = np.random.default_rng(seed)
    t = len(next(iter(table)))
    keys = [format(i, f"0{t}b") for i in range(1 << t)]
    p = np.array([table.get(k, 0.0) for k in keys], dtype=float)
    order = rng.permutation(len(keys))
    for a, b in zip(order[0::2], order[1::2]):
        move = min(epsilon * rng.uniform(0.5, 1.0), p[b])
        p[a] += move
        p[b] -= move
    return dict(zip(keys, p.tolist()))


def induced_distribution(spec: SandwichSpec, sampler, x) -> Distribution:
    """Exact output distribution of :func:`weak_sample` for a sampler exposing ``distribution``."""
    if not hasattr(sampler, "distribution"):
        raise TypeError("sampler does not expose its distribution")
    return mixture(spec, sampler.distribution(x))


def _draw_many(sampler, x, rng, k):
    if hasattr(sampler, "sample_many"):
        return sampler.sample_many(x, rng, k)
    return [sampler(x, rng) for _ in range(k)]


def weak_sample(spec: SandwichSpec, x, f_sampler, rng, shots: int, threads: int = 1) -> Counter:
    """Per shot: draw ``z0`` from ``f_sampler``, then ``y`` from the small distribution at ``z0``.

    Shots run in blocks of :data:`BLOCK`, each with its own stream spawned
    from ``rng`` (an int seed or a ``SeedSequence``), so the counts do not
    depend on ``threads``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if getattr(f_sampler, "t", spec.t) != spec.t:
        raise CircuitError(f"sampler outcome length {f_sampler.t} != t = {spec.t}")
    if isinstance(rng, np.random.Generator):
        rng = int(rng.integers(2**63))
    root = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    sizes = [BLOCK] * (shots // BLOCK) + ([shots % BLOCK] if shots % BLOCK else [])
    streams = root.spawn(len(sizes))
    width = spec.l
    small: dict[str, np.ndarray] = {}

    def block(args):
        ss, k = args
        g = np.random.default_rng(ss)
        z0s = _draw_many(f_sampler, x, g, k)
        counts: Counter = Counter()
        for z0, m in sorted(Counter(z0s).items()):
            if len(z0) != spec.t:
                raise CircuitError(f"sampler returned {z0!r}; expected {spec.t} bits")
            p = small.get(z0)
            if p is None:
                p = small_output_probabilities(spec.D, z0, spec.l)
                p = np.clip(p, 0, None)
                p = small[z0] = p / p.sum()
            for y, c in enumerate(g.multinomial(m, p)):
                if c:
                    counts[format(y, f"0{width}b") if width else ""] += int(c)
        return counts

    jobs = list(zip(streams, sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(block, jobs))
    else:
        parts = [block(j) for j in jobs]
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return total


class WeakSimSampler:
    """Samples the sandwich's ancilla outcomes through :func:`weak_sample`."""

    def __init__(self, spec: SandwichSpec, f_sampler):
        self.spec = spec
        self.f_sampler = f_sampler
        self.t = spec.l
        self.epsilon = deviation_bound(spec, getattr(f_sampler, "epsilon", 0.0))

    def distribution(self, x) -> dict[str, float]:
        return induced_distribution(self.spec, self.f_sampler, x).probs

    def sample_many(self, x, rng, k: int) -> list[str]:
        counts = weak_sample(self.spec, x, self.f_sampler, rng, k)
        out = [y for y, c in sorted(counts.items()) for _ in range(c)]
        rng.shuffle(out)
        return out

    def __call__(self, x, rng):
        return self.sample_many(x, rng, 1)[0]


def deviation_bound(spec: SandwichSpec, epsilon: float) -> float:
    """Per-outcome bound ``2**t * epsilon`` on the sampled distribution's error."""
    return (1 << spec.t) * epsilon
