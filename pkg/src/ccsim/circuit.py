"""Circuit IR: register roles, measured qubits and an ordered gate list."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import config, gates as G
from .errors import CircuitError
from .gates import Gate


@dataclass(frozen=True)
class Role:
    """``input``, ``zero`` (ancilla in |0>) or ``product`` (ancilla in ``state``)."""
    kind: str
    state: tuple[complex, complex] | None = None

    def __post_init__(self):
        if self.kind not in ("input", "zero", "product"):
            raise CircuitError(f"unknown role {self.kind!r}")
        if self.kind == "product":
            if self.state is None or len(self.state) != 2:
                raise CircuitError("product ancilla needs a 2-amplitude state")
            a, b = (complex(v) for v in self.state)
            norm = abs(a) ** 2 + abs(b) ** 2
            if abs(norm - 1) > 1e-12:
                raise CircuitError(f"product ancilla state not normalized (|psi|^2 = {norm!r})")
            object.__setattr__(self, "state", (a, b))
        elif self.state is not None:
            raise CircuitError(f"{self.kind} role takes no state")

    def amplitudes(self, bit: int = 0) -> tuple[complex, complex]:
        if self.kind == "product":
            return self.state
        if self.kind == "zero":
            return (1, 0)
        return (1, 0) if bit == 0 else (0, 1)


INPUT = Role("input")
ZERO = Role("zero")


def product(state) -> Role:
    return Role("product", tuple(complex(v) for v in state))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    roles: tuple[Role, ...] | None = None
    outputs: tuple[int, ...] = ()
    postselect: tuple[int, ...] = ()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "outputs", tuple(int(q) for q in self.outputs))
        object.__setattr__(self, "postselect", tuple(int(q) for q in self.postselect))
        roles = self.roles
        if roles is None:
            roles = (ZERO,) * self.n_qubits
        object.__setattr__(self, "roles", tuple(roles))
        problems = self.diagnostics()
        if problems:
            raise CircuitError("; ".join(problems))

    def diagnostics(self) -> list[str]:
        out = []
        n = self.n_qubits
        if n < 0:
            out.append("negative qubit count")
        if len(self.roles) != n:
            out.append(f"{len(self.roles)} roles for {n} qubits")
        for name, qs in (("output", self.outputs), ("postselection", self.postselect)):
            if len(set(qs)) != len(qs):
                out.append(f"duplicate {name} qubit")
            bad = [q for q in qs if not 0 <= q < n]
            if bad:
                out.append(f"{name} qubit(s) {bad} out of range")
        for i, g in enumerate(self.gates):
            bad = [q for q in g.qubits if q >= n]
            if bad:
                out.append(f"gate {i} ({g}) uses qubit(s) {bad} outside register of {n}")
        return out

    # -- register queries ---------------------------------------------------
    @property
    def input_qubits(self) -> tuple[int, ...]:
        return tuple(q for q, r in enumerate(self.roles) if r.kind == "input")

    @property
    def n_inputs(self) -> int:
        return len(self.input_qubits)

    def __len__(self) -> int:
        return len(self.gates)

    def with_gates(self, gates: Iterable[Gate]) -> Circuit:
        return replace(self, gates=tuple(gates))

    def with_measured(self, outputs=None, postselect=None) -> Circuit:
        return replace(
            self,
            outputs=self.outputs if outputs is None else tuple(outputs),
            postselect=self.postselect if postselect is None else tuple(postselect),
        )

    def extended(self, extra_roles: Sequence[Role]) -> Circuit:
        """Same circuit on a register with ``extra_roles`` appended."""
        return replace(self, n_qubits=self.n_qubits + len(extra_roles),
                       roles=self.roles + tuple(extra_roles))

    def __str__(self) -> str:
        head = f"Circuit({self.n_qubits} qubits, {len(self.gates)} gates"
        if self.outputs:
            head += f", outputs={list(self.outputs)}"
        if self.postselect:
            head += f", postselect={list(self.postselect)}"
        return head + ")"


def validate(circuit: Circuit) -> list[str]:
    """Problems found in ``circuit`` (empty when valid).

    ``Circuit`` already refuses invalid data at construction, so this mostly
    re-checks caps that are configurable after the fact.
    """
    out = circuit.diagnostics()
    for i, g in enumerate(circuit.gates):
        if g.kind == "U" and g.arity > config.COMPOSITE_ARITY:
            out.append(f"gate {i} composite arity {g.arity} above cap {config.COMPOSITE_ARITY}")
        if g.kind in ("R", "CR") and g.level > config.MAX_LEVEL:
            out.append(f"gate {i} level {g.level} above cap {config.MAX_LEVEL}")
    return out


def inverse(circuit: Circuit) -> Circuit:
    return circuit.with_gates(G.adjoint(g) for g in reversed(circuit.gates))


def compose(first: Circuit, second: Circuit) -> Circuit:
    """``first`` followed by ``second`` on the same register.

    Roles come from ``first``; measured qubits from ``second`` when it names
    any, otherwise from ``first``.
    """
    if first.n_qubits != second.n_qubits:
        raise CircuitError(
            f"cannot compose circuits on {first.n_qubits} and {second.n_qubits} qubits")
    return replace(
        first,
        gates=first.gates + second.gates,
        outputs=second.outputs or first.outputs,
        postselect=second.postselect or first.postselect,
    )


def embed(circuit: Circuit, qubit_map: Mapping[int, int] | Sequence[int], n_total: int,
          roles: Sequence[Role] | None = None) -> Circuit:
    """Relabel ``circuit`` into a register of ``n_total`` qubits.

    Unmapped target qubits become zero ancillas unless ``roles`` is given.
    """
    if not isinstance(qubit_map, Mapping):
        qubit_map = dict(enumerate(qubit_map))
    missing = [q for q in range(circuit.n_qubits) if q not in qubit_map]
    if missing:
        raise CircuitError(f"qubit map does not cover {missing}")
    targets = [qubit_map[q] for q in range(circuit.n_qubits)]
    if len(set(targets)) != len(targets):
        raise CircuitError("qubit map is not injective")
    if any(not 0 <= q < n_total for q in targets):
        raise CircuitError(f"qubit map leaves register of {n_total}")
    if roles is None:
        new_roles = [ZERO] * n_total
        for q, tq in enumerate(targets):
            new_roles[tq] = circuit.roles[q]
    else:
        new_roles = list(roles)
    return Circuit(
        n_total,
        tuple(g.relabel(qubit_map) for g in circuit.gates),
        tuple(new_roles),
        tuple(qubit_map[q] for q in circuit.outputs),
        tuple(qubit_map[q] for q in circuit.postselect),
        name=circuit.name,
    )


# -- depth -----------------------------------------------------------------------

def layer_decomposition(circuit: Circuit) -> list[list[int]]:
    """Greedy-left layering: each gate goes to the first layer after the last use of its qubits."""
    ready = {}
    layers: list[list[int]] = []
    for i, g in enumerate(circuit.gates):
        layer = max((ready.get(q, 0) for q in g.qubits), default=0)
        if layer == len(layers):
            layers.append([])
        layers[layer].append(i)
        for q in g.qubits:
            ready[q] = layer + 1
    return layers


def depth(circuit: Circuit) -> int:
    return len(layer_decomposition(circuit))


def gate_supports(circuit: Circuit) -> list[tuple[int, ...]]:
    return [g.qubits for g in circuit.gates]


def touched_qubits(circuit: Circuit) -> set[int]:
    return {q for g in circuit.gates for q in g.qubits}

