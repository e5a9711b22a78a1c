"""Builders for the circuit families: OR reductions, teleportation-based
depth-3 compression, the E and E' wrappers, commuting conjugation, magic-state
compilation and the fan-out rewrite of the OR middle part.

Register conventions: builders keep the qubits of their input circuit at
their original indices and append every fresh qubit after them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import config, gates as G
from .circuit import Circuit, INPUT, ZERO, Role, embed, inverse, product
from .errors import CircuitError, DomainError
from .gates import Gate


def or_width(b: int) -> int:
    """ceil(log2(b + 1)), the number of OR-reduction output qubits for b inputs."""
    if b < 1:
        raise ValueError("OR reduction needs at least one input")
    return int(b).bit_length()


def or_reduction_middle(b: int) -> Circuit:
    """The controlled-phase block alone: input j controls R(2pi/2**k) on target k."""
    m = or_width(b)
    gates = [G.cr(j, b + k - 1, k) for j in range(b) for k in range(1, m + 1)]
    return Circuit(b + m, gates, (INPUT,) * b + (ZERO,) * m, outputs=tuple(range(b, b + m)))


def or_reduction_noncommuting(b: int) -> Circuit:
    mid = or_reduction_middle(b)
    m = or_width(b)
    hs = [G.h(b + k) for k in range(m)]
    c = mid.with_gates(hs + list(mid.gates) + hs)
    return Circuit(c.n_qubits, c.gates, c.roles, c.outputs, name=f"or-reduction(b={b})")


def commuting_or_gate(control: int, target: int, level: int) -> Gate:
    """(I x H) CR(2pi/2**level) (I x H) as one two-qubit gate."""
    ih = np.kron(np.eye(2), G.H_MATRIX)
    cr = G.unitary_of(G.cr(0, 1, level))
    return G.composite((control, target), ih @ cr @ ih, label=f"g{level}")


def or_reduction_commuting(b: int) -> Circuit:
    m = or_width(b)
    gates = [commuting_or_gate(j, b + k - 1, k) for j in range(b) for k in range(1, m + 1)]
    return Circuit(b + m, gates, (INPUT,) * b + (ZERO,) * m, outputs=tuple(range(b, b + m)),
                   name=f"commuting-or-reduction(b={b})")


# -- teleportation ----------------------------------------------------------------

_HH = np.kron(G.H_MATRIX, G.H_MATRIX)
# CZ form: the Bell pair is a CZ on |+>|+>, the Bell measurement is CZ followed
# by H on both qubits. Light cones through it stay within five qubits.
FIRST_HALF = G.CZ_MATRIX @ _HH       # H(a1) H(a2), then CZ(a1, a2)
SECOND_HALF = _HH @ G.CZ_MATRIX      # CZ(q, a1), then H(q) H(a1)
# textbook form, kept for comparison: wider light cones (up to seven qubits)
CNOT_FIRST_HALF = G.CNOT_MATRIX @ np.kron(G.H_MATRIX, np.eye(2))    # H(a1), then CNOT(a1 -> a2)
CNOT_SECOND_HALF = np.kron(G.H_MATRIX, np.eye(2)) @ G.CNOT_MATRIX   # CNOT(q -> a1), then H(q)
GADGETS = {"cz": (FIRST_HALF, SECOND_HALF), "cnot": (CNOT_FIRST_HALF, CNOT_SECOND_HALF)}


def _halves(variant: str):
    try:
        return GADGETS[variant]
    except KeyError:
        raise CircuitError(f"unknown teleport variant {variant!r}") from None


def teleport_first_half(a1: int, a2: int, variant: str = "cz") -> Gate:
    return G.composite((a1, a2), _halves(variant)[0], label="tp1")


def teleport_second_half(q: int, a1: int, variant: str = "cz") -> Gate:
    return G.composite((q, a1), _halves(variant)[1], label="tp2")


def teleport_gadget(elementary: bool = True, variant: str = "cz") -> Circuit:
    """Qubits (input, a1, a2); reading (input, a1) = 00 leaves the input state on a2."""
    if elementary and variant == "cz":
        gates = [G.h(1), G.h(2), G.cz(1, 2), G.cz(0, 1), G.h(0), G.h(1)]
    elif elementary:
        gates = [G.h(1), G.cnot(1, 2), G.cnot(0, 1), G.h(0)]
    else:
        gates = [teleport_first_half(1, 2, variant), teleport_second_half(0, 1, variant)]
    return Circuit(3, gates, (INPUT, ZERO, ZERO), outputs=(2,), postselect=(0, 1),
                   name="teleport")


@dataclass(frozen=True)
class CompressedCircuit:
    circuit: Circuit
    teleport_qubits: tuple[int, ...]
    origin_map: dict[int, int]
    teleports: tuple[tuple[int, int, int], ...] = ()
    layers: tuple[tuple[int, ...], ...] = ()

    @property
    def b(self) -> int:
        return len(self.teleport_qubits)

    @property
    def postselection_qubits(self) -> tuple[int, ...]:
        return self.circuit.postselect


def compress_depth3(c: Circuit, teleport_measured: bool = True,
                    variant: str = "cz") -> CompressedCircuit:
    """Rewrite ``c`` into three layers using postselected teleportations.

    A teleportation is inserted on every wire segment between two gates and,
    when ``teleport_measured`` is set, after the last gate of each measured
    wire. Every gate of ``c`` then acts on its own fresh qubits, all
    Bell-pair preparations run first and all Bell measurements last.
    Conditioned on the ``2b`` teleportation qubits reading 0 (probability
    ``2**-b``), the state on ``origin_map``'s images equals ``c``'s output.

    CNOT gates are first rewritten as H.CZ.H on the target: every two-qubit
    gate in the middle layer is then diagonal, which keeps the light cone of
    any single-qubit-controlled gate on the measured qubits within five qubits.
    """
    gates = [e for g in c.gates for e in (G.expand(g) if g.kind == "CNOT" else [g])]
    for i, g in enumerate(c.gates):
        if g.kind == "U" and g.arity > 2:
            raise CircuitError(f"gate {i} acts on {g.arity} qubits; compression expects 1- and 2-qubit gates")
    current = list(range(c.n_qubits))
    fresh = c.n_qubits
    first, middle, last, teleports = [], [], [], []
    seen = set()

    def teleport(w):
        nonlocal fresh
        q, a1, a2 = current[w], fresh, fresh + 1
        fresh += 2
        first.append(teleport_first_half(a1, a2, variant))
        last.append(teleport_second_half(q, a1, variant))
        teleports.append((q, a1, a2))
        current[w] = a2

    for g in gates:
        for w in g.qubits:
            if w in seen:
                teleport(w)
        middle.append(g.relabel(current))
        seen.update(g.qubits)
    if teleport_measured:
        for w in sorted(seen & (set(c.outputs) | set(c.postselect))):
            teleport(w)

    tq = tuple(q for (q, a1, _) in teleports for q in (q, a1))
    roles = c.roles + (ZERO,) * (fresh - c.n_qubits)
    circuit = Circuit(
        fresh, first + middle + last, roles,
        outputs=tuple(current[w] for w in c.outputs),
        postselect=tuple(current[w] for w in c.postselect) + tq,
        name="depth3",
    )
    n1, n2 = len(first), len(middle)
    layers = (tuple(range(n1)), tuple(range(n1, n1 + n2)), tuple(range(n1 + n2, len(circuit.gates))))
    return CompressedCircuit(circuit, tq, {w: current[w] for w in range(c.n_qubits)},
                             tuple(teleports), layers)


def small_example(level: int = 3) -> Circuit:
    """Two input qubits, no ancillas: H on qubit 0 then CR(0 -> 1, level).

    Qubit 0 is the output and qubit 1 the postselection qubit. Compression
    teleports the one interior segment and both measured wires, so b = 6.
    """
    return Circuit(2, [G.h(0), G.cr(0, 1, level)], (INPUT, INPUT), outputs=(0,),
                   postselect=(1,), name="small-example")


# -- E and E' ----------------------------------------------------------------

def split_measured(a: Circuit) -> tuple[tuple[int, ...], int]:
    """(postselection qubits, q_out) of a circuit carrying the postselection bookkeeping.

    Either ``postselect`` lists the b+1 postselection qubits and ``outputs``
    is ``(q_out,)``, or ``postselect`` is empty and ``outputs`` lists the
    b+1 postselection qubits followed by ``q_out``.
    """
    if a.postselect and len(a.outputs) == 1:
        return a.postselect, a.outputs[0]
    if not a.postselect and len(a.outputs) >= 2:
        return a.outputs[:-1], a.outputs[-1]
    raise CircuitError(
        "circuit needs postselection qubits plus one output qubit "
        f"(got outputs={list(a.outputs)}, postselect={list(a.postselect)})")


@dataclass(frozen=True)
class EnLayout:
    """Register layout shared by E, E' and the conjugated circuit."""
    a: Circuit
    postselect: tuple[int, ...]
    q_out: int
    flag: int
    or_targets: tuple[int, ...]

    @property
    def b(self) -> int:
        return len(self.postselect) - 1

    @property
    def m(self) -> int:
        return len(self.or_targets)

    @property
    def n_qubits(self) -> int:
        return self.a.n_qubits + 1 + self.m

    @property
    def outputs(self) -> tuple[int, ...]:
        return self.or_targets + (self.flag,)

    @property
    def roles(self) -> tuple[Role, ...]:
        return self.a.roles + (ZERO,) * (1 + self.m)

    def register(self, gates, name=None) -> Circuit:
        return Circuit(self.n_qubits, gates, self.roles, self.outputs, name=name)

    def or_map(self) -> dict[int, int]:
        k = len(self.postselect)
        mapping = {j: q for j, q in enumerate(self.postselect)}
        mapping.update({k + i: t for i, t in enumerate(self.or_targets)})
        return mapping


def en_layout(a: Circuit) -> EnLayout:
    post, q_out = split_measured(a)
    m = or_width(len(post))
    n = a.n_qubits
    return EnLayout(a, tuple(post), q_out, n, tuple(range(n + 1, n + 1 + m)))


def en_middle(a: Circuit) -> list[Gate]:
    """CNOT(q_out -> flag) followed by the commuting OR gates on the postselection qubits."""
    lay = en_layout(a)
    orr = or_reduction_commuting(len(lay.postselect))
    mapping = lay.or_map()
    return [G.cnot(lay.q_out, lay.flag)] + [g.relabel(mapping) for g in orr.gates]


def build_En(a: Circuit, include_inverse: bool = True) -> Circuit:
    """A; CNOT(q_out -> flag); commuting OR over the postselection qubits; A^dag.

    Outputs are the m OR targets followed by the flag, so
    ``Pr[E = 0^m 1] = Pr[A = 0^(b+1) 1]``.
    """
    lay = en_layout(a)
    gates = list(a.gates) + en_middle(a)
    if include_inverse:
        gates += list(inverse(a).gates)
    return lay.register(gates, name="E")


def build_En_prime(a: Circuit) -> Circuit:
    """A; CNOT(q_out -> flag); non-commuting OR over the postselection qubits (no A^dag)."""
    lay = en_layout(a)
    orr = or_reduction_noncommuting(len(lay.postselect))
    mapping = lay.or_map()
    gates = list(a.gates) + [G.cnot(lay.q_out, lay.flag)] + [g.relabel(mapping) for g in orr.gates]
    return lay.register(gates, name="E'")


def light_cone(a_gates: Sequence[Gate], qubits) -> tuple[list[Gate], tuple[int, ...]]:
    """Gates of A that survive in A^dag g A for g on ``qubits``, and the qubits they reach."""
    reach = set(qubits)
    kept = []
    for gt in reversed(a_gates):
        if reach.intersection(gt.qubits):
            reach.update(gt.qubits)
            kept.append(gt)
    kept.reverse()
    return kept, tuple(sorted(reach))


def conjugated_operator(a_gates: Sequence[Gate], g: Gate, cap: int = 12):
    """Dense ``A^dag g A`` on its light cone; returns (matrix, qubits)."""
    from .statevector import circuit_unitary

    kept, reach = light_cone(a_gates, g.qubits)
    if len(reach) > cap:
        raise CircuitError(f"light cone of {g} spans {len(reach)} qubits (cap {cap})")
    local = {q: i for i, q in enumerate(reach)}
    u_a = circuit_unitary(Circuit(len(reach), [x.relabel(local) for x in kept]), cap=cap)
    u_g = G.embed_matrix(G.unitary_of(g), [local[q] for q in g.qubits], len(reach))
    return u_a.conj().T @ u_g @ u_a, reach


def conjugate_commuting(a: Circuit, middle: Sequence[Gate], n_qubits: int | None = None,
                        outputs=(), tol: float | None = None) -> Circuit:
    """One composite gate ``A^dag g A`` per ``g`` in ``middle``, trimmed to its support."""
    from .analysis import support

    n = n_qubits if n_qubits is not None else max(
        [a.n_qubits] + [q + 1 for g in middle for q in g.qubits])
    out = []
    for i, g in enumerate(middle):
        w, reach = conjugated_operator(a.gates, g)
        sup = support(w, tol=tol)
        qs = tuple(reach[j] for j in sup.qubits)
        if len(qs) > config.COMPOSITE_ARITY:
            raise CircuitError(
                f"A^dag g A for middle gate {i} ({g}) acts on {len(qs)} qubits, "
                f"above the composite cap {config.COMPOSITE_ARITY}")
        if not qs:
            # acts as a global phase only; keep a one-qubit placeholder so gate counts line up
            qs = (g.qubits[0],)
            mat = np.eye(2) * sup.phase
        else:
            mat = sup.restricted
        out.append(G.composite(qs, mat, label=f"A'gA[{i}]"))
    roles = a.roles + (ZERO,) * (n - a.n_qubits)
    return Circuit(n, out, roles, tuple(outputs), name="conjugated")


def build_commuting_En(a: Circuit, tol: float | None = None) -> Circuit:
    """The commuting circuit whose output distribution equals E's."""
    lay = en_layout(a)
    return conjugate_commuting(a, en_middle(a), lay.n_qubits, lay.outputs, tol=tol)


# -- Clifford + magic states -------------------------------------------------------

def magic_state() -> tuple[complex, complex]:
    """R(pi/4) H |0> = (|0> + e^{i pi/4} |1>) / sqrt(2)."""
    s = 1 / np.sqrt(2)
    return (complex(s), complex(np.exp(1j * np.pi / 4) * s))


@dataclass(frozen=True)
class MagicCompiled:
    circuit: Circuit
    gadget_qubits: tuple[int, ...]


def magic_compile(c: Circuit) -> MagicCompiled:
    """Replace every R(+-pi/4) by a CNOT onto a fresh |phi> ancilla that is postselected on 0.

    R(-pi/4) additionally gets a trailing P^dag. Any other non-Clifford gate
    raises :class:`DomainError`.
    """
    from .pauli import is_clifford

    fresh = c.n_qubits
    gates, gadgets = [], []
    for i, g in enumerate(c.gates):
        if g.kind == "R" and g.level == 3:
            (q,) = g.qubits
            gates.append(G.cnot(q, fresh))
            if g.sign < 0:
                gates.append(G.pdg(q))
            gadgets.append(fresh)
            fresh += 1
        elif is_clifford(g):
            gates.append(g)
        else:
            raise DomainError(f"gate {i} ({g}) is neither Clifford nor R(+-pi/4)", i)
    phi = product(magic_state())
    roles = c.roles + (phi,) * len(gadgets)
    circuit = Circuit(fresh, gates, roles, c.outputs, c.postselect + tuple(gadgets),
                      name="magic-compiled")
    return MagicCompiled(circuit, tuple(gadgets))


# -- fan-out ---------------------------------------------------------------------

def fanout(control: int, targets: Sequence[int], register: Circuit | int) -> Circuit:
    """Unbounded fan-out as CNOTs sharing ``control``; targets must be zero ancillas."""
    base = register if isinstance(register, Circuit) else Circuit(int(register))
    for t in targets:
        if not 0 <= t < base.n_qubits:
            raise CircuitError(f"fan-out target {t} outside register")
        if base.roles[t].kind != "zero":
            raise CircuitError(f"fan-out target {t} is not a |0> ancilla")
        if t == control:
            raise CircuitError("fan-out target equals control")
    return base.with_gates([G.cnot(control, t) for t in targets])


def _doubling_fanout(source: int, copies: Sequence[int]) -> list[Gate]:
    """CNOT tree; with 2**d holders every holder is busy in every round."""
    holders = [source]
    pending = list(copies)
    out = []
    while pending:
        nxt = []
        for h in holders:
            if not pending:
                break
            t = pending.pop(0)
            out.append(G.cnot(h, t))
            nxt.append(t)
        holders += nxt
    return out


def _pow2(k: int) -> int:
    return 1 << max(0, (k - 1).bit_length())


@dataclass(frozen=True)
class FanoutDecomposition:
    circuit: Circuit
    original_qubits: int
    ancillas: tuple[int, ...]
    phase_gates: tuple[int, ...] = field(default=())   # indices of the non-Clifford gates


def decompose_fanout_or(middle: Circuit) -> FanoutDecomposition:
    """Rewrite a block of controlled phases so all of them run in one layer.

    Every control is copied once per gate it controls and every target once
    per gate that hits it, using CNOT fan-outs onto fresh |0> ancillas
    (control copies first, then target copies). Copy counts are padded to a
    power of two so each fan-out tree finishes all its copies in the same
    round, which places every controlled phase in a single greedy layer. The
    fan-outs are undone afterwards, returning the ancillas to |0>.
    """
    crs = [g for g in middle.gates if g.kind == "CR"]
    if len(crs) != len(middle.gates):
        raise CircuitError("middle part must consist of controlled-phase gates only")
    controls = sorted({g.qubits[0] for g in crs})
    targets = sorted({g.qubits[1] for g in crs})
    if set(controls) & set(targets):
        raise CircuitError("a qubit is both control and target")
    fresh = middle.n_qubits
    copies: dict[int, list[int]] = {}
    for q in controls + targets:
        uses = sum(1 for g in crs if q in g.qubits)
        extra = _pow2(uses) - 1
        copies[q] = [q] + list(range(fresh, fresh + extra))
        fresh += extra
    spread = []
    for q in controls + targets:
        spread += _doubling_fanout(q, copies[q][1:])
    used = {q: 0 for q in controls + targets}
    layer = []
    for g in crs:
        c, t = g.qubits
        cq, tq = copies[c][used[c]], copies[t][used[t]]
        used[c] += 1
        used[t] += 1
        layer.append(G.cr(cq, tq, g.level, g.sign))
    unspread = list(reversed(spread))
    gates = spread + layer + unspread
    roles = middle.roles + (ZERO,) * (fresh - middle.n_qubits)
    circuit = Circuit(fresh, gates, roles, middle.outputs, middle.postselect, name="fanout-or")
    idx = tuple(range(len(spread), len(spread) + len(layer)))
    return FanoutDecomposition(circuit, middle.n_qubits, tuple(range(middle.n_qubits, fresh)), idx)


def build_En_prime_fanout(a: Circuit) -> Circuit:
    """E' with its OR middle part replaced by :func:`decompose_fanout_or`."""
    lay = en_layout(a)
    k = len(lay.postselect)
    dec = decompose_fanout_or(or_reduction_middle(k))
    extra = dec.circuit.n_qubits - (k + lay.m)
    mapping = lay.or_map()
    base = lay.n_qubits
    mapping.update({k + lay.m + i: base + i for i in range(extra)})
    hs = [G.h(t) for t in lay.or_targets]
    gates = (list(a.gates) + [G.cnot(lay.q_out, lay.flag)] + hs
             + [g.relabel(mapping) for g in dec.circuit.gates] + hs)
    return Circuit(base + extra, gates, lay.roles + (ZERO,) * extra, lay.outputs,
                   name="E'-fanout")
