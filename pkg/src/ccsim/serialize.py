"""JSON circuit files.

Layout::

    {"qubits": 3,
     "roles": ["input", "zero", {"state": [[re, im], [re, im]]}],
     "outputs": [2], "postselect": [1],
     "gates": [{"type": "H", "q": 0},
               {"type": "R", "q": 1, "sign": 1, "k": 3},
               {"type": "CZ", "a": 0, "b": 1},
               {"type": "CR", "control": 0, "target": 2, "sign": -1, "k": 2},
               {"type": "CNOT", "control": 1, "target": 2},
               {"type": "X", "q": 2},
               {"type": "U", "qubits": [0, 1], "matrix": [[re, im], ...]}]}

``U`` matrices are flattened row-major. ``U`` gates may carry a ``"label"``.
Floats are written with ``repr`` precision so a round trip is exact.
"""
from __future__ import annotations

import json

import numpy as np

from . import gates as G
from .circuit import Circuit, Role, INPUT, ZERO
from .errors import CircuitError, CircuitParseError


def _role_to_json(role: Role):
    if role.kind == "product":
        return {"state": [[c.real, c.imag] for c in role.state]}
    return "input" if role.kind == "input" else "zero"


def gate_to_json(g: G.Gate) -> dict:
    k = g.kind
    if k in ("H", "X"):
        return {"type": k, "q": g.qubits[0]}
    if k == "R":
        return {"type": "R", "q": g.qubits[0], "sign": g.sign, "k": g.level}
    if k == "CZ":
        return {"type": "CZ", "a": g.qubits[0], "b": g.qubits[1]}
    if k == "CNOT":
        return {"type": "CNOT", "control": g.qubits[0], "target": g.qubits[1]}
    if k == "CR":
        return {"type": "CR", "control": g.qubits[0], "target": g.qubits[1],
                "sign": g.sign, "k": g.level}
    d = {"type": "U", "qubits": list(g.qubits),
         "matrix": [[v.real, v.imag] for row in g.matrix for v in row]}
    if g.label is not None:
        d["label"] = g.label
    return d


def to_dict(circuit: Circuit) -> dict:
    return {
        "qubits": circuit.n_qubits,
        "roles": [_role_to_json(r) for r in circuit.roles],
        "outputs": list(circuit.outputs),
        "postselect": list(circuit.postselect),
        "gates": [gate_to_json(g) for g in circuit.gates],
    }


def serialize(circuit: Circuit, indent: int | None = None) -> str:
    return json.dumps(to_dict(circuit), indent=indent)


def _int(obj, key, where):
    if key not in obj:
        raise CircuitParseError(f"missing key {key!r}", where)
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise CircuitParseError(f"{key!r} must be an integer, got {v!r}", where)
    return v


def _complex_pair(v, where):
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) for c in v)):
        raise CircuitParseError(f"expected [re, im], got {v!r}", where)
    return complex(v[0], v[1])


def _role_from_json(obj, where) -> Role:
    if obj == "input":
        return INPUT
    if obj == "zero":
        return ZERO
    if isinstance(obj, dict) and "state" in obj and isinstance(obj["state"], list) \
            and len(obj["state"]) == 2:
        amps = tuple(_complex_pair(v, f"{where}.state[{i}]") for i, v in enumerate(obj["state"]))
        try:
            return Role("product", amps)
        except CircuitError as exc:
            raise CircuitParseError(str(exc), where) from None
    raise CircuitParseError(f"bad role {obj!r}", where)


def gate_from_json(obj, where="gate") -> G.Gate:
    if not isinstance(obj, dict) or "type" not in obj:
        raise CircuitParseError("gate must be an object with a 'type'", where)
    k = obj["type"]
    try:
        if k in ("H", "X"):
            return G.Gate(k, (_int(obj, "q", where),))
        if k == "R":
            return G.r(_int(obj, "q", where), _int(obj, "k", where), _int(obj, "sign", where))
        if k == "CZ":
            return G.cz(_int(obj, "a", where), _int(obj, "b", where))
        if k == "CNOT":
            return G.cnot(_int(obj, "control", where), _int(obj, "target", where))
        if k == "CR":
            return G.cr(_int(obj, "control", where), _int(obj, "target", where),
                        _int(obj, "k", where), _int(obj, "sign", where))
        if k == "U":
            qs = obj.get("qubits")
            if not isinstance(qs, list) or not all(isinstance(q, int) for q in qs):
                raise CircuitParseError("'qubits' must be a list of integers", where)
            flat = obj.get("matrix")
            dim = 1 << len(qs)
            if not isinstance(flat, list) or len(flat) != dim * dim:
                raise CircuitParseError(f"'matrix' must hold {dim * dim} [re, im] entries", where)
            vals = [_complex_pair(v, f"{where}.matrix[{i}]") for i, v in enumerate(flat)]
            m = np.array(vals, dtype=complex).reshape(dim, dim)
            return G.composite(qs, m, label=obj.get("label"))
    except CircuitParseError:
        raise
    except CircuitError as exc:
        raise CircuitParseError(str(exc), where) from None
    raise CircuitParseError(f"unknown gate type {k!r}", where)


def from_dict(obj) -> Circuit:
    if not isinstance(obj, dict):
        raise CircuitParseError("top level must be an object", "$")
    n = _int(obj, "qubits", "$")
    roles_raw = obj.get("roles", ["zero"] * n)
    if not isinstance(roles_raw, list):
        raise CircuitParseError("'roles' must be a list", "$.roles")
    roles = tuple(_role_from_json(r, f"$.roles[{i}]") for i, r in enumerate(roles_raw))
    lists = {}
    for key in ("outputs", "postselect"):
        v = obj.get(key, [])
        if not isinstance(v, list) or not all(isinstance(q, int) and not isinstance(q, bool) for q in v):
            raise CircuitParseError(f"{key!r} must be a list of integers", f"$.{key}")
        lists[key] = tuple(v)
    gates_raw = obj.get("gates", [])
    if not isinstance(gates_raw, list):
        raise CircuitParseError("'gates' must be a list", "$.gates")
    gates = tuple(gate_from_json(g, f"$.gates[{i}]") for i, g in enumerate(gates_raw))
    try:
        return Circuit(n, gates, roles, lists["outputs"], lists["postselect"])
    except CircuitError as exc:
        raise CircuitParseError(str(exc), "$") from None


def deserialize(text: str) -> Circuit:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_dict(obj)


def load(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def dump(circuit: Circuit, path, indent: int | None = 1) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(circuit, indent=indent))
        fh.write("\n")
