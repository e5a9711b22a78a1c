import json

import numpy as np
import pytest

from ccsim import constructions as K, gates as G, serialize
from ccsim.circuit import INPUT, ZERO, Circuit, product
from ccsim.errors import CircuitParseError


def test_roundtrip_en_instance():
    e = K.build_En(K.compress_depth3(K.small_example()).circuit)
    assert serialize.deserialize(serialize.serialize(e)) == e


def test_roundtrip_every_gate_kind(tmp_path):
    phi = product(K.magic_state())
    c = Circuit(3, [G.h(0), G.r(1, 3, -1), G.cz(0, 1), G.cr(0, 2, 2, -1), G.cnot(1, 2), G.x(2),
                    G.composite((0, 1), np.kron(G.H_MATRIX, np.diag([1, 1j])), label="hp")],
                (INPUT, ZERO, phi), outputs=(2,), postselect=(1,))
    path = tmp_path / "c.json"
    serialize.dump(c, path)
    assert serialize.load(path) == c


def test_format_matches_documented_layout():
    obj = json.loads(serialize.serialize(Circuit(2, [G.cr(0, 1, 3)], (INPUT, ZERO), outputs=(1,))))
    assert obj["qubits"] == 2 and obj["roles"] == ["input", "zero"]
    assert obj["gates"] == [{"type": "CR", "control": 0, "target": 1, "sign": 1, "k": 3}]


@pytest.mark.parametrize("text", [
    "{not json",
    '{"qubits": 2, "roles": ["input", "zero"], "outputs": [], "postselect": [], "gates": [{"type": "Q"}]}',
    '{"qubits": 2, "roles": ["input", "zero"], "outputs": [], "postselect": [], "gates": [{"type": "CZ", "a": 1, "b": 1}]}',
    '{"qubits": 1, "roles": ["input"], "outputs": [], "postselect": [], "gates": [{"type": "R", "q": 0, "sign": 2, "k": 1}]}',
    '{"gates": []}',
    '{"qubits": 1, "outputs": [5]}',
])
def test_parse_errors_carry_position(text):
    with pytest.raises(CircuitParseError) as info:
        serialize.deserialize(text)
    assert info.value.position is not None
