import numpy as np
import pytest

from ccsim import gates as G, kernels
from ccsim.circuit import INPUT, ZERO, Circuit, product


@pytest.fixture(params=kernels.available())
def backend(request):
    """Run the test once per available kernel backend."""
    previous = kernels.backend_name()
    kernels.use(request.param)
    yield request.param
    kernels.use(previous)


def random_state(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return (complex(v[0]), complex(v[1]))


def random_gate(rng, n, kinds=("H", "T", "P", "PDG", "Z", "X", "CZ", "CNOT", "CR")):
    kind = kinds[int(rng.integers(len(kinds)))]
    if n < 2 and kind in ("CZ", "CNOT", "CR"):
        kind = "H"
    a, b = (int(v) for v in rng.choice(n, 2, replace=False)) if n >= 2 else (0, 0)
    return {
        "H": lambda: G.h(a), "T": lambda: G.t(a), "P": lambda: G.p(a), "PDG": lambda: G.pdg(a),
        "Z": lambda: G.z(a), "X": lambda: G.x(a), "CZ": lambda: G.cz(a, b),
        "CNOT": lambda: G.cnot(a, b),
        "CR": lambda: G.cr(a, b, int(rng.integers(1, 5)), int(rng.choice([-1, 1]))),
    }[kind]()


def random_circuit(rng, n, n_gates, kinds=None, n_inputs=None, outputs=None, postselect=()):
    n_inputs = n if n_inputs is None else n_inputs
    gates = [random_gate(rng, n, kinds) if kinds else random_gate(rng, n) for _ in range(n_gates)]
    roles = (INPUT,) * n_inputs + (ZERO,) * (n - n_inputs)
    return Circuit(n, gates, roles, tuple(range(n)) if outputs is None else outputs, postselect)


CLIFFORD = ("H", "P", "PDG", "Z", "X", "CZ", "CNOT")
