"""Backend selection for the hot loops.

The compiled extension ``ccsim._kernels`` is used when it imports; otherwise
the numpy versions in ``ccsim._kernels_py`` are. Set ``CCSIM_BACKEND=python``
before import to force the fallback, or call :func:`use` at runtime.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = None


def available():
    return sorted(_BACKENDS)


def use(name):
    """Switch the active backend; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available()})")
    prev = backend_name()
    _active = name
    return prev


def backend_name():
    return _active


def current():
    return _BACKENDS[_active]


use(os.environ.get("CCSIM_BACKEND") or ("compiled" if _compiled is not None else "python"))


def apply_matrix(state, n, qubits, mat):
    current().apply_matrix(state, n, qubits, mat)


def apply_diagonal(state, n, qubits, diag):
    current().apply_diagonal(state, n, qubits, diag)


def pauli_sweep(letters, phases, ops, one_letter, one_phase, two_code, two_phase):
    current().pauli_sweep(letters, phases, ops, one_letter, one_phase, two_code, two_phase)
