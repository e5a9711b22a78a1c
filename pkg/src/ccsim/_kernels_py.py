"""Reference numpy implementations of the compiled kernels.

Same signatures and in-place semantics as ``_kernels.pyx``.
"""
import numpy as np


def apply_matrix(state, n, qubits, mat):
    k = len(qubits)
    psi = state.reshape([2] * n)
    axes = [int(q) for q in qubits]
    moved = np.moveaxis(psi, axes, range(k)).reshape(1 << k, -1)
    out = (np.asarray(mat) @ moved).reshape([2] * n)
    psi[...] = np.moveaxis(out, range(k), axes)


def apply_diagonal(state, n, qubits, diag):
    k = len(qubits)
    idx = np.arange(1 << n)
    sub = np.zeros(1 << n, dtype=np.intp)
    for q in qubits:
        sub = (sub << 1) | ((idx >> (n - 1 - int(q))) & 1)
    state *= np.asarray(diag)[sub]


def pauli_sweep(letters, phases, ops, one_letter, one_phase, two_code, two_phase):
    n1 = one_letter.shape[0]
    acc = phases.astype(np.int64)
    for code, q1, q2 in np.asarray(ops):
        if code < n1:
            col = letters[:, q1]
            acc += one_phase[code][col]
            letters[:, q1] = one_letter[code][col]
        else:
            c = code - n1
            pair = 4 * letters[:, q1].astype(np.intp) + letters[:, q2]
            acc += two_phase[c][pair]
            new = two_code[c][pair]
            letters[:, q1] = new >> 2
            letters[:, q2] = new & 3
    phases[:] = (acc & 3).astype(phases.dtype)
