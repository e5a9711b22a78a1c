# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops; see ``_kernels_py`` for the reference versions."""
import numpy as np


def apply_matrix(double complex[::1] state, int n, const long[::1] qubits,
                 const double complex[:, ::1] mat):
    """In-place ``state <- (mat on qubits) state``; qubits big-endian."""
    cdef Py_ssize_t k = qubits.shape[0]
    cdef Py_ssize_t dim = 1 << k
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t i, r, s, j
    cdef Py_ssize_t mask = 0
    cdef double complex acc
    cdef double complex a0, a1
    offsets_arr = np.zeros(dim, dtype=np.intp)
    cdef Py_ssize_t[::1] offsets = offsets_arr
    tmp_arr = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] tmp = tmp_arr
    for j in range(k):
        mask |= (<Py_ssize_t>1) << (n - 1 - qubits[j])
    for s in range(dim):
        for j in range(k):
            if (s >> (k - 1 - j)) & 1:
                offsets[s] += (<Py_ssize_t>1) << (n - 1 - qubits[j])
    if k == 1:
        j = offsets[1]
        for i in range(size):
            if i & mask:
                continue
            a0 = state[i]
            a1 = state[i + j]
            state[i] = mat[0, 0] * a0 + mat[0, 1] * a1
            state[i + j] = mat[1, 0] * a0 + mat[1, 1] * a1
        return
    for i in range(size):
        if i & mask:
            continue
        for s in range(dim):
            tmp[s] = state[i + offsets[s]]
        for r in range(dim):
            acc = 0
            for s in range(dim):
                acc = acc + mat[r, s] * tmp[s]
            state[i + offsets[r]] = acc


def apply_diagonal(double complex[::1] state, int n, const long[::1] qubits,
                   const double complex[::1] diag):
    cdef Py_ssize_t k = qubits.shape[0]
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t i, j, s
    for i in range(size):
        s = 0
        for j in range(k):
            s = (s << 1) | ((i >> (n - 1 - qubits[j])) & 1)
        state[i] = state[i] * diag[s]


def pauli_sweep(unsigned char[:, ::1] letters, unsigned char[::1] phases,
                const int[:, ::1] ops,
                const unsigned char[:, ::1] one_letter, const unsigned char[:, ::1] one_phase,
                const unsigned char[:, ::1] two_code, const unsigned char[:, ::1] two_phase):
    """Conjugate every row of ``letters`` through ``ops`` in the given order.

    ``ops`` rows are ``(opcode, q1, q2)``; opcodes below ``one_letter.shape[0]``
    are single-qubit, the rest index ``two_code`` after subtracting that count.
    """
    cdef Py_ssize_t rows = letters.shape[0]
    cdef Py_ssize_t nops = ops.shape[0]
    cdef Py_ssize_t n1 = one_letter.shape[0]
    cdef Py_ssize_t r, o
    cdef int code, a, b, q1, q2, pair, c
    cdef unsigned char ph
    for r in range(rows):
        ph = phases[r]
        for o in range(nops):
            code = ops[o, 0]
            q1 = ops[o, 1]
            if code < n1:
                a = letters[r, q1]
                ph = ph + one_phase[code, a]
                letters[r, q1] = one_letter[code, a]
            else:
                c = code - n1
                q2 = ops[o, 2]
                pair = 4 * letters[r, q1] + letters[r, q2]
                ph = ph + two_phase[c, pair]
                pair = two_code[c, pair]
                letters[r, q1] = pair >> 2
                letters[r, q2] = pair & 3
        phases[r] = ph & 3
