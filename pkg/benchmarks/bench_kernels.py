"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--qubits 18] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from ccsim import gates as G, kernels, pauli


def _cases(n, rng):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    psi /= np.linalg.norm(psi)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    u2 = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    diag = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    q1 = np.array([n // 2], dtype=np.int64)
    q2 = np.array([1, n - 2], dtype=np.int64)

    m = 24
    kinds = ["H", "P", "CZ", "CNOT"]
    gs = []
    for _ in range(400):
        k = kinds[rng.integers(len(kinds))]
        a, b = (int(v) for v in rng.choice(m, 2, replace=False))
        gs.append({"H": G.h(a), "P": G.p(a), "CZ": G.cz(a, b), "CNOT": G.cnot(a, b)}[k])
    ops = pauli._encode(gs, True)
    letters = rng.integers(0, 4, size=(2000, m)).astype(np.uint8)
    phases = np.zeros(2000, dtype=np.uint8)

    def sweep():
        kernels.pauli_sweep(letters.copy(), phases.copy(), ops, pauli.ONE_LETTER, pauli.ONE_PHASE,
                            pauli.TWO_CODE, pauli.TWO_PHASE)

    return {
        f"apply_matrix 1q ({n} qubits)": lambda: kernels.apply_matrix(psi, n, q1, h),
        f"apply_matrix 2q ({n} qubits)": lambda: kernels.apply_matrix(psi, n, q2, u2),
        f"apply_diagonal 2q ({n} qubits)": lambda: kernels.apply_diagonal(psi, n, q2, diag),
        "pauli_sweep 2000 x 400 gates": sweep,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, default=18)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = kernels.available()
    cases = _cases(args.qubits, np.random.default_rng(0))
    results = {}
    for backend in names:
        kernels.use(backend)
        for label, fn in cases.items():
            fn()  # warm up
            results[label, backend] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    print(f"{'kernel':34s}" + "".join(f"{b:>12s}" for b in names)
          + ("     speedup" if len(names) == 2 else ""))
    for label in cases:
        row = f"{label:34s}" + "".join(f"{results[label, b] * 1e3:10.2f}ms" for b in names)
        if len(names) == 2:
            row += f"{results[label, 'python'] / results[label, 'compiled']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
