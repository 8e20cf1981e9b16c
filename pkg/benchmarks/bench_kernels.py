"""Time the numba and numpy flavours of each hot kernel side by side.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both flavours are imported directly, so the env flag does not matter here.
Each kernel is warmed up once before timing.
"""
import argparse
import timeit

import numpy as np

from qmemsim import kernels
from qmemsim._accel import HAVE_NUMBA
from qmemsim.process import build_transition_matrix
from qmemsim.quantum import encode_causal_qubit, step_isometry


def cases():
    pq = (0.3, 0.6)
    u = np.random.default_rng(0).random(100_000)
    cum = kernels.cumulative_table(build_transition_matrix(pq))
    V = step_isometry(pq)
    psi = encode_causal_qubit(pq, 1)
    ax = np.linspace(1e-4, 1 - 1e-4, 99)
    P, Q = (a.ravel() for a in np.meshgrid(ax, ax, indexing="ij"))
    X = np.random.default_rng(1).normal(size=(8, 8)) + 1j * np.random.default_rng(2).normal(size=(8, 8))
    H = (X + X.conj().T) / 2
    return [
        ("sample_chain 1e5 steps", "sample_chain", (cum, 0, u)),
        ("quantum_walk 1e5 steps", "quantum_walk", (V, psi, u)),
        ("complexity_batch 99x99", "complexity_batch", (P, Q)),
        ("jacobi_hermitian 8x8", "jacobi_hermitian", (H, 1e-13, 50)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba not installed: only the numpy column is meaningful")
    print(f"{'kernel':<26}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for label, name, call_args in cases():
        row = []
        for flavour in ("numba", "numpy"):
            fn = getattr(kernels, f"{name}_{flavour}")
            fn(*call_args)
            best = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
            row.append(best * 1e3)
        print(f"{label:<26}{row[0]:>12.3f}{row[1]:>12.3f}{row[1] / row[0]:>9.1f}x")


if __name__ == "__main__":
    main()
