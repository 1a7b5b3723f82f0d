"""Compare the numba and numpy polynomial-matrix kernels.

Run with ``python benchmarks/bench_kernels.py``.  Every case first checks
that both kernels agree, then reports the best of several timings.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from nullplane import _kernels, load
from nullplane.matrixrep import build_rep, evaluate_R, r_factors_text, swap_matrix


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def qybe_operands(name):
    pres = load(name, 2)
    rep = build_rep(pres)
    R = evaluate_R(rep, r_factors_text(pres))
    ident = rep.identity()
    r12 = R.kron(ident)
    s23 = ident.kron(swap_matrix(rep.dim))
    r13 = s23 @ r12 @ s23
    return (r12 @ r13).num, ident.kron(R).num


def random_operands(rng, n, degree, density=0.1):
    def one():
        a = rng.integers(-3, 4, size=(degree + 1, n, n))
        a[rng.random(a.shape) > density] = 0
        return a.astype(np.int64)
    return one(), one()


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    cases = {
        "qybe 1+1 (27x27)": qybe_operands("poincare-1+1-quantum"),
        "qybe 2+1 (64x64)": qybe_operands("poincare-2+1-quantum"),
        "qybe 3+1 (125x125)": qybe_operands("poincare-3+1-quantum"),
        "random 125x125 deg 6": random_operands(rng, 125, 6),
        "random 250x250 deg 3": random_operands(rng, 250, 3),
    }
    if _kernels.polymatmul_numba is None:
        print("numba unavailable; nothing to compare")
        return 1
    _kernels.polymatmul_numba(*cases["qybe 1+1 (27x27)"])  # compile outside the timings
    print(f"{'case':24} {'numba ms':>10} {'numpy ms':>10} {'ratio':>7}")
    for label, (a, b) in cases.items():
        if not np.array_equal(_kernels.polymatmul_numba(a, b), _kernels.polymatmul_numpy(a, b)):
            raise SystemExit(f"kernels disagree on {label}")
        tn = best_of(lambda: _kernels.polymatmul_numba(a, b), args.repeat)
        tp = best_of(lambda: _kernels.polymatmul_numpy(a, b), args.repeat)
        print(f"{label:24} {tn * 1e3:10.2f} {tp * 1e3:10.2f} {tp / tn:7.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
