"""Benchmark the oscillatory bilinear kernel: compiled core vs NumPy.

Run from the repository root::

    python3 benchmarks/bench_oscsum.py

The kernel reduces ``sum_{p,s} wp[p] ws[s] exp(i (A[p] . S[s]) / mu)``,
the inner loop of the brute-force quadrature oracle.  Both backends are
checked against each other before timing.
"""

import time

import numpy as np

from equivar.oscsum import BACKEND, osc_bilinear, osc_bilinear_numpy


def bench(P, S, d, mu=0.02, repeats=3, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((P, d))
    Sn = rng.standard_normal((S, d))
    wp = rng.random(P)
    ws = rng.random(S)

    ref = osc_bilinear_numpy(A, Sn, wp, ws, 1.0 / mu)
    val = osc_bilinear(A, Sn, wp, ws, 1.0 / mu)
    assert abs(val - ref) <= 1e-9 * max(abs(ref), 1.0), (val, ref)

    rows = {}
    for label, fn in (("numpy", osc_bilinear_numpy), (BACKEND, osc_bilinear)):
        best = min(_time_one(fn, A, Sn, wp, ws, 1.0 / mu)
                   for _ in range(repeats))
        rows[label] = best
    return rows


def _time_one(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main():
    print(f"selected backend: {BACKEND}")
    print(f"{'P':>8} {'S':>6} {'d':>2} {'numpy':>10} {BACKEND:>10} {'speedup':>8}")
    for P, S, d in ((2_000, 200, 2), (20_000, 500, 2),
                    (100_000, 500, 3), (500_000, 200, 3)):
        rows = bench(P, S, d)
        ratio = rows["numpy"] / rows[BACKEND]
        print(f"{P:>8} {S:>6} {d:>2} {rows['numpy']:>9.4f}s "
              f"{rows[BACKEND]:>9.4f}s {ratio:>7.2f}x")


if __name__ == "__main__":
    main()
