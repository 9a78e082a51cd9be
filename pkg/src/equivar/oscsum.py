"""Oscillatory bilinear reduction with a compiled core and NumPy fallback.

The brute-force quadrature oracle spends essentially all of its time in

    sum_{p, s} wp[p] * ws[s] * exp(i * (A[p] . S[s]) / mu)

where ``A`` holds one row of phase coefficients per fiber node and ``S``
the Lie-coordinate nodes.  A Cython kernel (built at install time when a
compiler is available) and a chunked NumPy implementation compute the
same quantity; the compiled one is selected at import when present.
``benchmarks/bench_oscsum.py`` compares the two.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised indirectly
    from ._oscsum import osc_bilinear as _compiled
    BACKEND = "cython"
except ImportError:  # pragma: no cover
    _compiled = None
    BACKEND = "numpy"


def osc_bilinear_numpy(A, S, wp, ws, inv_mu, chunk_elems=4_000_000):
    """Pure-NumPy evaluation, chunked over fiber rows to bound memory."""
    A = np.ascontiguousarray(A, dtype=float)
    S = np.ascontiguousarray(S, dtype=float)
    wp = np.asarray(wp, dtype=float)
    ws = np.asarray(ws, dtype=float)
    P = A.shape[0]
    Sn = S.shape[0]
    if P == 0 or Sn == 0:
        return 0.0 + 0.0j
    step = max(1, int(chunk_elems // max(Sn, 1)))
    total = 0.0 + 0.0j
    for lo in range(0, P, step):
        hi = min(P, lo + step)
        M = (A[lo:hi] @ S.T) * inv_mu
        total += wp[lo:hi] @ (np.exp(1j * M) @ ws)
    return complex(total)


def osc_bilinear(A, S, wp, ws, inv_mu):
    """Dispatch to the compiled kernel when available."""
    if _compiled is not None:
        A = np.ascontiguousarray(A, dtype=float)
        S = np.ascontiguousarray(S, dtype=float)
        wp = np.ascontiguousarray(wp, dtype=float)
        ws = np.ascontiguousarray(ws, dtype=float)
        return _compiled(A, S, wp, ws, float(inv_mu))
    return osc_bilinear_numpy(A, S, wp, ws, inv_mu)
