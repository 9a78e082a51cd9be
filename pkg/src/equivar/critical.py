"""Location and certification of the critical set of the phase.

The phase ``psi(q, p, s) = p . X~(q, s)`` is bilinear in ``(p, s)``; its
critical set contains a smooth part of codimension ``2 kappa`` over the
principal stratum.  This module certifies sample points: gradient and
value vanish, the Hessian restricted to the normal space of the critical
manifold (the row space of the full Hessian) has rank exactly
``2 kappa``, and the Hessian kernel agrees with the analytic tangent
space of the critical manifold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PhasePoint, fundamental_field, phase_grad_hess


class NotCriticalError(ValueError):
    """The supplied point does not satisfy the gradient tolerance."""


class DegenerateTransversalError(ValueError):
    """The transversal Hessian rank differs from ``2 kappa``."""


@dataclass(frozen=True)
class CriticalSample:
    """A certified point of the regular part of the critical set."""

    pt: PhasePoint
    grad_norm: float
    hess: np.ndarray
    normal_basis: np.ndarray   # columns: orthonormal normal directions
    trans_hess: np.ndarray
    rank: int
    signature: int
    kernel_dim: int
    stratum: str


def phase_gradient(action, pt):
    """Gradient of ``psi`` split into ``(d_q psi, d_p psi, d_s psi)``."""
    n = action.chart(pt.chart).dim
    _, g, _ = phase_grad_hess(action, pt.chart, pt.q, pt.p, pt.s)
    g = np.asarray(g, dtype=float)
    return g[:n], g[n:2 * n], g[2 * n:]


def omega_residual(action, chart, q, p):
    """Moment-map components ``(J_{X_1}(eta), ..., J_{X_d}(eta))``.

    The covector lies on the zero level of the moment map iff all entries
    vanish; entry ``i`` equals ``p . X~_i(q)``.
    """
    d = action.group_dim
    out = []
    for i in range(d):
        s = [0.0] * d
        s[i] = 1.0
        v = fundamental_field(action, chart, q, s)
        out.append(float(sum(pi * vi for pi, vi in zip(p, v))))
    return np.array(out)


def isotropy_algebra(action, chart, q, tol=1e-8):
    """Orthonormal basis (columns) of the isotropy algebra at ``q``.

    Computed as the nullspace of the ``n x d`` matrix of fundamental
    fields via SVD; singular values below ``tol * sigma_max`` count as
    zero.
    """
    n = action.chart(chart).dim
    d = action.group_dim
    M = np.zeros((n, d))
    for i in range(d):
        s = [0.0] * d
        s[i] = 1.0
        M[:, i] = fundamental_field(action, chart, q, s)
    _, sv, vt = np.linalg.svd(M)
    smax = sv[0] if sv.size else 0.0
    nullity = d - int(np.sum(sv > tol * max(smax, 1e-300)))
    if nullity == 0:
        return np.zeros((d, 0))
    return vt[d - nullity:].T


def _eig_split(w, tol_scale=1e-8):
    wmax = float(np.max(np.abs(w))) if w.size else 0.0
    thr = tol_scale * max(wmax, 1e-300)
    pos = int(np.sum(w > thr))
    neg = int(np.sum(w < -thr))
    return pos, neg


def certify_regular_critical(action, pt, tol=1e-10):
    """Certify that ``pt`` lies on the regular part of the critical set.

    Raises :class:`NotCriticalError` if the gradient or the phase value
    exceeds ``tol``, and :class:`DegenerateTransversalError` if the
    transversal Hessian rank is not ``2 kappa`` (which happens over
    singular strata, where the blow-up machinery takes over).
    """
    val, g, h = phase_grad_hess(action, pt.chart, pt.q, pt.p, pt.s)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    grad_norm = float(np.linalg.norm(g))
    if grad_norm > tol or abs(float(val)) > tol:
        raise NotCriticalError(
            f"|grad psi| = {grad_norm:.3e}, |psi| = {abs(float(val)):.3e} "
            f"exceed tolerance {tol:.1e}")
    w, vecs = np.linalg.eigh(h)
    pos, neg = _eig_split(w)
    rank = pos + neg
    order = np.argsort(-np.abs(w))
    normal = vecs[:, order[:rank]]
    trans = normal.T @ h @ normal
    trans = 0.5 * (trans + trans.T)
    if rank != 2 * action.kappa:
        raise DegenerateTransversalError(
            f"transversal rank {rank} != 2 kappa = {2 * action.kappa}")
    wt = np.linalg.eigvalsh(trans)
    tpos, tneg = _eig_split(wt)
    return CriticalSample(
        pt=pt, grad_norm=grad_norm, hess=h,
        normal_basis=normal, trans_hess=trans,
        rank=rank, signature=tpos - tneg,
        kernel_dim=h.shape[0] - rank,
        stratum=action.stratum_of(pt.chart, pt.q),
    )


def _sampling_box(action):
    """Parameter box for drawing regular critical points."""
    from .catalogue import Amplitude

    crit = action.crit_params[action.principal_chart]
    mid = [0.5 * (lo + hi) for lo, hi in action.principal_box]
    probe = Amplitude(id="_sample", action=action.name, chart=crit.chart,
                      q0=tuple(mid), r_q=1.1, R=1.0, R_s=1.0)
    return crit, crit.box(probe)


def sample_regular_critical(action, count, seed):
    """Draw ``count`` certified critical samples, reproducible by seed.

    Points come from the analytic parametrization of the regular critical
    set over the principal chart; each is certified, and the Hessian
    kernel is checked against the analytic tangent directions of the
    parametrization (largest principal angle below 1e-6).
    """
    from . import jets

    rng = np.random.default_rng(seed)
    crit, box = _sampling_box(action)
    out = []
    while len(out) < count:
        t = [float(rng.uniform(lo, hi)) for lo, hi in box]
        q, p, s = crit.to_phase(t)
        pt = PhasePoint(crit.chart,
                        tuple(float(jets.value(c)) for c in q),
                        tuple(float(jets.value(c)) for c in p),
                        tuple(float(jets.value(c)) for c in s))
        sample = certify_regular_critical(action, pt)
        # analytic tangent of the critical manifold at this point
        tj = jets.seed(t)
        q2, p2, s2 = crit.to_phase(tj)
        cols = []
        for c in list(q2) + list(p2) + list(s2):
            cols.append(c.g if isinstance(c, jets.Jet2) else np.zeros(len(t)))
        tangent = np.array(cols)  # (2n+d, len(t))
        tangent = tangent / np.linalg.norm(tangent, axis=0, keepdims=True)
        overlap = sample.normal_basis.T @ tangent
        if float(np.linalg.norm(overlap)) > 1e-6:
            raise DegenerateTransversalError(
                "Hessian kernel misaligned with the analytic tangent space")
        out.append(sample)
    return out
