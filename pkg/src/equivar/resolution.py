"""Blow-up coordinates and the weak transform of the phase.

A depth-N isotropy chain replaces a neighborhood of a singular stratum
by blow-up coordinates ``(sigma, x, v~, alpha, beta, p)``: ``x`` moves
along the stratum center, ``v~`` is a unit normal direction (described
in one of ``c`` projective charts indexed by ``rho``), ``tau`` (derived
from ``sigma``) is the signed distance along the normal geodesic, and
the Lie-algebra element splits as ``X = tau * A + B`` with ``A`` in the
orthogonal complement of the isotropy algebra of the center and ``B``
inside it.

On these coordinates the phase factorizes exactly,
``psi o zeta = (prod tau) * psi_wk``, and the weak transform ``psi_wk``
stays smooth across the exceptional divisor ``tau = 0``.  This module
evaluates both sides, checks the critical conditions

    (I)   alpha = 0 and lambda(B) v~ = 0,
    (II)  eta annihilates the pushed-forward orbit directions E,
    (III) eta annihilates the pushed-forward fiber directions F,

certifies the transversal Hessian of ``psi_wk`` in ``(alpha, beta, p)``
(rank ``2 kappa``, uniformly nondegenerate in ``sigma``), and computes
the Jacobian factor ``prod |tau_j|^(c_j + sum_r d_r - 1) * Phi`` of the
coordinate change, with the smooth factor ``Phi`` obtained numerically
as a determinant ratio on a reference ``tau``-slice.

Only depth-1 chains occur in the catalogue; the sigma -> tau
substitution and the Lie-algebra recombination are written for general
depth, while the geometric composition of nested exponential maps is
implemented for depth 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import jets
from .geometry import dot, fundamental_field


class UnsupportedDepthError(ValueError):
    pass


class RankDeficientError(ValueError):
    """The weak-transform Hessian misses the expected rank ``2 kappa``."""


@dataclass(frozen=True)
class BlowupPoint:
    """Resolved coordinates of a point for one isotropy chain."""

    chain: object            # IsotropyChain
    sigma: tuple             # (sigma_1, ..., sigma_N), each in (-1, 1)
    base: tuple              # per-level center parameters
    rho: int                 # distinguished projective chart index for v~
    vq: tuple                # c - 1 chart coordinates of v~
    alpha: tuple             # per-level coefficient tuples on g_x-perp bases
    beta: tuple              # coefficients on the deepest isotropy basis
    p: tuple                 # fiber coordinates over the image point

    @property
    def tau(self):
        return delta_substitution(self.sigma)


@dataclass
class WeakTransformReport:
    psi_tot: float
    psi_wk: float
    factor: float
    factor_residual: float
    conds: tuple = (False, False, False)
    wk_hess_rank: Optional[int] = None
    min_nonzero_eig: Optional[float] = None
    eigenvalues: Optional[np.ndarray] = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# delta substitution
# ---------------------------------------------------------------------------

def delta_substitution(sigma):
    """Map the blow-up parameters ``sigma`` to the monomial factors ``tau``.

    Step ``j`` multiplies every coordinate except position ``j`` by the
    current ``j``-th coordinate.  For depth 1 this is the identity; the
    depth-2 monomials are frozen in the test suite.
    """
    t = list(sigma)
    n = len(t)
    for j in range(n):
        tj = t[j]
        for i in range(n):
            if i != j:
                t[i] = t[i] * tj
    return tuple(t)


def delta_jacobian(sigma):
    """``|det D(delta_substitution)|`` at ``sigma``, by jet arithmetic."""
    n = len(sigma)
    if n == 1:
        return 1.0
    sj = jets.seed(list(sigma))
    out = delta_substitution(sj)
    J = np.array([c.g for c in out])
    return abs(float(np.linalg.det(J)))


# ---------------------------------------------------------------------------
# blow-up geometry (depth 1)
# ---------------------------------------------------------------------------

def v_tilde(bp):
    """Unit normal direction encoded by ``(rho, vq)``."""
    level = bp.chain.levels[-1]
    c = level.dims[0]
    w = [None] * c
    idx = 0
    for i in range(c):
        if i == bp.rho:
            w[i] = 1.0
        else:
            w[i] = bp.vq[idx]
            idx += 1
    norm = jets.sqrt(sum(wi * wi for wi in w))
    return [wi / norm for wi in w]


def _require_depth_one(chain):
    if chain.depth != 1:
        raise UnsupportedDepthError(
            f"chain {chain.id!r} has depth {chain.depth}; geometric "
            "composition is implemented for depth-1 chains (all catalogue "
            "chains have depth 1)")


def _lie_element(level, alpha, beta):
    """Coefficients of ``tau*A + B`` given the split bases (tau applied
    by the caller)."""
    d_lie = len(level.iso_perp_basis[0]) if level.iso_perp_basis else \
        len(level.iso_basis[0])
    A = [0.0] * d_lie
    for aj, vec in zip(alpha, level.iso_perp_basis):
        for k in range(d_lie):
            A[k] = A[k] + aj * vec[k]
    B = [0.0] * d_lie
    for bi, vec in zip(beta, level.iso_basis):
        for k in range(d_lie):
            B[k] = B[k] + bi * vec[k]
    return A, B


def blowup_forward(action, bp):
    """Forward map ``zeta``: blow-up coordinates to ``(chart, m, X)``."""
    _require_depth_one(bp.chain)
    level = bp.chain.levels[0]
    tau = bp.tau[0]
    vt = v_tilde(bp)
    m = level.exp_map(bp.base[0], [tau * vi for vi in vt])
    A, B = _lie_element(level, bp.alpha[0], bp.beta)
    X = [tau * a + b for a, b in zip(A, B)]
    return level.chart, m, X


def _pushforward_frame(level, x):
    """Chart-coordinate columns of the normal frame (the exponential maps
    of all catalogue charts are affine in coordinates, so the
    differential of ``exp_x`` is the frame itself)."""
    return level.normal_frame(x)


def weak_phase_value(action, bp, alpha, beta, p):
    """Weak transform ``psi_wk`` at ``bp`` with ``(alpha, beta, p)``
    replaced by the given (possibly jet-valued) coordinates.

    ``psi_wk = eta(A~_m) + eta((exp_x)_* lambda(B) v~)`` — evaluated
    directly from the closed forms, never by dividing the total
    transform by the exceptional monomial.
    """
    level = bp.chain.levels[0]
    chart, m, _ = blowup_forward(action, bp)
    A, _ = _lie_element(level, list(alpha), list(beta))
    vt = v_tilde(bp)
    lam = level.lam(bp.base[0], list(beta))
    lv = [dot(row, vt) for row in lam]
    frame = _pushforward_frame(level, bp.base[0])
    push = [sum(lv[i] * frame[i][j] for i in range(len(frame)))
            for j in range(len(frame[0]))]
    out = dot(list(p), push)
    if level.iso_perp_basis:
        orbit = fundamental_field(action, chart, m, A)
        out = out + dot(list(p), orbit)
    return out


def weak_transform_phase(action, bp, tol=1e-8):
    """Evaluate total and weak transforms and their factorization residual."""
    _require_depth_one(bp.chain)
    chart, m, X = blowup_forward(action, bp)
    v = fundamental_field(action, chart, m, X)
    psi_tot = float(dot(list(bp.p), v))
    psi_wk = float(weak_phase_value(action, bp, bp.alpha[0], bp.beta, bp.p))
    factor = float(np.prod(bp.tau))
    return WeakTransformReport(
        psi_tot=psi_tot, psi_wk=psi_wk, factor=factor,
        factor_residual=abs(psi_tot - factor * psi_wk),
        conds=weak_critical_conditions(action, bp, tol),
    )


# ---------------------------------------------------------------------------
# critical conditions and the E / F distributions
# ---------------------------------------------------------------------------

def ef_spans(action, bp):
    """Spanning vectors (chart components at ``m``) of the distributions
    E (pushed-forward orbit directions of the ``A``-basis) and F (images
    ``(exp_x)_* lambda(B_i) v~`` of the isotropy basis)."""
    level = bp.chain.levels[0]
    chart, m, _ = blowup_forward(action, bp)
    vt = v_tilde(bp)
    frame = _pushforward_frame(level, bp.base[0])
    E = []
    for vec in level.iso_perp_basis:
        E.append(fundamental_field(action, chart, m, list(vec)))
    F = []
    for i in range(len(level.iso_basis)):
        coeffs = [1.0 if k == i else 0.0 for k in range(len(level.iso_basis))]
        lam = level.lam(bp.base[0], coeffs)
        lv = [dot(row, vt) for row in lam]
        F.append([sum(lv[i] * frame[i][j] for i in range(len(frame)))
                  for j in range(len(frame[0]))])
    return E, F


def weak_critical_conditions(action, bp, tol=1e-8):
    """Booleans for conditions (I), (II), (III) at ``bp``."""
    level = bp.chain.levels[0]
    vt = v_tilde(bp)
    lam = level.lam(bp.base[0], list(bp.beta))
    lv = [dot(row, vt) for row in lam]
    alpha_norm = max((abs(a) for a in bp.alpha[0]), default=0.0)
    cond1 = alpha_norm <= tol and max(
        (abs(x) for x in lv), default=0.0) <= tol
    E, F = ef_spans(action, bp)
    cond2 = all(abs(dot(list(bp.p), e)) <= tol for e in E)
    cond3 = all(abs(dot(list(bp.p), f)) <= tol for f in F)
    return (cond1, cond2, cond3)


def weak_gradient(action, bp):
    """Gradient of ``psi_wk`` in ``(alpha, beta, p)`` with the remaining
    blow-up coordinates frozen."""
    level = bp.chain.levels[0]
    na, ne, npp = len(bp.alpha[0]), len(bp.beta), len(bp.p)

    def f(u):
        return weak_phase_value(action, bp, u[:na], u[na:na + ne],
                                u[na + ne:])

    _, g, _ = jets.grad_hess(f, list(bp.alpha[0]) + list(bp.beta) + list(bp.p))
    return np.asarray(g, dtype=float)


def certify_weak_hessian(action, bp, tol=1e-8, tol_eig=1e-8):
    """Certify the transversal Hessian of ``psi_wk`` at a critical point.

    The Hessian is taken in ``(alpha, beta, p)`` with ``(sigma, x, v~)``
    frozen; its rank must equal ``2 kappa`` (raises
    :class:`RankDeficientError` otherwise).
    """
    conds = weak_critical_conditions(action, bp, tol)
    if not all(conds):
        raise RankDeficientError(
            f"point is not weak-critical: conditions {conds}")
    level = bp.chain.levels[0]
    na, ne = len(bp.alpha[0]), len(bp.beta)

    def f(u):
        return weak_phase_value(action, bp, u[:na], u[na:na + ne],
                                u[na + ne:])

    val, g, h = jets.grad_hess(
        f, list(bp.alpha[0]) + list(bp.beta) + list(bp.p))
    h = np.asarray(h, dtype=float)
    w = np.linalg.eigvalsh(h)
    wmax = float(np.max(np.abs(w))) if w.size else 0.0
    nz = w[np.abs(w) > tol_eig * max(wmax, 1e-300)]
    rank = int(nz.size)
    report = WeakTransformReport(
        psi_tot=float("nan"), psi_wk=float(val), factor=float(np.prod(bp.tau)),
        factor_residual=0.0, conds=conds, wk_hess_rank=rank,
        min_nonzero_eig=float(np.min(np.abs(nz))) if rank else 0.0,
        eigenvalues=w,
    )
    if rank != 2 * action.kappa:
        raise RankDeficientError(
            f"weak Hessian rank {rank} != 2 kappa = {2 * action.kappa}")
    if abs(float(val)) > 1e-10:
        raise RankDeficientError(
            f"psi_wk = {float(val):.3e} does not vanish at a critical point")
    return report


def alpha_chart_noncritical(action, chain, samples, seed=0):
    """Minimum ``|grad psi_wk|`` over random alpha-chart points.

    In the alpha-chart of the further blow-up the leading orbit
    coefficient is fixed at +-1, so the weak transform cannot be
    stationary there; returns ``None`` for chains with ``d = 0`` at the
    blown-up level (nothing to check).
    """
    level = chain.levels[0]
    if level.dims[1] == 0:
        return None
    rng = np.random.default_rng(seed)
    c = level.dims[0]
    nmin = math.inf
    chart_dim = len(level.normal_frame(
        [0.0] * level.center_dim if level.center_dim else [])[0])
    for _ in range(samples):
        bp = BlowupPoint(
            chain=chain,
            sigma=(float(rng.uniform(-0.9, 0.9)),),
            base=(tuple(rng.uniform(lo, hi) for lo, hi in level.center_box),),
            rho=int(rng.integers(c)),
            vq=tuple(rng.uniform(-1.5, 1.5, size=c - 1)),
            alpha=(tuple(float(rng.choice([-1.0, 1.0]))
                         for _ in range(level.dims[1])),),
            beta=tuple(rng.uniform(-1.0, 1.0, size=level.dims[2])),
            p=tuple(rng.uniform(-1.0, 1.0, size=chart_dim)),
        )
        ne, npp = len(bp.beta), len(bp.p)

        def f(u):
            return weak_phase_value(action, bp, bp.alpha[0], u[:ne], u[ne:])

        _, g, _ = jets.grad_hess(f, list(bp.beta) + list(bp.p))
        nmin = min(nmin, float(np.linalg.norm(np.asarray(g, dtype=float))))
    return nmin


# ---------------------------------------------------------------------------
# Jacobian factor
# ---------------------------------------------------------------------------

def _chain_map_det(action, bp, sigma_value):
    """``|det|`` of the full blow-up coordinate change at one sigma."""
    level = bp.chain.levels[0]
    nx = level.center_dim
    c = level.dims[0]
    na, ne = level.dims[1], level.dims[2]
    npp = len(bp.p)

    def chain_map(u):
        i = 0
        x = u[i:i + nx]; i += nx
        sg = u[i]; i += 1
        vq = u[i:i + c - 1]; i += c - 1
        al = u[i:i + na]; i += na
        be = u[i:i + ne]; i += ne
        p = u[i:i + npp]
        bpl = BlowupPoint(chain=bp.chain, sigma=(sg,), base=(tuple(x),),
                          rho=bp.rho, vq=tuple(vq), alpha=(tuple(al),),
                          beta=tuple(be), p=tuple(p))
        _, m, X = blowup_forward(action, bpl)
        return list(m) + list(p) + list(X)

    u0 = (list(bp.base[0]) + [sigma_value] + list(bp.vq)
          + list(bp.alpha[0]) + list(bp.beta) + list(bp.p))
    uj = jets.seed(u0)
    out = chain_map(uj)
    k = len(u0)
    J = np.array([c_.g if isinstance(c_, jets.Jet2) else np.zeros(k)
                  for c_ in out])
    return abs(float(np.linalg.det(J)))


def _tau_exponents(chain):
    """Exponents ``c_j + sum_{r <= j} d_r - 1`` per chain level."""
    out = []
    dsum = 0
    for level in chain.levels:
        cj, dj, _ = level.dims
        dsum += dj
        out.append(cj + dsum - 1)
    return out


def smooth_factor(action, bp, at_sigma=0.5):
    """The tau-independent factor ``Phi`` of the Jacobian, from the
    determinant of the chain map evaluated on the ``sigma = at_sigma``
    slice through ``bp``."""
    _require_depth_one(bp.chain)
    expo = _tau_exponents(bp.chain)[0]
    det = _chain_map_det(action, bp, at_sigma)
    return det / abs(at_sigma) ** expo


def jacobian_power(action, bp):
    """Full Jacobian weight ``prod_j |tau_j|^(c_j + sum d_r - 1) * Phi``."""
    _require_depth_one(bp.chain)
    expo = _tau_exponents(bp.chain)[0]
    phi = smooth_factor(action, bp)
    return abs(bp.tau[0]) ** expo * phi


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _chart_dim(action, chain):
    return action.chart(chain.levels[0].chart).dim


def sample_blowup_points(action, chain, count, seed):
    """Random blow-up points with coordinates in the standard boxes."""
    _require_depth_one(chain)
    rng = np.random.default_rng(seed)
    level = chain.levels[0]
    c, na, ne = level.dims
    n = _chart_dim(action, chain)
    out = []
    for _ in range(count):
        out.append(BlowupPoint(
            chain=chain,
            sigma=(float(rng.uniform(-0.9, 0.9)),),
            base=(tuple(float(rng.uniform(lo, hi))
                        for lo, hi in level.center_box),),
            rho=int(rng.integers(c)),
            vq=tuple(float(x) for x in rng.uniform(-1.5, 1.5, size=c - 1)),
            alpha=(tuple(float(x) for x in rng.uniform(-1.0, 1.0, size=na)),),
            beta=tuple(float(x) for x in rng.uniform(-1.0, 1.0, size=ne)),
            p=tuple(float(x) for x in rng.uniform(-1.0, 1.0, size=n)),
        ))
    return out


def sample_weak_critical(action, chain, count, seed, sigma_values=None):
    """Certifiable weak-critical points: ``alpha = beta = 0`` and ``p``
    orthogonalized against the spanning sets of E and F."""
    _require_depth_one(chain)
    rng = np.random.default_rng(seed)
    level = chain.levels[0]
    c, na, ne = level.dims
    n = _chart_dim(action, chain)
    out = []
    for k in range(count):
        if sigma_values is not None:
            sg = float(sigma_values[k % len(sigma_values)])
        else:
            sg = float(rng.uniform(-0.9, 0.9))
        bp = BlowupPoint(
            chain=chain, sigma=(sg,),
            base=(tuple(float(rng.uniform(lo, hi))
                        for lo, hi in level.center_box),),
            rho=int(rng.integers(c)),
            vq=tuple(float(x) for x in rng.uniform(-1.5, 1.5, size=c - 1)),
            alpha=(tuple(0.0 for _ in range(na)),),
            beta=tuple(0.0 for _ in range(ne)),
            p=tuple(float(x) for x in rng.uniform(-1.0, 1.0, size=n)),
        )
        E, F = ef_spans(action, bp)
        p = np.array(bp.p)
        basis = []
        for vec in E + F:
            v = np.array([float(x) for x in vec])
            for b in basis:
                v = v - (v @ b) * b
            nv = np.linalg.norm(v)
            if nv > 1e-12:
                basis.append(v / nv)
        for b in basis:
            p = p - (p @ b) * b
        out.append(BlowupPoint(
            chain=bp.chain, sigma=bp.sigma, base=bp.base, rho=bp.rho,
            vq=bp.vq, alpha=bp.alpha, beta=bp.beta,
            p=tuple(float(x) for x in p)))
    return out
