"""Leading-order asymptotics and the brute-force quadrature oracle.

Verifies ``I(mu) = (2 pi mu)^kappa * L0 + O(mu^(kappa+1))`` for the
catalogue actions: ``L0`` by tensor quadrature over the analytic
parametrization of the regular critical set, ``I(mu)`` by brute-force
tensor quadrature of the oscillatory integral (with the hot reduction in
``equivar.oscsum``), plus the power-law fit, the cut-off limit near the
singular stratum, the resolved-chart leading coefficient and the
epsilon-split estimate in blow-up coordinates.

Quadrature strategy: all amplitudes are products of C-infinity bumps
supported strictly inside the integration boxes, so equispaced midpoint
rules converge spectrally; the only resolution requirement is a fixed
number of points per oscillation period along each axis (period read off
a seeded sample of the exact phase gradient).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j0

from .catalogue import bump_profile, smoothstep_down
from .geometry import fundamental_field, phase_grad_hess
from .oscsum import osc_bilinear


class QuadratureError(RuntimeError):
    """Successive quadrature refinements failed to agree."""


class DegenerateFitError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    """Resolution knobs for all quadratures in this module."""

    base_points: int = 24          # minimum points per axis
    points_per_osc: int = 8        # sampling rate for oscillatory axes
    crit_points: int = 96          # points per axis on the critical set
    s_mode: str = "grid"           # "grid" | "radial" Lie-coordinate handling
    slope_samples: int = 256       # gradient samples for the refinement rule
    seed: int = 0
    signature_convention: str = "quarter"  # "quarter" | "unit"
    check_tol: float = 5e-3        # relative refinement-agreement tolerance

    def __post_init__(self):
        if self.base_points < 2 or self.crit_points < 2:
            raise ValueError("resolutions must be at least 2")
        if self.points_per_osc < 1:
            raise ValueError("points_per_osc must be at least 1")
        if self.s_mode not in ("grid", "radial"):
            raise ValueError("s_mode must be 'grid' or 'radial'")
        if self.signature_convention not in ("quarter", "unit"):
            raise ValueError("signature convention must be quarter or unit")


@dataclass
class AsymptoticFit:
    mu_values: np.ndarray
    I_values: np.ndarray
    kappa_hat: float
    L0_hat: complex
    residual_slope: float


def signature_phase_factor(signature, convention="quarter"):
    """Phase factor attached to the transversal-Hessian signature."""
    if convention == "quarter":
        return complex(np.exp(1j * math.pi * signature / 4.0))
    return 1.0 + 0.0j


# ---------------------------------------------------------------------------
# shared grid helpers
# ---------------------------------------------------------------------------

def pairwise_sum(values):
    """Fixed-order pairwise reduction (bit-reproducible, thread-agnostic)."""
    arr = np.asarray(values)
    while arr.shape[0] > 1:
        n = arr.shape[0]
        even = arr[0:n - (n % 2):2] + arr[1:n:2]
        if n % 2:
            even = np.concatenate([even, arr[n - 1:n]])
        arr = even
    return arr[0] if arr.shape[0] else arr.dtype.type(0)


def _midpoint_axis(lo, hi, n):
    h = (hi - lo) / n
    return lo + h * (np.arange(n) + 0.5), h


def _tensor_nodes(axes):
    """Flattened tensor grid: list of 1-d node arrays -> (npts, k) array."""
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _amp_q_box(action, amp):
    chart = action.chart(amp.chart)
    box = []
    for (lo, hi), q0 in zip(chart.domain, amp.q0):
        box.append((max(lo + 1e-9, q0 - amp.r_q), min(hi - 1e-9, q0 + amp.r_q)))
    return box


def _phase_slopes(action, chart, box, cfg):
    """Per-axis bound on |grad psi| from a seeded sample batch."""
    rng = np.random.default_rng(cfg.seed + 101)
    cols = [rng.uniform(lo, hi, size=cfg.slope_samples) for lo, hi in box]
    n = action.chart(chart).dim
    _, g, _ = phase_grad_hess(action, chart, cols[:n], cols[n:2 * n],
                              cols[2 * n:])
    return np.max(np.abs(np.asarray(g)), axis=1)


def _axis_points(slope, lo, hi, mu, cfg):
    osc = slope * (hi - lo) / (2.0 * math.pi * mu)
    return max(cfg.base_points, int(math.ceil(cfg.points_per_osc * osc)))


def _radial_transform(d, R_s, kmax, points_per_unit=50, nr=512):
    """Tabulated radial Fourier transform of the Lie-coordinate bump.

    ``G(k) = integral over R^d of chi(|s|^2 / R_s^2) e^{i k . s} ds``
    depends only on ``|k|`` and is real.
    """
    r, hr = _midpoint_axis(0.0, R_s, nr)
    chi = bump_profile(r * r / R_s ** 2)
    nk = max(2048, int(points_per_unit * kmax * R_s))
    k = np.linspace(0.0, kmax * 1.0000001, nk)
    kr = np.outer(k, r)
    if d == 1:
        G = 2.0 * hr * np.cos(kr) @ chi
    elif d == 2:
        G = 2.0 * math.pi * hr * j0(kr) @ (r * chi)
    elif d == 3:
        G = 4.0 * math.pi * hr * np.sinc(kr / math.pi) @ (r * r * chi)
    else:
        raise ValueError("radial mode supports group dimensions 1..3")
    return k, G


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _fund_field_table(action, chart, qcols):
    """Fundamental-field components on a batch of base points.

    Returns array of shape (d, n, npts): entry [a, i, j] is the i-th
    chart component of the field of basis element a at base point j.
    """
    d = action.group_dim
    n = action.chart(chart).dim
    npts = len(qcols[0])
    out = np.zeros((d, n, npts))
    for a in range(d):
        s = [0.0] * d
        s[a] = 1.0
        v = fundamental_field(action, chart, list(qcols), s)
        for i in range(n):
            out[a, i] = np.asarray(v[i], dtype=float)
    return out


def brute_force_I(action, amplitude, mu, cfg=QuadratureConfig(),
                  q_window=None):
    """Tensor-grid quadrature of ``exp(i psi / mu) * a`` over one chart.

    The amplitude (optionally multiplied by a smooth base-point window
    ``q_window(qcols)``) is supported strictly inside its chart, so the
    chart integral is the full integral.  Per-axis resolutions follow
    the points-per-oscillation rule; the Lie-coordinate block is either
    a tensor grid (``s_mode='grid'``) or integrated exactly through the
    tabulated radial transform (``s_mode='radial'``).
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    amp = amplitude
    if amp.scale == 0.0:
        return 0.0 + 0.0j
    chart = amp.chart
    n = action.chart(chart).dim
    d = action.group_dim
    q_box = _amp_q_box(action, amp)
    p0 = amp.p_center(n)
    s0 = amp.s_center(d)
    p_box = [(c - amp.R, c + amp.R) for c in p0]
    s_box = [(c - amp.R_s, c + amp.R_s) for c in s0]
    box = q_box + p_box + s_box
    slopes = _phase_slopes(action, chart, box, cfg)

    q_axes, q_hs, p_axes, p_hs, s_axes, s_hs = [], [], [], [], [], []
    for i, (lo, hi) in enumerate(q_box):
        nodes, h = _midpoint_axis(lo, hi, _axis_points(slopes[i], lo, hi, mu, cfg))
        q_axes.append(nodes); q_hs.append(h)
    for i, (lo, hi) in enumerate(p_box):
        nodes, h = _midpoint_axis(
            lo, hi, _axis_points(slopes[n + i], lo, hi, mu, cfg))
        p_axes.append(nodes); p_hs.append(h)
    for i, (lo, hi) in enumerate(s_box):
        nodes, h = _midpoint_axis(
            lo, hi, _axis_points(slopes[2 * n + i], lo, hi, mu, cfg))
        s_axes.append(nodes); s_hs.append(h)

    q_nodes = _tensor_nodes(q_axes)            # (Q, n)
    qcols = [q_nodes[:, i] for i in range(n)]
    rho_q = sum((qcols[i] - amp.q0[i]) ** 2 for i in range(n)) / amp.r_q ** 2
    wq = amp.scale * bump_profile(rho_q) * float(np.prod(q_hs))
    if q_window is not None:
        wq = wq * q_window(qcols)

    p_nodes = _tensor_nodes(p_axes)            # (P, n)
    wp = bump_profile(
        np.sum((p_nodes - np.array(p0)) ** 2, axis=1) / amp.R ** 2) \
        * float(np.prod(p_hs))

    table = _fund_field_table(action, chart, qcols)  # (d, n, Q)

    if cfg.s_mode == "grid":
        s_nodes = _tensor_nodes(s_axes)        # (S, d)
        ws = bump_profile(
            np.sum((s_nodes - np.array(s0)) ** 2, axis=1) / amp.R_s ** 2) \
            * float(np.prod(s_hs))
        keep_p = wp != 0.0
        keep_s = ws != 0.0
        p_red, wp_red = p_nodes[keep_p], wp[keep_p]
        s_red, ws_red = s_nodes[keep_s], ws[keep_s]
        contrib = np.zeros(q_nodes.shape[0], dtype=complex)
        inv_mu = 1.0 / mu

        def one_q(j):
            if wq[j] == 0.0:
                return 0.0 + 0.0j
            A = p_red @ table[:, :, j].T      # (P, d)
            return wq[j] * osc_bilinear(A, s_red, wp_red, ws_red, inv_mu)

        workers = int(os.environ.get("EQUIVAR_THREADS", "1"))
        if workers > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=workers) as ex:
                for j, val in enumerate(ex.map(one_q, range(q_nodes.shape[0]))):
                    contrib[j] = val
        else:
            for j in range(q_nodes.shape[0]):
                contrib[j] = one_q(j)
        return complex(pairwise_sum(contrib))

    # radial mode: the Lie-coordinate integral is rotation invariant in
    # the phase coefficients, so it reduces to a 1-d tabulated transform.
    if any(c != 0.0 for c in s0):
        raise ValueError("radial s-mode requires an origin-centered bump")
    keep_p = wp != 0.0
    p_red, wp_red = p_nodes[keep_p], wp[keep_p]
    contrib = np.zeros(q_nodes.shape[0], dtype=complex)
    # conservative bound on |p . Xtilde| / mu from operator norms, so the
    # transform table can be built once without storing per-node norms
    pmax = float(np.max(np.linalg.norm(p_red, axis=1))) if p_red.size else 0.0
    tmax = max(
        (float(np.linalg.norm(table[:, :, j], 2))
         for j in range(q_nodes.shape[0])),
        default=0.0,
    )
    kgrid, G = _radial_transform(d, amp.R_s, max(pmax * tmax / mu, 1.0))
    for j in range(q_nodes.shape[0]):
        if wq[j] == 0.0:
            continue
        A = p_red @ table[:, :, j].T
        vals = np.interp(np.linalg.norm(A, axis=1) / mu, kgrid, G)
        contrib[j] = wq[j] * float(wp_red @ vals)
    return complex(pairwise_sum(contrib))


# ---------------------------------------------------------------------------
# leading coefficient over the regular critical set
# ---------------------------------------------------------------------------

def _crit_integral(action, amplitude, cfg, pts, q_window=None):
    from .catalogue import amplitude_value

    amp = amplitude
    crit = action.crit_params.get(amp.chart)
    if crit is None:
        raise QuadratureError(
            f"no critical-set parametrization in chart {amp.chart!r}")
    box = crit.box(amp)
    axes, hs = [], []
    for lo, hi in box:
        nodes, h = _midpoint_axis(lo, hi, pts)
        axes.append(nodes); hs.append(h)
    tg = _tensor_nodes(axes)
    tcols = [tg[:, i] for i in range(len(box))]
    q, p, s = crit.to_phase(tcols)
    vals = amplitude_value(amp, q, p, s) * crit.density(tcols)
    if q_window is not None:
        vals = vals * q_window(q)
    return float(pairwise_sum(vals)) * float(np.prod(hs))


def leading_coefficient_L0(action, amplitude, cfg=QuadratureConfig(),
                           q_window=None):
    """Quadrature of ``a / sqrt|det transversal Hessian|`` over Reg Crit.

    The catalogue parametrizations fold the surface measure and the
    root-determinant into one closed-form density; the transversal
    signature is zero on every catalogue stratum, so the signature phase
    factor (quarter or unit convention) is 1.
    """
    if amplitude.scale == 0.0:
        return 0.0 + 0.0j
    crit = action.crit_params.get(amplitude.chart)
    if crit is None:
        raise QuadratureError(
            f"no critical-set parametrization in chart {amplitude.chart!r}")
    ndim = len(crit.box(amplitude))
    pts = cfg.crit_points if ndim <= 3 else max(2, (2 * cfg.crit_points) // 3)
    coarse = _crit_integral(action, amplitude, cfg, max(2, (2 * pts) // 3),
                            q_window=q_window)
    fine = _crit_integral(action, amplitude, cfg, pts, q_window=q_window)
    scale = max(abs(fine), 1e-12)
    if abs(fine - coarse) / scale > cfg.check_tol:
        raise QuadratureError(
            f"critical-set quadrature not converged: {coarse:.8e} vs "
            f"{fine:.8e}")
    factor = signature_phase_factor(0, cfg.signature_convention)
    return factor * fine


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

def fit_asymptotics(samples, kappa_known=None):
    """Least-squares power-law fit of oracle values ``(mu, I(mu))``.

    The exponent comes from a log-log fit of ``|I|``; the coefficient is
    the intercept of a low-order polynomial fit of ``I / (2 pi mu)^kappa``
    against ``mu``, which removes the subleading bias a plain mean would
    carry (quadratic when five or more samples are available).
    """
    samples = sorted(samples, key=lambda t: -t[0])
    mu = np.array([t[0] for t in samples], dtype=float)
    I = np.array([t[1] for t in samples], dtype=complex)
    if mu.size < 4:
        raise ValueError("need at least 4 samples")
    mags = np.abs(I)
    if np.all(mags < 1e-14):
        raise DegenerateFitError("all oracle values vanish")
    X = np.stack([np.log(mu), np.ones_like(mu)], axis=1)
    kappa_hat = float(np.linalg.lstsq(X, np.log(mags), rcond=None)[0][0])
    kappa_use = kappa_known if kappa_known is not None else kappa_hat
    scale = (2.0 * math.pi * mu) ** kappa_use
    order = 2 if mu.size >= 5 else 1
    Xc = np.vander(mu, order + 1, increasing=True).astype(complex)
    coeffs = np.linalg.lstsq(Xc, I / scale, rcond=None)[0]
    L0_hat = complex(coeffs[0])
    resid = np.abs(I - scale * L0_hat)
    good = resid > 1e-300
    if int(np.sum(good)) >= 2:
        Xr = np.stack([np.log(mu[good]), np.ones(int(np.sum(good)))], axis=1)
        residual_slope = float(
            np.linalg.lstsq(Xr, np.log(resid[good]), rcond=None)[0][0])
    else:
        residual_slope = float("inf")
    return AsymptoticFit(mu_values=mu, I_values=I, kappa_hat=kappa_hat,
                         L0_hat=L0_hat, residual_slope=residual_slope)


# ---------------------------------------------------------------------------
# cut-off limit near the singular stratum
# ---------------------------------------------------------------------------

def cutoff_convergence(action, amplitude, eps_list, cfg=QuadratureConfig()):
    """Leading coefficients with the amplitude damped near Sing Omega.

    For each ``eps`` the amplitude is multiplied by ``1 - u_eps`` where
    ``u_eps`` is 1 within distance ``eps`` of the singular stratum and 0
    beyond ``3 eps``.  Returns ``None`` when the action has no singular
    stratum (nothing to cut off).
    """
    if action.sing_distance is None:
        return None
    amp = amplitude

    out = []
    for eps in eps_list:
        def window(qcols, eps=eps):
            dist = action.sing_distance(amp.chart, list(qcols))
            return 1.0 - smoothstep_down((np.asarray(dist) - eps) / (2.0 * eps))

        out.append((float(eps),
                    leading_coefficient_L0(action, amp, cfg, q_window=window)))
    return out


# ---------------------------------------------------------------------------
# resolved-chart leading coefficient and the epsilon split
# ---------------------------------------------------------------------------

def _check_pole_chain(chain):
    level = chain.levels[0]
    if chain.depth != 1 or level.dims != (2, 0, 1):
        raise NotImplementedError(
            "resolved-chart integrals are implemented for depth-1 chains "
            "over point centers with 2-dim normal fibers")
    return level


def resolved_leading_coefficient(action, chain, amplitude, cfg=QuadratureConfig(),
                                 r_window=None):
    """Leading coefficient of one resolved chart, sliced along sigma.

    Coordinates ``(sigma, u, c)`` with normal direction ``(cos u, sin u)``
    parametrize the critical manifold of the weak transform per
    ``sigma``-slice: base point ``q = sigma (cos u, sin u)``, covector
    ``p = c (cos u, sin u)``, Lie coordinate 0.  The angular variable
    absorbs the projective-chart factor, the Jacobian exponent
    ``c + d - 1 - kappa`` vanishes for these chains, and the surface
    measure cancels the root-determinant of the transversal Hessian, so
    the integrand is exactly the (windowed) amplitude.
    """
    from .catalogue import amplitude_value

    level = _check_pole_chain(chain)
    amp = amplitude
    if amp.chart != level.chart:
        raise ValueError("amplitude must live in the chain chart")
    rmax = min(0.999, math.hypot(*amp.q0) + amp.r_q)
    pts = cfg.crit_points
    sg, hs = _midpoint_axis(-rmax, rmax, pts)
    u, hu = _midpoint_axis(-math.pi / 2, math.pi / 2, pts)
    c, hc = _midpoint_axis(-amp.R, amp.R, pts)
    tg = _tensor_nodes([sg, u, c])
    e1, e2 = np.cos(tg[:, 1]), np.sin(tg[:, 1])
    q = [tg[:, 0] * e1, tg[:, 0] * e2]
    p = [tg[:, 2] * e1, tg[:, 2] * e2]
    s = [np.zeros(tg.shape[0])]
    vals = amplitude_value(amp, q, p, s)
    if r_window is not None:
        vals = vals * r_window(np.abs(tg[:, 0]))
    factor = signature_phase_factor(0, cfg.signature_convention)
    return factor * float(pairwise_sum(vals)) * hs * hu * hc


def _resolved_oscillatory(action, chain, amplitude, mu, sigma_lo, sigma_hi,
                          cfg, r_window, oscillatory):
    """Oscillatory integral over a band ``|sigma| in (sigma_lo, sigma_hi)``
    of the resolved chart (both signs of sigma)."""
    from .catalogue import bump_profile as chi

    level = _check_pole_chain(chain)
    amp = amplitude
    n_band = _axis_points(1.0, sigma_lo, sigma_hi, mu, cfg) if oscillatory \
        else cfg.base_points
    n_u = _axis_points(1.0, -math.pi / 2, math.pi / 2, mu, cfg) if oscillatory \
        else cfg.base_points
    n_p = _axis_points(1.0, -amp.R, amp.R, mu, cfg) if oscillatory \
        else cfg.base_points

    sg, hs = _midpoint_axis(sigma_lo, sigma_hi, n_band)
    ug, hu = _midpoint_axis(-math.pi / 2, math.pi / 2, n_u)
    p1, hp = _midpoint_axis(-amp.R, amp.R, n_p)
    pg = _tensor_nodes([p1, p1])
    wp = chi((pg[:, 0] ** 2 + pg[:, 1] ** 2) / amp.R ** 2) \
        * hs * hu * hp * hp
    # psi = beta * (p . J v) * sigma with J the rotation generator; the
    # beta integral is the 1-d transform of the even Lie bump, evaluated
    # from the same table the radial s-mode uses.  It depends only on
    # |sigma|, so the two sign bands share one interpolation pass and
    # differ only in the base-point weight.
    pmax = float(np.max(np.hypot(pg[:, 0], pg[:, 1])))
    kgrid, G = _radial_transform(1, amp.R_s, max(pmax * sigma_hi / mu, 1.0))
    total = 0.0
    for u in ug:                           # slice by u to bound memory
        e1, e2 = math.cos(u), math.sin(u)
        coeff_fib = -pg[:, 0] * e2 + pg[:, 1] * e1
        wq = np.zeros_like(sg)
        for sign in (-1.0, 1.0):
            rho_q = ((sign * sg * e1 - amp.q0[0]) ** 2
                     + (sign * sg * e2 - amp.q0[1]) ** 2) / amp.r_q ** 2
            wq = wq + amp.scale * chi(rho_q) * sg
        if r_window is not None:
            wq = wq * r_window(sg)
        live = np.nonzero(wq)[0]
        if live.size == 0:
            continue
        args = np.abs(np.outer(sg[live], coeff_fib)) / mu
        vals = np.interp(args, kgrid, G)
        total += float(wq[live] @ (vals @ wp))
    return complex(total)


def epsilon_split_diagnostic(action, chain, amplitude, mu,
                             cfg=QuadratureConfig(), r_window=None):
    """Split the resolved-chart integral at ``|tau| = eps = mu^(1/N)``.

    Returns ``(I1, I2)``: the oscillatory outer part ``|tau| > eps`` and
    the inner part ``|tau| <= eps`` whose modulus is bounded by
    ``C mu^(kappa+1)``.
    """
    amp = amplitude
    if amp.scale == 0.0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    eps = mu ** (1.0 / chain.depth)
    rmax = min(0.999, math.hypot(*amp.q0) + amp.r_q)
    eps = min(eps, 0.5 * rmax)
    I2 = _resolved_oscillatory(action, chain, amp, mu, 0.0, eps, cfg,
                               r_window, oscillatory=False)
    I1 = _resolved_oscillatory(action, chain, amp, mu, eps, rmax, cfg,
                               r_window, oscillatory=True)
    return I1, I2
