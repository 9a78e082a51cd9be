"""End-to-end acceptance checks for the oscillatory-integral pipeline.

Each criterion packages one verifiable claim about the code -- a leading
coefficient matched by the brute-force oracle, an exact factorization of
the resolved phase, a certified Hessian rank -- together with a concrete
pass/fail threshold.  The ``full`` budget runs every check at the
calibrated resolutions; ``quick`` runs the same checks on reduced
sample counts and milder frequencies so the whole suite finishes in
about a minute.

The checks are shared between the command-line entry point
(``equivar all``) and the test suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    QuadratureConfig,
    brute_force_I,
    cutoff_convergence,
    epsilon_split_diagnostic,
    fit_asymptotics,
    leading_coefficient_L0,
    resolved_leading_coefficient,
)
from .catalogue import load_action, load_amplitude, smoothstep_down
from .critical import sample_regular_critical
from .geometry import phase_at, phase_grad_hess
from .resolution import (
    BlowupPoint,
    certify_weak_hessian,
    ef_spans,
    sample_blowup_points,
    sample_weak_critical,
    weak_critical_conditions,
    weak_gradient,
    weak_transform_phase,
)

BUDGETS = ("quick", "full")

_CHAINED_ACTIONS = ("circle_on_sphere", "torus_on_s3")


@dataclass
class CriterionResult:
    """Outcome of one acceptance criterion."""

    id: str
    passed: bool
    details: dict
    seconds: float


_REGISTRY: dict[str, callable] = {}


def _criterion(cid):
    def deco(fn):
        _REGISTRY[cid] = fn
        return fn
    return deco


def criterion_ids():
    return list(_REGISTRY)


def _require_budget(budget):
    if budget not in BUDGETS:
        raise ValueError(f"budget must be one of {BUDGETS}, got {budget!r}")


# ---------------------------------------------------------------------------
# shared windows around the pole of the sphere chart
# ---------------------------------------------------------------------------

def _pole_window_r(r):
    """Smooth radial window: 1 for r <= 0.45, 0 for r >= 0.95."""
    return smoothstep_down((np.asarray(r) - 0.45) / 0.5)


def _pole_window_q(qcols):
    return _pole_window_r(np.hypot(qcols[0], qcols[1]))


def _far_window_q(qcols):
    return 1.0 - _pole_window_q(qcols)


def _pole_chain(action):
    return next(c for c in action.chains if c.levels[0].chart == "north")


# ---------------------------------------------------------------------------
# criteria 1-3: leading-order expansion against the brute-force oracle
# ---------------------------------------------------------------------------

@_criterion("expansion-circle")
def _expansion_circle(budget):
    """Free circle action: 3% match at mu=0.02 and quadratic residual."""
    action = load_action("circle_on_circle")
    amp = load_amplitude("bump_F")
    cfg = QuadratureConfig()
    if budget == "full":
        mus = np.geomspace(0.01, 0.1, 8)
    else:
        mus = np.geomspace(0.02, 0.1, 5)
    L0 = leading_coefficient_L0(action, amp, cfg)
    samples = [(float(mu), brute_force_I(action, amp, float(mu), cfg))
               for mu in mus]
    fit = fit_asymptotics(samples, kappa_known=action.kappa)
    I02 = next((I for mu, I in samples if abs(mu - 0.02) < 1e-12),
               None)
    if I02 is None:
        I02 = brute_force_I(action, amp, 0.02, cfg)
    lead = 2.0 * math.pi * 0.02 * L0
    rel = abs(I02 - lead) / abs(lead)
    details = {
        "L0": complex(L0).real,
        "rel_error_at_mu_0.02": float(rel),
        "residual_slope": fit.residual_slope,
        "kappa_hat": fit.kappa_hat,
    }
    passed = rel <= 0.03 and 1.8 <= fit.residual_slope <= 2.2
    return passed, details


def _sweep(action_name, amplitude_id, mus, cfg, kappa_window):
    action = load_action(action_name)
    amp = load_amplitude(amplitude_id)
    L0 = leading_coefficient_L0(action, amp, cfg)
    samples = [(float(mu), brute_force_I(action, amp, float(mu), cfg))
               for mu in mus]
    fit = fit_asymptotics(samples, kappa_known=action.kappa)
    rel = abs(fit.L0_hat - L0) / abs(L0)
    details = {
        "L0_quadrature": complex(L0).real,
        "L0_hat": complex(fit.L0_hat).real,
        "rel_error_L0": float(rel),
        "kappa_hat": fit.kappa_hat,
        "mu_values": [float(m) for m in mus],
    }
    lo, hi = kappa_window
    passed = lo <= fit.kappa_hat <= hi and rel <= 0.05
    return passed, details


@_criterion("sweep-sphere")
def _sweep_sphere(budget):
    """Circle on the sphere: fitted order and coefficient from the sweep."""
    if budget == "full":
        mus = np.geomspace(0.008, 0.05, 6)
        cfg = QuadratureConfig()
    else:
        mus = np.geomspace(0.01, 0.05, 5)
        cfg = QuadratureConfig(s_mode="radial")
    return _sweep("circle_on_sphere", "bump_B", mus, cfg, (0.95, 1.05))


@_criterion("sweep-so3")
def _sweep_so3(budget):
    """Transitive SO(3) action: order 2 and coefficient from the sweep."""
    cfg = QuadratureConfig(s_mode="radial")
    n = 6 if budget == "full" else 4
    mus = 0.05 * 0.7 ** np.arange(n)
    return _sweep("so3_on_sphere", "bump_C", mus, cfg, (1.9, 2.1))


# ---------------------------------------------------------------------------
# criteria 4-6: the resolved phase
# ---------------------------------------------------------------------------

@_criterion("factorization")
def _factorization(budget):
    """psi composed with the blow-up equals tau times the weak transform."""
    count = 10_000 if budget == "full" else 500
    worst = 0.0
    per_chain = {}
    for name in _CHAINED_ACTIONS:
        action = load_action(name)
        for chain in action.chains:
            pts = sample_blowup_points(action, chain, count, seed=11)
            res = max(weak_transform_phase(action, bp).factor_residual
                      for bp in pts)
            per_chain[f"{name}/{chain.id}"] = float(res)
            worst = max(worst, res)
    details = {"samples_per_chain": count, "max_residual": float(worst),
               "per_chain": per_chain}
    return worst <= 1e-10, details


@_criterion("critical-conditions")
def _critical_conditions(budget):
    """grad psi_wk = 0 exactly on points satisfying (I), (II), (III)."""
    count = 1000 if budget == "full" else 100
    tol = 1e-8
    bad = 0
    checked = 0
    for name in _CHAINED_ACTIONS:
        action = load_action(name)
        for chain in action.chains:
            generic = sample_blowup_points(action, chain, count, seed=23)
            constructed = sample_weak_critical(action, chain, count, seed=29)
            for bp in generic + constructed:
                conds = weak_critical_conditions(action, bp, tol)
                gnorm = float(np.linalg.norm(weak_gradient(action, bp)))
                if all(conds) != (gnorm <= tol):
                    bad += 1
                checked += 1
    details = {"points_checked": checked, "misclassified": bad}
    return bad == 0, details


def _reorthogonalized(action, bp, sigma):
    """The same weak-critical configuration on another sigma-slice.

    E and F rotate with the base point, so the covector is
    re-orthogonalized against their spans at the new slice.
    """
    moved = BlowupPoint(chain=bp.chain, sigma=(float(sigma),), base=bp.base,
                        rho=bp.rho, vq=bp.vq, alpha=bp.alpha, beta=bp.beta,
                        p=bp.p)
    E, F = ef_spans(action, moved)
    p = np.array(moved.p)
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
    return BlowupPoint(chain=moved.chain, sigma=moved.sigma, base=moved.base,
                       rho=moved.rho, vq=moved.vq, alpha=moved.alpha,
                       beta=moved.beta, p=tuple(float(x) for x in p))


@_criterion("weak-hessian")
def _weak_hessian(budget):
    """Rank 2 kappa of the transversal Hessian, uniformly down to sigma=0."""
    per_chain = 30 if budget == "full" else 8
    certified = 0
    eig_ratio_min = math.inf
    for name in _CHAINED_ACTIONS:
        action = load_action(name)
        for chain in action.chains:
            pts = sample_weak_critical(
                action, chain, per_chain, seed=37,
                sigma_values=[0.0, 0.5, -0.5, 0.8, -0.8, 0.2])
            for bp in pts:
                certify_weak_hessian(action, bp)   # raises on failure
                certified += 1
            # eigenvalue floor along a sigma sweep of one configuration
            base = sample_weak_critical(action, chain, 1, seed=41,
                                        sigma_values=[0.5])[0]
            ref = certify_weak_hessian(action, base).min_nonzero_eig
            floor = min(
                certify_weak_hessian(
                    action, _reorthogonalized(action, base, s)
                ).min_nonzero_eig
                for s in np.linspace(-0.9, 0.9, 13))
            eig_ratio_min = min(eig_ratio_min, floor / ref)
    details = {"certified_points": certified,
               "min_eig_ratio_vs_sigma_half": float(eig_ratio_min)}
    return certified >= (100 if budget == "full" else 16) \
        and eig_ratio_min >= 0.1, details


# ---------------------------------------------------------------------------
# criteria 7-9: resolved charts against the direct coefficient
# ---------------------------------------------------------------------------

@_criterion("coefficient-split")
def _coefficient_split(budget):
    """Resolved-chart coefficient plus far part equals the direct one."""
    action = load_action("circle_on_sphere")
    amp = load_amplitude("bump_D")
    chain = _pole_chain(action)
    cfg = QuadratureConfig() if budget == "full" \
        else QuadratureConfig(crit_points=48)
    direct = leading_coefficient_L0(action, amp, cfg)
    near = resolved_leading_coefficient(action, chain, amp, cfg,
                                        r_window=_pole_window_r)
    far = leading_coefficient_L0(action, amp, cfg, q_window=_far_window_q)
    rel = abs(near + far - direct) / abs(direct)
    details = {"direct": complex(direct).real, "resolved_near":
               complex(near).real, "far": complex(far).real,
               "rel_error": float(rel)}
    return rel <= 0.01, details


@_criterion("cutoff-limit")
def _cutoff_limit(budget):
    """Coefficient of the cut-off amplitude converges to the full one."""
    action = load_action("circle_on_sphere")
    amp = load_amplitude("bump_G")
    cfg = QuadratureConfig() if budget == "full" \
        else QuadratureConfig(crit_points=48)
    eps_list = [0.2, 0.1, 0.05, 0.025]
    L0 = leading_coefficient_L0(action, amp, cfg)
    out = cutoff_convergence(action, amp, eps_list, cfg)
    errs = [abs(L - L0) / abs(L0) for _, L in out]
    monotone = all(errs[i + 1] <= errs[i] + 1e-12 for i in range(len(errs) - 1))
    details = {"eps": eps_list, "rel_errors": [float(e) for e in errs],
               "monotone": monotone}
    return errs[2] <= 0.05 and monotone, details


@_criterion("band-split")
def _band_split(budget):
    """Non-oscillatory band below |tau| = mu^(1/N) decays at order kappa+1."""
    action = load_action("circle_on_sphere")
    amp = load_amplitude("bump_D")
    chain = _pole_chain(action)
    cfg = QuadratureConfig()
    mus = [0.04, 0.02, 0.01] if budget == "full" else [0.08, 0.057, 0.04]
    inner = []
    for mu in mus:
        _, I2 = epsilon_split_diagnostic(action, chain, amp, mu, cfg,
                                         r_window=_pole_window_r)
        inner.append(abs(I2))
    slope = float(np.polyfit(np.log(mus), np.log(inner), 1)[0])
    mu0 = 0.08
    I1, I2 = epsilon_split_diagnostic(action, chain, amp, mu0, cfg,
                                      r_window=_pole_window_r)
    ref = brute_force_I(action, amp, mu0, cfg, q_window=_pole_window_q)
    additivity = abs(I1 + I2 - ref) / abs(ref)
    details = {"inner_moduli": [float(v) for v in inner],
               "inner_slope": slope,
               "additivity_rel_error": float(additivity)}
    return slope >= action.kappa + 0.9 and additivity <= 0.01, details


# ---------------------------------------------------------------------------
# criterion 10: differentiation machinery
# ---------------------------------------------------------------------------

def _fd_hessian(f, u, h=1e-4):
    k = len(u)
    H = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            up = list(u)
            um = list(u)
            upm = list(u)
            ump = list(u)
            up[i] += h; up[j] += h
            um[i] -= h; um[j] -= h
            upm[i] += h; upm[j] -= h
            ump[i] -= h; ump[j] += h
            H[i, j] = H[j, i] = (f(up) - f(upm) - f(ump) + f(um)) / (4 * h * h)
    return H


@_criterion("jet-consistency")
def _jet_consistency(budget):
    """Jet Hessians match central differences; (p,p) and (s,s) blocks vanish."""
    count = 100 if budget == "full" else 20
    rng = np.random.default_rng(53)
    worst = 0.0
    from .catalogue import ACTION_NAMES
    for name in ACTION_NAMES:
        action = load_action(name)
        chart = action.principal_chart
        n = action.chart(chart).dim
        d = action.group_dim
        for _ in range(count):
            q = [float(rng.uniform(lo, hi)) for lo, hi in action.principal_box]
            p = list(rng.uniform(-1.0, 1.0, size=n))
            s = list(rng.uniform(-1.0, 1.0, size=d))
            _, _, H = phase_grad_hess(action, chart, q, p, s)
            H = np.asarray(H, dtype=float)
            F = _fd_hessian(
                lambda u: phase_at(action, chart, list(u), n=n, d=d),
                q + p + s)
            scale = max(float(np.max(np.abs(H))), 1.0)
            worst = max(worst, float(np.max(np.abs(H - F))) / scale)
    # block structure at certified critical samples: the phase is bilinear
    # in (p, s), so the (p, p) and (s, s) blocks vanish identically
    block_max = 0.0
    for name in ACTION_NAMES:
        action = load_action(name)
        n = action.chart(action.principal_chart).dim
        for sample in sample_regular_critical(action, 5, seed=59):
            H = np.asarray(sample.hess, dtype=float)
            pp = H[n:2 * n, n:2 * n]
            ss = H[2 * n:, 2 * n:]
            block_max = max(block_max, float(np.max(np.abs(pp))),
                            float(np.max(np.abs(ss))))
    details = {"max_rel_fd_error": float(worst),
               "max_diag_block_entry": float(block_max),
               "points_per_action": count}
    return worst <= 1e-5 and block_max <= 1e-10, details


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def run_criterion(cid, budget="full"):
    _require_budget(budget)
    if cid not in _REGISTRY:
        raise KeyError(f"unknown criterion {cid!r}; "
                       f"known: {', '.join(_REGISTRY)}")
    t0 = time.perf_counter()
    passed, details = _REGISTRY[cid](budget)
    return CriterionResult(id=cid, passed=bool(passed), details=details,
                           seconds=time.perf_counter() - t0)


def run_all(budget="full", ids=None):
    """Run the acceptance criteria and return their results in order."""
    _require_budget(budget)
    ids = list(ids) if ids is not None else criterion_ids()
    return [run_criterion(cid, budget) for cid in ids]
