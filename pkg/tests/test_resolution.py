"""Blow-up coordinates, the weak transform and its certification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equivar import load_action
from equivar.resolution import (
    BlowupPoint,
    RankDeficientError,
    alpha_chart_noncritical,
    certify_weak_hessian,
    delta_jacobian,
    delta_substitution,
    sample_blowup_points,
    sample_weak_critical,
    smooth_factor,
    jacobian_power,
    weak_critical_conditions,
    weak_gradient,
    weak_transform_phase,
)

CHAINED = [("circle_on_sphere", "north_pole"), ("circle_on_sphere",
           "south_pole"), ("torus_on_s3", "circle1"), ("torus_on_s3",
           "circle2")]


def _chain(action, cid):
    return next(c for c in action.chains if c.id == cid)


# ---------------------------------------------------------------------------
# the substitution delta
# ---------------------------------------------------------------------------

def test_delta_depth_one_is_identity():
    assert delta_substitution((0.37,)) == (0.37,)
    assert delta_jacobian((0.37,)) == 1.0


def test_delta_depth_two_frozen_monomials():
    s1, s2 = 0.3, -0.7
    assert delta_substitution((s1, s2)) == (s1 * s1 * s2, s1 * s2)
    assert math.isclose(delta_jacobian((s1, s2)), abs(s1 * s1 * s2))


@given(st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=50, deadline=None)
def test_delta_product_is_total_monomial(s1, s2):
    """The product of all tau factors carries the full monomial degree."""
    t = delta_substitution((s1, s2))
    assert math.isclose(t[0] * t[1], s1 ** 3 * s2 ** 2,
                        rel_tol=1e-12, abs_tol=1e-12)


# ---------------------------------------------------------------------------
# factorization psi o zeta = (prod tau) psi_wk
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name,cid", CHAINED)
def test_total_transform_factors_exactly(name, cid):
    action = load_action(name)
    chain = _chain(action, cid)
    for bp in sample_blowup_points(action, chain, 200, seed=3):
        rep = weak_transform_phase(action, bp)
        assert rep.factor_residual <= 1e-10


@pytest.mark.parametrize("name,cid", CHAINED)
def test_weak_transform_continues_through_sigma_zero(name, cid):
    """psi_wk is well defined on the exceptional fiber where tau = 0."""
    action = load_action(name)
    chain = _chain(action, cid)
    bp = sample_blowup_points(action, chain, 1, seed=5)[0]
    at_zero = BlowupPoint(chain=bp.chain, sigma=(0.0,), base=bp.base,
                          rho=bp.rho, vq=bp.vq, alpha=bp.alpha,
                          beta=bp.beta, p=bp.p)
    rep = weak_transform_phase(action, at_zero)
    assert rep.factor == 0.0
    assert np.isfinite(rep.psi_wk)
    # limit of psi_tot / tau as sigma -> 0 recovers psi_wk
    eps_reps = []
    for eps in (1e-4, 1e-5):
        moved = BlowupPoint(chain=chain, sigma=(eps,), base=bp.base,
                            rho=bp.rho, vq=bp.vq, alpha=bp.alpha,
                            beta=bp.beta, p=bp.p)
        r = weak_transform_phase(action, moved)
        eps_reps.append(r.psi_tot / r.factor)
    assert abs(eps_reps[-1] - rep.psi_wk) <= 1e-3


# ---------------------------------------------------------------------------
# critical conditions and the transversal Hessian
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name,cid", CHAINED)
def test_conditions_match_vanishing_gradient_both_directions(name, cid):
    action = load_action(name)
    chain = _chain(action, cid)
    generic = sample_blowup_points(action, chain, 100, seed=7)
    constructed = sample_weak_critical(action, chain, 100, seed=11)
    for bp in generic + constructed:
        conds = weak_critical_conditions(action, bp)
        gnorm = float(np.linalg.norm(weak_gradient(action, bp)))
        assert all(conds) == (gnorm <= 1e-8)
    # the constructed side actually exercises the critical branch
    assert all(all(weak_critical_conditions(action, bp))
               for bp in constructed)


@pytest.mark.parametrize("name,cid", CHAINED)
def test_certified_rank_and_eigenvalue_floor(name, cid):
    action = load_action(name)
    chain = _chain(action, cid)
    pts = sample_weak_critical(action, chain, 12, seed=13,
                               sigma_values=[0.0, 0.5, -0.8])
    floors = []
    for bp in pts:
        rep = certify_weak_hessian(action, bp)
        assert rep.wk_hess_rank == 2 * action.kappa
        assert abs(rep.psi_wk) <= 1e-10
        floors.append(rep.min_nonzero_eig)
    assert min(floors) > 1e-3   # no degeneration, including sigma = 0


def test_certify_rejects_noncritical_point():
    action = load_action("circle_on_sphere")
    chain = _chain(action, "north_pole")
    bp = sample_blowup_points(action, chain, 1, seed=17)[0]
    with pytest.raises(RankDeficientError):
        certify_weak_hessian(action, bp)


@pytest.mark.parametrize("name,cid", [("torus_on_s3", "circle1"),
                                      ("torus_on_s3", "circle2")])
def test_alpha_chart_has_no_critical_points(name, cid):
    action = load_action(name)
    chain = _chain(action, cid)
    nmin = alpha_chart_noncritical(action, chain, samples=200, seed=19)
    assert nmin is not None and nmin > 0.5


def test_alpha_chart_trivial_for_pole_chains():
    action = load_action("circle_on_sphere")
    chain = _chain(action, "north_pole")
    assert alpha_chart_noncritical(action, chain, samples=5) is None


# ---------------------------------------------------------------------------
# Jacobian structure
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name,cid,expo", [("circle_on_sphere", "north_pole", 1),
                                           ("torus_on_s3", "circle1", 2)])
def test_jacobian_splits_into_monomial_times_smooth_factor(name, cid, expo):
    action = load_action(name)
    chain = _chain(action, cid)
    bp = sample_blowup_points(action, chain, 1, seed=23)[0]
    phis = [smooth_factor(action, bp, at_sigma=s) for s in (0.3, 0.5, 0.7)]
    assert max(phis) - min(phis) <= 1e-8 * max(phis)   # tau-independent
    jw = jacobian_power(action, bp)
    assert math.isclose(jw, abs(bp.tau[0]) ** expo * phis[1],
                        rel_tol=1e-8)
