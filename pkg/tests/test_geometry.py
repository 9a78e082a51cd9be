"""Charts, fundamental fields and the moment-map phase."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equivar import load_action
from equivar.geometry import (
    ChartDomainError,
    PhasePoint,
    apply_group,
    fundamental_field,
    liouville_density,
    phase,
    phase_grad_hess,
    transition_point,
)

ALL_ACTIONS = ("circle_on_circle", "circle_on_sphere", "so3_on_sphere",
               "torus_on_s3")


def _random_point(action, rng):
    chart = action.principal_chart
    n = action.chart(chart).dim
    q = tuple(float(rng.uniform(lo, hi)) for lo, hi in action.principal_box)
    p = tuple(rng.uniform(-1.0, 1.0, size=n))
    s = tuple(rng.uniform(-1.0, 1.0, size=action.group_dim))
    return PhasePoint(chart, q, p, s)


@pytest.mark.parametrize("name", ALL_ACTIONS)
def test_phase_is_bilinear_in_covector_and_lie_coordinates(name):
    action = load_action(name)
    rng = np.random.default_rng(3)
    for _ in range(20):
        pt = _random_point(action, rng)
        a, b = rng.uniform(-2.0, 2.0, size=2)
        p2 = tuple(rng.uniform(-1.0, 1.0, size=len(pt.p)))
        s2 = tuple(rng.uniform(-1.0, 1.0, size=len(pt.s)))
        lhs = phase(action, PhasePoint(
            pt.chart, pt.q,
            tuple(a * x + y for x, y in zip(pt.p, p2)), pt.s))
        rhs = a * phase(action, pt) + phase(
            action, PhasePoint(pt.chart, pt.q, p2, pt.s))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
        lhs = phase(action, PhasePoint(
            pt.chart, pt.q, pt.p,
            tuple(b * x + y for x, y in zip(pt.s, s2))))
        rhs = b * phase(action, pt) + phase(
            action, PhasePoint(pt.chart, pt.q, pt.p, s2))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


@pytest.mark.parametrize("name", ALL_ACTIONS)
def test_phase_invariant_under_group_action(name):
    """The phase pairs a covector with the moment map equivariantly."""
    action = load_action(name)
    rng = np.random.default_rng(5)
    for _ in range(20):
        pt = _random_point(action, rng)
        g = action.group_sample(rng)
        moved = apply_group(action, g, pt)
        assert abs(phase(action, moved) - phase(action, pt)) <= 1e-9


def test_fundamental_field_linear_in_lie_coordinates():
    action = load_action("so3_on_sphere")
    rng = np.random.default_rng(9)
    q = (1.2, 0.4)
    for _ in range(20):
        s1 = rng.uniform(-1, 1, size=3)
        s2 = rng.uniform(-1, 1, size=3)
        a = float(rng.uniform(-2, 2))
        v1 = np.array(fundamental_field(action, "spherical", list(q), list(s1)))
        v2 = np.array(fundamental_field(action, "spherical", list(q), list(s2)))
        v = np.array(fundamental_field(action, "spherical", list(q),
                                       list(a * s1 + s2)))
        assert np.max(np.abs(v - (a * v1 + v2))) <= 1e-12


def test_sphere_base_density_is_sin_theta():
    action = load_action("circle_on_sphere")
    for theta in (0.3, 1.0, 2.5):
        got = liouville_density(action, "spherical", [theta, 0.7],
                                base_only=True)
        assert math.isclose(float(got), math.sin(theta), rel_tol=1e-12)


def test_liouville_weight_is_one_in_canonical_coordinates():
    action = load_action("circle_on_circle")
    assert liouville_density(action, "angle0", [0.3]) == 1.0


def test_chart_transition_preserves_phase():
    action = load_action("circle_on_sphere")
    rng = np.random.default_rng(13)
    for _ in range(30):
        theta = float(rng.uniform(0.2, 1.2))   # northern region, both charts
        phi = float(rng.uniform(-3.0, 3.0))
        pt = PhasePoint("spherical", (theta, phi),
                        tuple(rng.uniform(-1, 1, size=2)),
                        tuple(rng.uniform(-1, 1, size=1)))
        moved = transition_point(action, pt, "north")
        assert abs(phase(action, moved) - phase(action, pt)) <= 1e-12
        back = transition_point(action, moved, "spherical")
        assert np.allclose(back.q, pt.q, atol=1e-12)
        assert np.allclose(back.p, pt.p, atol=1e-12)


def test_transition_outside_target_chart_raises():
    action = load_action("circle_on_sphere")
    pt = PhasePoint("spherical", (3.0, 0.0), (0.1, 0.1), (1.0,))
    with pytest.raises(ChartDomainError):
        transition_point(action, pt, "north")   # too close to the south pole


@pytest.mark.parametrize("name", ALL_ACTIONS)
def test_gradient_rank_law_on_critical_set(name):
    """On the zero level of the moment map the Hessian rank is 2 kappa."""
    from equivar.critical import sample_regular_critical

    action = load_action(name)
    for sample in sample_regular_critical(action, 10, seed=17):
        assert sample.rank == 2 * action.kappa
        assert sample.grad_norm <= 1e-10


@given(st.floats(0.3, 2.8), st.floats(-3.0, 3.0))
@settings(max_examples=30, deadline=None)
def test_hessian_pp_and_ss_blocks_vanish(theta, phi):
    """Bilinearity in (p, s) forces zero diagonal blocks of the Hessian."""
    action = load_action("circle_on_sphere")
    n = 2
    _, _, H = phase_grad_hess(action, "spherical", [theta, phi],
                              [0.4, -0.2], [0.8])
    H = np.asarray(H, dtype=float)
    assert np.max(np.abs(H[n:2 * n, n:2 * n])) == 0.0
    assert np.max(np.abs(H[2 * n:, 2 * n:])) == 0.0
