"""Catalogue data: charts, strata, amplitudes and frozen coefficients."""

import math

import numpy as np
import pytest

from equivar import jets, load_action, load_amplitude, reference_L0
from equivar.catalogue import (
    ACTION_NAMES,
    AMPLITUDES,
    bump_profile,
    smoothstep_down,
)
from equivar.critical import certify_regular_critical
from equivar.geometry import PhasePoint, fundamental_field

EXPECTED = {
    # name -> (group_dim, kappa, chain ids, (c, d, e) per chain level)
    "circle_on_circle": (1, 1, [], []),
    "circle_on_sphere": (1, 1, ["north_pole", "south_pole"], [(2, 0, 1)] * 2),
    "so3_on_sphere": (3, 2, [], []),
    "torus_on_s3": (2, 2, ["circle1", "circle2"], [(2, 1, 1)] * 2),
}


@pytest.mark.parametrize("name", ACTION_NAMES)
def test_catalogue_dimensions(name):
    action = load_action(name)
    group_dim, kappa, chain_ids, dims = EXPECTED[name]
    assert action.group_dim == group_dim
    assert action.kappa == kappa
    assert [c.id for c in action.chains] == chain_ids
    assert [c.levels[0].dims for c in action.chains] == dims
    for chain in action.chains:
        level = chain.levels[0]
        c, d, e = level.dims
        assert len(level.iso_perp_basis) == d
        assert len(level.iso_basis) == e
        assert d + e == group_dim


@pytest.mark.parametrize("name", ["circle_on_sphere", "torus_on_s3"])
def test_isotropy_representation_is_antisymmetric_and_linear(name):
    action = load_action(name)
    rng = np.random.default_rng(2)
    for chain in action.chains:
        level = chain.levels[0]
        c, _, e = level.dims
        for _ in range(10):
            x = [float(rng.uniform(lo, hi)) for lo, hi in level.center_box]
            b1 = list(rng.uniform(-1, 1, size=e))
            b2 = list(rng.uniform(-1, 1, size=e))
            a = float(rng.uniform(-2, 2))
            L1 = np.array(level.lam(x, b1))
            L2 = np.array(level.lam(x, b2))
            L = np.array(level.lam(x, [a * u + v for u, v in zip(b1, b2)]))
            assert L1.shape == (c, c)
            assert np.max(np.abs(L1 + L1.T)) <= 1e-12
            assert np.max(np.abs(L - (a * L1 + L2))) <= 1e-12


@pytest.mark.parametrize("name", ["circle_on_sphere", "torus_on_s3"])
def test_exponential_map_is_isometric_on_the_normal_frame(name):
    action = load_action(name)
    rng = np.random.default_rng(6)
    for chain in action.chains:
        level = chain.levels[0]
        chart = action.chart(level.chart)
        for _ in range(10):
            x = [float(rng.uniform(lo, hi)) for lo, hi in level.center_box]
            frame = level.normal_frame(x)
            G = np.array([[sum(u * v for u, v in zip(fi, fj))
                           for fj in frame] for fi in frame])
            assert np.max(np.abs(G - np.eye(len(frame)))) <= 1e-12
            # short geodesics keep their length to second order
            v = rng.uniform(-0.1, 0.1, size=len(frame))
            m0 = np.array([float(c) for c in level.exp_map(x, [0.0] * len(v))])
            m1 = np.array([float(c) for c in level.exp_map(x, list(v))])
            x0 = np.array([float(c) for c in chart.embed(list(m0))])
            x1 = np.array([float(c) for c in chart.embed(list(m1))])
            geo = float(np.linalg.norm(v))
            chord = float(np.linalg.norm(x1 - x0))
            assert abs(chord - geo) <= 0.05 * geo + 1e-12


@pytest.mark.parametrize("name", ["circle_on_sphere", "torus_on_s3"])
def test_orbit_speed_bounded_below_by_singular_distance(name):
    """Away from fixed circles the orbit map is a local submersion:
    |X~| >= const * distance to the singular stratum."""
    action = load_action(name)
    rng = np.random.default_rng(8)
    chart = action.principal_chart
    for _ in range(50):
        q = [float(rng.uniform(lo, hi)) for lo, hi in action.principal_box]
        speeds = []
        for a in range(action.group_dim):
            s = [0.0] * action.group_dim
            s[a] = 1.0
            v = fundamental_field(action, chart, q, s)
            speeds.append(float(np.linalg.norm([float(c) for c in v])))
        dist = float(action.sing_distance(chart, q))
        assert max(speeds) >= 0.2 * dist


@pytest.mark.parametrize("key", [k for k, v in AMPLITUDES.items()
                                 if v.scale != 0.0])
def test_amplitudes_supported_inside_their_chart(key):
    amp = load_amplitude(key)
    action = load_action(amp.action)
    chart = action.chart(amp.chart)
    for (lo, hi), c in zip(chart.domain, amp.q0):
        assert lo < c < hi


def test_bump_profile_shape():
    assert bump_profile(np.array([0.0]))[0] == 1.0
    assert bump_profile(np.array([1.0]))[0] == 0.0
    assert bump_profile(np.array([2.5]))[0] == 0.0
    mid = bump_profile(np.array([0.5]))[0]
    assert 0.0 < mid < 1.0


def test_smoothstep_down_clamps():
    assert smoothstep_down(-1.0) == 1.0
    assert smoothstep_down(2.0) == 0.0
    assert 0.0 < smoothstep_down(0.5) < 1.0


@pytest.mark.parametrize("name,amp_id", [
    ("circle_on_circle", "bump_A"),
    ("circle_on_circle", "bump_F"),
    ("circle_on_sphere", "bump_B"),
    ("circle_on_sphere", "bump_D"),
    ("so3_on_sphere", "bump_C"),
])
def test_reference_coefficients_regression(name, amp_id):
    """Frozen leading coefficients stay reproducible by quadrature."""
    from equivar.asymptotics import QuadratureConfig, leading_coefficient_L0

    action = load_action(name)
    amp = load_amplitude(amp_id)
    got = leading_coefficient_L0(action, amp, QuadratureConfig())
    assert abs(got.imag) <= 1e-12 * max(abs(got), 1.0)
    assert math.isclose(got.real, reference_L0(name, amp_id), rel_tol=1e-9)


@pytest.mark.parametrize("name", ACTION_NAMES)
def test_closed_form_density_matches_certified_hessians(name):
    """density(t) == (surface measure of the parametrization) /
    sqrt|det transversal Hessian| at certified points."""
    action = load_action(name)
    crit = action.crit_params[action.principal_chart]
    amp = next(v for v in AMPLITUDES.values()
               if v.action == name and v.scale != 0.0)
    box = crit.box(amp)
    rng = np.random.default_rng(4)
    for _ in range(10):
        t = [float(rng.uniform(lo, hi)) for lo, hi in box]
        q, p, s = crit.to_phase(t)
        pt = PhasePoint(crit.chart,
                        tuple(float(jets.value(c)) for c in q),
                        tuple(float(jets.value(c)) for c in p),
                        tuple(float(jets.value(c)) for c in s))
        sample = certify_regular_critical(action, pt)
        tj = jets.seed(t)
        cols = [c.g if isinstance(c, jets.Jet2) else np.zeros(len(t))
                for comp in crit.to_phase(tj) for c in comp]
        J = np.array(cols)
        surf = math.sqrt(float(np.linalg.det(J.T @ J)))
        pred = surf / math.sqrt(abs(float(np.linalg.det(sample.trans_hess))))
        got = float(jets.value(crit.density(t)))
        assert math.isclose(got, pred, rel_tol=1e-10)
