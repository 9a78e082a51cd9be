"""Certification of the regular critical set."""

import numpy as np
import pytest

from equivar import load_action
from equivar.critical import (
    NotCriticalError,
    certify_regular_critical,
    isotropy_algebra,
    omega_residual,
    phase_gradient,
    sample_regular_critical,
)
from equivar.geometry import PhasePoint

ALL_ACTIONS = ("circle_on_circle", "circle_on_sphere", "so3_on_sphere",
               "torus_on_s3")

# rank = 2 kappa and kernel dim = 2n + d - 2 kappa per action
RANKS = {"circle_on_circle": (2, 1), "circle_on_sphere": (2, 3),
         "so3_on_sphere": (4, 3), "torus_on_s3": (4, 4)}


@pytest.mark.parametrize("name", ALL_ACTIONS)
def test_sampled_points_certify(name):
    action = load_action(name)
    rank, kernel = RANKS[name]
    for sample in sample_regular_critical(action, 25, seed=1):
        assert sample.grad_norm <= 1e-10
        assert sample.rank == rank == 2 * action.kappa
        assert sample.kernel_dim == kernel
        assert sample.signature == 0


def test_sampling_is_reproducible():
    action = load_action("circle_on_sphere")
    a = sample_regular_critical(action, 5, seed=42)
    b = sample_regular_critical(action, 5, seed=42)
    for x, y in zip(a, b):
        assert x.pt == y.pt


def test_noncritical_point_rejected():
    action = load_action("circle_on_circle")
    pt = PhasePoint("angle0", (0.3,), (0.7,), (0.9,))   # psi = 0.7*0.9*... != 0
    assert np.linalg.norm(phase_gradient(action, pt)) > 1e-3
    with pytest.raises(NotCriticalError):
        certify_regular_critical(action, pt)


def test_gradient_vanishes_iff_annihilator_condition():
    """eta kills every orbit direction exactly on the critical set."""
    action = load_action("circle_on_sphere")
    rng = np.random.default_rng(3)
    for _ in range(50):
        theta = float(rng.uniform(0.3, 2.8))
        phi = float(rng.uniform(-3.0, 3.0))
        p = tuple(rng.uniform(-1, 1, size=2))
        res = float(np.max(np.abs(
            omega_residual(action, "spherical", [theta, phi], list(p)))))
        pt = PhasePoint("spherical", (theta, phi), p,
                        tuple(rng.uniform(-1, 1, size=1)))
        gnorm = float(np.linalg.norm(np.concatenate(
            [np.atleast_1d(np.asarray(b, dtype=float))
             for b in phase_gradient(action, pt)])))
        if res <= 1e-12:
            assert gnorm <= 1e-10
        else:
            # gradient can only vanish at s = 0 when the residual does
            assert gnorm > 0.0


def test_isotropy_algebra_dimensions():
    action = load_action("circle_on_sphere")
    # principal orbit: trivial isotropy
    assert isotropy_algebra(action, "spherical", [1.0, 0.5]).shape[1] == 0
    # pole: the whole circle algebra fixes the point
    assert isotropy_algebra(action, "north", [0.0, 0.0]).shape[1] == 1

    so3 = load_action("so3_on_sphere")
    # every point of the sphere has a 1-dim stabilizer in so(3)
    assert isotropy_algebra(so3, "spherical", [1.2, -0.4]).shape[1] == 1
