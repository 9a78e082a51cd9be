"""Second-order forward-mode jets against finite-difference oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equivar import jets
from equivar.jets import NonSmoothPointError


def fd_grad_hess(f, u, h=1e-5):
    k = len(u)
    g = np.zeros(k)
    H = np.zeros((k, k))
    for i in range(k):
        up = list(u); um = list(u)
        up[i] += h; um[i] -= h
        g[i] = (f(up) - f(um)) / (2 * h)
    for i in range(k):
        for j in range(k):
            upp = list(u); upm = list(u); ump = list(u); umm = list(u)
            upp[i] += h; upp[j] += h
            upm[i] += h; upm[j] -= h
            ump[i] -= h; ump[j] += h
            umm[i] -= h; umm[j] -= h
            H[i, j] = (f(upp) - f(upm) - f(ump) + f(umm)) / (4 * h * h)
    return g, H


def _random_smooth(rng):
    """A random smooth scalar map built from the supported primitives."""
    a, b, c = rng.uniform(0.3, 1.5, size=3)
    ops = [
        lambda u: jets.sin(a * u[0]) * jets.cos(b * u[1]) + c * u[2] ** 2,
        lambda u: jets.exp(-a * u[0] ** 2) + u[1] * u[2],
        lambda u: jets.sqrt(1.0 + u[0] ** 2 + b * u[1] ** 2) - c * u[2],
        lambda u: jets.arctan(a * u[0] + b * u[1]) * u[2],
        lambda u: jets.log(2.0 + jets.cos(u[0])) + u[1] / (1.5 + u[2] ** 2),
        lambda u: jets.arctan2(a + u[0], 2.0 + jets.sin(u[1])) + u[2],
    ]
    return ops[rng.integers(len(ops))]


def test_grad_hess_matches_finite_differences_on_random_functions():
    rng = np.random.default_rng(7)
    for _ in range(100):
        f = _random_smooth(rng)
        u = list(rng.uniform(-1.0, 1.0, size=3))
        val, g, H = jets.grad_hess(f, u)
        g_fd, H_fd = fd_grad_hess(lambda v: jets.value(f(v)), u)
        scale = max(np.max(np.abs(H)), np.max(np.abs(g)), 1.0)
        assert np.max(np.abs(np.asarray(g) - g_fd)) / scale <= 1e-6
        assert np.max(np.abs(np.asarray(H) - H_fd)) / scale <= 1e-5


def test_batched_jets_agree_with_scalar_jets():
    rng = np.random.default_rng(11)
    pts = rng.uniform(-1.0, 1.0, size=(3, 50))

    def f(u):
        return jets.sin(u[0]) * u[1] + jets.exp(u[2]) * u[0]

    val, g, H = jets.grad_hess(f, [pts[0], pts[1], pts[2]])
    for j in (0, 17, 49):
        v1, g1, H1 = jets.grad_hess(f, [float(pts[i][j]) for i in range(3)])
        assert np.allclose(val[j], v1)
        assert np.allclose(np.asarray(g)[:, j], g1)
        assert np.allclose(np.asarray(H)[:, :, j], H1)


def test_hessian_is_exactly_symmetric():
    _, _, H = jets.grad_hess(
        lambda u: u[0] * jets.sin(u[1]) + u[1] ** 3 * u[0] ** 2, [0.7, -0.3])
    assert np.array_equal(np.asarray(H), np.asarray(H).T)


def test_chain_rule_through_compose():
    x = jets.seed([0.4])[0]
    y = (x * x).compose(math.sin(0.16), math.cos(0.16), -math.sin(0.16))
    v, g, H = jets.grad_hess(lambda u: jets.sin(u[0] * u[0]), [0.4])
    assert math.isclose(y.f, v)
    assert np.allclose(y.g, g)


def test_sqrt_rejects_nonsmooth_point():
    x = jets.seed([0.0])[0]
    with pytest.raises(NonSmoothPointError):
        jets.sqrt(x)


def test_log_rejects_nonpositive():
    x = jets.seed([-1.0])[0]
    with pytest.raises(NonSmoothPointError):
        jets.log(x)


def test_value_passthrough():
    assert jets.value(3.5) == 3.5
    assert jets.value(jets.seed([2.0])[0]) == 2.0


@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
@settings(max_examples=50, deadline=None)
def test_arithmetic_jets_are_exact_polynomials(a, b, c):
    """For a polynomial the jet derivatives are exact, not approximate."""
    def f(u):
        return a * u[0] ** 3 + b * u[0] * u[1] + c * u[1] ** 2

    x, y = 0.3, -0.8
    _, g, H = jets.grad_hess(f, [x, y])
    assert np.allclose(g, [3 * a * x * x + b * y, b * x + 2 * c * y],
                       rtol=0, atol=1e-12)
    assert np.allclose(H, [[6 * a * x, b], [b, 2 * c]], rtol=0, atol=1e-12)
