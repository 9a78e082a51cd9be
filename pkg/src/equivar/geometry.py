"""Charts, metrics, cotangent coordinates and the moment-map phase.

A :class:`GroupActionSpec` bundles an isometric Lie-group action on a
closed manifold, described through closed-form charts: each chart knows
its embedding into an ambient Euclidean space, the coordinate frame of
tangent vectors, and (by restriction of the ambient inner product) its
metric.  The group enters through ambient Killing fields; the fundamental
vector field of a Lie-algebra element in chart coordinates is obtained by
solving the (1x1 .. 3x3) metric system, which keeps every formula valid
for plain numbers, NumPy arrays and :class:`~equivar.jets.Jet2` alike.

The phase function is the moment-map pairing
``psi(eta, X) = eta(X~_m) = sum_i p_i dq_i(X~_m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets
from .jets import Jet2, grad_hess, value


class UnknownChartError(KeyError):
    pass


class ChartDomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small generic linear algebra (works on numbers, arrays and jets)
# ---------------------------------------------------------------------------

def dot(a, b):
    out = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        out = out + x * y
    return out


def mat_vec(m, v):
    return [dot(row, v) for row in m]


def det_small(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    raise ValueError("det_small supports dimensions 1..3")


def solve_small(m, b):
    """Solve ``m x = b`` by cofactors (dimensions 1..3, generic scalars)."""
    n = len(m)
    d = det_small(m)
    if n == 1:
        return [b[0] / d]
    if n == 2:
        return [(b[0] * m[1][1] - b[1] * m[0][1]) / d,
                (m[0][0] * b[1] - m[1][0] * b[0]) / d]
    if n == 3:
        cols = list(zip(*m))
        out = []
        for i in range(3):
            mi = [list(col) for col in cols]
            mi[i] = list(b)
            out.append(det_small(list(zip(*mi))) / d)
        return out
    raise ValueError("solve_small supports dimensions 1..3")


# ---------------------------------------------------------------------------
# smooth radial helpers for normal-coordinate charts on round spheres
# ---------------------------------------------------------------------------

_SMALL = 1e-3  # series/closed-form crossover; series error ~1e-23 there


def _where_generic(mask, a, b):
    if isinstance(a, Jet2) or isinstance(b, Jet2):
        k = a.nvars if isinstance(a, Jet2) else b.nvars
        if not isinstance(a, Jet2):
            a = Jet2.constant(a, k)
        if not isinstance(b, Jet2):
            b = Jet2.constant(b, k)
        return Jet2(np.where(mask, a.f, b.f),
                    np.where(mask, a.g, b.g),
                    np.where(mask, a.h, b.h))
    return np.where(mask, a, b)


def _clamped(x, cutoff):
    if isinstance(x, Jet2):
        return Jet2(np.maximum(x.f, cutoff), x.g, x.h)
    return np.maximum(x, cutoff)


def _piecewise_small(x, series_fn, closed_fn):
    xv = np.asarray(value(x))
    if xv.ndim == 0:
        return series_fn(x) if float(xv) < _SMALL else closed_fn(x)
    mask = xv < _SMALL
    return _where_generic(mask, series_fn(x), closed_fn(_clamped(x, _SMALL)))


def sinc_sqrt(rho):
    """``sin(sqrt(rho)) / sqrt(rho)`` as an analytic function of ``rho``."""
    return _piecewise_small(
        rho,
        lambda t: 1.0 + t * (-1.0 / 6 + t * (1.0 / 120 + t * (-1.0 / 5040 + t * (1.0 / 362880)))),
        lambda t: jets.sin(jets.sqrt(t)) / jets.sqrt(t),
    )


def dsinc_sqrt(rho):
    """Derivative of :func:`sinc_sqrt` with respect to ``rho``."""
    def closed(t):
        r = jets.sqrt(t)
        return (r * jets.cos(r) - jets.sin(r)) / (2.0 * t * r)

    return _piecewise_small(
        rho,
        lambda t: -1.0 / 6 + t * (1.0 / 60 + t * (-1.0 / 1680 + t * (1.0 / 90720))),
        closed,
    )


def cos_sqrt(rho):
    """``cos(sqrt(rho))`` as an analytic function of ``rho``."""
    return _piecewise_small(
        rho,
        lambda t: 1.0 + t * (-0.5 + t * (1.0 / 24 + t * (-1.0 / 720 + t * (1.0 / 40320)))),
        lambda t: jets.cos(jets.sqrt(t)),
    )


# ---------------------------------------------------------------------------
# charts and actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifoldChart:
    """A closed-form coordinate chart with an isometric ambient embedding."""

    id: str
    dim: int
    ambient_dim: int
    domain: tuple  # ((lo, hi), ...) open box in parameter space
    embed: Callable  # coords -> ambient point (list of scalars)
    frame: Callable  # coords -> list of dim ambient tangent vectors
    unembed: Callable  # ambient point -> coords

    def metric(self, u):
        """Metric matrix: Gram matrix of the coordinate frame."""
        e = self.frame(u)
        return [[dot(e[i], e[j]) for j in range(self.dim)] for i in range(self.dim)]

    def contains(self, u, slack=0.0):
        for ui, (lo, hi) in zip(u, self.domain):
            uv = np.asarray(value(ui))
            if np.any(uv <= lo - slack) or np.any(uv >= hi + slack):
                return False
        return True


@dataclass(frozen=True)
class PhasePoint:
    """A point ``(eta, X)`` of ``T*M x g`` in chart coordinates ``(q, p, s)``."""

    chart: str
    q: tuple
    p: tuple
    s: tuple

    def coords(self):
        return list(self.q) + list(self.p) + list(self.s)


@dataclass
class GroupActionSpec:
    """A concrete isometric group action with all catalogue data attached."""

    name: str
    group_dim: int
    kappa: int
    lie_labels: tuple
    structure_constants: np.ndarray  # [i, j, k]: [X_i, X_j] = c_ijk X_k
    lie_gram: np.ndarray  # Gram matrix of the Lie basis (fixes dX)
    charts: dict
    killing: Callable  # (ambient point, s) -> ambient vector, linear in s
    strata: list = field(default_factory=list)  # singular StratumData records
    chains: list = field(default_factory=list)  # IsotropyChain records
    principal_chart: str = ""
    principal_box: tuple = ()  # sampling box for principal base points
    ann_basis: Optional[Callable] = None  # (chart, q) -> covector basis of Ann
    iso_basis: Optional[Callable] = None  # (chart, q) -> basis of g_m (lie coords)
    crit_params: dict = field(default_factory=dict)  # chart -> RegC parametrization
    sing_distance: Optional[Callable] = None  # (chart, q) -> dist to Sing Omega
    group_sample: Optional[Callable] = None  # rng -> group element parameters
    group_matrix: Optional[Callable] = None  # params -> ambient orthogonal matrix
    group_adjoint: Optional[Callable] = None  # params -> d x d adjoint matrix
    stratum_of: Optional[Callable] = None  # (chart, q) -> isotropy label

    @property
    def dim(self):
        return next(iter(self.charts.values())).dim

    def chart(self, chart_id):
        try:
            return self.charts[chart_id]
        except KeyError:
            raise UnknownChartError(f"{self.name}: unknown chart {chart_id!r}")


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------

def fundamental_field(action, chart_id, q, s, check_domain=False):
    """Components of the fundamental vector field of ``X = sum s_i X_i``.

    Solves ``g c = E^T K`` where ``E`` is the coordinate frame and ``K``
    the ambient Killing vector; exactly linear in ``s``.
    """
    ch = action.chart(chart_id)
    if check_domain and not ch.contains(q):
        raise ChartDomainError(f"{action.name}/{chart_id}: point outside domain")
    x = ch.embed(q)
    K = action.killing(x, s)
    E = ch.frame(q)
    g = ch.metric(q)
    b = [dot(E[i], K) for i in range(ch.dim)]
    return solve_small(g, b)


def phase(action, pt):
    """Moment-map phase ``psi(eta, X) = p . X~_m``; bilinear in ``(p, s)``."""
    v = fundamental_field(action, pt.chart, pt.q, pt.s)
    return dot(list(pt.p), v)


def phase_at(action, chart_id, coords, n=None, d=None):
    """Phase as a function of concatenated coordinates ``(q, p, s)``."""
    n = n if n is not None else action.chart(chart_id).dim
    d = d if d is not None else action.group_dim
    q, p, s = coords[:n], coords[n:2 * n], coords[2 * n:2 * n + d]
    return dot(p, fundamental_field(action, chart_id, q, s))


def phase_grad_hess(action, chart_id, q, p, s):
    """Value, gradient and Hessian of ``psi`` in ``(q, p, s)`` (batched)."""
    n = action.chart(chart_id).dim
    d = action.group_dim
    return grad_hess(
        lambda c: phase_at(action, chart_id, c, n=n, d=d),
        list(q) + list(p) + list(s),
    )


def liouville_density(action, chart_id, q, base_only=False):
    """Density weight for integrals.

    In canonical cotangent coordinates the Liouville measure is ``dq dp``,
    so the weight is 1.  With ``base_only=True`` the Riemannian base
    density ``sqrt(det g)`` is returned instead (used for integrals over
    strata of the base manifold).
    """
    ch = action.chart(chart_id)
    if not ch.contains(q):
        raise ChartDomainError(f"{action.name}/{chart_id}: point outside domain")
    if not base_only:
        return 1.0
    return jets.sqrt(det_small(ch.metric(q)))


def dual_hessian(f, u):
    """Exact gradient and Hessian of ``f`` at ``u`` via jet arithmetic."""
    _, g, h = grad_hess(f, list(u))
    return g, h


# ---------------------------------------------------------------------------
# chart transitions and coded group elements
# ---------------------------------------------------------------------------

def ambient_covector(action, chart_id, q, p):
    """Ambient representative of ``eta = sum p_i dq_i`` (tangential lift)."""
    ch = action.chart(chart_id)
    E = ch.frame(q)
    g = ch.metric(q)
    c = solve_small(g, list(p))
    return [dot([row[a] for row in [E[i] for i in range(ch.dim)]], c)
            for a in range(ch.ambient_dim)]


def covector_components(action, chart_id, q, omega):
    """Chart components ``p_i = omega . E_i`` of an ambient covector."""
    ch = action.chart(chart_id)
    E = ch.frame(q)
    return [dot(E[i], omega) for i in range(ch.dim)]


def transition_point(action, pt, target_chart):
    """Re-express a phase point in an overlapping chart."""
    src = action.chart(pt.chart)
    dst = action.chart(target_chart)
    x = src.embed(pt.q)
    q2 = dst.unembed(x)
    if not dst.contains(q2):
        raise ChartDomainError(
            f"{action.name}: point not inside chart {target_chart!r}")
    omega = ambient_covector(action, pt.chart, pt.q, pt.p)
    p2 = covector_components(action, target_chart, q2, omega)
    return PhasePoint(target_chart, tuple(float(value(c)) for c in q2),
                      tuple(float(value(c)) for c in p2), pt.s)


def transition_jacobian(action, source_chart, target_chart, q):
    """Jacobian ``d q_target / d q_source`` computed by jet arithmetic."""
    src = action.chart(source_chart)
    dst = action.chart(target_chart)

    qj = jets.seed(list(q))
    out = dst.unembed(src.embed(qj))
    return np.array([value(c.g) if isinstance(c, Jet2) else
                     np.zeros(src.dim) for c in out])


def apply_group(action, gparams, pt):
    """Act with a coded group element on a phase point.

    The base point moves by the ambient orthogonal matrix, the covector by
    the same matrix (the embedding is isometric), and the Lie-algebra
    coordinates by the adjoint representation, so the phase is preserved.
    Returns a phase point in whichever chart contains the image.
    """
    R = action.group_matrix(gparams)
    src = action.chart(pt.chart)
    x = np.array([float(value(c)) for c in src.embed(pt.q)])
    omega = np.array([float(value(c))
                      for c in ambient_covector(action, pt.chart, pt.q, pt.p)])
    x2 = R @ x
    omega2 = R @ omega
    s2 = tuple(action.group_adjoint(gparams) @ np.array(pt.s, dtype=float))
    for cid, ch in action.charts.items():
        try:
            q2 = ch.unembed(list(x2))
        except (ValueError, ZeroDivisionError, jets.NonSmoothPointError):
            continue
        if ch.contains(q2, slack=-1e-9):
            p2 = covector_components(action, cid, q2, list(omega2))
            return PhasePoint(cid, tuple(float(value(c)) for c in q2),
                              tuple(float(value(c)) for c in p2), s2)
    raise ChartDomainError(f"{action.name}: image point not covered by charts")
