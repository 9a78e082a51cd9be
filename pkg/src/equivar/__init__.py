"""Asymptotics of equivariant oscillatory integrals with moment-map phase.

The package verifies the expansion ``I(mu) = (2 pi mu)^kappa L0 +
O(mu^(kappa+1))`` on a catalogue of concrete compact group actions: it
builds the phase from charts and Killing fields (``geometry``), certifies
its critical set (``critical``), resolves the singular strata by
chart-level blow-ups (``resolution``), and compares stationary-phase
coefficients against a brute-force quadrature oracle (``asymptotics``).
"""

from .catalogue import (
    ACTION_NAMES,
    AMPLITUDES,
    load_action,
    load_amplitude,
    reference_L0,
)
from .geometry import GroupActionSpec, ManifoldChart, PhasePoint
from .asymptotics import (
    AsymptoticFit,
    QuadratureConfig,
    brute_force_I,
    fit_asymptotics,
    leading_coefficient_L0,
)

__version__ = "0.1.0"

__all__ = [
    "ACTION_NAMES",
    "AMPLITUDES",
    "AsymptoticFit",
    "GroupActionSpec",
    "ManifoldChart",
    "PhasePoint",
    "QuadratureConfig",
    "brute_force_I",
    "fit_asymptotics",
    "leading_coefficient_L0",
    "load_action",
    "load_amplitude",
    "reference_L0",
    "__version__",
]
