"""Frequency quotients, Pohozaev identities and the trace Poincare constant."""

from dumbbell_lab.frequency.almgren import (
    FrequencyProfile,
    FrequencySample,
    Regime,
    apply_drop_rule,
    frequency_dumbbell,
    frequency_exterior_model,
    frequency_tube_model,
    monotonicity_defect,
    regime_of,
)
from dumbbell_lab.frequency.identities import (
    coercivity_ratio,
    derivative_residual,
    fit_remainder,
    pohozaev_identity,
    pohozaev_residual,
    r_eps_plus,
)
from dumbbell_lab.frequency.poincare import dipole_trial_quotient, poincare_optimal_constant

__all__ = [
    "FrequencyProfile",
    "FrequencySample",
    "Regime",
    "apply_drop_rule",
    "coercivity_ratio",
    "derivative_residual",
    "dipole_trial_quotient",
    "fit_remainder",
    "frequency_dumbbell",
    "frequency_exterior_model",
    "frequency_tube_model",
    "monotonicity_defect",
    "poincare_optimal_constant",
    "pohozaev_identity",
    "pohozaev_residual",
    "r_eps_plus",
    "regime_of",
]
