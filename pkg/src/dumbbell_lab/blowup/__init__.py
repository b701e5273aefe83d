"""Blow-up rescalings, trace asymptotics and the singular coefficient beta."""

from dumbbell_lab.blowup.asymptotics import (
    BetaEstimate,
    BetaFormula,
    FitResult,
    GrowthBounds,
    beta_from_fit,
    beta_from_formula,
    fit_power,
    h_u,
    h_u_growth_bounds,
    mu,
    mu_expansion_check,
    trace_samples,
)
from dumbbell_lab.blowup.comparisons import compare_blowup_to_profile, hat_growth_bound, nodal_sign_scan
from dumbbell_lab.blowup.rescale import RescaledField, RescaleKind, left_hat, rescale, right_tilde, u_lambda, u_normalized

__all__ = [
    "BetaEstimate",
    "BetaFormula",
    "FitResult",
    "GrowthBounds",
    "RescaleKind",
    "RescaledField",
    "beta_from_fit",
    "beta_from_formula",
    "compare_blowup_to_profile",
    "fit_power",
    "h_u",
    "h_u_growth_bounds",
    "hat_growth_bound",
    "left_hat",
    "mu",
    "mu_expansion_check",
    "nodal_sign_scan",
    "rescale",
    "right_tilde",
    "trace_samples",
    "u_lambda",
    "u_normalized",
]
