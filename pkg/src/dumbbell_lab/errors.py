"""Exception hierarchy for the lab."""


class DumbbellLabError(Exception):
    """Base class for every error raised by the lab."""


class ConfigurationError(DumbbellLabError, ValueError):
    """Invalid geometry, weight, or experiment configuration."""


class AssumptionViolation(DumbbellLabError):
    """A runtime check of an experiment assumption failed (spectral gap, sign)."""


class SolverError(DumbbellLabError):
    """A linear or eigenvalue solve did not converge."""


class DomainError(DumbbellLabError, ValueError):
    """A sampling parameter or evaluation point lies outside the admissible set."""


class FitError(DumbbellLabError, ValueError):
    """A power-law fit cannot be formed from the given samples."""


class BetaSignError(FitError):
    """The two sign estimators for the singular coefficient disagree."""


__all__ = [
    "AssumptionViolation",
    "BetaSignError",
    "ConfigurationError",
    "DomainError",
    "DumbbellLabError",
    "FitError",
    "SolverError",
]
