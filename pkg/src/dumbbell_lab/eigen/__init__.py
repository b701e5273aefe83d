"""Weighted Dirichlet eigenproblems on dumbbell and half-space meshes."""

from dumbbell_lab.eigen.dense import dense_weighted_eigenvalues
from dumbbell_lab.eigen.marching import resolve_left_tail
from dumbbell_lab.eigen.solver import (
    EigenProblem,
    LimitSpectra,
    SpectralResult,
    limit_spectra,
    sign_normalize,
    solve_weighted,
    track_branch,
)

__all__ = [
    "EigenProblem",
    "LimitSpectra",
    "SpectralResult",
    "dense_weighted_eigenvalues",
    "limit_spectra",
    "resolve_left_tail",
    "sign_normalize",
    "solve_weighted",
    "track_branch",
]
