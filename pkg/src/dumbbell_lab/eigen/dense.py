"""Dense oracle for small problems: scipy.linalg.eigh on the reciprocal pencil."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import eigh

from dumbbell_lab.errors import SolverError
from dumbbell_lab.eigen.solver import EigenProblem
from dumbbell_lab.geometry.models import MeridianMesh
from dumbbell_lab.weight.model import PWeight

DENSE_LIMIT = 1500


def dense_weighted_eigenvalues(
    mesh: MeridianMesh,
    weight: PWeight,
    k: int = 1,
    *,
    free: NDArray[np.int64] | None = None,
) -> NDArray[np.float64]:
    """
    Smallest ``k`` finite eigenvalues of (K, M_p) from M_p v = nu K v, lambda = 1/nu.

    K is positive definite on the free vertices while M_p is singular, so the
    reciprocal pencil is the well-posed one.
    """
    problem = EigenProblem.assemble(mesh, weight)
    idx = problem.free if free is None else free
    n = idx.shape[0]
    if n > DENSE_LIMIT:
        raise SolverError(f"dense oracle limited to {DENSE_LIMIT} dofs, got {n}")
    K = problem.K[idx][:, idx].toarray()
    M = problem.M[idx][:, idx].toarray()
    nu = eigh(M, K, eigvals_only=True, subset_by_index=[n - k, n - 1])
    if np.any(nu <= 0):
        raise SolverError("fewer finite eigenvalues than requested")
    return np.sort(1.0 / nu)
