"""Axisymmetric P1 stiffness and weighted mass matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.sparse.linalg import splu

from dumbbell_lab.errors import ConfigurationError, SolverError
from dumbbell_lab.fem.fields import element_geometry
from dumbbell_lab.geometry.models import MeridianMesh
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.quadrature import axisymmetric_factor

logger = get_logger(__name__)

WeightFn = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]

# edge-midpoint rule: barycentric coordinates of the three quadrature points
_MIDPOINT_BARY = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])


@dataclass(frozen=True)
class SparseOperator:
    """Symmetric matrix on all vertices plus the free (unconstrained) vertex set."""

    matrix: sparse.csr_matrix
    free: NDArray[np.int64]

    @property
    def free_matrix(self) -> sparse.csr_matrix:
        return self.matrix[self.free][:, self.free].tocsr()

    def symmetry_defect(self) -> float:
        diff = self.matrix - self.matrix.T
        scale = max(abs(self.matrix).max(), 1e-300)
        return float(abs(diff).max() / scale) if diff.nnz else 0.0

    def quadratic_form(self, values: NDArray[np.float64]) -> float:
        return float(values @ (self.matrix @ values))


def free_vertices(mesh: MeridianMesh) -> NDArray[np.int64]:
    return np.flatnonzero(~mesh.dirichlet_mask).astype(np.int64)


def midpoint_points(mesh: MeridianMesh) -> NDArray[np.float64]:
    """(m, 3, 2) edge-midpoint coordinates of every triangle."""
    p = mesh.vertices[mesh.triangles]
    return np.einsum("qk,mkd->mqd", _MIDPOINT_BARY, p)


def _scatter(mesh: MeridianMesh, local: NDArray[np.float64]) -> sparse.csr_matrix:
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = mesh.n_vertices
    return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def stiffness(
    mesh: MeridianMesh,
    N: int | None = None,
    *,
    regions: tuple[str, ...] | None = None,
) -> SparseOperator:
    """
    omega_{N-2} * int s^{N-2} grad(phi_i) . grad(phi_j) ds dz.

    The factor s^{N-2} is the mean of its edge-midpoint values (exact for N = 3, 4).
    """
    dim = N or mesh.dimension
    grads = element_geometry(mesh).basis_gradients
    s_mid = midpoint_points(mesh)[:, :, 1]
    factor = axisymmetric_factor(dim) * mesh.areas * np.mean(s_mid ** (dim - 2), axis=1)
    if regions is not None:
        factor = factor * mesh.region_mask(*regions)
    local = factor[:, None, None] * np.einsum("mid,mjd->mij", grads, grads)
    return SparseOperator(matrix=_scatter(mesh, local), free=free_vertices(mesh))


def weighted_mass(
    mesh: MeridianMesh,
    weight: WeightFn,
    N: int | None = None,
    *,
    regions: tuple[str, ...] | None = None,
) -> SparseOperator:
    """
    omega_{N-2} * int s^{N-2} p phi_i phi_j, edge-midpoint rule.

    Raises:
        ConfigurationError: If the weight is negative at a quadrature point.
    """
    dim = N or mesh.dimension
    mid = midpoint_points(mesh)
    p = np.asarray(weight(mid[:, :, 0].ravel(), mid[:, :, 1].ravel()), dtype=float).reshape(-1, 3)
    if np.any(p < 0.0):
        raise ConfigurationError(f"weight is negative at {int(np.sum(p < 0))} quadrature points")
    if regions is not None:
        p = p * mesh.region_mask(*regions)[:, None]
    qw = p * mid[:, :, 1] ** (dim - 2) * (mesh.areas[:, None] / 3.0)
    local = axisymmetric_factor(dim) * np.einsum("mq,qi,qj->mij", qw, _MIDPOINT_BARY, _MIDPOINT_BARY)
    return SparseOperator(matrix=_scatter(mesh, local), free=free_vertices(mesh))


def solve_dirichlet(
    matrix: sparse.spmatrix,
    free: NDArray[np.int64],
    rhs: NDArray[np.float64],
    boundary_values: NDArray[np.float64],
) -> NDArray[np.float64]:
    """
    Solve ``matrix @ x = rhs`` on ``free`` with x fixed to ``boundary_values`` elsewhere.

    Raises:
        SolverError: If the factorization fails (singular restriction).
    """
    n = matrix.shape[0]
    x = np.array(boundary_values, dtype=float, copy=True)
    mask = np.zeros(n, dtype=bool)
    mask[free] = True
    fixed = np.flatnonzero(~mask)
    A = sparse.csr_matrix(matrix)
    b = rhs[free] - A[free][:, fixed] @ x[fixed]
    try:
        lu = splu(A[free][:, free].tocsc())
    except RuntimeError as exc:
        raise SolverError(f"sparse factorization failed: {exc}") from exc
    x[free] = lu.solve(b)
    if not np.all(np.isfinite(x[free])):
        raise SolverError("non-finite values in Dirichlet solve")
    return x
