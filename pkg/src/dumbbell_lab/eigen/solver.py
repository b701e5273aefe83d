"""Generalized eigenproblem K u = lambda M_p u on meridian meshes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from dumbbell_lab.errors import AssumptionViolation, ConfigurationError, SolverError
from dumbbell_lab.fem.assembly import stiffness, weighted_mass
from dumbbell_lab.fem.fields import DiscreteField
from dumbbell_lab.geometry.builder import build_mesh
from dumbbell_lab.geometry.models import DumbbellSpec, MeridianMesh
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.weight.model import PWeight

logger = get_logger(__name__)

Array = NDArray[np.float64]

DEFAULT_TOL = 1e-8
SIGN_THRESHOLD = 1e-10


@dataclass(frozen=True)
class EigenProblem:
    """Assembled matrices on all vertices; ``free`` excludes Dirichlet vertices."""

    mesh: MeridianMesh
    weight: PWeight
    K: sparse.csr_matrix
    M: sparse.csr_matrix
    free: NDArray[np.int64]

    @classmethod
    def assemble(cls, mesh: MeridianMesh, weight: PWeight) -> "EigenProblem":
        K = stiffness(mesh)
        M = weighted_mass(mesh, weight.eval_p)
        return cls(mesh=mesh, weight=weight, K=K.matrix, M=M.matrix, free=K.free)

    def restrict(self, mask: NDArray[np.bool_]) -> NDArray[np.int64]:
        """Free vertices that also satisfy ``mask``."""
        keep = np.zeros(self.mesh.n_vertices, dtype=bool)
        keep[self.free] = True
        return np.flatnonzero(keep & mask).astype(np.int64)

    def m_inner(self, u: Array, v: Array) -> float:
        return float(u @ (self.M @ v))


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: Array
    eigenfields: tuple[DiscreteField, ...]
    residuals: Array
    domain: str

    @property
    def ground(self) -> DiscreteField:
        return self.eigenfields[0]

    def __len__(self) -> int:
        return int(self.eigenvalues.shape[0])


def _matrix_norm1(A: sparse.spmatrix) -> float:
    return float(abs(A).sum(axis=0).max()) if A.nnz else 0.0


def solve_weighted(
    mesh: MeridianMesh,
    weight: PWeight,
    k: int = 1,
    tol: float = DEFAULT_TOL,
    *,
    sigma: float = 0.0,
    free: NDArray[np.int64] | None = None,
    domain: str = "dumbbell",
    problem: EigenProblem | None = None,
) -> SpectralResult:
    """
    The ``k`` eigenpairs of (K, M_p) closest to ``sigma`` (smallest for sigma = 0).

    Shift-invert Lanczos with a fixed start vector; M_p may be singular, its
    kernel is mapped to the origin by the spectral transformation. Returned
    eigenfields satisfy the full discrete equation at every free vertex, are
    M_p-normalized and extended by zero to the Dirichlet vertices.

    Raises:
        ConfigurationError: If p vanishes on the free vertices.
        SolverError: On nonconvergence or a residual above ``tol``.
    """
    problem = problem or EigenProblem.assemble(mesh, weight)
    idx = problem.free if free is None else free
    Kf = problem.K[idx][:, idx].tocsc()
    Mf = problem.M[idx][:, idx].tocsc()
    if Mf.nnz == 0 or abs(Mf).max() == 0.0:
        raise ConfigurationError(f"weight vanishes on the {domain} problem")
    n = idx.shape[0]
    if k >= n - 1:
        raise SolverError(f"{k} eigenpairs requested from a {n}-dof problem")
    try:
        vals, vecs = eigsh(Kf, k=k, M=Mf, sigma=sigma, which="LM", v0=np.ones(n), maxiter=20 * n, tol=0.0)
    except (ArpackNoConvergence, ArpackError, RuntimeError) as exc:
        raise SolverError(f"eigensolve on {domain} failed: {exc}") from exc

    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    k_norm = _matrix_norm1(Kf)
    m_norm = _matrix_norm1(Mf)
    fields = []
    residuals = np.zeros(k)
    for i in range(k):
        v = vecs[:, i]
        r = Kf @ v - vals[i] * (Mf @ v)
        residuals[i] = np.linalg.norm(r) / ((k_norm + abs(vals[i]) * m_norm) * np.linalg.norm(v))
        v = v / np.sqrt(abs(v @ (Mf @ v)))
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        full = np.zeros(mesh.n_vertices)
        full[idx] = v
        fields.append(DiscreteField(mesh=mesh, values=full, name=f"{domain}[{i}]"))
    if np.any(residuals > tol):
        raise SolverError(f"{domain} residuals {residuals} exceed tolerance {tol}")
    logger.info("%s: eigenvalues %s (max residual %.2e)", domain, np.array2string(vals, precision=8), residuals.max())
    return SpectralResult(eigenvalues=vals, eigenfields=tuple(fields), residuals=residuals, domain=domain)


@dataclass(frozen=True)
class LimitSpectra:
    plus: SpectralResult
    minus: SpectralResult | None
    gap: float
    simple_gap: float

    @property
    def lambda_k0(self) -> float:
        return float(self.plus.eigenvalues[0])


def limit_spectra(
    spec: DumbbellSpec,
    weight: PWeight,
    k: int = 3,
    *,
    mesh: MeridianMesh | None = None,
    gap_threshold: float = 0.2,
    tol: float = DEFAULT_TOL,
    problem: EigenProblem | None = None,
) -> LimitSpectra:
    """
    Spectra of the decoupled half-space problems on the dumbbell mesh of ``spec``.

    D+ keeps the free vertices with x1 > 1, D- those with x1 < 0; the junction
    columns are clamped, so both problems use exactly the dumbbell's elements.
    The D- eigenvalues returned are the ``k`` closest to lambda_1(D+).

    Raises:
        AssumptionViolation: If min_j |lambda_1(D+) - lambda_j(D-)| / lambda_1(D+) < gap_threshold.
    """
    mesh = mesh or build_mesh(spec)
    problem = problem or EigenProblem.assemble(mesh, weight)
    z = mesh.z
    plus = solve_weighted(mesh, weight, k=k, tol=tol, free=problem.restrict(z > 1.0 + 1e-12), domain="D+", problem=problem)
    lam0 = float(plus.eigenvalues[0])
    simple_gap = float((plus.eigenvalues[1] - lam0) / lam0) if k > 1 else float("inf")
    try:
        minus = solve_weighted(
            mesh, weight, k=k, tol=tol, sigma=lam0, free=problem.restrict(z < -1e-12), domain="D-", problem=problem
        )
        gap = float(np.min(np.abs(minus.eigenvalues - lam0)) / lam0)
    except ConfigurationError:
        minus, gap = None, float("inf")
    logger.info("limit spectra eps=%.4g: lambda_1(D+)=%.8f gap=%.3f simple_gap=%.3f", spec.eps, lam0, gap, simple_gap)
    if gap < gap_threshold:
        raise AssumptionViolation(
            f"lambda_1(D+)={lam0:.6g} is within {gap:.3%} of the D- spectrum (threshold {gap_threshold:.0%})"
        )
    return LimitSpectra(plus=plus, minus=minus, gap=gap, simple_gap=simple_gap)


def sign_normalize(field: DiscreteField) -> DiscreteField:
    """
    Fix the sign so that du/dx1 > 0 at the right-side axis vertex nearest e1.

    Raises:
        AssumptionViolation: If that derivative is below 1e-10 in magnitude.
    """
    mesh = field.mesh
    axis = mesh.tagged("axis")
    candidates = axis[mesh.z[axis] > 1.0 + 1e-12]
    if candidates.size == 0:
        raise AssumptionViolation("no axis vertex to the right of e1")
    node = candidates[np.argmin(mesh.z[candidates])]
    derivative = float(field.nodal_gradients[node, 0])
    if abs(derivative) < SIGN_THRESHOLD or not np.isfinite(derivative):
        raise AssumptionViolation(f"du/dx1 near e1 is {derivative:.3e}: sign is ambiguous")
    return field if derivative > 0 else field.scaled(-1.0)


def track_branch(
    result: SpectralResult,
    problem: EigenProblem,
    previous: DiscreteField | None,
    reference: float | None = None,
) -> int:
    """
    Index of the eigenpair continuing a branch.

    With a previous field: maximal |M_p overlap| after interpolating it onto the
    new mesh; otherwise the eigenvalue closest to ``reference`` (or the smallest).
    """
    if previous is None:
        if reference is None:
            return 0
        return int(np.argmin(np.abs(result.eigenvalues - reference)))
    mesh = problem.mesh
    carried = previous.evaluate(mesh.z, mesh.s, fill=0.0).u
    carried = np.nan_to_num(carried)
    norm = np.sqrt(max(problem.m_inner(carried, carried), 1e-300))
    overlaps = [abs(problem.m_inner(f.values, carried)) / norm for f in result.eigenfields]
    return int(np.argmax(overlaps))
