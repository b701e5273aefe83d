"""Optimal constant of the trace Poincare inequality on the exterior half-space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from dumbbell_lab.errors import ConfigurationError, SolverError
from dumbbell_lab.fem.assembly import stiffness
from dumbbell_lab.fem.fields import DiscreteField
from dumbbell_lab.fem.integrals import grad_sq, point_integrals, surface_integral
from dumbbell_lab.geometry.builder import build_exterior_mesh
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.geometry.models import MeridianMesh
from dumbbell_lab.profiles.kelvin import dipole_field
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.quadrature import axisymmetric_factor, gauss_legendre, half_space_polar_rule

logger = get_logger(__name__)


def inner_arc_mass(mesh: MeridianMesh, quad_order: int = 6) -> sparse.csr_matrix:
    """P1 trace mass omega_{N-2} int_{|x| = 1} s^{N-2} phi_i phi_j over the inner arc."""
    idx = np.flatnonzero(np.abs(np.hypot(mesh.z, mesh.s) - 1.0) < 1e-9)
    alpha = np.arctan2(mesh.s[idx], mesh.z[idx])
    order = np.argsort(alpha)
    idx, alpha = idx[order], alpha[order]
    x, w = gauss_legendre(0.0, 1.0, quad_order)
    omega = axisymmetric_factor(mesh.dimension)
    rows, cols, vals = [], [], []
    for j in range(idx.shape[0] - 1):
        h = alpha[j + 1] - alpha[j]
        a = alpha[j] + h * x
        ws = omega * h * w * np.sin(a) ** (mesh.dimension - 2)
        basis = (1.0 - x, x)
        pair = (idx[j], idx[j + 1])
        for p in range(2):
            for q in range(2):
                rows.append(pair[p])
                cols.append(pair[q])
                vals.append(float(np.sum(ws * basis[p] * basis[q])))
    n = mesh.n_vertices
    return sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


@dataclass(frozen=True)
class PoincareResult:
    constant: float
    minimizer: DiscreteField
    correlation: float


def poincare_optimal_constant(mesh: MeridianMesh | None = None, *, N: int = 3, radius: float = 30.0) -> PoincareResult:
    """
    Smallest mu with K w = mu B w, B the trace mass on the inner arc |x| = 1.

    ``correlation`` is the energy inner product of the minimizer with
    x1 / |x|^N, normalized.

    Raises:
        ConfigurationError: If the mesh is not an exterior mesh.
        SolverError: If the eigensolve fails.
    """
    mesh = mesh or build_exterior_mesh(N, radius=radius)
    if mesh.kind != "exterior":
        raise ConfigurationError(f"Poincare constant needs an exterior mesh, got {mesh.kind!r}")
    K = stiffness(mesh)
    B = inner_arc_mass(mesh)
    free = K.free
    Kf = K.matrix[free][:, free].tocsc()
    Bf = B[free][:, free].tocsc()
    try:
        vals, vecs = eigsh(Kf, k=1, M=Bf, sigma=0.0, which="LM", v0=np.ones(free.shape[0]))
    except (ArpackNoConvergence, ArpackError, RuntimeError) as exc:
        raise SolverError(f"trace eigenproblem failed: {exc}") from exc
    values = np.zeros(mesh.n_vertices)
    values[free] = vecs[:, 0]
    if values[free][np.argmax(np.abs(vecs[:, 0]))] < 0:
        values = -values
    trial = dipole_field(mesh.dimension).value(mesh.z, mesh.s)
    trial[mesh.dirichlet_mask] = 0.0
    kw = K.matrix @ values
    correlation = float(trial @ kw / np.sqrt((values @ kw) * (trial @ (K.matrix @ trial))))
    mu = float(vals[0])
    logger.info("trace Poincare constant %.6f (correlation with dipole %.5f)", mu, correlation)
    return PoincareResult(constant=mu, minimizer=DiscreteField(mesh, values, "poincare_minimizer"), correlation=correlation)


def dipole_trial_quotient(N: int, n_rho: int = 64, n_angle: int = 64) -> float:
    """int_{|x| > 1, x1 < 0} |grad v|^2 / int_{Gamma_1^-} v^2 for v = x1 / |x|^N; equals N - 1."""
    v = dipole_field(N)
    z, s, w = half_space_polar_rule(N, 1.0, None, side="left", n_rho=n_rho, n_angle=n_angle)
    energy = point_integrals(v, z, s, w, {"grad": grad_sq})["grad"]
    trace = surface_integral(v, curve(None, "half_sphere_left", 1.0, n_angle, N=N))
    return energy / trace
