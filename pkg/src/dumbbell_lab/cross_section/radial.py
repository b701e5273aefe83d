"""First Dirichlet eigenpair of the unit ball of R^{N-1}, reduced to a radial problem."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.optimize import brentq
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh
from scipy.special import jv

from dumbbell_lab.errors import ConfigurationError, SolverError
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.quadrature import axisymmetric_factor, gauss_legendre

logger = get_logger(__name__)

MIN_RESOLUTION = 16


@dataclass(frozen=True)
class CrossSectionSpectrum:
    """lambda_1(Sigma) and the positive, L^2(Sigma)-normalized radial profile psi_1."""

    dimension: int
    lambda1: float
    lambda1_raw: float
    nodes: NDArray[np.float64]
    values: NDArray[np.float64]
    slopes: NDArray[np.float64]

    @property
    def sqrt_lambda1(self) -> float:
        return float(np.sqrt(self.lambda1))

    def psi1(self, s: NDArray[np.float64] | float) -> NDArray[np.float64]:
        """Profile value at radius ``s``; zero outside the unit ball."""
        s = np.abs(np.asarray(s, dtype=float))
        return np.interp(s, self.nodes, self.values, right=0.0)

    def dpsi1(self, s: NDArray[np.float64] | float) -> NDArray[np.float64]:
        """Radial derivative of the profile (elementwise slope), zero outside."""
        s = np.abs(np.asarray(s, dtype=float))
        return np.interp(s, self.nodes, self.slopes, right=0.0)

    def norm_squared(self) -> float:
        """omega_{N-2} * int_0^1 s^{N-2} psi^2 ds by the element Gauss rule."""
        return _weighted_l2(self.nodes, self.values, self.dimension)


def _element_mass(nodes: NDArray[np.float64], N: int) -> tuple[NDArray, NDArray, NDArray]:
    """Per-element P1 mass entries int s^{N-2} phi_a phi_b over [s_e, s_{e+1}]."""
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    x, w = gauss_legendre(0.0, 1.0, N + 1)
    s = a[:, None] + h[:, None] * x[None, :]
    weight = (s ** (N - 2)) * (h[:, None] * w[None, :])
    left = 1.0 - x[None, :]
    right = x[None, :]
    m_ll = np.sum(weight * left * left, axis=1)
    m_lr = np.sum(weight * left * right, axis=1)
    m_rr = np.sum(weight * right * right, axis=1)
    return m_ll, m_lr, m_rr


def _weighted_l2(nodes: NDArray[np.float64], values: NDArray[np.float64], N: int) -> float:
    m_ll, m_lr, m_rr = _element_mass(nodes, N)
    u0, u1 = values[:-1], values[1:]
    total = np.sum(m_ll * u0 * u0 + 2.0 * m_lr * u0 * u1 + m_rr * u1 * u1)
    return float(axisymmetric_factor(N) * total)


def _radial_eigenpair(N: int, n_cells: int) -> tuple[float, NDArray[np.float64], NDArray[np.float64]]:
    nodes = np.linspace(0.0, 1.0, n_cells + 1)
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    # exact: int_a^b s^{N-2} ds / h^2
    k_e = (b ** (N - 1) - a ** (N - 1)) / ((N - 1) * h**2)
    m_ll, m_lr, m_rr = _element_mass(nodes, N)

    n = n_cells + 1
    main_k = np.zeros(n)
    main_k[:-1] += k_e
    main_k[1:] += k_e
    main_m = np.zeros(n)
    main_m[:-1] += m_ll
    main_m[1:] += m_rr
    # drop the Dirichlet node s = 1
    K = sparse.diags([main_k[:-1], -k_e[:-1], -k_e[:-1]], [0, 1, -1], format="csc")
    M = sparse.diags([main_m[:-1], m_lr[:-1], m_lr[:-1]], [0, 1, -1], format="csc")
    try:
        vals, vecs = eigsh(K, k=1, M=M, sigma=0.0, which="LM", v0=np.ones(n - 1), maxiter=5000)
    except (ArpackNoConvergence, ArpackError) as exc:
        raise SolverError(f"radial eigensolve failed for N={N}, cells={n_cells}: {exc}") from exc
    psi = np.append(vecs[:, 0], 0.0)
    if psi[0] < 0:
        psi = -psi
    psi = psi / np.sqrt(_weighted_l2(nodes, psi, N))
    return float(vals[0]), nodes, psi


@lru_cache(maxsize=16)
def solve_cross_section(N: int, resolution: int = 4000) -> CrossSectionSpectrum:
    """
    Solve -(s^{N-2} psi')' = lambda s^{N-2} psi on (0, 1), psi(1) = 0.

    P1 Galerkin at ``resolution`` and ``2*resolution`` cells; the reported
    ``lambda1`` is the Richardson value (4 lambda_{h/2} - lambda_h)/3, the profile
    comes from the finer grid.

    Args:
        N: Space dimension (cross-section is the unit ball of R^{N-1}).
        resolution: Number of radial cells of the coarse grid.

    Returns:
        CrossSectionSpectrum

    Raises:
        ConfigurationError: If N < 3 or resolution < 16.
        SolverError: If the eigensolve does not converge.
    """
    if N < 3:
        raise ConfigurationError(f"dimension must be >= 3, got {N}")
    if resolution < MIN_RESOLUTION:
        raise ConfigurationError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")

    lam_h, _, _ = _radial_eigenpair(N, resolution)
    lam_h2, nodes, psi = _radial_eigenpair(N, 2 * resolution)
    lam = (4.0 * lam_h2 - lam_h) / 3.0
    slopes = np.gradient(psi, nodes)
    slopes[0] = 0.0
    logger.info(
        "cross-section N=%d: lambda1=%.9f (raw %.9f at %d cells)", N, lam, lam_h2, 2 * resolution
    )
    return CrossSectionSpectrum(
        dimension=N,
        lambda1=lam,
        lambda1_raw=lam_h2,
        nodes=nodes,
        values=psi,
        slopes=slopes,
    )


def raw_eigenvalue(N: int, resolution: int) -> float:
    """Unextrapolated Galerkin eigenvalue at the given resolution."""
    return _radial_eigenpair(N, resolution)[0]


def bessel_oracle(N: int) -> float:
    """
    lambda_1 of the unit ball of R^{N-1}: the square of the first zero of J_nu, nu = (N-3)/2.

    Raises:
        ConfigurationError: If N < 3.
    """
    if N < 3:
        raise ConfigurationError(f"dimension must be >= 3, got {N}")
    nu = 0.5 * (N - 3)
    # j_{nu,1} > nu; step until J_nu changes sign
    x = max(nu, 0.5)
    step = 0.05
    while jv(nu, x) * jv(nu, x + step) > 0.0:
        x += step
    return float(brentq(lambda t: jv(nu, t), x, x + step, xtol=1e-15) ** 2)
