"""Half-sphere data: the normalized first Dirichlet mode Y_1 and Upsilon_N."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.utils.quadrature import axisymmetric_factor, gauss_legendre


@dataclass(frozen=True)
class AngularProfile:
    dimension: int
    upsilon: float

    def y1(self, theta1: NDArray[np.float64] | float) -> NDArray[np.float64]:
        """Y_1(theta) = -theta_1 / Upsilon_N (positive on the lower half-sphere)."""
        return -np.asarray(theta1, dtype=float) / self.upsilon

    def y1_at(self, z: NDArray[np.float64], s: NDArray[np.float64]) -> NDArray[np.float64]:
        """Y_1 evaluated at the direction x/|x| of meridian points."""
        r = np.hypot(z, s)
        return self.y1(z / r)


def _half_sphere_rule(N: int, quad_order: int) -> tuple[NDArray, NDArray]:
    """Nodes alpha in [pi/2, pi] (theta_1 = cos alpha) with d sigma weights."""
    alpha, w = gauss_legendre(0.5 * np.pi, np.pi, quad_order)
    return alpha, axisymmetric_factor(N) * w * np.sin(alpha) ** (N - 2)


def angular_profile(N: int, quad_order: int = 64) -> AngularProfile:
    """Upsilon_N = sqrt(int theta_1^2 d sigma) over the lower half-sphere."""
    if N < 3:
        raise ConfigurationError(f"dimension must be >= 3, got {N}")
    alpha, w = _half_sphere_rule(N, quad_order)
    upsilon = float(np.sqrt(np.sum(w * np.cos(alpha) ** 2)))
    return AngularProfile(dimension=N, upsilon=upsilon)


def y1_norm_squared(profile: AngularProfile, quad_order: int = 64) -> float:
    alpha, w = _half_sphere_rule(profile.dimension, quad_order)
    return float(np.sum(w * profile.y1(np.cos(alpha)) ** 2))


def y1_eigenvalue_check(N: int, quad_order: int = 64) -> float:
    """
    Rayleigh quotient of Y_1 for the Laplace-Beltrami operator on the half-sphere.

    Y_1 depends on the polar angle only, so |grad_S Y_1|^2 = (dY_1/d alpha)^2.
    """
    profile = angular_profile(N, quad_order)
    alpha, w = _half_sphere_rule(N, quad_order)
    grad_sq = (np.sin(alpha) / profile.upsilon) ** 2
    values_sq = profile.y1(np.cos(alpha)) ** 2
    return float(np.sum(w * grad_sq) / np.sum(w * values_sq))
