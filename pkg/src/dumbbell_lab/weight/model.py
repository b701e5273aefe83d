"""Weight p: a sum of smooth compactly supported bumps centered on the x1-axis."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

Array = NDArray[np.float64]

# the weight must vanish on the strip [1/2, 1] x {|x'| < 1} and on B_3^+
STRIP_START = 0.5
RIGHT_BALL_RADIUS = 3.0
RIGHT_SUPPORT_START = 4.0


class Bump(BaseModel):
    """b(x) = A exp(1 - 1/(1 - |x-c|^2/rho^2)) inside |x - c| < rho."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    center: float = Field(description="Center on the x1-axis")
    radius: float = Field(gt=0, description="Support radius rho")
    amplitude: float = Field(description="Peak value A (must be positive)")

    def _q(self, z: Array, s: Array) -> Array:
        return ((z - self.center) ** 2 + s**2) / self.radius**2

    def value(self, z: Array, s: Array) -> Array:
        q = self._q(z, s)
        out = np.zeros_like(q)
        inside = q < 1.0
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - q[inside]))
        return out

    def gradient(self, z: Array, s: Array) -> tuple[Array, Array]:
        q = self._q(z, s)
        b = self.value(z, s)
        factor = np.zeros_like(q)
        inside = q < 1.0
        factor[inside] = -2.0 * b[inside] / (self.radius**2 * (1.0 - q[inside]) ** 2)
        return factor * (z - self.center), factor * s


class PWeight(BaseModel):
    """Sum of bumps in D+ (center > 1) and D- (center < 0)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bumps: tuple[Bump, ...] = Field(default=(), description="Bump list")

    @classmethod
    def default(cls) -> "PWeight":
        return cls(
            bumps=(
                Bump(center=6.0, radius=1.5, amplitude=30.0),
                Bump(center=-4.0, radius=1.5, amplitude=10.0),
            )
        )

    def eval_p(self, z: Array, s: Array) -> Array:
        z = np.asarray(z, dtype=float)
        s = np.asarray(s, dtype=float)
        total = np.zeros(np.broadcast(z, s).shape)
        for bump in self.bumps:
            total = total + bump.value(z, s)
        return total

    def __call__(self, z: Array, s: Array) -> Array:
        return self.eval_p(z, s)

    def grad_p(self, z: Array, s: Array) -> tuple[Array, Array]:
        z = np.asarray(z, dtype=float)
        s = np.asarray(s, dtype=float)
        gz = np.zeros(np.broadcast(z, s).shape)
        gs = np.zeros_like(gz)
        for bump in self.bumps:
            bz, bs = bump.gradient(z, s)
            gz = gz + bz
            gs = gs + bs
        return gz, gs

    def radial_term(self, z: Array, s: Array) -> Array:
        """x . grad p."""
        gz, gs = self.grad_p(z, s)
        return np.asarray(z) * gz + np.asarray(s) * gs

    def axial_term(self, z: Array, s: Array) -> Array:
        """dp/dx1."""
        return self.grad_p(z, s)[0]

    @property
    def plus_bumps(self) -> tuple[Bump, ...]:
        return tuple(b for b in self.bumps if b.center > 1.0)

    @property
    def minus_bumps(self) -> tuple[Bump, ...]:
        return tuple(b for b in self.bumps if b.center <= 1.0)

    def validate_support(self) -> list[str]:
        """Violations of the support and positivity requirements; empty iff compliant."""
        violations: list[str] = []
        if not self.bumps:
            violations.append("weight has no bumps (p vanishes identically)")
        if not self.plus_bumps:
            violations.append("no bump in D+")
        for i, bump in enumerate(self.bumps):
            c, rho = bump.center, bump.radius
            if bump.amplitude <= 0.0:
                violations.append(f"bump {i}: amplitude {bump.amplitude} must be positive")
            # strip [1/2, 1] x {|x'| < 1}: nearest axis point of the strip to c
            nearest = min(max(c, STRIP_START), 1.0)
            if abs(c - nearest) < rho:
                violations.append(f"bump {i}: support meets the strip [{STRIP_START}, 1] x B_1")
            if abs(c - 1.0) < rho + RIGHT_BALL_RADIUS and c + rho > 1.0:
                violations.append(f"bump {i}: support meets B_{RIGHT_BALL_RADIUS:g}^+")
            if c > 1.0 and c - rho <= RIGHT_SUPPORT_START:
                violations.append(f"bump {i}: D+ support must lie in x1 > {RIGHT_SUPPORT_START:g}")
            if c <= 1.0 and c + rho >= 0.0:
                violations.append(f"bump {i}: D- support must stay in x1 < 0")
        return violations


def validate(weight: PWeight) -> list[str]:
    """Module-level alias of ``PWeight.validate_support``."""
    return weight.validate_support()
