"""Pydantic models for the experiment configuration file."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dumbbell_lab.geometry.models import DumbbellSpec
from dumbbell_lab.weight.model import Bump, PWeight


class TierName(str, Enum):
    tiny = "tiny"
    default = "default"
    fine = "fine"


class MeshTier(BaseModel):
    """Mesh resolution knobs shared by every mesh built during a run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_phi: int = Field(ge=4, description="Angular cells per quarter-plane block")
    grading_ratio: float = Field(gt=0, lt=1, description="Geometric factor between consecutive edges")
    h_far: float = Field(gt=0, description="Far-field target edge length")
    min_edge_fraction: float = Field(gt=0, le=0.5, description="Smallest edge as a fraction of eps")
    corridor_cap_fraction: float = Field(gt=0, description="Largest axial corridor edge as a fraction of eps")
    model_tube_dz: float = Field(gt=0, description="Axial spacing of the model-domain tube")
    cross_section_resolution: int = Field(ge=100, description="Radial cells of the cross-section solve")


TIERS: Dict[TierName, MeshTier] = {
    TierName.tiny: MeshTier(
        n_phi=12,
        grading_ratio=0.55,
        h_far=1.0,
        min_edge_fraction=0.25,
        corridor_cap_fraction=1.0,
        model_tube_dz=0.25,
        cross_section_resolution=1000,
    ),
    TierName.default: MeshTier(
        n_phi=32,
        grading_ratio=0.7,
        h_far=0.5,
        min_edge_fraction=0.125,
        corridor_cap_fraction=0.5,
        model_tube_dz=0.1,
        cross_section_resolution=4000,
    ),
    TierName.fine: MeshTier(
        n_phi=48,
        grading_ratio=0.8,
        h_far=0.35,
        min_edge_fraction=0.0625,
        corridor_cap_fraction=0.25,
        model_tube_dz=0.05,
        cross_section_resolution=8000,
    ),
}


class BumpConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    center: float = Field(description="Center on the x1-axis")
    radius: float = Field(gt=0, description="Support radius")
    amplitude: float = Field(gt=0, description="Peak value")

    def to_bump(self) -> Bump:
        return Bump(center=self.center, radius=self.radius, amplitude=self.amplitude)


def _default_bumps() -> List[BumpConfig]:
    return [
        BumpConfig(center=b.center, radius=b.radius, amplitude=b.amplitude) for b in PWeight.default().bumps
    ]


class WeightConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    bumps: List[BumpConfig] = Field(default_factory=_default_bumps, description="Bumps of the weight p")

    def to_weight(self) -> PWeight:
        return PWeight(bumps=tuple(b.to_bump() for b in self.bumps))


class SamplingConfig(BaseModel):
    """Sample grids; right-side offsets below 2 eps and corridor points beyond 1 are skipped per eps."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    left_r: List[float] = Field(
        default_factory=lambda: [-4.0, -3.0, -2.0, -1.0, -0.5, -0.25, -0.15, -0.1, -0.05],
        description="Left-regime radii (negative r, |r| = t)",
    )
    corridor_multiples: List[float] = Field(
        default_factory=lambda: [0.5, 1.0, 2.0, 3.0, 4.0],
        description="Corridor sample points as multiples of eps",
    )
    corridor_r: List[float] = Field(
        default_factory=lambda: [0.25, 0.5, 0.75, 1.0],
        description="Corridor sample points at fixed positions",
    )
    right_t: List[float] = Field(
        default_factory=lambda: [0.1, 0.2, 0.5, 1.0, 2.0],
        description="Right-regime offsets t (r = 1 + t)",
    )
    lambda_max: float = Field(default=0.2, gt=0, description="Upper end of the blow-up window")
    lambda_min_factor: float = Field(default=4.0, gt=0, description="Lower end of the blow-up window in units of eps")
    n_lambdas: int = Field(default=12, ge=3, description="Samples in the blow-up window")
    k_tilde: float = Field(default=0.25, gt=0, lt=1, description="Normalization radius of U")
    r0: float = Field(default=0.5, gt=0, le=1, description="Radius of the right envelope ball")
    nodal_radii: List[float] = Field(default_factory=lambda: [0.05, 0.1], description="Radii of the nodal sign scan")
    hat_radii: List[float] = Field(default_factory=lambda: [2.0, 3.0, 4.0], description="Radii of the left-hat growth bound")
    quad_order: int = Field(default=48, ge=4, description="Gauss points per curve")

    @field_validator("left_r")
    @classmethod
    def _left_negative(cls, value: List[float]) -> List[float]:
        if any(r >= 0 for r in value):
            raise ValueError("left_r entries must be negative")
        return value

    def lambda_window(self, eps: float) -> Tuple[float, float]:
        return (self.lambda_min_factor * eps, self.lambda_max)


class ToleranceConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    eigen_residual: float = Field(default=1e-8, gt=0, description="Largest accepted relative eigen residual")
    gap_threshold: float = Field(default=0.2, gt=0, description="Smallest relative gap between lambda_1(D+) and sigma(D-)")
    cross_section_rel: float = Field(default=1e-3, gt=0, description="lambda_1(Sigma) against the radial oracle")
    angular_abs: float = Field(default=1e-5, gt=0, description="Y1 Rayleigh quotient against N-1")
    poincare_rel: float = Field(default=0.02, gt=0, description="Optimal trace Poincare constant against N-1")
    constant_frequency_rel: float = Field(default=0.01, gt=0, description="Constant-frequency oracles")
    kelvin_rel: float = Field(default=0.01, gt=0, description="Kelvin energy identity")
    profile_frequency_rel: float = Field(default=0.05, gt=0, description="Profile frequency limits")
    right_limit_band: float = Field(default=0.1, gt=0, description="Half-width of the band about 1 for N_eps(1+t)")
    exponent_abs: float = Field(default=0.4, gt=0, description="H_U slope against -2(N-1)")
    beta_rel: float = Field(default=0.1, gt=0, description="Relative agreement of the two beta estimators")
    profile_l2_rel: float = Field(default=0.1, gt=0, description="Blow-up against profile, relative L2")
    robustness_rel: float = Field(default=1e-4, gt=0, description="Phi1 change when the model tube doubles")
    frequency_delta: float = Field(default=0.5, gt=0, description="Slack delta of the corridor and left frequency bounds")
    trust_ratio: float = Field(default=1e-6, gt=0, lt=1, description="Corridor amplitude trusted by the tail march")


class ModelDomainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tube_length: float = Field(default=12.0, gt=1, description="Truncated length of the model tube")
    radius: float = Field(default=40.0, ge=8, description="Truncation radius of the model half-space")
    exterior_radius: float = Field(default=30.0, ge=8, description="Outer radius of the exterior model mesh")


class EigenConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    k: int = Field(default=3, ge=1, description="Eigenpairs computed per solve")
    march_stage: float = Field(default=4.0, gt=0, description="Tail-march stage length in units of eps")
    shift_factor: float = Field(default=0.9, gt=0, le=1, description="Shift as a fraction of the previous eigenvalue")


class ExperimentConfig(BaseModel):
    """Effective configuration of a run; echoed verbatim into the summary."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    N: int = Field(default=3, ge=3, description="Space dimension")
    eps_ladder: List[float] = Field(
        default_factory=lambda: [0.2, 0.1, 0.05, 0.02], description="Channel radii, strictly decreasing"
    )
    R_left: float = Field(default=8.0, ge=8, description="Truncation radius of D-")
    R_right: float = Field(default=8.0, ge=8, description="Truncation radius of D+")
    tier: TierName = Field(default=TierName.default, description="Mesh resolution tier")
    weight: WeightConfig = Field(default_factory=WeightConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    model_domain: ModelDomainConfig = Field(default_factory=ModelDomainConfig)
    eigen: EigenConfig = Field(default_factory=EigenConfig)
    output_dir: Path = Field(default=Path("output"), description="Directory receiving CSVs, summaries and run records")
    serial: bool = Field(default=False, description="Pin run id and timestamps for byte-identical outputs")

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        ladder = self.eps_ladder
        if not ladder:
            raise ValueError("eps_ladder must not be empty")
        if any(not 0.0 < e < 0.5 for e in ladder):
            raise ValueError(f"eps_ladder entries must lie in (0, 0.5), got {ladder}")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError(f"eps_ladder must be strictly decreasing, got {ladder}")
        return self

    @property
    def mesh_tier(self) -> MeshTier:
        return TIERS[self.tier]

    @property
    def smallest_eps(self) -> float:
        return self.eps_ladder[-1]

    def dumbbell_spec(self, eps: float) -> DumbbellSpec:
        tier = self.mesh_tier
        return DumbbellSpec(
            N=self.N,
            eps=eps,
            R_left=self.R_left,
            R_right=self.R_right,
            h_far=tier.h_far,
            grading_ratio=tier.grading_ratio,
            n_phi=tier.n_phi,
            min_edge_fraction=tier.min_edge_fraction,
            corridor_cap_fraction=tier.corridor_cap_fraction,
        )

    def model_mesh_kwargs(self) -> Dict[str, Any]:
        tier = self.mesh_tier
        return {
            "tube_length": self.model_domain.tube_length,
            "radius": self.model_domain.radius,
            "tube_dz": tier.model_tube_dz,
            "n_phi": tier.n_phi,
            "grading_ratio": tier.grading_ratio,
            "h_far": tier.h_far,
        }

    def snapshot(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


__all__ = [
    "BumpConfig",
    "EigenConfig",
    "ExperimentConfig",
    "MeshTier",
    "ModelDomainConfig",
    "SamplingConfig",
    "TIERS",
    "TierName",
    "ToleranceConfig",
    "WeightConfig",
]
