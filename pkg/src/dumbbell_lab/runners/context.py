"""Shared state of one run: config, cached solves, collected claims and artifacts."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from dumbbell_lab.config.models import ExperimentConfig
from dumbbell_lab.cross_section.radial import CrossSectionSpectrum, solve_cross_section
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
from dumbbell_lab.fem.fields import DiscreteField
from dumbbell_lab.geometry.builder import build_mesh, build_model_mesh
from dumbbell_lab.geometry.models import DumbbellSpec, MeridianMesh
from dumbbell_lab.ops.claims import ClaimCheck
from dumbbell_lab.ops.run_record import ArtifactRef, Diagnostic
from dumbbell_lab.profiles.junction import ProfilePair, compute_profiles
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.weight.model import PWeight

logger = get_logger(__name__)


@dataclass
class EpsSolution:
    """The tracked eigenpair on one eps-dumbbell, sign-normalized and tail-resolved."""

    spec: DumbbellSpec
    mesh: MeridianMesh
    problem: EigenProblem
    limits: LimitSpectra
    result: SpectralResult
    index: int
    field: DiscreteField

    @property
    def eps(self) -> float:
        return self.spec.eps

    @property
    def eigenvalue(self) -> float:
        return float(self.result.eigenvalues[self.index])

    @property
    def residual(self) -> float:
        return float(self.result.residuals[self.index])

    @property
    def lambda_k0(self) -> float:
        return self.limits.lambda_k0


@dataclass
class RunContext:
    config: ExperimentConfig
    checks: List[ClaimCheck] = field(default_factory=list)
    outputs: List[ArtifactRef] = field(default_factory=list)
    warnings: List[Diagnostic] = field(default_factory=list)
    fitted: Dict[str, Dict[str, object]] = field(default_factory=dict)
    _solutions: Dict[float, EpsSolution] = field(default_factory=dict)
    _profiles: Optional[ProfilePair] = None

    @property
    def out_dir(self) -> Path:
        return Path(self.config.output_dir)

    @property
    def weight(self) -> PWeight:
        return self.config.weight.to_weight()

    @property
    def N(self) -> int:
        return self.config.N

    def cross_section(self, N: Optional[int] = None) -> CrossSectionSpectrum:
        return solve_cross_section(N or self.N, self.config.mesh_tier.cross_section_resolution)

    def add(self, check: ClaimCheck) -> ClaimCheck:
        level = "PASS" if check.passed else "FAIL"
        logger.info("[%s] %s: measured=%s expected %s", level, check.claim_id, check.measured, check.expected)
        self.checks.append(check)
        return check

    def warn(self, code: str, message: str, **details: object) -> None:
        logger.warning("%s: %s", code, message)
        self.warnings.append(Diagnostic(code=code, message=message, details=dict(details)))

    def record_fit(self, name: str, value: object, window: Optional[str] = None, **extra: object) -> None:
        self.fitted[name] = {"value": value, "window": window, **extra}

    def solve_spec(
        self,
        spec: DumbbellSpec,
        *,
        previous: Optional[DiscreteField] = None,
        shift: float = 0.0,
    ) -> EpsSolution:
        """Mesh, limit spectra, tracked eigenpair and tail march for one geometry."""
        cfg = self.config
        weight = self.weight
        mesh = build_mesh(spec)
        problem = EigenProblem.assemble(mesh, weight)
        limits = limit_spectra(
            spec,
            weight,
            k=max(cfg.eigen.k, 2),
            mesh=mesh,
            gap_threshold=cfg.tolerances.gap_threshold,
            tol=cfg.tolerances.eigen_residual,
            problem=problem,
        )
        result = solve_weighted(
            mesh, weight, k=cfg.eigen.k, tol=cfg.tolerances.eigen_residual, sigma=shift, problem=problem
        )
        index = track_branch(result, problem, previous, reference=limits.lambda_k0)
        field_ = sign_normalize(result.eigenfields[index])
        field_ = resolve_left_tail(
            field_,
            float(result.eigenvalues[index]),
            weight,
            trust_ratio=cfg.tolerances.trust_ratio,
            stage_length=cfg.eigen.march_stage,
            problem=problem,
        )
        solution = EpsSolution(spec, mesh, problem, limits, result, index, field_)
        logger.info(
            "eps=%.4g: %d vertices, lambda=%.10f (index %d), lambda_k0(D+)=%.10f, residual=%.2e",
            spec.eps,
            mesh.n_vertices,
            solution.eigenvalue,
            index,
            solution.lambda_k0,
            solution.residual,
        )
        return solution

    def ladder(self) -> List[EpsSolution]:
        """Solutions along the eps ladder, tracked from the largest eps down."""
        previous: Optional[EpsSolution] = None
        out: List[EpsSolution] = []
        for eps in self.config.eps_ladder:
            if eps not in self._solutions:
                shift = self.config.eigen.shift_factor * previous.eigenvalue if previous else 0.0
                self._solutions[eps] = self.solve_spec(
                    self.config.dumbbell_spec(eps),
                    previous=previous.field if previous else None,
                    shift=shift,
                )
            previous = self._solutions[eps]
            out.append(previous)
        return out

    def smallest(self) -> EpsSolution:
        return self.ladder()[-1]

    def profiles(self) -> ProfilePair:
        if self._profiles is None:
            mesh = build_model_mesh(self.N, **self.config.model_mesh_kwargs())
            self._profiles = compute_profiles(mesh, self.cross_section())
        return self._profiles


__all__ = ["EpsSolution", "RunContext"]
