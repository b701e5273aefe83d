"""Pytest configuration and fixtures."""

from pathlib import Path

import pytest

from dumbbell_lab.config.loader import parse_config
from dumbbell_lab.config.models import ExperimentConfig
from dumbbell_lab.eigen.solver import EigenProblem
from dumbbell_lab.geometry.builder import build_mesh, build_model_mesh
from dumbbell_lab.geometry.models import DumbbellSpec, MeridianMesh
from dumbbell_lab.weight.model import PWeight


@pytest.fixture
def weight() -> PWeight:
    return PWeight.default()


@pytest.fixture(scope="session")
def tiny_spec() -> DumbbellSpec:
    """A coarse eps = 0.2 dumbbell: a few hundred vertices, small enough for the dense oracle."""
    return DumbbellSpec(
        N=3,
        eps=0.2,
        h_far=2.0,
        grading_ratio=0.5,
        n_phi=8,
        min_edge_fraction=0.5,
        corridor_cap_fraction=1.0,
        far_stretch=0.3,
    )


@pytest.fixture(scope="session")
def tiny_mesh(tiny_spec: DumbbellSpec) -> MeridianMesh:
    return build_mesh(tiny_spec)


@pytest.fixture(scope="session")
def tiny_problem(tiny_mesh: MeridianMesh) -> EigenProblem:
    return EigenProblem.assemble(tiny_mesh, PWeight.default())


@pytest.fixture(scope="session")
def tiny_model_mesh() -> MeridianMesh:
    return build_model_mesh(3, tube_length=6.0, radius=12.0, tube_dz=0.25, n_phi=12, grading_ratio=0.6, h_far=1.0)


@pytest.fixture
def tiny_config(tmp_path: Path) -> ExperimentConfig:
    """Tiny-tier config writing into a temporary directory."""
    return parse_config({"eps_ladder": [0.2], "tier": "tiny", "output_dir": str(tmp_path / "out")})
