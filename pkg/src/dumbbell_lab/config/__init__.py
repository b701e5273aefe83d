"""Experiment configuration: YAML loading and pydantic models."""

from dumbbell_lab.config.loader import DEFAULT_CONFIG_PATH, apply_overrides, load_config, parse_config
from dumbbell_lab.config.models import ExperimentConfig, MeshTier, TIERS, TierName

__all__ = [
    "DEFAULT_CONFIG_PATH",
    "ExperimentConfig",
    "MeshTier",
    "TIERS",
    "TierName",
    "apply_overrides",
    "load_config",
    "parse_config",
]
