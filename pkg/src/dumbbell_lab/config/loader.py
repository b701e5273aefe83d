from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import ValidationError

from dumbbell_lab.config.models import ExperimentConfig
from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.weight.model import validate as validate_weight

logger = get_logger(__name__)

DEFAULT_CONFIG_PATH = Path("dumbbell.config.yaml")


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        location = ".".join(str(p) for p in err.get("loc", ())) or "<root>"
        parts.append(f"{location}: {err.get('msg')}")
    return "; ".join(parts)


def parse_config(raw: Optional[Dict[str, Any]]) -> ExperimentConfig:
    """
    Validate a raw mapping into an ``ExperimentConfig``.

    The weight is checked against its support rules here, so an invalid weight
    fails before any mesh is built.

    Raises:
        ConfigurationError: On schema errors or weight support violations.
    """
    try:
        config = ExperimentConfig.model_validate(raw or {})
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {_format_validation_error(exc)}") from exc
    violations = validate_weight(config.weight.to_weight())
    if violations:
        raise ConfigurationError("invalid weight: " + "; ".join(violations))
    return config


def load_raw_config(path: Optional[Path | str] = None) -> Dict[str, Any]:
    config_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")
    with config_path.open("r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"{config_path} is not valid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{config_path} must hold a mapping at the top level")
    return data


def load_config(path: Optional[Path | str] = None) -> ExperimentConfig:
    """
    Load and validate the experiment configuration.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigurationError: If it does not validate.
    """
    config = parse_config(load_raw_config(path))
    logger.info("Loaded config: N=%d eps=%s tier=%s", config.N, config.eps_ladder, config.tier.value)
    return config


def apply_overrides(
    config: ExperimentConfig,
    *,
    eps: Optional[List[float]] = None,
    tier: Optional[str] = None,
    out: Optional[Path | str] = None,
    serial: Optional[bool] = None,
) -> ExperimentConfig:
    """Return ``config`` with CLI overrides applied and re-validated."""
    raw = config.model_dump(mode="json")
    if eps:
        raw["eps_ladder"] = [float(e) for e in eps]
    if tier is not None:
        raw["tier"] = tier
    if out is not None:
        raw["output_dir"] = str(out)
    if serial is not None:
        raw["serial"] = bool(serial)
    return parse_config(raw)


__all__ = ["DEFAULT_CONFIG_PATH", "apply_overrides", "load_config", "load_raw_config", "parse_config"]
