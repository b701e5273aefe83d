"""Writers for the frozen CSV contracts and JSON summaries, with digests."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from dumbbell_lab.ops.run_record import ArtifactRef
from dumbbell_lab.utils.logging import get_logger

logger = get_logger(__name__)

# name -> (schema version, columns); documented in docs/CSV_CONTRACT.md
CSV_CONTRACTS: Dict[str, Tuple[str, Tuple[str, ...]]] = {
    "cross_section": ("1", ("N", "resolution", "lambda1", "sqrt_lambda1", "upsilon", "y1_quotient")),
    "spectra": ("1", ("eps", "domain", "index", "lambda", "residual", "n_vertices")),
    "frequency": ("1", ("regime", "eps", "r", "D", "H", "N")),
    "profiles": ("1", ("profile", "regime", "r", "D", "H", "N")),
    "h_u": ("1", ("eps", "lambda", "H_U", "mu")),
    "identities": ("1", ("eps", "location", "value", "lhs", "rhs", "residual")),
    "derivatives": ("1", ("eps", "r", "numeric", "closed")),
    "envelopes": ("1", ("eps", "c3", "c5", "usot_constant", "sup_abs", "n_points", "upper_violations")),
}


def format_cell(value: Any) -> str:
    """Stable text form: floats with 12 significant digits, everything else via str."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".12g")
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return str(value)


def schema_id(contract: str) -> str:
    version, _ = CSV_CONTRACTS[contract]
    return f"{contract}.csv@{version}"


def write_csv(path: Path | str, contract: str, rows: Iterable[Sequence[Any]]) -> ArtifactRef:
    """
    Write ``rows`` under the named contract and return a digest reference.

    Raises:
        KeyError: If ``contract`` is unknown.
        ValueError: If a row does not match the contract's column count.
    """
    _, columns = CSV_CONTRACTS[contract]
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with target.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"{contract}: expected {len(columns)} columns, got {len(row)}")
            writer.writerow([format_cell(v) for v in row])
            count += 1
    logger.info("Wrote %s (%d rows)", target, count)
    return ArtifactRef.for_file(target, kind="CSV", schema=schema_id(contract))


def read_csv(path: Path | str) -> List[Dict[str, str]]:
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return format_cell(value)
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _json_default(value: Any) -> Any:
    # numpy scalars and arrays
    if hasattr(value, "tolist"):
        return _json_safe(value.tolist())
    return str(value)


def write_json(path: Path | str, payload: Any, *, kind: str = "Summary") -> ArtifactRef:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(_json_safe(payload), indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return ArtifactRef.for_file(target, kind=kind)


def write_text(path: Path | str, text: str, *, kind: str = "Report") -> ArtifactRef:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    return ArtifactRef.for_file(target, kind=kind)


__all__ = ["CSV_CONTRACTS", "format_cell", "read_csv", "schema_id", "write_csv", "write_json", "write_text"]
