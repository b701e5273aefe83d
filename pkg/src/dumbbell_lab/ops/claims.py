"""Claim checks: a measured value compared against an expectation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional


@dataclass
class ClaimCheck:
    """
    Outcome of one numerical claim.

    A missed tolerance is data, not an exception: ``passed`` is False and the
    run exits with code 1.
    """

    claim_id: str
    description: str
    passed: bool
    measured: Any
    expected: str
    task: str
    window: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _finite(value: float) -> bool:
    return value is not None and math.isfinite(float(value))


def within_rel(
    claim_id: str,
    description: str,
    measured: float,
    target: float,
    rel_tol: float,
    *,
    task: str,
    window: Optional[str] = None,
    **details: Any,
) -> ClaimCheck:
    if target == 0.0:
        # zero target: the tolerance is read as absolute
        check = within_abs(claim_id, description, measured, target, rel_tol, task=task, window=window, **details)
        check.expected += " (zero target)"
        return check
    error = abs(measured - target) / abs(target) if _finite(measured) else math.inf
    return ClaimCheck(
        claim_id=claim_id,
        description=description,
        passed=error <= rel_tol,
        measured=float(measured),
        expected=f"{target:.8g} +/- {rel_tol:.3g} rel",
        task=task,
        window=window,
        details={"rel_error": error, **details},
    )


def within_abs(
    claim_id: str,
    description: str,
    measured: float,
    target: float,
    abs_tol: float,
    *,
    task: str,
    window: Optional[str] = None,
    **details: Any,
) -> ClaimCheck:
    error = abs(measured - target) if _finite(measured) else math.inf
    return ClaimCheck(
        claim_id=claim_id,
        description=description,
        passed=error <= abs_tol,
        measured=float(measured),
        expected=f"{target:.8g} +/- {abs_tol:.3g}",
        task=task,
        window=window,
        details={"abs_error": error, **details},
    )


def at_most(
    claim_id: str,
    description: str,
    measured: float,
    bound: float,
    *,
    task: str,
    window: Optional[str] = None,
    **details: Any,
) -> ClaimCheck:
    return ClaimCheck(
        claim_id=claim_id,
        description=description,
        passed=_finite(measured) and measured <= bound,
        measured=float(measured),
        expected=f"<= {bound:.8g}",
        task=task,
        window=window,
        details=dict(details),
    )


def at_least(
    claim_id: str,
    description: str,
    measured: float,
    bound: float,
    *,
    task: str,
    window: Optional[str] = None,
    **details: Any,
) -> ClaimCheck:
    return ClaimCheck(
        claim_id=claim_id,
        description=description,
        passed=_finite(measured) and measured >= bound,
        measured=float(measured),
        expected=f">= {bound:.8g}",
        task=task,
        window=window,
        details=dict(details),
    )


def holds(
    claim_id: str,
    description: str,
    condition: bool,
    *,
    task: str,
    measured: Any = None,
    expected: str = "true",
    window: Optional[str] = None,
    **details: Any,
) -> ClaimCheck:
    return ClaimCheck(
        claim_id=claim_id,
        description=description,
        passed=bool(condition),
        measured=measured if measured is not None else bool(condition),
        expected=expected,
        task=task,
        window=window,
        details=dict(details),
    )


__all__ = ["ClaimCheck", "at_least", "at_most", "holds", "within_abs", "within_rel"]
