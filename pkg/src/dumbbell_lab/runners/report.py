"""Run orchestration: execute a task, write the summaries and the run record, map to an exit code."""

from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from dumbbell_lab import __version__
from dumbbell_lab.config.models import ExperimentConfig
from dumbbell_lab.errors import DumbbellLabError
from dumbbell_lab.ops.artifacts import write_json, write_text
from dumbbell_lab.ops.claims import ClaimCheck
from dumbbell_lab.ops.run_record import (
    ArtifactRef,
    ClaimTally,
    Diagnostic,
    canonicalize_time_factory,
    emit_run_record,
    fingerprint_config,
    operator_id,
)
from dumbbell_lab.ops.run_status import evaluate_run_status
from dumbbell_lab.runners.context import RunContext
from dumbbell_lab.runners.tasks import TASKS
from dumbbell_lab.utils.id_generator import deterministic_id_context, new_run_id
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.time import Stopwatch

logger = get_logger(__name__)

SERIAL_TIMESTAMP = "2000-01-01T00:00:00Z"
RUN_RECORDS_DIR = "run-records"


@dataclass
class RunOutcome:
    task: str
    run_id: str
    exit_code: int
    messages: List[str]
    checks: List[ClaimCheck] = field(default_factory=list)
    outputs: List[ArtifactRef] = field(default_factory=list)
    summary_path: Optional[Path] = None


def build_summary(
    ctx: RunContext,
    *,
    task: str,
    run_id: str,
    config_hash: str,
    exit_code: int,
    messages: List[str],
    failure: Optional[BaseException],
    duration_s: Optional[float],
) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "task": task,
        "version": __version__,
        "run_id": run_id,
        "config_hash": config_hash,
        "config": ctx.config.snapshot(),
        "exit_code": exit_code,
        "messages": messages,
        "claims": [c.as_dict() for c in ctx.checks],
        "fitted_constants": ctx.fitted,
        "outputs": [{"id": ref.id, "hash": ref.hash, "schema": ref.schema} for ref in ctx.outputs],
        "warnings": [{"code": w.code, "message": w.message} for w in ctx.warnings],
        "passed": sum(1 for c in ctx.checks if c.passed),
        "failed": sum(1 for c in ctx.checks if not c.passed),
    }
    if failure is not None:
        summary["failure"] = {"type": type(failure).__name__, "message": str(failure)}
    if duration_s is not None:
        summary["duration_s"] = round(duration_s, 3)
    return summary


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in value.items()) + "}"
    return str(value)


def render_markdown(summary: Dict[str, Any]) -> str:
    lines = [
        f"# dumbbell-lab {summary['task']}",
        "",
        f"- run id: `{summary['run_id']}`",
        f"- config hash: `{summary['config_hash']}`",
        f"- exit code: {summary['exit_code']}",
        f"- claims: {summary['passed']} passed, {summary['failed']} failed",
        "",
    ]
    for message in summary["messages"]:
        lines.append(f"> {message}")
    lines += ["", "## Claims", "", "| claim | result | measured | expected | window |", "|---|---|---|---|---|"]
    for claim in summary["claims"]:
        result = "PASS" if claim["passed"] else "FAIL"
        lines.append(
            f"| {claim['claim_id']} | {result} | {_fmt(claim['measured'])} | {claim['expected']} | {claim['window'] or ''} |"
        )
    if summary["fitted_constants"]:
        lines += ["", "## Fitted constants", "", "| name | value | window |", "|---|---|---|"]
        for name in sorted(summary["fitted_constants"]):
            entry = summary["fitted_constants"][name]
            lines.append(f"| {name} | {_fmt(entry['value'])} | {entry.get('window') or ''} |")
    if summary["warnings"]:
        lines += ["", "## Warnings", ""]
        lines += [f"- {w['code']}: {w['message']}" for w in summary["warnings"]]
    return "\n".join(lines) + "\n"


def run(config: ExperimentConfig, task: str) -> RunOutcome:
    """
    Execute ``task`` under ``config`` and persist its artifacts.

    Configuration and assumption failures are recorded and mapped to exit code 2;
    any other lab error fails the run with code 1. Failed claims never raise.

    Raises:
        KeyError: If ``task`` is unknown.
    """
    if task not in TASKS:
        raise KeyError(f"unknown task {task!r}; choose from {sorted(TASKS)}")
    snapshot = config.snapshot()
    config_hash = fingerprint_config(snapshot)
    ctx = RunContext(config=config)
    id_scope = deterministic_id_context(seed=config_hash) if config.serial else nullcontext()
    failure: Optional[BaseException] = None

    with id_scope:
        run_id = new_run_id()
        logger.info("Run %s: task=%s out=%s serial=%s", run_id, task, ctx.out_dir, config.serial)
        with Stopwatch() as watch:
            try:
                TASKS[task](ctx)
            except DumbbellLabError as exc:
                logger.error("Task %s failed: %s", task, exc, exc_info=True)
                failure = exc

        exit_code, messages = evaluate_run_status(ctx.checks, failure)
        summary = build_summary(
            ctx,
            task=task,
            run_id=run_id,
            config_hash=config_hash,
            exit_code=exit_code,
            messages=messages,
            failure=failure,
            duration_s=None if config.serial else watch.elapsed,
        )
        summary_ref = write_json(ctx.out_dir / "summary.json", summary)
        report_ref = write_text(ctx.out_dir / "summary.md", render_markdown(summary))

        errors = []
        if failure is not None:
            errors.append(Diagnostic(code=type(failure).__name__, message=str(failure)))
        canonicalize = canonicalize_time_factory(fixed_value=SERIAL_TIMESTAMP) if config.serial else None
        emit_run_record(
            operator_id(task, __version__),
            mode="strict" if config.serial else "best-effort",
            run_id=run_id,
            config_snapshot=snapshot,
            canonicalize_time=canonicalize,
            output_refs=[*ctx.outputs, summary_ref, report_ref],
            warnings=ctx.warnings,
            errors=errors,
            cost={} if config.serial else {"duration_ms": int(watch.elapsed * 1000)},
            claims=ClaimTally.from_checks(ctx.checks, exit_code),
            dest_dir=ctx.out_dir / RUN_RECORDS_DIR,
            filename_basename=f"{task}_{run_id}" if config.serial else None,
        )

    for message in messages:
        logger.info("%s", message)
    return RunOutcome(
        task=task,
        run_id=run_id,
        exit_code=exit_code,
        messages=messages,
        checks=list(ctx.checks),
        outputs=[*ctx.outputs, summary_ref, report_ref],
        summary_path=ctx.out_dir / "summary.json",
    )


__all__ = ["RunOutcome", "build_summary", "render_markdown", "run"]
