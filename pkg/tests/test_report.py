import json
from pathlib import Path

import jsonschema
import pytest

from dumbbell_lab.config import apply_overrides
from dumbbell_lab.errors import AssumptionViolation, ConfigurationError, SolverError
from dumbbell_lab.ops.artifacts import write_csv
from dumbbell_lab.ops.claims import within_abs
from dumbbell_lab.runners import TASK_NAMES, run
from dumbbell_lab.runners import report as report_mod
from dumbbell_lab.runners.report import render_markdown

SCHEMA_PATH = Path(__file__).resolve().parents[1] / "docs" / "specs" / "run-record.schema.json"


def _records(out_dir: Path) -> list[dict]:
    schema = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
    records = []
    for path in sorted((out_dir / "run-records").glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        jsonschema.validate(instance=data, schema=schema)
        records.append(data)
    return records


def _fake_task(measured: float = 1.0, raises: Exception | None = None):
    def _task(ctx):
        ctx.outputs.append(write_csv(ctx.out_dir / "h_u.csv", "h_u", [(0.2, 0.1, 4.0, -1.0)]))
        ctx.add(within_abs("fake.value", "measured equals one", measured, 1.0, 1e-9, task="fake"))
        ctx.warn("DROPPED_SAMPLES", "1 sample dropped", eps=0.2)
        ctx.record_fit("beta", -0.7, window="[0.8, 0.2]")
        if raises is not None:
            raise raises

    return _task


@pytest.fixture
def fake_tasks(monkeypatch):
    def _install(name, task):
        monkeypatch.setitem(report_mod.TASKS, name, task)

    return _install


def test_task_names():
    assert TASK_NAMES[-1] == "full-report"
    assert {"cross-section", "spectra", "frequency", "profiles", "blowup", "identities"} <= set(TASK_NAMES)


def test_unknown_task(tiny_config):
    with pytest.raises(KeyError):
        run(tiny_config, "nonexistent")


def test_passing_run_writes_summary_and_record(tiny_config, fake_tasks):
    fake_tasks("fake", _fake_task())
    outcome = run(tiny_config, "fake")
    out = tiny_config.output_dir
    assert outcome.exit_code == 0
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["task"] == "fake"
    assert summary["passed"] == 1 and summary["failed"] == 0
    assert summary["fitted_constants"]["beta"]["value"] == -0.7
    assert "duration_s" in summary
    assert "| fake.value | PASS |" in (out / "summary.md").read_text(encoding="utf-8")
    (record,) = _records(out)
    assert record["mode"] == "best-effort"
    assert record["operator_id"].startswith("dumbbell-lab.fake@")
    assert {ref["id"] for ref in record["output_refs"]} == {"h_u.csv", "summary.json", "summary.md"}
    assert record["warnings"][0]["code"] == "DROPPED_SAMPLES"
    assert "duration_ms" in record["cost"]
    assert record["claims"] == {"total": 1, "passed": 1, "failed": [], "exit_code": 0}


def test_failed_claim_exits_with_one(tiny_config, fake_tasks):
    fake_tasks("fake", _fake_task(measured=2.0))
    outcome = run(tiny_config, "fake")
    assert outcome.exit_code == 1
    assert "fake.value" in outcome.messages[0]
    (record,) = _records(tiny_config.output_dir)
    assert record["claims"]["failed"] == ["fake.value"]
    assert record["claims"]["exit_code"] == 1


@pytest.mark.parametrize(
    "error, code",
    [
        (AssumptionViolation("gap below threshold"), 2),
        (ConfigurationError("bad mesh"), 2),
        (SolverError("no convergence"), 1),
    ],
)
def test_task_errors_map_to_exit_codes(tiny_config, fake_tasks, error, code):
    fake_tasks("fake", _fake_task(raises=error))
    outcome = run(tiny_config, "fake")
    assert outcome.exit_code == code
    summary = json.loads(outcome.summary_path.read_text(encoding="utf-8"))
    assert summary["failure"]["type"] == type(error).__name__
    (record,) = _records(tiny_config.output_dir)
    assert record["errors"][0]["code"] == type(error).__name__


def test_non_lab_errors_propagate(tiny_config, fake_tasks):
    fake_tasks("fake", _fake_task(raises=RuntimeError("bug")))
    with pytest.raises(RuntimeError):
        run(tiny_config, "fake")


def test_serial_runs_are_byte_identical(tiny_config, fake_tasks):
    fake_tasks("fake", _fake_task())
    config = apply_overrides(tiny_config, serial=True)
    out = config.output_dir
    snapshots = []
    for _ in range(2):
        first = run(config, "fake")
        files = sorted(p for p in out.rglob("*") if p.is_file())
        snapshots.append({p.relative_to(out): p.read_bytes() for p in files})
    assert snapshots[0] == snapshots[1]
    assert first.run_id in {p.stem.split("_", 1)[1] for p in (out / "run-records").glob("*.json")}
    (record,) = _records(out)
    assert record["mode"] == "strict"
    assert record["started_at"] == record["ended_at"] == "2000-01-01T00:00:00Z"
    assert "duration_s" not in json.loads((out / "summary.json").read_text(encoding="utf-8"))


def test_render_markdown_lists_warnings():
    summary = {
        "task": "fake",
        "run_id": "r",
        "config_hash": "h",
        "exit_code": 1,
        "messages": ["Claim failed: x"],
        "claims": [{"claim_id": "x", "passed": False, "measured": 0.123456789, "expected": "1", "window": None}],
        "fitted_constants": {},
        "warnings": [{"code": "W", "message": "careful"}],
        "passed": 0,
        "failed": 1,
    }
    text = render_markdown(summary)
    assert "| x | FAIL | 0.123457 | 1 |  |" in text
    assert "- W: careful" in text


def test_cross_section_task_passes_on_the_tiny_tier(tiny_config):
    outcome = run(tiny_config, "cross-section")
    assert outcome.exit_code == 0, outcome.messages
    rows = (tiny_config.output_dir / "cross_section.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "N,resolution,lambda1,sqrt_lambda1,upsilon,y1_quotient"
    assert len(rows) == 4


@pytest.mark.slow
def test_serial_spectra_run_is_reproducible(tiny_config):
    config = apply_overrides(tiny_config, serial=True)
    hashes = []
    for _ in range(2):
        outcome = run(config, "spectra")
        assert outcome.exit_code in (0, 1), outcome.messages
        hashes.append([ref.hash for ref in outcome.outputs])
    assert hashes[0] == hashes[1]
    assert (config.output_dir / "spectra.csv").exists()


def test_dumbbell_samples_skip_excluded_bands(tiny_config):
    from dumbbell_lab.runners.context import RunContext
    from dumbbell_lab.runners.tasks import dumbbell_samples

    samples = dumbbell_samples(RunContext(config=tiny_config), 0.2)
    assert samples == [
        -4.0, -3.0, -2.0, -1.0, -0.5, -0.25,
        0.1, 0.2, 0.25, 0.4, 0.5, 0.6, 0.75, 0.8, 1.0,
        1.2, 1.5, 2.0, 3.0,
    ]
