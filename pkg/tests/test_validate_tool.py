import importlib.util
import json
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
SCHEMA = REPO_ROOT / "docs" / "specs" / "run-record.schema.json"


@pytest.fixture(scope="module")
def tool():
    spec = importlib.util.spec_from_file_location("validate_run_records", REPO_ROOT / "tools" / "validate_run_records.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def _record(**overrides) -> dict:
    record = {
        "run_id": "5f0e7a53-8c1d-4b6e-9a2f-3d4c5b6a7e81",
        "operator_id": "dumbbell-lab.cross-section@0.3.0",
        "mode": "strict",
        "started_at": "2000-01-01T00:00:00Z",
        "ended_at": "2000-01-01T00:00:00Z",
        "config_hash": "0" * 64,
        "input_refs": [],
        "output_refs": [{"id": "cross_section.csv", "hash": "f" * 64, "kind": "CSV", "schema": "cross_section.csv@1"}],
    }
    record.update(overrides)
    return record


def _write(directory: Path, name: str, record: dict) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / name).write_text(json.dumps(record), encoding="utf-8")


def test_valid_records_pass(tool, tmp_path, capsys):
    _write(tmp_path, "a.json", _record())
    _write(tmp_path, "b.json", _record(mode="best-effort", started_at="2026-01-01T10:00:00Z", cost={"duration_ms": 5}))
    assert tool.main(["--records-dir", str(tmp_path), "--schema", str(SCHEMA)]) == 0
    out = capsys.readouterr().out
    assert "Validated 2/2" in out
    assert "best-effort=1, strict=1" in out


@pytest.mark.parametrize(
    "record",
    [
        _record(operator_id="no-version"),
        _record(mode="replay"),
        _record(started_at="2026-01-01T10:00:00Z"),
        _record(cost={"duration_ms": 3}),
        _record(extra=1),
        _record(claims={"total": 2, "passed": 2, "failed": ["x"], "exit_code": 1}),
        _record(claims={"total": 1, "passed": 0, "failed": ["x"], "exit_code": 0}),
        _record(claims={"total": 1, "passed": 1, "failed": [], "exit_code": 3}),
    ],
)
def test_invalid_records_fail(tool, tmp_path, record):
    _write(tmp_path, "bad.json", record)
    assert tool.main(["--records-dir", str(tmp_path), "--schema", str(SCHEMA)]) == 1


def test_unreadable_json_fails(tool, tmp_path):
    tmp_path.joinpath("broken.json").write_text("{", encoding="utf-8")
    assert tool.main(["--records-dir", str(tmp_path), "--schema", str(SCHEMA)]) == 1


def test_missing_inputs(tool, tmp_path):
    assert tool.main(["--records-dir", str(tmp_path / "absent"), "--schema", str(SCHEMA)]) == 2
    assert tool.main(["--records-dir", str(tmp_path), "--schema", str(SCHEMA)]) == 2
    _write(tmp_path, "a.json", _record())
    assert tool.main(["--records-dir", str(tmp_path), "--schema", str(tmp_path / "none.json")]) == 2


def test_claim_failures_are_counted(tool, tmp_path, capsys):
    _write(tmp_path, "a.json", _record(claims={"total": 2, "passed": 1, "failed": ["frequency.d_bound"], "exit_code": 1}))
    _write(tmp_path, "b.json", _record(claims={"total": 1, "passed": 1, "failed": [], "exit_code": 0}))
    assert tool.main(["--records-dir", str(tmp_path), "--schema", str(SCHEMA)]) == 0
    assert "Failed claims recorded: 1" in capsys.readouterr().out
