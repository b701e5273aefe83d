import json
import math

import numpy as np
import pytest

from dumbbell_lab.ops.artifacts import CSV_CONTRACTS, format_cell, read_csv, schema_id, write_csv, write_json
from dumbbell_lab.ops.run_record import file_digest
from dumbbell_lab.frequency import Regime


def test_format_cell():
    assert format_cell(0.1 + 0.2) == "0.3"
    assert format_cell(2.404825557695773) == "2.4048255577"
    assert format_cell(math.nan) == "nan"
    assert format_cell(-math.inf) == "-inf"
    assert format_cell(True) == "true"
    assert format_cell(3) == "3"
    assert format_cell(Regime.CORRIDOR) == "corridor"


def test_write_csv_follows_the_contract(tmp_path):
    ref = write_csv(tmp_path / "frequency.csv", "frequency", [("left", 0.1, -1.0, 2.0, 4.0, 0.5)])
    rows = read_csv(tmp_path / "frequency.csv")
    assert tuple(rows[0]) == CSV_CONTRACTS["frequency"][1]
    assert rows[0]["N"] == "0.5"
    assert ref.schema == schema_id("frequency") == "frequency.csv@1"
    assert ref.hash == file_digest(tmp_path / "frequency.csv")
    assert (tmp_path / "frequency.csv").read_text(encoding="utf-8").endswith("\n")


def test_write_csv_is_byte_stable(tmp_path):
    rows = [(3, 1000, 5.78318596, 2.40482555, 1.4472025, 2.0)]
    first = write_csv(tmp_path / "a.csv", "cross_section", rows)
    second = write_csv(tmp_path / "b.csv", "cross_section", rows)
    assert first.hash == second.hash


def test_write_csv_rejects_bad_rows(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "h_u.csv", "h_u", [(0.1, 0.2)])
    with pytest.raises(KeyError):
        write_csv(tmp_path / "x.csv", "nonexistent", [])


def test_write_json_handles_numpy_and_non_finite(tmp_path):
    ref = write_json(tmp_path / "summary.json", {"b": np.float64(1.5), "a": [np.arange(2), math.inf]})
    data = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert data == {"a": [[0, 1], "inf"], "b": 1.5}
    assert ref.kind == "Summary"
