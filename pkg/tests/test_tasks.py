"""Tiny-tier runs of every task on a pre-solved eps = 0.2 dumbbell."""

from pathlib import Path

import pytest

from dumbbell_lab.config import parse_config
from dumbbell_lab.geometry.mesh_io import load_mesh
from dumbbell_lab.ops.artifacts import CSV_CONTRACTS
from dumbbell_lab.profiles import compute_profiles
from dumbbell_lab.runners.context import RunContext
from dumbbell_lab.runners.tasks import run_blowup, run_frequency, run_identities, run_profiles, run_spectra


@pytest.fixture(scope="module")
def solved(tmp_path_factory, tiny_spec, tiny_model_mesh):
    config = parse_config({"eps_ladder": [0.2], "tier": "tiny", "output_dir": str(tmp_path_factory.mktemp("solve"))})
    ctx = RunContext(config=config)
    return ctx.solve_spec(tiny_spec), compute_profiles(tiny_model_mesh, ctx.cross_section())


@pytest.fixture
def make_ctx(tmp_path, solved):
    solution, pair = solved

    def _make(**overrides) -> RunContext:
        config = parse_config({"eps_ladder": [0.2], "tier": "tiny", "output_dir": str(tmp_path / "out"), **overrides})
        return RunContext(config=config, _solutions={0.2: solution}, _profiles=pair)

    return _make


def _header(ctx: RunContext, name: str) -> str:
    return (Path(ctx.out_dir) / name).read_text(encoding="utf-8").splitlines()[0]


def _expected_header(contract: str) -> str:
    return ",".join(CSV_CONTRACTS[contract][1])


def _claim_ids(ctx: RunContext) -> set:
    return {check.claim_id for check in ctx.checks}


def _warning_codes(ctx: RunContext) -> set:
    return {w.code for w in ctx.warnings}


def test_spectra_task(make_ctx):
    ctx = make_ctx()
    run_spectra(ctx)
    assert _header(ctx, "spectra.csv") == _expected_header("spectra")
    assert {
        "spectra.residual.eps0.2",
        "spectra.gap.eps0.2",
        "spectra.dense_oracle.eps0.2",
        "spectra.convergence_trend",
    } <= _claim_ids(ctx)
    rows = (Path(ctx.out_dir) / "spectra.csv").read_text(encoding="utf-8").splitlines()[1:]
    assert {row.split(",")[1] for row in rows} >= {"dumbbell", "D+"}
    assert [ref.id for ref in ctx.outputs] == ["spectra.csv"]


def test_frequency_task(make_ctx):
    ctx = make_ctx()
    run_frequency(ctx)
    assert _header(ctx, "frequency.csv") == _expected_header("frequency")
    assert _header(ctx, "derivatives.csv") == _expected_header("derivatives")
    ids = _claim_ids(ctx)
    assert {"frequency.oracle.dipole", "frequency.oracle.tube_mode"} <= ids
    # t = 0.1 lies below eps = 0.2, and no left sample lies in (-k_tilde, -4 eps)
    assert "FREQ_RIGHT_LIMIT_SKIPPED" in _warning_codes(ctx)
    assert "frequency.right_limit" not in ids
    assert not any(claim.startswith("frequency.left_bound") for claim in ids)
    assert "frequency.normalized.R_left_robustness" in ids or "FREQ_ROBUSTNESS_SKIPPED" in _warning_codes(ctx)
    assert {ref.id for ref in ctx.outputs} == {"frequency.csv", "derivatives.csv"}


def test_profiles_task_exports_the_profiles(make_ctx, mocker, tiny_model_mesh):
    robustness = mocker.patch("dumbbell_lab.runners.tasks.tube_length_robustness", return_value=1e-6)
    ctx = make_ctx(model_domain={"exterior_radius": 10.0})
    run_profiles(ctx)

    robustness.assert_called_once()
    assert robustness.call_args.args == (3, 12.0)
    assert robustness.call_args.kwargs["window"] == (-2.0, 1.0)
    assert _header(ctx, "profiles.csv") == _expected_header("profiles")
    assert {
        "profiles.phi1_above_ramp",
        "profiles.phi2_above_mode",
        "profiles.positive",
        "profiles.harmonic",
        "profiles.tube_decay",
        "profiles.phi1_tube_frequency",
        "profiles.phi2_hat_exterior_frequency",
        "profiles.kelvin_identity",
        "profiles.poincare_constant",
        "profiles.poincare_trial",
        "profiles.tube_length_robustness",
    } <= _claim_ids(ctx)
    assert ctx.fitted["C2"]["window"] == "x1 in [-6, 0]"

    exported = Path(ctx.out_dir) / "profiles"
    mesh = load_mesh(exported / "model_mesh.txt")
    assert mesh.n_vertices == tiny_model_mesh.n_vertices
    assert mesh.metadata == tiny_model_mesh.metadata
    for name in ("phi1", "phi2"):
        lines = (exported / f"{name}.txt").read_text(encoding="utf-8").splitlines()
        assert lines[0] == f"# {name}"
        assert len(lines) == tiny_model_mesh.n_vertices + 1
    kinds = {ref.id: ref.kind for ref in ctx.outputs}
    assert kinds == {"profiles.csv": "CSV", "model_mesh.txt": "Mesh", "phi1.txt": "Field", "phi2.txt": "Field"}


def test_blowup_task_with_an_empty_window(make_ctx):
    ctx = make_ctx()
    run_blowup(ctx)
    assert ctx.checks == []
    assert "BLOWUP_WINDOW_EMPTY" in _warning_codes(ctx)
    assert ctx.outputs == []


def test_blowup_task(make_ctx):
    # window [0.1, 0.2] at eps = 0.2; the default nodal radii lie below eps
    ctx = make_ctx(sampling={"lambda_min_factor": 0.5, "n_lambdas": 6})
    run_blowup(ctx)
    assert _header(ctx, "h_u.csv") == _expected_header("h_u")
    assert _header(ctx, "envelopes.csv") == _expected_header("envelopes")
    ids = _claim_ids(ctx)
    assert {
        "blowup.h_u_exponent",
        "blowup.h_u_growth",
        "blowup.tilde_vs_phi1",
        "blowup.c_tilde_positive",
        "blowup.hat_vs_phi2",
        "blowup.hat_growth",
        "blowup.envelopes.eps0.2",
    } <= ids
    assert "blowup.beta_fit" in ids or {"blowup.beta_negative", "blowup.beta_agreement"} <= ids
    assert "NODAL_RADII_SKIPPED" in _warning_codes(ctx)
    assert not any(claim.startswith("blowup.nodal_exclusion") for claim in ids)
    # k_tilde / 2 = 0.125 lies below eps and is left out
    assert set(ctx.fitted["k_tilde_sensitivity"]["value"]) == {"0.25", "0.5"}
    assert len((Path(ctx.out_dir) / "h_u.csv").read_text(encoding="utf-8").splitlines()) == 7


def test_identities_task(make_ctx):
    ctx = make_ctx()
    run_identities(ctx)
    assert _header(ctx, "identities.csv") == _expected_header("identities")
    rows = (Path(ctx.out_dir) / "identities.csv").read_text(encoding="utf-8").splitlines()[1:]
    assert [tuple(row.split(",")[1:3]) for row in rows] == [
        ("left", "1"),
        ("left", "0.5"),
        ("corridor", "0.5"),
        ("right", "0.5"),
        ("right", "1"),
    ]
    assert {
        "identities.coercivity.eps0.2",
        "identities.scale_invariance",
        "identities.pohozaev_rate.left1",
        "identities.pohozaev_rate.corridor0.5",
        "identities.pohozaev_rate.right0.5",
        "identities.derivative_rate",
    } <= _claim_ids(ctx)
    # one eps: no remainder fit
    assert "C8" not in ctx.fitted
