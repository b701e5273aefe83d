"""Unit tests for run status evaluation."""

from dumbbell_lab.errors import AssumptionViolation, ConfigurationError, SolverError
from dumbbell_lab.ops.claims import holds, within_rel
from dumbbell_lab.ops.run_status import evaluate_run_status


def _passing(claim_id: str = "ok"):
    return holds(claim_id, "always true", True, task="test")


def _failing(claim_id: str = "bad"):
    return within_rel(claim_id, "off by half", 1.5, 1.0, 0.1, task="test")


def test_all_claims_pass():
    """Test that passing claims result in exit code 0."""
    exit_code, messages = evaluate_run_status([_passing("a"), _passing("b")])
    assert exit_code == 0
    assert messages == ["All 2 claims pass"]


def test_no_claims_is_not_a_failure():
    exit_code, messages = evaluate_run_status([])
    assert exit_code == 0
    assert "no claims" in messages[0].lower()


def test_failed_claim():
    """Test that a missed tolerance results in exit code 1."""
    exit_code, messages = evaluate_run_status([_passing(), _failing("poincare_constant")])
    assert exit_code == 1
    assert any("poincare_constant" in msg for msg in messages)


def test_failed_claim_messages_are_capped():
    exit_code, messages = evaluate_run_status([_failing(f"c{i}") for i in range(5)])
    assert exit_code == 1
    assert len(messages) == 4
    assert messages[-1] == "... and 2 more failed claims"


def test_configuration_error():
    """Test that a configuration error results in exit code 2 whatever the claims say."""
    exit_code, messages = evaluate_run_status([_passing()], ConfigurationError("eps_ladder must not be empty"))
    assert exit_code == 2
    assert any("configuration error" in msg.lower() for msg in messages)


def test_assumption_violation():
    """Test that a violated spectral assumption results in exit code 2."""
    exit_code, messages = evaluate_run_status(None, AssumptionViolation("gap 5% below threshold"))
    assert exit_code == 2
    assert any("assumption violated" in msg.lower() for msg in messages)


def test_other_lab_errors_fail_the_run():
    exit_code, messages = evaluate_run_status([_failing("late")], SolverError("no convergence"))
    assert exit_code == 1
    assert messages[0].startswith("Task failed: SolverError")
    assert any("late" in msg for msg in messages)
