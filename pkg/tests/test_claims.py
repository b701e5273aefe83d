import math

from dumbbell_lab.ops.claims import at_least, at_most, holds, within_abs, within_rel


def test_within_rel():
    check = within_rel("lambda1", "cross-section eigenvalue", 5.7833, 5.78318596, 1e-3, task="cross_section", N=3)
    assert check.passed
    assert check.details["N"] == 3
    assert check.details["rel_error"] < 1e-4
    assert check.expected.endswith("rel")
    assert not within_rel("x", "", 2.0, 1.0, 0.5, task="t").passed


def test_non_finite_measurements_never_pass():
    for check in (
        within_rel("x", "", math.nan, 1.0, 1.0, task="t"),
        within_abs("x", "", math.inf, 1.0, 1.0, task="t"),
        at_most("x", "", math.nan, 1.0, task="t"),
        at_least("x", "", math.nan, 1.0, task="t"),
    ):
        assert not check.passed


def test_bounds():
    assert within_abs("y1", "", 2.000001, 2.0, 1e-5, task="t").passed
    assert at_most("defect", "", 0.0, 0.0, task="t").passed
    assert not at_most("defect", "", 0.1, 0.0, task="t").passed
    assert at_least("c5", "", 0.5, 0.5, task="t", window="[0.08, 0.2]").window == "[0.08, 0.2]"


def test_holds_and_serialization():
    check = holds("sign", "beta estimators agree in sign", False, task="blowup", measured=[-0.7, 0.2])
    assert not check.passed
    data = check.as_dict()
    assert data["measured"] == [-0.7, 0.2]
    assert data["expected"] == "true"
    assert holds("x", "", True, task="t").measured is True


def test_within_rel_reads_the_tolerance_as_absolute_for_a_zero_target():
    check = within_rel("beta.bracket", "", 1e-4, 0.0, 1e-3, task="t")
    assert check.passed
    assert check.details["abs_error"] == 1e-4
    assert check.expected.endswith("(zero target)")
    assert not within_rel("beta.bracket", "", 0.01, 0.0, 1e-3, task="t").passed
    assert not within_rel("beta.bracket", "", math.nan, 0.0, 1.0, task="t").passed
