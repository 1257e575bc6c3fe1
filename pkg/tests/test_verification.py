import pytest

from fracmollify.verification import Check, fbd_slope, run_checks


def test_all_checks_pass():
    checks = run_checks(n_points=50)
    assert len(checks) == 12
    assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]


@pytest.mark.parametrize("d", [0.5, 1.0, 2.0])
def test_fbd_slope(d):
    assert fbd_slope(d) == pytest.approx(-1.0 / d, abs=0.05)


def test_line_format():
    assert Check("x", False, "bad").line() == "FAIL x: bad"
