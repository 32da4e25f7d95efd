import io
import json
import math
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from operant.timedomain import (
    KernelError,
    closed_form,
    j0_series,
    laplace_numeric,
    s_kernel,
    s_series,
    sample_kernel,
    series_residuals,
    transform_grid,
)

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.mark.parametrize("row", FROZEN["j0"], ids=lambda r: str(r["y"]))
def test_j0_series_matches_scipy(row):
    assert abs(j0_series(row["y"]) - row["value"]) <= 1e-12 * max(1.0, abs(row["value"]))


def test_j0_at_one():
    assert abs(j0_series(1.0) - 0.7651976865579666) < 1e-15


def test_kernel_center_value():
    # a=1, b=0, c=-1: beta = 1, so S(1, 0) = J0(1)/2
    assert abs(s_kernel(1.0, 0.0, 1, 0, -1) - 0.7651976865579666 / 2) < 1e-12


@pytest.mark.parametrize("row", FROZEN["s_series"], ids=lambda r: f"x{r['x']}-b{r['b']}-c{r['c']}")
def test_s_series_matches_sympy(row):
    got = s_series(row["x"], row["order"], row["b"], row["c"])
    assert all(abs(a - b) <= 1e-12 * max(1.0, abs(b)) for a, b in zip(got, row["coeffs"]))


def test_wave_laplace_is_sinh():
    val = laplace_numeric(1.0, 1.0, 1, 0, 0)
    assert abs(val - math.sinh(1.0)) < 1e-10
    assert abs(val - FROZEN["laplace_wave"]["quadrature"]) < 1e-10


def test_damped_grid():
    rows = transform_grid(1, 1, 0)
    assert len(rows) == 12
    assert all(r.passed for r in rows)


def test_fixed_rule_can_fail_tight_tolerance():
    rows = transform_grid(1, 1, 0, tol=1e-12, nodes=4)
    assert not all(r.passed for r in rows)


def test_kernel_needs_positive_a():
    with pytest.raises(KernelError):
        s_kernel(1.0, 0.0, 0, 1, 0)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.1, 3.0),
    st.floats(-10, 10),
    st.sampled_from([(1, 0, 0), (1, 1, 0), (2, 1, -3), (1, -2, 5)]),
)
def test_support(x, t, abc):
    a, b, c = abc
    if abs(t) > x * math.sqrt(a):
        assert s_kernel(x, t, a, b, c) == 0.0


def test_sampled_support_and_csv():
    sample = sample_kernel(1.0, 1, 1, 0, points=10_000)
    assert sample.support_violations() == 0
    buf = io.StringIO()
    sample.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,S" and len(lines) == 10_001


def test_series_residual_decreases():
    res = [r.residual for r in series_residuals(1.0, 1, 0, orders=range(0, 7))]
    assert all(b <= a + 1e-15 for a, b in zip(res, res[1:]))
    assert res[-1] < 1e-6


def test_closed_form_limit_at_sigma_zero():
    assert closed_form(0.7, 0, 1, 0, 0) == pytest.approx(0.7)
