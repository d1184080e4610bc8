from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qfock.errors import DivergenceError, GridMismatchError, UnsupportedError
from qfock.qnum import QContext, q_factorial
from qfock.transform import (GridFunction, convolution_transform, density_moment_check,
                             eq_inverse_grid, grid_convolution, grid_function, grid_length,
                             grid_points, jackson_integral, measure_inner_product,
                             measure_series, moment_check, mq_transform, verify_transform)

HALF = QContext.numeric(0.5)


def test_jackson_examples():
    assert jackson_integral(lambda x: x, 1.0, HALF).value.real == pytest.approx(2 / 3, rel=1e-14)
    assert jackson_integral(lambda x: x * x, 1.0, HALF).value.real == pytest.approx(1 / 1.75, rel=1e-14)
    for a in (0.3, 1.0, 4.0):
        assert jackson_integral(lambda x: 1.0, a, HALF).value.real == pytest.approx(a, rel=1e-14)


@given(st.integers(0, 8), st.floats(0.1, 0.9), st.floats(0.1, 3.0))
def test_jackson_monomials(ell, q0, a):
    got = jackson_integral(lambda x: x**ell, a, QContext.numeric(q0)).value.real
    want = a ** (ell + 1) * (1 - q0) / (1 - q0 ** (ell + 1))
    assert got == pytest.approx(want, rel=1e-12)


def test_jackson_divergence():
    with pytest.raises(DivergenceError):
        jackson_integral(lambda x: x**-2, 1.0, HALF)


def test_jackson_needs_q_below_one():
    with pytest.raises(UnsupportedError):
        jackson_integral(lambda x: x, 1.0, QContext.numeric(1.0))


def test_grid():
    pts = grid_points(HALF)
    assert pts[0] == 0.5 / 0.5 and pts[1] == 0.25 / 0.5
    assert len(pts) == grid_length(HALF) + 1
    assert grid_length(QContext.numeric(0.0)) >= 64


def test_mq_of_one():
    for q0 in (0.1, 0.5, 0.9):
        ctx = QContext.numeric(q0)
        got = mq_transform(grid_function(lambda x: 1.0, ctx), 1, ctx).value.real
        assert got == pytest.approx(1 / (1 - q0), rel=1e-13)


def test_mq_rejects_non_integer():
    with pytest.raises(ValueError):
        mq_transform(grid_function(lambda x: 1.0, HALF), 1.5, HALF)


@pytest.mark.parametrize("q0", [0.1, 0.5, 0.9])
def test_moment_identity(q0):
    ctx = QContext.numeric(q0)
    for n in range(11):
        r = moment_check(n, ctx)
        assert r["rel_err"] <= 1e-10 and r["closed_rel_err"] <= 1e-10


def test_convolution_trivial_cases():
    ones = grid_function(lambda x: 1.0, HALF)
    h = grid_convolution(ones, ones, HALF)
    np.testing.assert_array_equal(h.values.real, np.arange(ones.K + 1) + 1)
    spike = np.zeros(ones.K + 1, dtype=complex)
    spike[0] = 1.0
    f1 = grid_function(lambda x: x, HALF)
    h = grid_convolution(f1, GridFunction(0.5, spike), HALF)
    np.testing.assert_array_equal(h.values, f1.values)


def test_grid_mismatch():
    a = grid_function(lambda x: 1.0, HALF)
    with pytest.raises(GridMismatchError):
        grid_convolution(a, grid_function(lambda x: 1.0, QContext.numeric(0.4)))
    with pytest.raises(GridMismatchError):
        grid_convolution(a, grid_function(lambda x: 1.0, HALF, a.K - 3))
    with pytest.raises(GridMismatchError):
        mq_transform(a, 1, QContext.numeric(0.4))


@pytest.mark.parametrize("n", [0, 3, 8])
def test_convolution_identity(n):
    g = eq_inverse_grid(HALF, 0).rule
    poly = lambda x: 1 + x - 0.5 * x * x  # noqa: E731
    lhs = (mq_transform(grid_function(g, HALF), n + 1, HALF).value
           * mq_transform(grid_function(poly, HALF), n + 1, HALF).value)
    rhs = convolution_transform(g, poly, n + 1, HALF)[0].value / 0.5**n
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


def test_density_examples():
    r0 = density_moment_check(0, HALF)
    assert r0.holds and r0.details["rel_err"] <= 1e-10
    r2 = density_moment_check(2, HALF)
    assert r2.details["value"] == pytest.approx(2.25, rel=1e-8)
    assert r2.details["pochhammer_form_rel_diff"] <= 1e-8
    with pytest.raises(ValueError):
        density_moment_check(11, HALF)


def test_measure_examples():
    assert measure_inner_product(2, 3, HALF) == 0.0
    assert measure_inner_product(0, 0, HALF) == pytest.approx(1.0, rel=1e-13)
    assert measure_inner_product(3, 3, HALF) == pytest.approx(2.625, rel=1e-12)
    assert measure_series(HALF).total_mass == pytest.approx(1.0, rel=1e-13)


@given(st.integers(0, 10), st.floats(0.05, 0.95))
def test_measure_moments(n, q0):
    ctx = QContext.numeric(q0)
    assert measure_inner_product(n, n, ctx) == pytest.approx(q_factorial(n, ctx), rel=1e-10)


def test_suite_holds():
    reports = verify_transform(QContext.numeric(0.7))
    assert {r.identity for r in reports} == {"MOMENT_EQ_INVERSE", "MEASURE_MOMENT", "MEASURE_MASS",
                                             "DENSITY_MOMENT", "CONVOLUTION_IDENTITY",
                                             "JACKSON_MONOMIAL"}
    assert all(r.holds for r in reports)


def test_grid_function_without_rule_cannot_extend():
    f = GridFunction(0.5, np.ones(4, dtype=complex))
    with pytest.raises(DivergenceError):
        f.extended(10)
    assert math.isclose(f.points()[0], 1.0)
