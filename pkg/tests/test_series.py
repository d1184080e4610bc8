from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qfock.qnum import QContext, q_factorial
from qfock.qscalar import QPoly, QRat
from qfock.series import (SeriesIdentity, TruncatedSeries, coefficient_recovery, identity,
                          op_compose, op_derivative, op_jackson_antiderivative, op_Lambda,
                          op_Mz, op_power, op_R0, op_Rq, random_polynomial,
                          verify_coefficient_recovery, verify_series_identity)

EXACT = QContext.exact(12)


def mono(n, ctx=EXACT, c=1):
    return TruncatedSeries.monomial(n, ctx, c)


def series(coeffs, ctx=EXACT):
    return TruncatedSeries.from_coeffs(coeffs, ctx)


def test_R0_examples():
    R0 = op_R0(EXACT)
    assert R0.apply(mono(3)).coeffs == mono(2).coeffs
    assert not any(R0.apply(mono(0)).coeffs)
    assert R0.apply(series([1, 1, 1])).coeffs == series([1, 1]).coeffs


def test_Rq_examples():
    assert op_Rq(EXACT).apply(mono(2)).coeffs == mono(1, c=QRat(QPoly([1, 1]))).coeffs
    ctx0 = QContext.numeric(0.0, 8)
    np.testing.assert_array_equal(op_Rq(ctx0).to_array(), op_R0(ctx0).to_array())
    ctx1 = QContext.numeric(1.0, 8)
    assert op_Rq(ctx1).apply(mono(3, ctx1)).coeffs[2] == 3


def test_Lambda_Mz_derivative():
    assert op_Lambda(EXACT).apply(mono(2)).coeffs[2] == QRat(QPoly.monomial(2))
    top = op_Mz(EXACT).apply(mono(EXACT.N))
    assert not any(top.coeffs)
    assert top.exact_to == EXACT.N - 1
    assert op_derivative(EXACT).apply(mono(4)).coeffs[3] == QRat(4)


def test_jackson_antiderivative():
    J = op_jackson_antiderivative(EXACT)
    assert J.apply(mono(2)).coeffs[3] == 1 / QRat(QPoly([1, 1, 1]))
    assert J.apply(mono(0)).coeffs == mono(1).coeffs
    ctx1 = QContext.numeric(1.0, 8)
    assert op_jackson_antiderivative(ctx1).apply(mono(4, ctx1)).coeffs[5] == pytest.approx(0.2)


def test_compose_Mz_R0():
    P = op_compose(op_Mz(EXACT), op_R0(EXACT))
    assert not any(P.apply(mono(0)).coeffs)
    for n in range(1, EXACT.N + 1):
        assert P.apply(mono(n)).coeffs == mono(n).coeffs


def test_power_zero_is_identity():
    assert op_power(op_Rq(EXACT), 0).entries == identity(EXACT).entries


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=13), st.integers(0, 3))
def test_compose_agrees_with_sequential_apply(coeffs, k):
    f = series(coeffs)
    A, B = op_power(op_Rq(EXACT), k), op_Mz(EXACT)
    assert op_compose(A, B).apply(f).coeffs == A.apply(B.apply(f)).coeffs


@pytest.mark.parametrize("ident", list(SeriesIdentity))
def test_exact_identities(ident):
    r = verify_series_identity(ident, QContext.exact(32))
    assert r.holds and r.max_defect == "0"


@pytest.mark.parametrize("ident", list(SeriesIdentity))
@pytest.mark.parametrize("q0", [0.0, 0.3, 0.9])
def test_numeric_identities(ident, q0):
    assert verify_series_identity(ident, QContext.numeric(q0, 32)).holds


def test_classical_commutator():
    r = verify_series_identity(SeriesIdentity.Q_COMMUTATOR, QContext.numeric(1.0, 16))
    assert r.holds and r.details["classical_limit"]


def test_classical_rejects_factored():
    with pytest.raises(ValueError):
        verify_series_identity(SeriesIdentity.RQ_FACTORED, QContext.numeric(1.0, 16))


def test_iterated_powers_second_power():
    r = verify_series_identity(SeriesIdentity.ITERATED_POWERS, EXACT, n_max=2)
    assert r.holds and [p["margin"] for p in r.details["per_n"]] == [1, 2]


def test_zero_margin_exposes_truncation():
    # the commutator needs one column of margin: M_z z^N falls off the basis
    r = verify_series_identity(SeriesIdentity.Q_COMMUTATOR, EXACT, degree_margin=0)
    assert not r.holds
    assert r.details["defect_position"] == [EXACT.N, EXACT.N]


def test_recovery_examples():
    f = series([1, 1, 1])
    got = coefficient_recovery(f, EXACT)
    assert got == [QRat(1)] * 3 + [QRat(0)] * (EXACT.N - 2)
    eq_partial = series([1 / q_factorial(n, EXACT) for n in range(EXACT.N + 1)])
    assert coefficient_recovery(eq_partial, EXACT) == list(eq_partial.coeffs)


def test_recovery_independent_of_q():
    truth = random_polynomial(16, QContext.numeric(0.3, 32), seed=3)
    a = np.array(coefficient_recovery(truth, QContext.numeric(0.3, 32)))
    b = np.array(coefficient_recovery(truth, QContext.numeric(0.7, 32)))
    assert np.max(np.abs(a - b)) <= 1e-13 * max(1.0, np.max(np.abs(a)))


@pytest.mark.parametrize("ctx", [QContext.exact(20), QContext.numeric(0.5), QContext.numeric(1.0)])
def test_recovery_report(ctx):
    r = verify_coefficient_recovery(ctx, seed=1)
    assert r.holds and r.identity == "COEFFICIENT_RECOVERY"


def test_exact_numeric_consistency():
    ex = (op_Rq(EXACT) @ op_Mz(EXACT)).evaluate_at(0.4).to_array()
    nu = (op_Rq(QContext.numeric(0.4, 12)) @ op_Mz(QContext.numeric(0.4, 12))).to_array()
    np.testing.assert_allclose(ex, nu, rtol=1e-14, atol=0)


def test_exact_operator_needs_evaluation():
    with pytest.raises(TypeError):
        op_Rq(EXACT).to_array()
