from __future__ import annotations

import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qfock.errors import TruncationError, UnsupportedError
from qfock.qnum import QContext
from qfock.realization import (build_realization, coisometry_residual, column_isometry_residual,
                               eval_Sq, schur_grid, verify_realization, verify_schur_kernel)
import qfock.realization as realization_mod


@pytest.mark.parametrize("q0", [0.0, 0.5, 0.9])
def test_downshift_and_rank(q0):
    sys_ = build_realization(QContext.numeric(q0), 48)
    np.testing.assert_allclose(sys_.A, np.eye(49, k=1), atol=1e-15)
    assert sys_.d == 1
    assert coisometry_residual(sys_) <= 1e-12
    assert column_isometry_residual(sys_) <= 1e-12


def test_S_at_zero_is_D():
    sys_ = build_realization(QContext.numeric(0.5), 8)
    assert eval_Sq(sys_, 0) == complex(sys_.D[0, 0])


@given(st.floats(0.0, 1.0), st.floats(0, 2 * np.pi), st.sampled_from([0.0, 0.3, 0.9]))
def test_modulus_is_z_power(r, t, q0):
    sys_ = build_realization(QContext.numeric(q0), 12)
    z = r * cmath.exp(1j * t)
    s = eval_Sq(sys_, z)
    assert abs(s) <= 1 + 1e-12
    assert abs(abs(s) - abs(z) ** 13) <= 1e-12


def test_kernel_on_diagonal_is_geometric_sum():
    N = 10
    sys_ = build_realization(QContext.numeric(0.4), N)
    z = 0.7 * cmath.exp(0.3j)
    x = abs(z) ** 2
    # C (I - zA)^-1 ((I - zA)^-1)^* C^* = sum_{k<=N} |z|^(2k)
    s = eval_Sq(sys_, z)
    lhs = (1 - abs(s) ** 2) / (1 - x)
    assert lhs == pytest.approx(sum(x**k for k in range(N + 1)), rel=1e-13)
    assert verify_schur_kernel(sys_, z, z) <= 1e-13


def test_phase_invariance():
    sys_ = build_realization(QContext.numeric(0.5), 16)
    rot = sys_.with_phase(cmath.exp(1.1j))
    grid = schur_grid()
    assert max(verify_schur_kernel(rot, z, w) for z in grid for w in grid) <= 1e-10
    z = 0.6j
    assert abs(eval_Sq(rot, z)) == pytest.approx(abs(eval_Sq(sys_, z)), rel=1e-14)


def test_report():
    r = verify_realization(QContext.numeric(0.3), 48)
    assert r.holds
    d = r.to_dict()
    assert d["defect_rank"] == 1
    assert d["coisometry_residual"] <= 1e-12 and d["kernel_residual_max"] <= 1e-10
    assert "not of the infinite system" in d["details"]["model_note"]


def test_domain():
    with pytest.raises(UnsupportedError):
        build_realization(QContext.exact(8))
    with pytest.raises(UnsupportedError):
        build_realization(QContext.numeric(1.0), 8)


def test_negative_defect_raises(monkeypatch):
    real_eigh = np.linalg.eigh

    def bad_eigh(m):
        vals, vecs = real_eigh(m)
        vals = vals.copy()
        vals[0] = -1e-6
        return vals, vecs

    monkeypatch.setattr(realization_mod.np.linalg, "eigh", bad_eigh)
    with pytest.raises(TruncationError):
        build_realization(QContext.numeric(0.5), 8)
