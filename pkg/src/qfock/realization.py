"""Co-isometric realization built on the truncated F2Q.

State coordinates are the orthonormal vectors ``z^n/[n]_q!`` of F2Q, in which
R_q is the pure down-shift and ``C`` reads the constant coefficient.  The
defect ``I - [A; C][A; C]*`` is factored through its eigendecomposition to
get ``[B; D]``; the block matrix ``[[A, B], [C, D]]`` is then co-isometric.

On the truncation the defect is the projection onto the top state vector,
so ``B`` is that vector up to a phase, ``D = 0`` and the transfer function is
``S(z) = z^(N+1)`` up to a unimodular factor.  This describes the finite
model only: it is not the characteristic function of the infinite system.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError, UnsupportedError
from .qnum import QContext, q_factorial
from .report import Report
from .series import op_Rq

__all__ = ["RealizationSystem", "build_realization", "eval_Sq", "verify_schur_kernel",
           "coisometry_residual", "verify_realization", "schur_grid"]

PSD_TOL = 1e-12
COISOMETRY_TOL = 1e-12
KERNEL_TOL = 1e-10


@dataclass(frozen=True)
class RealizationSystem:
    """Blocks of ``[[A, B], [C, D]]``: A is (N+1)x(N+1), B (N+1)xd, C 1x(N+1), D 1xd."""

    N: int
    q0: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    defect_eigenvalues: np.ndarray

    @property
    def d(self) -> int:
        return self.B.shape[1]

    def block(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    def with_phase(self, u: complex) -> RealizationSystem:
        """Same system with ``[B; D]`` multiplied by the unimodular ``u``."""
        return RealizationSystem(self.N, self.q0, self.A, u * self.B, self.C, u * self.D,
                                 self.defect_eigenvalues)


def build_realization(ctx: QContext, N: int | None = None) -> RealizationSystem:
    """Assemble A, C from the series module and factor the defect for B, D."""
    q0 = ctx.require_numeric("realization")
    if q0 >= 1.0:
        raise UnsupportedError("the realization needs q < 1")
    N = ctx.N if N is None else N
    if N < 1:
        raise ValueError(f"realization order must be >= 1, got {N}")
    c = ctx.with_order(N)
    R = op_Rq(c).to_array()
    # change to orthonormal coordinates: e~_n = z^n/[n]! so A = S^-1 R S
    s = np.array([1.0 / q_factorial(n, c) for n in range(N + 1)])
    A = (R * s[None, :]) / s[:, None]
    C = np.zeros((1, N + 1), dtype=complex)
    C[0, 0] = 1.0
    AC = np.vstack([A, C])
    defect = np.eye(N + 2) - AC @ AC.conj().T
    defect = 0.5 * (defect + defect.conj().T)
    vals, vecs = np.linalg.eigh(defect)
    if vals[0] < -PSD_TOL:
        raise TruncationError(f"defect operator is not positive: smallest eigenvalue {vals[0]:.3e}")
    keep = vals > PSD_TOL
    factor = vecs[:, keep] * np.sqrt(vals[keep])[None, :]
    B, D = factor[: N + 1, :], factor[N + 1:, :]
    return RealizationSystem(N, q0, A.astype(complex), B, C, D, vals)


def coisometry_residual(sys: RealizationSystem) -> float:
    M = sys.block()
    return float(np.max(np.abs(M @ M.conj().T - np.eye(M.shape[0]))))


def column_isometry_residual(sys: RealizationSystem) -> float:
    """``max |A*A + C*C - I|``."""
    G = sys.A.conj().T @ sys.A + sys.C.conj().T @ sys.C
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def _resolvent_row(sys: RealizationSystem, z: complex) -> np.ndarray:
    """``C (I - zA)^-1`` as a row vector."""
    n = sys.N + 1
    return np.linalg.solve((np.eye(n) - z * sys.A).T, sys.C.ravel()).T


def eval_Sq(sys: RealizationSystem, z: complex):
    """``S(z) = D + z C (I - zA)^-1 B``; a scalar when the defect rank is one."""
    n = sys.N + 1
    M = np.eye(n) - complex(z) * sys.A
    try:
        x = np.linalg.solve(M, sys.B)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"resolvent is singular at z = {z}") from exc
    S = sys.D + complex(z) * (sys.C @ x)
    if S.shape == (1, 1):
        return complex(S[0, 0])
    return S


def verify_schur_kernel(sys: RealizationSystem, z: complex, w: complex) -> float:
    """Relative residual of ``(1 - S(z)S(w)*)/(1 - z conj(w)) = C(I-zA)^-1 ((I-wA)^-1)* C*``."""
    z, w = complex(z), complex(w)
    Sz, Sw = eval_Sq(sys, z), eval_Sq(sys, w)
    Sz = np.atleast_2d(Sz)
    Sw = np.atleast_2d(Sw)
    lhs = (np.eye(Sz.shape[0]) - Sz @ Sw.conj().T) / (1.0 - z * w.conjugate())
    uz, uw = _resolvent_row(sys, z), _resolvent_row(sys, w)
    rhs = complex(uz @ uw.conj())
    return float(abs(lhs[0, 0] - rhs)) / max(1.0, abs(rhs))


def schur_grid(n: int = 10, rmax: float = 0.95) -> list[complex]:
    """``n`` points on a polar grid in the closed disk of radius ``rmax``."""
    return [rmax * (k + 1) / n * cmath.exp(2j * math.pi * k * 0.618034) for k in range(n)]


def verify_realization(ctx: QContext, N: int | None = None, seed: int = 0) -> Report:
    """Co-isometry, Schur kernel identity on a 10x10 grid, contractivity and phase invariance."""
    sys = build_realization(ctx, N)
    co = coisometry_residual(sys)
    col = column_isometry_residual(sys)
    grid = schur_grid()
    kernel = max(verify_schur_kernel(sys, z, w) for z in grid for w in grid)

    rng = np.random.default_rng(seed)
    phases = [cmath.exp(2j * math.pi * rng.uniform()) for _ in range(2)]
    phase_diff = 0.0
    for u in phases:
        rotated = sys.with_phase(u)
        k_rot = max(verify_schur_kernel(rotated, z, w) for z in grid for w in grid)
        phase_diff = max(phase_diff, k_rot)

    # contractivity on a denser polar grid in the closed unit disk
    disk = [r * cmath.exp(2j * math.pi * t / 20) for r in np.linspace(0.0, 1.0, 5)[1:] for t in range(25)]
    smax = max(abs(eval_Sq(sys, z)) for z in disk)
    modulus = max(abs(abs(eval_Sq(sys, z)) - abs(z) ** (sys.N + 1)) for z in disk)

    eig = sys.defect_eigenvalues
    projection_dev = float(np.max(np.minimum(np.abs(eig), np.abs(eig - 1.0))))
    checks = {
        "coisometry": co <= COISOMETRY_TOL,
        "column_isometry": col <= COISOMETRY_TOL,
        "schur_kernel": kernel <= KERNEL_TOL,
        "phase_invariance": phase_diff <= KERNEL_TOL,
        "contractive": smax <= 1.0 + 1e-12,
        "defect_projection": projection_dev <= PSD_TOL,
    }
    details = {
        "checks": checks,
        "column_isometry_residual": col,
        "phase_kernel_residual_max": phase_diff,
        "S_max_on_disk": smax,
        "S_modulus_minus_z_power_max": modulus,
        "defect_projection_deviation": projection_dev,
        "grid": "10x10 points with |z|, |w| <= 0.95",
        "model_note": "transfer function of the truncated model, not of the infinite system",
    }
    extension = {"defect_rank": sys.d, "coisometry_residual": co, "kernel_residual_max": kernel}
    return Report("REALIZATION", ctx.mode, sys.q0, sys.N, 0, all(checks.values()), kernel,
                  details, extension)
