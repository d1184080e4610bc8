"""Truncated power series in ``z`` and the operators acting on them.

Operators are materialised as (N+1) x (N+1) matrices on the monomial basis
``e_n = z^n``; column ``m`` is the image of ``z^m``.  Storage is a sparse
map from ``(row, col)`` to a scalar of the context's domain, which keeps the
exact-mode products of banded operators cheap.

Operators that raise degree lose the coefficient pushed past ``z^N``.  All
identity checks therefore compare only the columns ``0 .. N - margin``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .qnum import QContext, q_factorial, q_int
from .qscalar import QRat, qrat_eval
from .report import Report, format_defect

__all__ = [
    "TruncatedSeries", "SeriesOperator", "SeriesIdentity",
    "identity", "op_R0", "op_Rq", "op_Lambda", "op_Mz", "op_derivative",
    "op_jackson_antiderivative", "op_compose", "op_power", "op_diagonal",
    "verify_series_identity", "coefficient_recovery", "random_polynomial",
    "verify_coefficient_recovery", "compare_operators",
]


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients ``c_0 .. c_N`` of ``sum c_n z^n``.

    ``exact_to`` is the last index whose coefficient is known to be exact for
    the represented function.
    """

    coeffs: tuple
    exact_to: int

    @classmethod
    def from_coeffs(cls, coeffs, ctx: QContext, exact_to: int | None = None) -> TruncatedSeries:
        vals = [ctx.scalar(c) if isinstance(c, int) else c for c in coeffs]
        if len(vals) > ctx.N + 1:
            raise ValueError(f"{len(vals)} coefficients exceed order N = {ctx.N}")
        vals += [ctx.zero] * (ctx.N + 1 - len(vals))
        if not ctx.is_exact:
            vals = [complex(v) for v in vals]
        return cls(tuple(vals), ctx.N if exact_to is None else exact_to)

    @classmethod
    def monomial(cls, n: int, ctx: QContext, coeff=1) -> TruncatedSeries:
        c = [ctx.zero] * (ctx.N + 1)
        c[n] = ctx.scalar(coeff) if isinstance(coeff, int) else coeff
        return cls(tuple(c), ctx.N)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        """Evaluate the truncated polynomial at a numeric ``z`` (Horner)."""
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                               min(self.exact_to, other.exact_to))

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return TruncatedSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
                               min(self.exact_to, other.exact_to))

    def scale(self, c) -> TruncatedSeries:
        return TruncatedSeries(tuple(c * a for a in self.coeffs), self.exact_to)


@dataclass(frozen=True)
class SeriesOperator:
    """Matrix of a linear operator on the truncated monomial basis.

    ``entries`` maps ``(row, col)`` to a nonzero scalar; ``degree_shift`` is
    how far the operator moves degrees (``-1`` for R_q, ``+1`` for M_z).
    """

    N: int
    entries: dict = field(repr=False)
    degree_shift: int = 0
    exact: bool = True

    def entry(self, n: int, m: int):
        v = self.entries.get((n, m))
        if v is None:
            return QRat(0) if self.exact else 0j
        return v

    def matrix(self) -> list[list]:
        """Dense row-major matrix of scalars."""
        return [[self.entry(n, m) for m in range(self.N + 1)] for n in range(self.N + 1)]

    def to_array(self) -> np.ndarray:
        """Dense complex array; exact entries must be evaluated first."""
        if self.exact:
            raise TypeError("exact operator: call evaluate_at(q0) before to_array()")
        out = np.zeros((self.N + 1, self.N + 1), dtype=complex)
        for (n, m), v in self.entries.items():
            out[n, m] = v
        return out

    @classmethod
    def from_array(cls, arr: np.ndarray, degree_shift: int = 0) -> SeriesOperator:
        n = arr.shape[0] - 1
        ent = {(i, j): complex(arr[i, j]) for i, j in zip(*np.nonzero(arr))}
        return cls(n, ent, degree_shift, exact=False)

    def evaluate_at(self, q0: float) -> SeriesOperator:
        """Numeric operator obtained by substituting ``q = q0`` entrywise."""
        if not self.exact:
            return self
        ent = {k: qrat_eval(v, q0) for k, v in self.entries.items()}
        return SeriesOperator(self.N, {k: v for k, v in ent.items() if v}, self.degree_shift, False)

    def column(self, m: int) -> dict[int, object]:
        return {n: v for (n, mm), v in self.entries.items() if mm == m}

    def apply(self, f: TruncatedSeries) -> TruncatedSeries:
        zero = QRat(0) if self.exact else 0j
        out = [zero] * (self.N + 1)
        for (n, m), v in self.entries.items():
            c = f.coeffs[m]
            if c:
                out[n] = out[n] + v * c
        return TruncatedSeries(tuple(out), f.exact_to - max(0, self.degree_shift))

    def _check(self, other: SeriesOperator) -> None:
        if self.N != other.N or self.exact != other.exact:
            raise ValueError("operators live on different truncations or scalar domains")

    def __matmul__(self, other: SeriesOperator) -> SeriesOperator:
        return op_compose(self, other)

    def __add__(self, other: SeriesOperator) -> SeriesOperator:
        self._check(other)
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ent[k] + v if k in ent else v
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return SeriesOperator(self.N, ent, max(self.degree_shift, other.degree_shift), self.exact)

    def __neg__(self) -> SeriesOperator:
        return SeriesOperator(self.N, {k: -v for k, v in self.entries.items()},
                              self.degree_shift, self.exact)

    def __sub__(self, other: SeriesOperator) -> SeriesOperator:
        return self + (-other)

    def scale(self, c) -> SeriesOperator:
        if not c:
            return SeriesOperator(self.N, {}, self.degree_shift, self.exact)
        return SeriesOperator(self.N, {k: c * v for k, v in self.entries.items()},
                              self.degree_shift, self.exact)

    def restricted(self, max_col: int) -> SeriesOperator:
        """Copy keeping only the columns ``0 .. max_col``."""
        return SeriesOperator(self.N, {k: v for k, v in self.entries.items() if k[1] <= max_col},
                              self.degree_shift, self.exact)


def op_compose(A: SeriesOperator, B: SeriesOperator) -> SeriesOperator:
    """Matrix product ``A B`` (apply B first); degree shifts add."""
    A._check(B)
    by_col = defaultdict(list)
    for (i, k), a in A.entries.items():
        by_col[k].append((i, a))
    acc: dict = {}
    for (k, j), b in B.entries.items():
        for i, a in by_col.get(k, ()):
            key = (i, j)
            p = a * b
            acc[key] = acc[key] + p if key in acc else p
    ent = {k: v for k, v in acc.items() if v}
    return SeriesOperator(A.N, ent, A.degree_shift + B.degree_shift, A.exact)


def op_power(A: SeriesOperator, n: int) -> SeriesOperator:
    if n < 0:
        raise ValueError("operator powers need n >= 0")
    out = SeriesOperator(A.N, {(i, i): (QRat(1) if A.exact else 1 + 0j) for i in range(A.N + 1)},
                         0, A.exact)
    for _ in range(n):
        out = op_compose(A, out)
    return out


# -- elementary operators --------------------------------------------------

def _op(ctx: QContext, ent: dict, shift: int) -> SeriesOperator:
    if ctx.is_exact:
        ent = {k: QRat(v) for k, v in ent.items() if v}
    else:
        ent = {k: complex(v) for k, v in ent.items() if v}
    return SeriesOperator(ctx.N, ent, shift, ctx.is_exact)


def identity(ctx: QContext) -> SeriesOperator:
    return _op(ctx, {(n, n): 1 for n in range(ctx.N + 1)}, 0)


def op_diagonal(values, ctx: QContext) -> SeriesOperator:
    """Diagonal operator ``z^n -> values[n] z^n``."""
    return _op(ctx, {(n, n): v for n, v in enumerate(values)}, 0)


def op_R0(ctx: QContext) -> SeriesOperator:
    """Backward shift ``(f(z) - f(0))/z``."""
    return _op(ctx, {(n - 1, n): 1 for n in range(1, ctx.N + 1)}, -1)


def op_Rq(ctx: QContext) -> SeriesOperator:
    """Jackson derivative ``(f(z) - f(qz))/((1-q)z)``: ``z^n -> [n]_q z^(n-1)``.

    At ``q0 = 1`` this is the ordinary derivative.
    """
    return _op(ctx, {(n - 1, n): q_int(n, ctx) for n in range(1, ctx.N + 1)}, -1)


def op_Lambda(ctx: QContext) -> SeriesOperator:
    """Dilation ``f(z) -> f(qz)``."""
    q = ctx.qvar
    return _op(ctx, {(n, n): q**n for n in range(ctx.N + 1)}, 0)


def op_Mz(ctx: QContext) -> SeriesOperator:
    """Multiplication by ``z``; the image of ``z^N`` falls off the truncation."""
    return _op(ctx, {(n + 1, n): 1 for n in range(ctx.N)}, 1)


def op_derivative(ctx: QContext) -> SeriesOperator:
    return _op(ctx, {(n - 1, n): n for n in range(1, ctx.N + 1)}, -1)


def op_jackson_antiderivative(ctx: QContext) -> SeriesOperator:
    """``z^l -> z^(l+1)/[l+1]_q``, the Jackson integral from 0 on monomials."""
    ent = {}
    for l in range(ctx.N):
        ent[(l + 1, l)] = 1 / q_int(l + 1, ctx)
    return _op(ctx, ent, 1)


# -- identity catalog ------------------------------------------------------

class SeriesIdentity(str, Enum):
    Q_COMMUTATOR = "Q_COMMUTATOR"
    ITERATED_POWERS = "ITERATED_POWERS"
    R0_LAMBDA_INTERTWINE = "R0_LAMBDA_INTERTWINE"
    RQ_FACTORED = "RQ_FACTORED"


NUMERIC_RTOL = 1e-12


def compare_operators(lhs: SeriesOperator, rhs: SeriesOperator, max_col: int):
    """Largest defect of ``lhs - rhs`` on columns ``0 .. max_col``.

    Exact mode returns ``(holds, first nonzero defect entry or 0, position)``;
    numeric mode compares ``max |defect|`` against ``NUMERIC_RTOL`` times the
    largest entry magnitude.
    """
    diff = (lhs - rhs).restricted(max_col)
    if lhs.exact:
        if not diff.entries:
            return True, QRat(0), None
        pos = min(diff.entries)
        return False, diff.entries[pos], pos
    scale = 1.0
    for op in (lhs, rhs):
        for (n, m), v in op.entries.items():
            if m <= max_col:
                scale = max(scale, abs(v))
    if not diff.entries:
        return True, 0.0, None
    pos, worst = max(diff.entries.items(), key=lambda kv: abs(kv[1]))
    return abs(worst) <= NUMERIC_RTOL * scale, abs(worst), pos


def _require_q_below_one(ctx: QContext, name: str) -> None:
    if ctx.classical:
        raise ValueError(f"{name} involves 1/(1-q) and is undefined at q = 1")


def verify_series_identity(identity_id, ctx: QContext, degree_margin: int | None = None,
                           n_max: int = 8) -> Report:
    """Check one catalog identity on the truncated basis.

    Catalog:

    * ``Q_COMMUTATOR``: ``R_q M_z - q M_z R_q = I`` (margin 1)
    * ``ITERATED_POWERS``: ``R_q^n = prod_{k=1..n}(1 - q^k Lambda_q) R_0^n / (1-q)^n``
      for ``n = 1 .. n_max`` (margin n)
    * ``R0_LAMBDA_INTERTWINE``: ``R_0 Lambda_q = q Lambda_q R_0`` (margin 0)
    * ``RQ_FACTORED``: ``R_q = (I - q Lambda_q) R_0 / (1-q)`` (margin 0)
    """
    ident = SeriesIdentity(identity_id)
    N = ctx.N
    Rq, R0, Mz, Lam, I = op_Rq(ctx), op_R0(ctx), op_Mz(ctx), op_Lambda(ctx), identity(ctx)
    q = ctx.qvar
    details: dict = {}

    if ident is SeriesIdentity.Q_COMMUTATOR:
        margin = 1 if degree_margin is None else degree_margin
        lhs = Rq @ Mz - (Mz @ Rq).scale(q)
        holds, defect, pos = compare_operators(lhs, I, N - margin)
        details["classical_limit"] = ctx.classical
        return _report(ident.value, ctx, margin, holds, defect, pos, details)

    if ident is SeriesIdentity.R0_LAMBDA_INTERTWINE:
        margin = 0 if degree_margin is None else degree_margin
        holds, defect, pos = compare_operators(R0 @ Lam, (Lam @ R0).scale(q), N - margin)
        return _report(ident.value, ctx, margin, holds, defect, pos, details)

    _require_q_below_one(ctx, ident.value)
    one_minus_q = 1 - q

    if ident is SeriesIdentity.RQ_FACTORED:
        margin = 0 if degree_margin is None else degree_margin
        rhs = ((I - Lam.scale(q)) @ R0).scale(1 / one_minus_q)
        holds, defect, pos = compare_operators(Rq, rhs, N - margin)
        return _report(ident.value, ctx, margin, holds, defect, pos, details)

    # ITERATED_POWERS
    per_n = []
    failures = []
    numeric_worst = 0.0
    Rq_n = R0_n = prod = identity(ctx)
    qk = q
    for n in range(1, n_max + 1):
        Rq_n = Rq @ Rq_n
        R0_n = R0 @ R0_n
        prod = prod @ (I - Lam.scale(qk))
        qk = qk * q
        rhs = (prod @ R0_n).scale(1 / one_minus_q**n)
        margin = n if degree_margin is None else degree_margin
        holds, defect, pos = compare_operators(Rq_n, rhs, N - margin)
        per_n.append({"n": n, "margin": margin, "holds": holds,
                      "max_defect": format_defect(defect)})
        if not holds:
            failures.append((defect, pos))
        if not ctx.is_exact:
            numeric_worst = max(numeric_worst, defect)
    details["per_n"] = per_n
    margin = n_max if degree_margin is None else degree_margin
    if ctx.is_exact:
        defect, pos = failures[0] if failures else (QRat(0), None)
    else:
        defect, pos = numeric_worst, (failures[0][1] if failures else None)
    return _report(ident.value, ctx, margin, not failures, defect, pos, details)


def _report(name, ctx, margin, holds, defect, pos, details) -> Report:
    details = dict(details)
    details["checked_columns"] = [0, ctx.N - margin]
    if pos is not None:
        details["defect_position"] = list(pos)
    return Report(identity=name, mode=ctx.mode, q=ctx.q, N=ctx.N, margin=margin,
                  holds=bool(holds), max_defect=format_defect(defect), details=details)


def coefficient_recovery(f: TruncatedSeries, ctx: QContext) -> list:
    """Coefficients ``C R_q^n f / [n]_q!`` for ``n = 0 .. N``.

    ``C`` is evaluation at the origin.  The result reproduces ``f.coeffs`` for
    every admissible q; the q-dependence cancels exactly.
    """
    Rq = op_Rq(ctx)
    out = []
    g = f
    for n in range(ctx.N + 1):
        out.append(g.coeffs[0] / q_factorial(n, ctx))
        g = Rq.apply(g)
    return out


RECOVERY_TOL = 1e-13


def random_polynomial(degree: int, ctx: QContext, seed: int = 0) -> TruncatedSeries:
    """Random polynomial of the given degree: integer coefficients in exact mode,
    Gaussian complex ones otherwise."""
    if degree > ctx.N:
        raise ValueError(f"degree {degree} exceeds the series order {ctx.N}")
    rng = np.random.default_rng(seed)
    if ctx.is_exact:
        c = [QRat(int(x)) for x in rng.integers(-9, 10, size=degree + 1)]
    else:
        c = [complex(a, b) for a, b in rng.normal(size=(degree + 1, 2))]
    return TruncatedSeries.from_coeffs(c, ctx)


def verify_coefficient_recovery(ctx: QContext, degree: int = 16, seed: int = 0) -> Report:
    """``C R_q^n f / [n]_q!`` reproduces the coefficients of a random polynomial."""
    f = random_polynomial(degree, ctx, seed)
    got = coefficient_recovery(f, ctx)
    if ctx.is_exact:
        bad = [n for n, (a, b) in enumerate(zip(got, f.coeffs)) if a != b]
        holds, defect = not bad, (got[bad[0]] - f.coeffs[bad[0]] if bad else QRat(0))
    else:
        defect = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(got, f.coeffs))
        holds = defect <= RECOVERY_TOL
    details = {"degree": degree, "seed": seed, "tolerance": None if ctx.is_exact else RECOVERY_TOL}
    return Report("COEFFICIENT_RECOVERY", ctx.mode, ctx.q, ctx.N, 0, holds,
                  format_defect(defect), details)
