"""q-integers, q-factorials, q-Pochhammer symbols and the q-exponential.

Every routine takes a :class:`QContext` that selects the scalar domain:
exact rational functions of ``q`` (:class:`~qfock.qscalar.QRat`) or floating
point values at a fixed ``q0`` in ``[0, 1]``.  ``q0 = 1`` is the classical
limit and goes through dedicated branches (``n``, ``n!``, ``exp``) instead
of limits of expressions singular in ``1 - q``.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import mpmath

from .errors import DomainError, UnsupportedError
from .qscalar import QPoly, QRat

DEFAULT_TAIL_TOL = 1e-14
DEFAULT_EXACT_ORDER = 32
DEFAULT_NUMERIC_ORDER = 64

# private multiprecision context: series summation needs guard digits when
# the terms cancel (E_q at large negative arguments), and a private context
# avoids mutating mpmath's global precision
_MP = mpmath.MPContext()
_MP.dps = 40

# series stop once the certified tail is this much below tail_tol, so the
# single rounding to double dominates the truncation error
SERIES_GUARD = 1e-3


def default_tail_tol() -> float:
    """Tail tolerance from ``QFOCK_TAIL_TOL`` or the built-in default."""
    raw = os.environ.get("QFOCK_TAIL_TOL")
    if not raw:
        return DEFAULT_TAIL_TOL
    tol = float(raw)
    if not (0.0 < tol < 1.0):
        raise ValueError(f"QFOCK_TAIL_TOL must lie in (0, 1), got {raw!r}")
    return tol


@dataclass(frozen=True)
class QContext:
    """Scalar mode, truncation order and numeric tail tolerance.

    ``q is None`` selects exact mode.  Use :meth:`exact` / :meth:`numeric`
    rather than the constructor so the defaults are applied consistently.
    """

    q: float | None = None
    N: int = DEFAULT_EXACT_ORDER
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.q is not None and not (0.0 <= self.q <= 1.0):
            raise DomainError(f"q must lie in [0, 1], got {self.q}")
        if self.N < 0:
            raise ValueError(f"series order must be nonnegative, got {self.N}")
        if not (0.0 < self.tail_tol < 1.0):
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol}")

    @classmethod
    def exact(cls, N: int = DEFAULT_EXACT_ORDER) -> QContext:
        return cls(None, N, default_tail_tol())

    @classmethod
    def numeric(cls, q0: float, N: int = DEFAULT_NUMERIC_ORDER,
                tail_tol: float | None = None) -> QContext:
        return cls(float(q0), N, default_tail_tol() if tail_tol is None else tail_tol)

    @property
    def is_exact(self) -> bool:
        return self.q is None

    @property
    def mode(self) -> str:
        return "exact" if self.q is None else "numeric"

    @property
    def classical(self) -> bool:
        return self.q == 1.0

    def with_order(self, N: int) -> QContext:
        return QContext(self.q, N, self.tail_tol)

    def scalar(self, x):
        """Lift an int or Fraction into this context's scalar domain."""
        if self.q is None:
            return QRat(x)
        return complex(x)

    @property
    def zero(self):
        return self.scalar(0)

    @property
    def one(self):
        return self.scalar(1)

    @property
    def qvar(self):
        """``q`` itself: the indeterminate in exact mode, ``q0`` otherwise."""
        if self.q is None:
            return QRat(QPoly([0, 1]))
        return self.q

    def require_numeric(self, what: str) -> float:
        if self.q is None:
            raise UnsupportedError(f"{what} needs a numeric q")
        return self.q


# -- q-integers and factorials ---------------------------------------------

@lru_cache(maxsize=None)
def _exact_q_int(n: int) -> QRat:
    return QRat(QPoly([1] * n))


@lru_cache(maxsize=None)
def _exact_q_factorial(n: int) -> QRat:
    if n == 0:
        return QRat(1)
    return QRat._trusted(_exact_q_factorial(n - 1).num * _exact_q_int(n).num)


def q_int(n: int, ctx: QContext):
    """``[n]_q = 1 + q + ... + q^(n-1)``, with ``[0]_q = 0``.

    Exact mode returns a :class:`QRat`; numeric mode a float.
    """
    if n < 0:
        raise ValueError(f"q-integer needs n >= 0, got {n}")
    if ctx.q is None:
        return _exact_q_int(n)
    q0 = ctx.q
    if q0 == 1.0:
        return float(n)
    return (1.0 - q0**n) / (1.0 - q0)


def q_factorial(n: int, ctx: QContext):
    """``[n]_q! = [1]_q [2]_q ... [n]_q`` with ``[0]_q! = 1``."""
    if n < 0:
        raise ValueError(f"q-factorial needs n >= 0, got {n}")
    if ctx.q is None:
        return _exact_q_factorial(n)
    q0 = ctx.q
    if q0 == 1.0:
        return float(math.factorial(n))
    out = 1.0
    for k in range(1, n + 1):
        out *= (1.0 - q0**k) / (1.0 - q0)
    return out


# -- Pochhammer ------------------------------------------------------------

class Truncated(NamedTuple):
    """A truncated infinite sum or product with its bookkeeping."""

    value: complex
    terms: int
    tail: float


def qpochhammer_inf(a: complex, q0: float, tol: float) -> Truncated:
    """``(a; q0)_inf``, stopping once ``|a q0^j| < tol``.

    ``terms`` is the number of factors used and ``tail`` the size of the
    first omitted perturbation ``|a q0^j|``.
    """
    if not (0.0 <= q0 < 1.0):
        raise UnsupportedError(f"infinite q-Pochhammer needs 0 <= q < 1, got {q0}")
    prod = 1.0 + 0j
    x = complex(a)
    j = 0
    while abs(x) >= tol:
        prod *= 1.0 - x
        x *= q0
        j += 1
        if j > 10_000_000:
            raise UnsupportedError("q-Pochhammer product failed to settle")
    return Truncated(prod, j, abs(x))


def pochhammer(a, n, ctx: QContext):
    """``(a; q)_n = prod_{j<n} (1 - a q^j)``; ``n`` may be ``math.inf``.

    The infinite product is only available numerically with ``q0 < 1``.
    """
    if n == math.inf:
        if ctx.q is None:
            raise UnsupportedError("(a;q)_inf is not a rational function of q")
        if ctx.q == 1.0:
            raise UnsupportedError("(a;q)_inf diverges or vanishes at q = 1")
        return qpochhammer_inf(a, ctx.q, ctx.tail_tol).value
    if n < 0 or int(n) != n:
        raise ValueError(f"Pochhammer length must be a nonnegative integer, got {n}")
    if ctx.q is None:
        a = QRat(a)
        q = ctx.qvar
        out = QRat(1)
        qj = QRat(1)
        for _ in range(int(n)):
            out = out * (1 - a * qj)
            qj = qj * q
        return out
    out = 1.0 + 0j
    for j in range(int(n)):
        out *= 1.0 - a * ctx.q**j
    return out


# -- q-exponential ---------------------------------------------------------

def _check_eq_domain(z: complex, q0: float) -> None:
    if q0 < 1.0 and abs(z) * (1.0 - q0) >= 1.0:
        raise DomainError(
            f"|z| = {abs(z):.17g} is outside the disk of radius 1/(1-q) = {1.0 / (1.0 - q0):.17g}")


def mp_kernel_series(x: complex, q0: float, power: int, tol: float) -> Truncated:
    """``sum_k x^k / ([k]_q!)^power`` in extended precision.

    Summation stops once the geometric tail bound ``|t_k| r/(1-r)`` with the
    current (decreasing) term ratio ``r = |x| / [k+1]_q^power`` drops below
    ``SERIES_GUARD * tol`` times the running sum.  The result is rounded to
    double once.
    """
    tol = tol * SERIES_GUARD
    mp = _MP
    xm = mp.mpc(x)
    ax = abs(xm)
    q = mp.mpf(q0)
    total = mp.mpc(1)
    term = mp.mpc(1)
    qk = mp.mpf(1)
    k = 0
    while True:
        qk *= q
        nxt = (1 - qk) / (1 - q) if q0 < 1.0 else mp.mpf(k + 1)
        den = nxt**power
        r = ax / den
        if term == 0 or (r < 1 and abs(term) * r / (1 - r) <= tol * abs(total)):
            tail = float(abs(term) * r / (1 - r)) if r < 1 else 0.0
            return Truncated(complex(total), k + 1, tail)
        term = term * xm / den
        total += term
        k += 1
        if k > 1_000_000:
            raise DomainError("kernel series did not settle; argument too close to the radius")


def eq_exp_summation(z, ctx: QContext, method: str = "series") -> Truncated:
    """:func:`eq_exp` together with truncation metadata."""
    q0 = ctx.require_numeric("E_q")
    z = complex(z)
    if q0 == 1.0:
        return Truncated(cmath.exp(z), 0, 0.0)
    _check_eq_domain(z, q0)
    if method == "series":
        return mp_kernel_series(z, q0, 1, ctx.tail_tol)
    if method == "product":
        p = qpochhammer_inf(z * (1.0 - q0), q0, ctx.tail_tol)
        return Truncated(1.0 / p.value, p.terms, p.tail)
    raise ValueError(f"unknown method {method!r}; use 'series' or 'product'")


def eq_exp(z, ctx: QContext, method: str = "series") -> complex:
    """The q-exponential ``E_q(z) = sum z^k/[k]_q! = 1/(z(1-q); q)_inf``.

    Defined for ``|z| < 1/(1-q0)`` (the whole plane at ``q0 = 1``, where it
    is ``exp``).  ``method`` picks the power series or the infinite product.
    """
    return eq_exp_summation(z, ctx, method).value


def eq_functional_check(z, ctx: QContext, method: str = "series") -> float:
    """``|E_q(qz) - (1 - z(1-q)) E_q(z)|``; zero up to rounding."""
    q0 = ctx.require_numeric("E_q")
    z = complex(z)
    if q0 < 1.0:
        _check_eq_domain(z, q0)
    lhs = eq_exp(q0 * z, ctx, method)
    rhs = (1.0 - z * (1.0 - q0)) * eq_exp(z, ctx, method)
    return abs(lhs - rhs)
