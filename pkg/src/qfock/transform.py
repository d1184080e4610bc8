"""Jackson integrals, the q-integral transform M_q and the radial measure.

Grid functions live on ``x_k = q^(k+1)/(1-q)``, ``k = 0 .. K``, the points
where ``M_q f(s) = int_0^{1/(1-q)} t^(s-1) f(qt) d_qt`` samples ``f``:

    M_q f(s) = sum_k q^k (q^k/(1-q))^(s-1) f(x_k)

M_q is only evaluated at positive integers ``s``; a non-integer power of
``t`` would need a branch convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DivergenceError, GridMismatchError, UnsupportedError
from .qnum import QContext, Truncated, pochhammer, q_factorial, qpochhammer_inf
from .report import Report

__all__ = [
    "GridFunction", "grid_points", "grid_length", "grid_function", "eq_inverse_grid",
    "jackson_integral", "mq_transform", "grid_convolution", "density_moment_check",
    "MeasureSeries", "measure_series", "measure_inner_product", "moment_check",
    "convolution_transform", "verify_transform",
]

MIN_TERMS = 64
MAX_TERMS = 200_000


def _require_q(ctx: QContext, what: str) -> float:
    q0 = ctx.require_numeric(what)
    if q0 >= 1.0:
        raise UnsupportedError(f"{what} needs q < 1")
    return q0


def grid_length(ctx: QContext) -> int:
    """Last grid index K: ``q^K/(1-q)`` is below the tail tolerance, with headroom.

    The grid always holds more than ``MIN_TERMS`` points so the stopping rule
    of :func:`mq_transform` has room to fire on grids without a rule.
    """
    q0 = _require_q(ctx, "q-grid")
    K = 0
    if q0 > 0.0:
        K = math.ceil(math.log(ctx.tail_tol * (1.0 - q0)) / math.log(q0))
    return max(MIN_TERMS, K) + 16


def grid_points(ctx: QContext, K: int | None = None) -> np.ndarray:
    q0 = _require_q(ctx, "q-grid")
    K = grid_length(ctx) if K is None else K
    k = np.arange(K + 1)
    return q0 ** (k + 1) / (1.0 - q0)


@dataclass(frozen=True)
class GridFunction:
    """Samples ``f(x_k)`` on the q-grid, with the rule that produced them if known."""

    q0: float
    values: np.ndarray
    rule: Callable | None = None

    @property
    def K(self) -> int:
        return len(self.values) - 1

    def points(self) -> np.ndarray:
        k = np.arange(self.K + 1)
        return self.q0 ** (k + 1) / (1.0 - self.q0)

    def extended(self, K: int) -> GridFunction:
        if K <= self.K:
            return self
        if self.rule is None:
            raise DivergenceError(f"grid of length {self.K + 1} is too short and has no rule to extend it")
        q0 = self.q0
        k = np.arange(K + 1)
        pts = q0 ** (k + 1) / (1.0 - q0)
        return GridFunction(q0, np.array([self.rule(x) for x in pts], dtype=complex), self.rule)


def grid_function(rule: Callable, ctx: QContext, K: int | None = None) -> GridFunction:
    pts = grid_points(ctx, K)
    return GridFunction(ctx.q, np.array([rule(x) for x in pts], dtype=complex), rule)


def eq_inverse_grid(ctx: QContext, K: int | None = None) -> GridFunction:
    """``1/E_q(x) = (x(1-q); q)_inf`` on the grid, via the product form."""
    q0 = _require_q(ctx, "1/E_q")

    def rule(x):
        return pochhammer(x * (1.0 - q0), math.inf, ctx)

    return grid_function(rule, ctx, K)


# -- Jackson integral --------------------------------------------------------

def jackson_integral(f: Callable, a: float, ctx: QContext) -> Truncated:
    """``int_0^a f(x) d_qx = (1-q) a sum_k q^k f(q^k a)``.

    Terms are added until the geometric tail estimate ``|t_k| q/(1-q)`` falls
    below ``tail_tol`` times the partial sum.  If the term sizes keep growing
    past the minimum term count the sum is declared divergent.
    """
    q0 = _require_q(ctx, "Jackson integral")
    total = 0j
    prev = math.inf
    growth = 0
    qk = 1.0
    for k in range(MAX_TERMS):
        t = qk * complex(f(qk * a))
        total += t
        size = abs(t)
        tail = size * q0 / (1.0 - q0)
        if tail <= ctx.tail_tol * abs(total) or (size == 0.0 and k >= MIN_TERMS):
            return Truncated((1.0 - q0) * a * total, k + 1, (1.0 - q0) * abs(a) * tail)
        growth = growth + 1 if size > prev else 0
        if growth > MIN_TERMS:
            raise DivergenceError(f"Jackson sum terms grew for {growth} consecutive steps")
        prev = size
        qk *= q0
    raise DivergenceError(f"Jackson sum did not settle within {MAX_TERMS} terms")


# -- M_q -------------------------------------------------------------------

def mq_transform(f: GridFunction, s: int, ctx: QContext) -> Truncated:
    """``M_q f(s)`` at a positive integer ``s``.

    The sum stops at the first ``k >= 64`` where the geometric bound on the
    remainder, built from the supremum of ``|f|`` over the remaining grid,
    drops below ``tail_tol`` times the partial sum.
    """
    q0 = _require_q(ctx, "M_q")
    if int(s) != s or s < 1:
        raise ValueError(f"M_q is evaluated at positive integers only, got {s}")
    if f.q0 != q0:
        raise GridMismatchError(f"grid built for q = {f.q0}, context has q = {q0}")
    s = int(s)
    K = f.K
    for _ in range(8):
        vals = f.values
        sup = np.maximum.accumulate(np.abs(vals)[::-1])[::-1]
        k = np.arange(K + 1)
        factor = q0**k * (q0**k / (1.0 - q0)) ** (s - 1)
        terms = factor * vals
        partial = np.cumsum(terms)
        ratio = q0**s
        bound = np.empty(K + 1)
        # remainder after index k is at most factor_{k+1} sup_{k+1} / (1 - q^s)
        bound[:-1] = factor[1:] * sup[1:] / (1.0 - ratio)
        bound[-1] = math.inf
        enough = k >= MIN_TERMS - 1
        ok = ((bound <= ctx.tail_tol * np.abs(partial)) | (bound == 0.0)) & enough
        hit = np.flatnonzero(ok)
        if hit.size:
            j = int(hit[0])
            return Truncated(complex(partial[j]), j + 1, float(bound[j]))
        if f.rule is None:
            raise DivergenceError("M_q sum did not reach the tail tolerance on the given grid")
        K = 2 * K
        f = f.extended(K)
    raise DivergenceError("M_q sum did not reach the tail tolerance")


def grid_convolution(f1: GridFunction, f2: GridFunction, ctx: QContext | None = None) -> GridFunction:
    """``h_m = sum_{k<=m} f1(x_k) f2(x_{m-k})`` on the common grid."""
    if f1.q0 != f2.q0 or f1.K != f2.K:
        raise GridMismatchError(
            f"grids differ: (q={f1.q0}, K={f1.K}) vs (q={f2.q0}, K={f2.K})")
    if ctx is not None and ctx.q != f1.q0:
        raise GridMismatchError(f"grid built for q = {f1.q0}, context has q = {ctx.q}")
    h = np.convolve(f1.values, f2.values)[: f1.K + 1]
    return GridFunction(f1.q0, h)


def convolution_transform(rule1: Callable, rule2: Callable, s: int, ctx: QContext):
    """``M_q(f1 o f2)(s)`` and the convolved grid function.

    ``h_m`` grows like ``m + 1`` for bounded factors, so the grid is doubled
    until the M_q stopping rule fires inside it.
    """
    K = grid_length(ctx)
    for _ in range(6):
        h = grid_convolution(grid_function(rule1, ctx, K), grid_function(rule2, ctx, K), ctx)
        try:
            return mq_transform(h, s, ctx), h
        except DivergenceError:
            K *= 2
    raise DivergenceError("convolution transform did not reach the tail tolerance")


# -- moment identities -------------------------------------------------------

def moment_check(n: int, ctx: QContext) -> dict:
    """``M_q(1/E_q)(n+1)`` against ``[n]_q!`` and the closed Pochhammer series."""
    q0 = _require_q(ctx, "moment check")
    value = mq_transform(eq_inverse_grid(ctx), n + 1, ctx).value.real
    expected = float(q_factorial(n, ctx))
    closed = _closed_moment(n, q0, ctx.tail_tol)
    return {"n": n, "value": value, "expected": expected,
            "rel_err": abs(value - expected) / expected,
            "closed_form": closed, "closed_rel_err": abs(closed - expected) / expected}


def _closed_moment(n: int, q0: float, tol: float) -> float:
    """``(q;q)_inf/(1-q)^n sum_k q^((n+1)k)/(q;q)_k``."""
    total, term, k = 0.0, 1.0, 0
    while True:
        total += term
        k += 1
        term *= q0 ** (n + 1) / (1.0 - q0**k)
        if term <= tol * total * (1.0 - q0 ** (n + 1)) or k > MAX_TERMS:
            break
    return qpochhammer_inf(q0, q0, tol * 1e-2).value.real / (1.0 - q0) ** n * total


def density_moment_check(n: int, ctx: QContext, tol: float = 1e-8) -> Report:
    """``(1/(1-q))^n M_q(E^-1 o E^-1)(n+1)`` against ``([n]_q!)^2``.

    The convolution on the grid is cross-checked against the direct double
    sum ``sum_m q^m (q^m/(1-q))^n sum_{k<=m} (q^{k+1};q)_inf (q^{m+1-k};q)_inf``.
    """
    q0 = _require_q(ctx, "density moment check")
    if n < 0 or n > 10:
        raise ValueError(f"density moments are checked for 0 <= n <= 10, got {n}")
    g_rule = eq_inverse_grid(ctx, 0).rule
    mq, h = convolution_transform(g_rule, g_rule, n + 1, ctx)
    value = mq.value.real / (1.0 - q0) ** n
    expected = float(q_factorial(n, ctx)) ** 2
    rel = abs(value - expected) / expected

    # direct double sum from fresh Pochhammer products
    K = h.K
    poch = [qpochhammer_inf(q0 ** (j + 1), q0, ctx.tail_tol).value.real for j in range(K + 1)]
    direct = 0.0
    for m in range(K + 1):
        inner = math.fsum(poch[k] * poch[m - k] for k in range(m + 1))
        direct += q0**m * (q0**m / (1.0 - q0)) ** n * inner
    direct /= (1.0 - q0) ** n
    cross = abs(direct - value) / expected
    holds = rel <= tol and cross <= tol
    details = {"n": n, "value": value, "expected": expected, "rel_err": rel,
               "pochhammer_form": direct, "pochhammer_form_rel_diff": cross,
               "terms": mq.terms, "tolerance": tol}
    return Report("DENSITY_MOMENT", ctx.mode, ctx.q, h.K, 0, holds, rel, details)


# -- radial measure ----------------------------------------------------------

@dataclass(frozen=True)
class MeasureSeries:
    """Atoms of the radial part of the measure: radii ``r_k`` with masses ``weights[k]``."""

    q0: float
    radii: np.ndarray
    weights: np.ndarray

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)


def measure_series(ctx: QContext, K: int | None = None) -> MeasureSeries:
    """``r_k = q^(k/2)/sqrt(1-q)`` with masses ``(q;q)_inf q^k/(q;q)_k``."""
    q0 = _require_q(ctx, "measure")
    K = grid_length(ctx) if K is None else K
    qq_inf = qpochhammer_inf(q0, q0, ctx.tail_tol * 1e-2).value.real
    w = np.empty(K + 1)
    qk_poch = 1.0
    for k in range(K + 1):
        if k:
            qk_poch *= 1.0 - q0**k
        w[k] = qq_inf * q0**k / qk_poch
    k = np.arange(K + 1)
    radii = np.sqrt(q0**k / (1.0 - q0))
    return MeasureSeries(q0, radii, w)


def measure_inner_product(n: int, m: int, ctx: QContext) -> float:
    """``<z^n, z^m>`` under the measure; the angular integral gives ``delta_nm``.

    The radial series ``sum_k mass_k r_k^(2n)`` is summed with a geometric
    tail bound from the (decreasing) ratio ``q^(n+1)/(1-q^(k+1))``.
    """
    q0 = _require_q(ctx, "measure inner product")
    if n != m:
        return 0.0
    qq_inf = qpochhammer_inf(q0, q0, ctx.tail_tol * 1e-2).value.real
    total, term, k = 0.0, 1.0, 0
    base = q0 ** (n + 1)
    while True:
        total += term
        r = base / (1.0 - q0 ** (k + 1))
        term *= r
        k += 1
        if r < 1.0 and term / (1.0 - r) <= ctx.tail_tol * total:
            break
        if k > MAX_TERMS:
            raise DivergenceError("radial measure series did not settle")
    return qq_inf * total / (1.0 - q0) ** n


# -- suite -------------------------------------------------------------------

MOMENT_TOL = 1e-10
DENSITY_TOL = 1e-8


def _poly_rule(x):
    return 1.0 + x - 0.5 * x * x


def _one_rule(x):
    return 1.0


def verify_transform(ctx: QContext, n_max: int = 10, density_n_max: int = 8) -> list[Report]:
    """Moment, measure, density, convolution and Jackson checks at one numeric q."""
    q0 = _require_q(ctx, "transform suite")
    reports = []

    rows = [moment_check(n, ctx) for n in range(n_max + 1)]
    worst = max(max(r["rel_err"], r["closed_rel_err"]) for r in rows)
    reports.append(Report("MOMENT_EQ_INVERSE", ctx.mode, q0, n_max, 0, worst <= MOMENT_TOL, worst,
                          {"per_n": rows, "tolerance": MOMENT_TOL}))

    meas = []
    for n in range(n_max + 1):
        v = measure_inner_product(n, n, ctx)
        e = float(q_factorial(n, ctx))
        meas.append({"n": n, "value": v, "expected": e, "rel_err": abs(v - e) / e})
    off = max(abs(measure_inner_product(n, n + 1, ctx)) for n in range(n_max))
    worst = max(r["rel_err"] for r in meas)
    reports.append(Report("MEASURE_MOMENT", ctx.mode, q0, n_max, 0,
                          worst <= MOMENT_TOL and off == 0.0, worst,
                          {"per_n": meas, "off_diagonal_max": off, "tolerance": MOMENT_TOL}))

    ms = measure_series(ctx)
    mass_err = abs(ms.total_mass - 1.0)
    reports.append(Report("MEASURE_MASS", ctx.mode, q0, len(ms.weights) - 1, 0,
                          mass_err <= 100 * ctx.tail_tol, mass_err,
                          {"total_mass": ms.total_mass, "atoms": len(ms.weights)}))

    dens = [density_moment_check(n, ctx, DENSITY_TOL) for n in range(density_n_max + 1)]
    worst = max(max(r.details["rel_err"], r.details["pochhammer_form_rel_diff"]) for r in dens)
    reports.append(Report("DENSITY_MOMENT", ctx.mode, q0, density_n_max, 0,
                          all(r.holds for r in dens), worst,
                          {"per_n": [r.details for r in dens], "tolerance": DENSITY_TOL}))

    rules = {"one": _one_rule, "eq_inverse": eq_inverse_grid(ctx, 0).rule, "poly": _poly_rule}
    pairs = [("one", "one"), ("one", "eq_inverse"), ("eq_inverse", "poly"), ("poly", "poly")]
    conv = []
    for a, b in pairs:
        for n in range(density_n_max + 1):
            lhs = (mq_transform(grid_function(rules[a], ctx), n + 1, ctx).value
                   * mq_transform(grid_function(rules[b], ctx), n + 1, ctx).value)
            rhs = convolution_transform(rules[a], rules[b], n + 1, ctx)[0].value / (1.0 - q0) ** n
            conv.append(abs(lhs - rhs) / max(abs(lhs), 1e-300))
    worst = max(conv)
    reports.append(Report("CONVOLUTION_IDENTITY", ctx.mode, q0, density_n_max, 0,
                          worst <= MOMENT_TOL, worst,
                          {"pairs": [f"{a}*{b}" for a, b in pairs], "tolerance": MOMENT_TOL}))

    jack = []
    for ell in range(9):
        for a in (0.5, 1.0, 2.0):
            got = jackson_integral(lambda x, ell=ell: x**ell, a, ctx).value.real
            want = a ** (ell + 1) * (1.0 - q0) / (1.0 - q0 ** (ell + 1))
            jack.append(abs(got - want) / abs(want))
    worst = max(jack)
    reports.append(Report("JACKSON_MONOMIAL", ctx.mode, q0, 8, 0, worst <= MOMENT_TOL, worst,
                          {"formula": "int_0^a x^l d_qx = a^(l+1)/[l+1]_q", "tolerance": MOMENT_TOL}))
    return reports
