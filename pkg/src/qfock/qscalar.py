"""Exact scalars in the indeterminate ``q``.

:class:`QPoly` is a univariate polynomial with rational coefficients and
:class:`QRat` a canonical quotient of two of them.  Both are immutable and
hashable; equality is structural on canonical forms, so checking an operator
identity reduces to comparing entries with ``==``.

Internally a polynomial is stored as integer coefficients over one positive
common denominator.  Large products use Kronecker substitution so that the
q-factorials met at moderate orders (degree ~500 at n = 32) stay cheap.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

__all__ = ["QPoly", "QRat", "Q", "qpoly_arith", "qrat_eval"]

_KRONECKER_MIN = 24


# -- integer polynomial kernels (coefficient lists, index = power) ----------

def _strip(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _content(c) -> int:
    g = 0
    for x in c:
        g = gcd(g, x)
        if g == 1:
            break
    return g


def _primitive(c: list[int]) -> list[int]:
    """Divide out the content and make the leading coefficient positive."""
    g = _content(c)
    if c[-1] < 0:
        g = -g
    if g == 1:
        return list(c)
    return [x // g for x in c]


def _pack(c: list[int], bits: int) -> int:
    acc = 0
    for x in reversed(c):
        acc = (acc << bits) + x
    return acc


def _unpack(value: int, bits: int, n: int) -> list[int]:
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    full = 1 << bits
    out = []
    for _ in range(n):
        d = value & mask
        if d >= half:
            d -= full
        out.append(d)
        value = (value - d) >> bits
    return out


def _mul_int(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    la, lb = len(a), len(b)
    if la < _KRONECKER_MIN or lb < _KRONECKER_MIN:
        res = [0] * (la + lb - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    res[i + j] += x * y
        return _strip(res)
    # slot width must hold the largest possible |coefficient| plus a sign bit
    ma = max(abs(x) for x in a).bit_length()
    mb = max(abs(x) for x in b).bit_length()
    bits = ma + mb + min(la, lb).bit_length() + 2
    res = _unpack(_pack(a, bits) * _pack(b, bits), bits, la + lb - 1)
    return _strip(res)


def _exact_div_int(a: list[int], b: list[int]) -> list[int] | None:
    """Quotient ``a / b`` in Z[q], or None when b does not divide a.

    With ``b`` primitive this also decides divisibility over Q (Gauss).
    """
    db = len(b) - 1
    da = len(a) - 1
    if da < db:
        return None
    r = list(a)
    lb = b[-1]
    quo = [0] * (da - db + 1)
    for k in range(da - db, -1, -1):
        c = r[k + db]
        if c:
            qc, rem = divmod(c, lb)
            if rem:
                return None
            quo[k] = qc
            for j in range(db + 1):
                r[k + j] -= qc * b[j]
    if any(r[:db]):
        return None
    return quo


def _prem(a: list[int], b: list[int]) -> list[int]:
    r = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [lb * x for x in r]
        for j in range(db + 1):
            r[shift + j] -= lr * b[j]
        _strip(r)
        if r:
            r = _primitive(r)
    return r


def _gcd_int(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd of two nonzero integer polynomials (primitive PRS)."""
    if len(a) < len(b):
        a, b = b, a
    a, b = _primitive(a), _primitive(b)
    while b:
        if len(b) == 1:
            return [1]
        r = _prem(a, b)
        a, b = b, (_primitive(r) if r else r)
    return _primitive(a)


def _eval_fraction(c: list[int], x: Fraction) -> Fraction:
    p, s = x.numerator, x.denominator
    d = len(c) - 1
    acc = 0
    for i in range(d, -1, -1):
        acc = acc * p + c[i] * s ** (d - i)
    return Fraction(acc, s**d) if d >= 0 else Fraction(0)


# -- QPoly -----------------------------------------------------------------

class QPoly:
    """Polynomial in ``q`` with exact rational coefficients.

    ``QPoly([1, 2, 1])`` is ``1 + 2q + q^2``; ``coeffs[j]`` holds the
    coefficient of ``q^j``.  Trailing zeros are stripped, so the zero
    polynomial has no coefficients.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, coeffs=()):
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        self._set([int(c * den) for c in fr], den)

    def _set(self, num: list[int], den: int) -> None:
        _strip(num)
        if not num:
            self._num, self._den = (), 1
            return
        if den < 0:
            num, den = [-x for x in num], -den
        g = gcd(_content(num), den)
        if g != 1:
            num = [x // g for x in num]
            den //= g
        self._num, self._den = tuple(num), den

    @classmethod
    def _from_ints(cls, num: list[int], den: int = 1) -> QPoly:
        obj = cls.__new__(cls)
        obj._set(list(num), den)
        return obj

    @classmethod
    def monomial(cls, power: int, coeff=1) -> QPoly:
        return cls([0] * power + [coeff])

    # -- inspection

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self._den) for x in self._num)

    @property
    def degree(self) -> int:
        """Degree in q; -1 for the zero polynomial."""
        return len(self._num) - 1

    def is_zero(self) -> bool:
        return not self._num

    def is_constant(self) -> bool:
        return len(self._num) <= 1

    @property
    def leading(self) -> Fraction:
        return Fraction(self._num[-1], self._den) if self._num else Fraction(0)

    def _content_primitive(self) -> tuple[Fraction, list[int]]:
        prim = _primitive(list(self._num))
        return Fraction(self._num[-1], self._den) / prim[-1], prim

    # -- arithmetic

    @staticmethod
    def _coerce(other) -> QPoly | None:
        if isinstance(other, QPoly):
            return other
        if isinstance(other, (int, Rational)):
            return QPoly([other])
        return None

    def __add__(self, other):
        o = QPoly._coerce(other)
        if o is None:
            return NotImplemented
        if not o._num:
            return self
        if not self._num:
            return o
        l = self._den * o._den // gcd(self._den, o._den)
        fa, fb = l // self._den, l // o._den
        a, b = self._num, o._num
        n = max(len(a), len(b))
        res = [(a[i] * fa if i < len(a) else 0) + (b[i] * fb if i < len(b) else 0)
               for i in range(n)]
        return QPoly._from_ints(res, l)

    __radd__ = __add__

    def __neg__(self):
        return QPoly._from_ints([-x for x in self._num], self._den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = QPoly._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = QPoly._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = QPoly._coerce(other)
        if o is None:
            return NotImplemented
        return QPoly._from_ints(_mul_int(list(self._num), list(o._num)),
                                self._den * o._den)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return QRat(1) / QRat(self) ** (-n)
        result, base = QPoly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        return QRat(self) / other

    def __rtruediv__(self, other):
        return QRat(other) / QRat(self)

    def exact_quotient(self, other: QPoly) -> QPoly | None:
        """``self / other`` when the division is exact, else None."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self
        ca, pa = self._content_primitive()
        cb, pb = other._content_primitive()
        quo = _exact_div_int(pa, pb)
        if quo is None:
            return None
        c = ca / cb
        return QPoly._from_ints([x * c.numerator for x in quo], c.denominator)

    # -- evaluation

    def __call__(self, x):
        """Evaluate at ``x``; exact for int/Fraction, Horner in floating point otherwise."""
        if isinstance(x, (int, Rational)):
            return _eval_fraction(list(self._num), Fraction(x)) / self._den
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def conjugate(self) -> QPoly:
        return self

    # -- comparison / display

    def __eq__(self, other):
        o = QPoly._coerce(other)
        if o is None:
            if isinstance(other, QRat):
                return other == self
            return NotImplemented
        return self._num == o._num and self._den == o._den

    def __hash__(self):
        if len(self._num) <= 1:
            return hash(Fraction(self._num[0], self._den) if self._num else 0)
        return hash((self._num, self._den))

    def __bool__(self):
        return bool(self._num)

    def __repr__(self):
        return f"QPoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return format_qpoly(self)


def format_qpoly(p: QPoly, var: str = "q") -> str:
    """Render with ascending powers, e.g. ``2q+q^2``."""
    if p.is_zero():
        return "0"
    parts = []
    for j, c in enumerate(p.coeffs):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if j == 0:
            body = str(a)
        else:
            mono = var if j == 1 else f"{var}^{j}"
            body = mono if a == 1 else f"{a}{mono}" if a.denominator == 1 else f"({a}){mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += sign + body
    return out


# -- QRat ------------------------------------------------------------------

_ONE = QPoly([1])


class QRat:
    """Quotient of two :class:`QPoly` in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        if isinstance(num, QRat) and den == 1:
            self.num, self.den = num.num, num.den
            return
        if isinstance(num, QRat) or isinstance(den, QRat):
            r = QRat(num) / QRat(den)
            self.num, self.den = r.num, r.den
            return
        n = num if isinstance(num, QPoly) else QPoly([num])
        d = den if isinstance(den, QPoly) else QPoly([den])
        self.num, self.den = _canonical(n, d)

    @classmethod
    def _trusted(cls, num: QPoly, den: QPoly = _ONE) -> QRat:
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    @staticmethod
    def _coerce(other) -> QRat | None:
        if isinstance(other, QRat):
            return other
        if isinstance(other, QPoly):
            return QRat._trusted(other)
        if isinstance(other, (int, Rational)):
            return QRat._trusted(QPoly([other]))
        return None

    def is_polynomial(self) -> bool:
        return self.den == _ONE

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __add__(self, other):
        o = QRat._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == _ONE and o.den == _ONE:
            return QRat._trusted(self.num + o.num)
        if self.den == o.den:
            return QRat._from_parts(self.num + o.num, self.den)
        return QRat._from_parts(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QRat._trusted(-self.num, self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = QRat._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = QRat._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = QRat._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return QRat._trusted(QPoly())
        if self.den == _ONE and o.den == _ONE:
            return QRat._trusted(self.num * o.num)
        if o.num.is_constant() and o.den == _ONE:
            return QRat._trusted(self.num * o.num, self.den)
        if self.num.is_constant() and self.den == _ONE:
            return QRat._trusted(o.num * self.num, o.den)
        return QRat._from_parts(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> QRat:
        if self.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        return QRat._from_parts(self.den, self.num)

    def __truediv__(self, other):
        o = QRat._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if o.den == _ONE and o.num.is_constant():
            return QRat._trusted(self.num * (1 / o.num.leading), self.den)
        return QRat._from_parts(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = QRat._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return QRat._trusted(self.num ** n, self.den ** n)

    @classmethod
    def _from_parts(cls, num: QPoly, den: QPoly) -> QRat:
        n, d = _canonical(num, den)
        return cls._trusted(n, d)

    def conjugate(self) -> QRat:
        # q is real and the coefficients are rational
        return self

    def __call__(self, q0):
        return qrat_eval(self, q0)

    def __eq__(self, other):
        o = QRat._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.den == _ONE:
            return hash(self.num)
        return hash((self.num, self.den))

    def __repr__(self):
        return f"QRat({self})"

    def __str__(self):
        if self.den == _ONE:
            return str(self.num)
        n = str(self.num)
        if len(self.num.coeffs) > 1:
            n = f"({n})"
        return f"{n}/({self.den})"


def _canonical(num: QPoly, den: QPoly) -> tuple[QPoly, QPoly]:
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return QPoly(), _ONE
    cn, pn = num._content_primitive()
    cd, pd = den._content_primitive()
    c = cn / cd
    if len(pd) > 1:
        quo = _exact_div_int(pn, pd)
        if quo is not None:
            pn, pd = quo, [1]
        else:
            quo = _exact_div_int(pd, pn) if len(pn) > 1 else None
            if quo is not None:
                pn, pd = [1], quo
            elif len(pn) > 1:
                g = _gcd_int(pn, pd)
                if len(g) > 1:
                    pn = _exact_div_int(pn, g)
                    pd = _exact_div_int(pd, g)
    lead = pd[-1]
    c = c / lead
    n = QPoly._from_ints([x * c.numerator for x in pn], c.denominator)
    d = QPoly._from_ints(pd, lead)
    return n, d


Q = QRat(QPoly([0, 1]))
"""The indeterminate ``q`` as a :class:`QRat`."""


def qpoly_arith(a, b, op: str) -> QRat:
    """Exact ``a op b`` for op in {add, sub, mul, div}, returned in canonical form."""
    x, y = QRat(a), QRat(b)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def qrat_eval(x, q0) -> complex:
    """Value of the rational function ``x`` at the real point ``q0``.

    The evaluation is exact (``q0`` is converted to the rational it denotes)
    and rounded once at the end.
    """
    from .errors import PoleError

    x = QRat(x)
    t = Fraction(q0)
    den = _eval_fraction(list(x.den._num), t) / x.den._den
    if den == 0:
        raise PoleError(f"denominator {x.den} vanishes at q = {q0}")
    num = _eval_fraction(list(x.num._num), t) / x.num._den if x.num._num else Fraction(0)
    return complex(float(num / den), 0.0)
