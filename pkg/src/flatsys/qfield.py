"""Exact arithmetic in the quadratic field Q(sqrt 3).

Elements are ``a + b*sqrt(3)`` with rational ``a`` and ``b``.  Every
surface built by :mod:`flatsys.extremal` has its vertices in this field,
so all predicates on those surfaces can be decided exactly.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering

_SQRT3 = math.sqrt(3.0)


def _rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an int or Fraction, got {type(x).__name__}")


def _sign_of(a: Fraction, b: Fraction) -> int:
    """Sign of a + b*sqrt(3)."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # opposite signs: compare a^2 with 3 b^2
    d = a * a - 3 * b * b
    if a > 0:
        return (d > 0) - (d < 0)
    return (d < 0) - (d > 0)


@total_ordering
class QScalar:
    """An element ``a + b*sqrt(3)`` of Q(sqrt 3), immutable and hashable."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _rat(a))
        object.__setattr__(self, "b", _rat(b))

    def __setattr__(self, name, value):
        raise AttributeError("QScalar is immutable")

    @classmethod
    def coerce(cls, x) -> "QScalar":
        if isinstance(x, QScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        raise TypeError(f"cannot mix QScalar with {type(x).__name__}")

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QScalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QScalar(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __neg__(self):
        return QScalar(-self.a, -self.b)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QScalar(self.a * other, self.b * other)
        if not isinstance(other, QScalar):
            return NotImplemented
        a, b, c, d = self.a, self.b, other.a, other.b
        return QScalar(a * c + 3 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "QScalar":
        return QScalar(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm a^2 - 3 b^2."""
        return self.a * self.a - 3 * self.b * self.b

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("QScalar division by zero")
            return QScalar(self.a / other, self.b / other)
        if not isinstance(other, QScalar):
            return NotImplemented
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("QScalar division by zero")
        num = self * other.conjugate()
        return QScalar(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return QScalar(1) / (self ** (-n))
        out = QScalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison ---------------------------------------------------------

    def sign(self) -> int:
        return _sign_of(self.a, self.b)

    def __eq__(self, other):
        if isinstance(other, QScalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, float):
            return self.compare_float(other) < 0
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return _sign_of(self.a - o.a, self.b - o.b) < 0

    def compare_float(self, x: float) -> int:
        """Exact three-way comparison with a binary64 value."""
        if not math.isfinite(x):
            return -1 if x > 0 else 1
        return _sign_of(self.a - Fraction(x), self.b)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # conversions --------------------------------------------------------

    def __float__(self):
        return float(self.a) + float(self.b) * _SQRT3

    def is_rational(self) -> bool:
        return self.b == 0

    def sqrt_if_rational_square(self):
        """Return the exact square root in Q(sqrt 3) when it exists, else None."""
        if self.sign() < 0:
            return None
        if not self:
            return QScalar(0)
        # (p + q r3)^2 = p^2 + 3 q^2 + 2 p q r3
        a, b = self.a, self.b
        if b == 0:
            p = _rational_sqrt(a)
            if p is not None:
                return QScalar(p)
            q = _rational_sqrt(a / 3)
            return QScalar(0, q) if q is not None else None
        # p^2 solves t^2 - a t + 3 b^2 / 4 = 0
        disc = a * a - 3 * b * b
        root = _rational_sqrt(disc)
        if root is None:
            return None
        for p2 in ((a + root) / 2, (a - root) / 2):
            p = _rational_sqrt(p2)
            if p is None or p == 0:
                continue
            q = b / (2 * p)
            cand = QScalar(p, q)
            if cand.sign() < 0:
                cand = -cand
            if cand * cand == self:
                return cand
        return None

    def __repr__(self):
        return f"QScalar({self.a}, {self.b})"

    def __str__(self):
        return format_literal(self)


SQRT3 = QScalar(0, 1)
ZERO = QScalar(0)
ONE = QScalar(1)
HALF = QScalar(Fraction(1, 2))


def _rational_sqrt(x: Fraction):
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# literal grammar ------------------------------------------------------------
#   COORD := RAT | RAT "r3" | RAT ("+"|"-") RAT "r3"
#   RAT   := ["-"] digits ["/" digits]

_RAT = r"-?\d+(?:/\d+)?"
_COORD_RE = re.compile(
    rf"^(?:(?P<only_b>{_RAT})r3|(?P<a>{_RAT})(?:(?P<op>[+-])(?P<b>\d+(?:/\d+)?)r3)?)$"
)


def _parse_rat(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def parse_literal(text: str) -> QScalar:
    """Parse a coordinate literal such as ``"3 - 1/2 r3"``."""
    if not isinstance(text, str):
        raise TypeError("coordinate literal must be a string")
    compact = "".join(text.split())
    m = _COORD_RE.match(compact)
    if m is None:
        raise ValueError(f"malformed coordinate literal: {text!r}")
    if m.group("only_b") is not None:
        return QScalar(0, _parse_rat(m.group("only_b")))
    a = _parse_rat(m.group("a"))
    if m.group("b") is None:
        return QScalar(a)
    b = _parse_rat(m.group("b"))
    return QScalar(a, b if m.group("op") == "+" else -b)


def _fmt_rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_literal(q: QScalar) -> str:
    """Inverse of :func:`parse_literal` (canonical spelling)."""
    if q.b == 0:
        return _fmt_rat(q.a)
    if q.a == 0:
        return f"{_fmt_rat(q.b)} r3"
    op = "+" if q.b > 0 else "-"
    return f"{_fmt_rat(q.a)} {op} {_fmt_rat(abs(q.b))} r3"
