"""Planar vectors, matrices, predicates and closed-form triangle quantities.

Two numeric modes coexist.  *Exact* values live in Q(sqrt 3)
(:class:`~flatsys.qfield.QScalar`); *approximate* values are binary64
floats compared with the global tolerance :data:`TAU`.  A :class:`Vec2`
or :class:`Mat2` never mixes the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .qfield import QScalar, ONE, ZERO

TAU = 1e-9

EXACT = "exact"
APPROX = "approx"


class ModeError(TypeError):
    """Raised when exact and approximate values are combined."""


def scalar_mode(x) -> str:
    if isinstance(x, QScalar) or isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return EXACT
    if isinstance(x, float):
        return APPROX
    raise TypeError(f"unsupported scalar type {type(x).__name__}")


def as_exact(x) -> QScalar:
    return QScalar.coerce(x)


def sign(x, scale: float = 1.0) -> int:
    """Sign of a scalar; floats within ``TAU * scale`` of zero count as zero."""
    if isinstance(x, QScalar):
        return x.sign()
    if isinstance(x, float):
        if abs(x) <= TAU * scale:
            return 0
        return 1 if x > 0 else -1
    return (x > 0) - (x < 0)


class Vec2:
    """A planar vector tagged exact or approximate."""

    __slots__ = ("x", "y", "mode")

    def __init__(self, x, y):
        mx, my = scalar_mode(x), scalar_mode(y)
        if mx != my:
            raise ModeError("Vec2 components mix exact and approximate values")
        if mx == EXACT:
            x, y = as_exact(x), as_exact(y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "mode", mx)

    def __setattr__(self, name, value):
        raise AttributeError("Vec2 is immutable")

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def _check(self, other: "Vec2"):
        if not isinstance(other, Vec2):
            raise TypeError("expected Vec2")
        if other.mode != self.mode:
            raise ModeError("cannot combine exact and approximate vectors")

    def __add__(self, other):
        self._check(other)
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        self._check(other)
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self):
        return Vec2(-self.x, -self.y)

    def __mul__(self, k):
        if scalar_mode(k) != self.mode:
            raise ModeError("scalar and vector modes differ")
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other) -> object:
        self._check(other)
        return self.x * other.x + self.y * other.y

    def cross(self, other) -> object:
        self._check(other)
        return self.x * other.y - self.y * other.x

    def norm2(self):
        return self.x * self.x + self.y * self.y

    def length(self) -> float:
        return math.sqrt(float(self.norm2()))

    def to_float(self) -> "Vec2":
        return Vec2(float(self.x), float(self.y))

    def as_tuple(self) -> tuple:
        return (self.x, self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def __eq__(self, other):
        if not isinstance(other, Vec2):
            return NotImplemented
        return self.mode == other.mode and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"Vec2({self.x!s}, {self.y!s})"


def vec(x, y) -> Vec2:
    return Vec2(x, y)


class Mat2:
    """A 2x2 matrix ``((m11, m12), (m21, m22))`` acting on column vectors."""

    __slots__ = ("m11", "m12", "m21", "m22", "mode")

    def __init__(self, m11, m12, m21, m22):
        modes = {scalar_mode(v) for v in (m11, m12, m21, m22)}
        if len(modes) != 1:
            raise ModeError("Mat2 entries mix exact and approximate values")
        mode = modes.pop()
        if mode == EXACT:
            m11, m12, m21, m22 = (as_exact(v) for v in (m11, m12, m21, m22))
        for name, v in zip(("m11", "m12", "m21", "m22", "mode"), (m11, m12, m21, m22, mode)):
            object.__setattr__(self, name, v)

    def __setattr__(self, name, value):
        raise AttributeError("Mat2 is immutable")

    @classmethod
    def identity(cls, exact: bool = True) -> "Mat2":
        return cls(1, 0, 0, 1) if exact else cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, theta: float) -> "Mat2":
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, -s, s, c)

    @classmethod
    def rotation_sixth(cls, k: int) -> "Mat2":
        """Exact rotation by ``k * pi/3``."""
        half, r3h = Fraction(1, 2), QScalar(0, Fraction(1, 2))
        table = [
            (ONE, ZERO),
            (QScalar(half), r3h),
            (QScalar(-half), r3h),
            (QScalar(-1), ZERO),
            (QScalar(-half), -r3h),
            (QScalar(half), -r3h),
        ]
        c, s = table[k % 6]
        return cls(c, -s, s, c)

    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def is_sl2(self) -> bool:
        d = self.det()
        if self.mode == EXACT:
            return d == 1
        return abs(d - 1.0) <= TAU

    def apply(self, v: Vec2) -> Vec2:
        if v.mode != self.mode:
            raise ModeError("matrix and vector modes differ")
        return Vec2(self.m11 * v.x + self.m12 * v.y, self.m21 * v.x + self.m22 * v.y)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        if other.mode != self.mode:
            raise ModeError("matrix modes differ")
        return Mat2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def to_float(self) -> "Mat2":
        return Mat2(float(self.m11), float(self.m12), float(self.m21), float(self.m22))

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return (self.m11, self.m12, self.m21, self.m22) == (other.m11, other.m12, other.m21, other.m22)

    def __repr__(self):
        return f"Mat2(({self.m11!s}, {self.m12!s}), ({self.m21!s}, {self.m22!s}))"


# ---------------------------------------------------------------------------
# predicates


def _same_mode(*vs: Vec2) -> str:
    mode = vs[0].mode
    for v in vs[1:]:
        if v.mode != mode:
            raise ModeError("predicate arguments mix exact and approximate points")
    return mode


def orient(a: Vec2, b: Vec2, c: Vec2) -> int:
    """Sign of twice the signed area of triangle abc (+1 counterclockwise)."""
    mode = _same_mode(a, b, c)
    abx, aby = b.x - a.x, b.y - a.y
    acx, acy = c.x - a.x, c.y - a.y
    det = abx * acy - aby * acx
    if mode == EXACT:
        return det.sign()
    scale = math.hypot(abx, aby) * math.hypot(acx, acy)
    return sign(det, scale)


def incircle(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> int:
    """+1 when d is strictly inside the circle through counterclockwise a, b, c.

    For a clockwise triple the sign flips, so the predicate is antisymmetric
    in its first three arguments.  Raises ValueError on collinear a, b, c.
    """
    mode = _same_mode(a, b, c, d)
    if orient(a, b, c) == 0:
        raise ValueError("incircle: degenerate (collinear) triangle")
    adx, ady = a.x - d.x, a.y - d.y
    bdx, bdy = b.x - d.x, b.y - d.y
    cdx, cdy = c.x - d.x, c.y - d.y
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    t1 = alift * (bdx * cdy - cdx * bdy)
    t2 = blift * (cdx * ady - adx * cdy)
    t3 = clift * (adx * bdy - bdx * ady)
    det = t1 + t2 + t3
    if mode == EXACT:
        return det.sign()
    scale = (
        alift * (abs(bdx * cdy) + abs(cdx * bdy))
        + blift * (abs(cdx * ady) + abs(adx * cdy))
        + clift * (abs(adx * bdy) + abs(bdx * ady))
    )
    return sign(det, scale)


# ---------------------------------------------------------------------------
# triangle quantities


@dataclass(frozen=True)
class TriangleGeom:
    sides: tuple
    vertices: Optional[tuple] = None

    def __post_init__(self):
        if len(self.sides) != 3:
            raise ValueError("a triangle has three sides")
        l1, l2, l3 = (float(s) for s in self.sides)
        if min(l1, l2, l3) <= 0:
            raise ValueError("side lengths must be positive")
        if not (l1 < l2 + l3 and l2 < l1 + l3 and l3 < l1 + l2):
            raise ValueError("side lengths violate the strict triangle inequality")
        if self.vertices is not None:
            a, b, c = self.vertices
            for (p, q), ell in zip(((a, b), (b, c), (c, a)), (l1, l2, l3)):
                if abs((q - p).length() - ell) > 1e-9 * max(1.0, ell):
                    raise ValueError("vertices do not match side lengths")

    @classmethod
    def from_vertices(cls, a: Vec2, b: Vec2, c: Vec2) -> "TriangleGeom":
        return cls(((b - a).length(), (c - b).length(), (a - c).length()), (a, b, c))

    def area(self) -> float:
        a, b, c = sorted((float(s) for s in self.sides), reverse=True)
        # Kahan's stable Heron formula
        prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
        return 0.25 * math.sqrt(max(prod, 0.0))

    def circumradius(self) -> float:
        l1, l2, l3 = (float(s) for s in self.sides)
        return l1 * l2 * l3 / (4.0 * self._nondegenerate_area())

    def inradius(self) -> float:
        s = 0.5 * sum(float(x) for x in self.sides)
        return self._nondegenerate_area() / s

    def _nondegenerate_area(self) -> float:
        area = self.area()
        if area < 1e-14:
            raise ValueError("near-degenerate triangle (area < 1e-14)")
        return area


def carnot_sum(t: TriangleGeom) -> float:
    """Circumradius plus inradius (the signed circumcenter-to-side distance sum)."""
    return t.circumradius() + t.inradius()


def isosceles_sum(x: float) -> float:
    """R + r for the isosceles triangle with sides 1, 1, x, valid on [1, 2)."""
    x = float(x)
    if not (1.0 <= x < 2.0):
        raise ValueError("isosceles_sum is defined for 1 <= x < 2")
    return (2.0 + 2.0 * x - x * x) / (2.0 * math.sqrt(4.0 - x * x))


def hexagon_area_F(d1: float, d2: float, d3: float) -> float:
    """Area of the unit-sided hexagon whose alternate diagonals are d1, d2, d3.

    Three isosceles caps over the diagonals plus the Heron area of the
    triangle the diagonals form.
    """
    ds = [float(d) for d in (d1, d2, d3)]
    if any(not (0.0 < d < 2.0) for d in ds):
        raise ValueError("each diagonal must lie in (0, 2)")
    a, b, c = ds
    if not (a < b + c and b < a + c and c < a + b):
        raise ValueError("diagonals violate the triangle inequality")
    caps = sum(0.25 * math.sqrt(d * d * (d + 2.0) * (2.0 - d)) for d in ds)
    heron = 0.25 * math.sqrt((a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c))
    return caps + heron


def apex_solve(a: Vec2, b: Vec2, la, lb, side: int) -> Vec2:
    """Point at distance ``la`` from a and ``lb`` from b, left of ab if side=+1.

    In exact mode the lengths are QScalars and the apex must lie in
    Q(sqrt 3); otherwise ValueError is raised.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    mode = _same_mode(a, b)
    ab = b - a
    d2 = ab.norm2()
    if mode == EXACT:
        la, lb = as_exact(la), as_exact(lb)
        la2, lb2 = la * la, lb * lb
        t = (la2 - lb2 + d2) / (2 * d2)
        k2 = la2 / d2 - t * t
        if k2.sign() <= 0:
            raise ValueError("apex_solve: circles do not meet in two points")
        k = k2.sqrt_if_rational_square()
        if k is None:
            raise ValueError("apex_solve: apex is not in Q(sqrt 3); use approximate mode")
    else:
        la, lb = float(la), float(lb)
        d = math.sqrt(d2)
        if not (abs(la - lb) < d < la + lb):
            raise ValueError("apex_solve: circles do not meet in two points")
        t = (la * la - lb * lb + d2) / (2.0 * d2)
        k = math.sqrt(max(la * la / d2 - t * t, 0.0))
    perp = Vec2(-ab.y, ab.x)
    if side < 0:
        k = -k
    return a + ab * t + perp * k


def rotate90(v: Vec2) -> Vec2:
    return Vec2(-v.y, v.x)
