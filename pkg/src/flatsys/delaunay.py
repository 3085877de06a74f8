"""Delaunay triangulations: shortest connections as edges, and the Carnot audit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .geometry import EXACT, TAU, TriangleGeom, carnot_sum
from .qfield import QScalar
from .saddle import SaddleConnection, systole
from .surface import Surface
from .triangulation import (
    DEGENERATE,
    NON_DELAUNAY,
    STRICT,
    FlipLimitError,
    Triangulation,
    flip_to_delaunay,
    triangulate,
    triangulation_to_dict,
)

__all__ = [
    "DEGENERATE",
    "NON_DELAUNAY",
    "STRICT",
    "FlipLimitError",
    "Triangulation",
    "triangulate",
    "flip_to_delaunay",
    "delaunay_triangulation",
    "delaunay_contains_shortest",
    "carnot_audit",
    "ContainmentResult",
    "CarnotReport",
    "triangulation_to_dict",
]


def delaunay_triangulation(s: Surface, seed: Optional[int] = None) -> Triangulation:
    return flip_to_delaunay(triangulate(s), seed=seed)


@dataclass
class ContainmentResult:
    ok: bool
    count: int
    missing: List[SaddleConnection]
    triangulation: Triangulation

    def __bool__(self):
        return self.ok


def delaunay_contains_shortest(
    s: Surface, seed: Optional[int] = None, budget: Optional[int] = None
) -> ContainmentResult:
    """Check that every shortest saddle connection is an edge of a Delaunay triangulation.

    The shortest connections are enumerated on the Delaunay triangulation
    itself; a connection is an edge exactly when its certificate crosses
    nothing.  The count is cross-checked against an enumeration on the
    plain polygon triangulation.
    """
    kw = {} if budget is None else {"budget": budget}
    d = delaunay_triangulation(s, seed)
    on_d = systole(s, tri=d, **kw)
    ref = systole(s, **kw)
    missing = [c for c in on_d.connections if c.certificate.crossings]
    ok = not missing and on_d.count == ref.count
    return ContainmentResult(ok, on_d.count, missing, d)


@dataclass
class CarnotReport:
    carnot: List[float]
    equality: List[bool]
    area: object
    half_carnot_total: float
    bound: object
    triangles_expected: int
    triangles: int
    area_ok: bool
    voronoi_ok: bool
    per_triangle_ok: bool
    strict: bool
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.area_ok and self.voronoi_ok and self.per_triangle_ok

    def to_dict(self) -> dict:
        return {
            "carnot": self.carnot,
            "equality": self.equality,
            "area": float(self.area),
            "half_carnot_total": self.half_carnot_total,
            "bound": float(self.bound),
            "triangles": self.triangles,
            "triangles_expected": self.triangles_expected,
            "area_ok": self.area_ok,
            "voronoi_ok": self.voronoi_ok,
            "per_triangle_ok": self.per_triangle_ok,
            "strict": self.strict,
        }


def carnot_audit(t: Triangulation, sys2=None) -> CarnotReport:
    """Per-triangle R + r and the area bound for a Delaunay triangulation with systole >= 1.

    ``sys2`` is the squared systole; it is computed when omitted.
    """
    if sys2 is None:
        from .triangulation import triangulation_surface

        sys2 = systole(triangulation_surface(t), tri=t).systole2
    if t.mode == EXACT:
        if QScalar.coerce(sys2) < 1:
            raise ValueError("carnot_audit needs systole >= 1; rescale first")
    elif float(sys2) < 1.0 - 2 * TAU:
        raise ValueError("carnot_audit needs systole >= 1; rescale first")
    n_sing = t.num_classes
    chi_term = 2 * t.genus - 2 + n_sing
    carnot, equality = [], []
    for vs in t.vectors:
        sides = tuple(v.length() for v in vs)
        carnot.append(carnot_sum(TriangleGeom(sides)))
        if t.mode == EXACT:
            equality.append(all(v.norm2() == 1 for v in vs))
        else:
            equality.append(all(abs(x - 1.0) <= TAU for x in sides))
    area = t.area()
    if t.mode == EXACT:
        bound = QScalar(0, Fraction(chi_term, 2))
        area_ok = area >= bound
        strict = area > bound
    else:
        bound = math.sqrt(3) / 2 * chi_term
        area_ok = area >= bound - 1e-9
        strict = area > bound + 1e-9
    half = 0.5 * sum(carnot)
    voronoi_ok = float(area) >= half - 1e-9
    floor = math.sqrt(3) / 2
    per_ok = all(c >= floor - 1e-12 for c in carnot)
    return CarnotReport(
        carnot,
        equality,
        area,
        half,
        bound,
        2 * chi_term,
        t.num_triangles,
        area_ok,
        voronoi_ok,
        per_ok,
        strict,
    )
