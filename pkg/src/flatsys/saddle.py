"""Saddle connection enumeration and systoles.

Connections are found by unfolding triangles of a triangulation inside
open wedges of directions, starting from every corner.  Triangulation
edges are reported directly.  Every other connection is found once from
each endpoint; only the discovery whose holonomy points into the upper
half-plane (or along the positive x-axis) is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .geometry import EXACT, TAU, Vec2, orient
from .qfield import QScalar, format_literal
from .surface import Surface
from .triangulation import HalfEdge, Triangulation, triangulate
from ._kernel_py import BudgetExceeded, _clip_dist2

try:
    from ._kernels import enumerate_float as _enumerate_float

    HAVE_EXTENSION = True
except ImportError:  # pragma: no cover - depends on the build
    from ._kernel_py import enumerate_float as _enumerate_float

    HAVE_EXTENSION = False

from ._kernel_py import enumerate_float as enumerate_float_py

DEFAULT_BUDGET = 10_000_000

__all__ = [
    "BudgetExceeded",
    "Certificate",
    "SaddleConnection",
    "SystoleReport",
    "enumerate_saddle_connections",
    "systole",
    "replay_certificate",
]


@dataclass(frozen=True)
class Certificate:
    """Combinatorial witness: start corner, half-edges crossed, end corner."""

    start_corner: Tuple[int, int]
    end_corner: Tuple[int, int]
    crossings: Tuple[HalfEdge, ...]


@dataclass(frozen=True)
class SaddleConnection:
    holonomy: Vec2
    start: int
    end: int
    length2: object
    certificate: Certificate

    @property
    def length(self) -> float:
        return math.sqrt(float(self.length2))

    @property
    def is_closed(self) -> bool:
        return self.start == self.end

    def sort_key(self):
        h = self.holonomy.to_float()
        c = self.certificate
        return (float(self.length2), h.x, h.y, c.start_corner, c.crossings)

    def to_dict(self, tri: Optional[Triangulation] = None) -> dict:
        def coord(x):
            return format_literal(x) if isinstance(x, QScalar) else float(x)

        crossings = []
        for he in self.certificate.crossings:
            item = {"half_edge": list(he)}
            if tri is not None:
                ref = tri.origin.get(he)
                item["polygon_edge"] = list(ref) if ref is not None else None
            crossings.append(item)
        return {
            "holonomy": [coord(self.holonomy.x), coord(self.holonomy.y)],
            "length": self.length,
            "start": self.start,
            "end": self.end,
            "certificate": {
                "start_corner": list(self.certificate.start_corner),
                "end_corner": list(self.certificate.end_corner),
                "crossings": crossings,
            },
        }


@dataclass
class SystoleReport:
    systole: float
    systole2: object
    count: int
    connections: List[SaddleConnection]
    exact: bool
    nodes: int
    triangulation: Triangulation

    def to_dict(self) -> dict:
        s2 = self.systole2
        return {
            "systole": self.systole,
            "systole_squared": format_literal(s2) if isinstance(s2, QScalar) else float(s2),
            "count": self.count,
            "exact": self.exact,
            "nodes": self.nodes,
            "connections": [c.to_dict(self.triangulation) for c in self.connections],
        }


# ---------------------------------------------------------------------------
# orientation helpers


def _upper(v: Vec2) -> bool:
    """True for holonomy in the upper half-plane or along the positive x-axis."""
    if v.mode == EXACT:
        sy = v.y.sign()
        return sy > 0 or (sy == 0 and v.x.sign() > 0)
    scale = math.hypot(v.x, v.y)
    if abs(v.y) <= TAU * scale:
        return v.x > 0
    return v.y > 0


# ---------------------------------------------------------------------------
# exact kernel on integer coordinates


def _denominator(tri: Triangulation) -> int:
    d = 1
    for vs in tri.vectors:
        for v in vs:
            for q in (v.x, v.y):
                for r in (q.a, q.b):
                    d = d * r.denominator // math.gcd(d, r.denominator)
    return d


def _isign(a: int, b: int) -> int:
    """Sign of a + b sqrt(3) for integers."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a >= 0 and b > 0:
        return 1
    if a <= 0 and b < 0:
        return -1
    d = a * a - 3 * b * b
    if a > 0:
        return (d > 0) - (d < 0)
    return (d < 0) - (d > 0)


def _icross_sign(u, v) -> int:
    # u = (xa, xb, ya, yb); returns sign of ux*vy - uy*vx
    a1 = u[0] * v[2] + 3 * u[1] * v[3] - (u[2] * v[0] + 3 * u[3] * v[1])
    b1 = u[0] * v[3] + u[1] * v[2] - (u[2] * v[1] + u[3] * v[0])
    return _isign(a1, b1)


def _enumerate_exact(tri: Triangulation, lmax2: QScalar, budget: int):
    den = _denominator(tri)
    iv = []
    fv = []
    for vs in tri.vectors:
        for v in vs:
            iv.append(
                (
                    int(v.x.a * den),
                    int(v.x.b * den),
                    int(v.y.a * den),
                    int(v.y.b * den),
                )
            )
            fv.append((float(v.x), float(v.y)))
    nbr = [0] * len(iv)
    for (t, i), (t2, j) in tri.pair.items():
        nbr[3 * t + i] = 3 * t2 + j
    la = lmax2.a * den * den
    lb = lmax2.b * den * den
    bound2 = float(lmax2)
    prune2 = bound2 * (1.0 + 1e-9) + 1e-12

    def inside(c):
        na = c[0] * c[0] + 3 * c[1] * c[1] + c[2] * c[2] + 3 * c[3] * c[3]
        nb = 2 * (c[0] * c[1] + c[2] * c[3])
        da, db = na - la, nb - lb
        # sign of da + db sqrt(3) with rationals
        return _isign_frac(da, db) <= 0

    def add(u, v):
        return (u[0] + v[0], u[1] + v[1], u[2] + v[2], u[3] + v[3])

    hits = []
    nodes = 0
    par: List[int] = []
    cross_he: List[int] = []
    for t in range(tri.num_triangles):
        for k in range(3):
            base = 3 * t
            k1, k2 = base + (k + 1) % 3, base + (k + 2) % 3
            b = iv[base + k]
            a = tuple(-x for x in iv[k2])
            bf = fv[base + k]
            af = (-fv[k2][0], -fv[k2][1])
            par.append(-1)
            cross_he.append(k1)
            stack = [(len(par) - 1, k1, a, b, b, a, af, bf, bf, af)]
            while stack:
                node, h, a, b, lo, hi, af, bf, lof, hif = stack.pop()
                nodes += 1
                if nodes > budget:
                    raise BudgetExceeded(f"node budget {budget} exhausted")
                g = nbr[h]
                tg = g - g % 3
                j = g % 3
                j1, j2 = tg + (j + 1) % 3, tg + (j + 2) % 3
                c = add(b, iv[j1])
                cf = (bf[0] + fv[j1][0], bf[1] + fv[j1][1])
                s1 = _icross_sign(lo, c)
                s2 = _icross_sign(c, hi)
                if s1 > 0 and s2 > 0:
                    if inside(c):
                        path = []
                        m = node
                        while m >= 0:
                            path.append(cross_he[m])
                            m = par[m]
                        path.reverse()
                        hits.append((base + k, j2, c, path))
                    if _clip_dist2(*bf, *cf, *lof, *cf) <= prune2:
                        par.append(node)
                        cross_he.append(j1)
                        stack.append((len(par) - 1, j1, c, b, lo, c, cf, bf, lof, cf))
                    if _clip_dist2(*cf, *af, *cf, *hif) <= prune2:
                        par.append(node)
                        cross_he.append(j2)
                        stack.append((len(par) - 1, j2, a, c, c, hi, af, cf, cf, hif))
                elif s1 <= 0:
                    if _clip_dist2(*cf, *af, *lof, *hif) <= prune2:
                        par.append(node)
                        cross_he.append(j2)
                        stack.append((len(par) - 1, j2, a, c, lo, hi, af, cf, lof, hif))
                else:
                    if _clip_dist2(*bf, *cf, *lof, *hif) <= prune2:
                        par.append(node)
                        cross_he.append(j1)
                        stack.append((len(par) - 1, j1, c, b, lo, hi, cf, bf, lof, hif))
    out = []
    for start, end, c, path in hits:
        hol = Vec2(
            QScalar(Fraction(c[0], den), Fraction(c[1], den)),
            QScalar(Fraction(c[2], den), Fraction(c[3], den)),
        )
        out.append((start, end, hol, path))
    return out, nodes


def _isign_frac(a, b) -> int:
    return QScalar(a, b).sign()


# ---------------------------------------------------------------------------
# public API


def _float_arrays(tri: Triangulation):
    ex, ey = [], []
    for vs in tri.vectors:
        for v in vs:
            ex.append(float(v.x))
            ey.append(float(v.y))
    nbr = [0] * len(ex)
    for (t, i), (t2, j) in tri.pair.items():
        nbr[3 * t + i] = 3 * t2 + j
    return ex, ey, nbr


def _run_float(tri, lmax, budget, use_extension=True):
    ex, ey, nbr = _float_arrays(tri)
    fn = _enumerate_float if use_extension else enumerate_float_py
    if fn is not enumerate_float_py:
        import numpy as np

        ex = np.asarray(ex, dtype=np.float64)
        ey = np.asarray(ey, dtype=np.float64)
        nbr = np.asarray(nbr, dtype=np.int64)
    return fn(ex, ey, nbr, float(lmax), TAU, int(budget))


def _approx_bound(lmax: float) -> float:
    return lmax + TAU * max(1.0, lmax)


def enumerate_on(
    tri: Triangulation, lmax, budget: int = DEFAULT_BUDGET, use_extension: bool = True
):
    """Connections of length <= lmax on a given triangulation, plus the node count."""
    return _enumerate(tri, lmax, None, budget, use_extension)


def _enumerate(tri, lmax, lmax2, budget, use_extension):
    conns: List[SaddleConnection] = []
    mode = tri.mode
    if mode == EXACT:
        if lmax2 is None:
            lmax2 = _exact_square_bound(lmax)
        raw, nodes = _enumerate_exact(tri, lmax2, budget)
        for start, end, hol, path in raw:
            if not _upper(hol):
                continue
            st, sk = divmod(start, 3)
            et, ek = divmod(end, 3)
            conns.append(
                SaddleConnection(
                    hol,
                    tri.corners[st][sk],
                    tri.corners[et][ek],
                    hol.norm2(),
                    Certificate((st, sk), (et, ek), tuple(divmod(h, 3) for h in path)),
                )
            )
        edge_ok = lambda v: v.norm2() <= lmax2
    else:
        bound = _approx_bound(float(lmax))
        raw, nodes = _run_float(tri, bound, budget, use_extension)
        for start, end, hx, hy, path in raw:
            hol = Vec2(float(hx), float(hy))
            if not _upper(hol):
                continue
            st, sk = divmod(int(start), 3)
            et, ek = divmod(int(end), 3)
            conns.append(
                SaddleConnection(
                    hol,
                    tri.corners[st][sk],
                    tri.corners[et][ek],
                    hol.norm2(),
                    Certificate(
                        (st, sk), (et, ek), tuple(divmod(int(h), 3) for h in path)
                    ),
                )
            )
        edge_ok = lambda v: v.length() <= bound
    for h in tri.edges():
        if not _upper(tri.vector(h)):
            h = tri.pair[h]
        v = tri.vector(h)
        if edge_ok(v):
            t, i = h
            conns.append(
                SaddleConnection(
                    v,
                    tri.start_class(h),
                    tri.end_class(h),
                    v.norm2(),
                    Certificate((t, i), (t, (i + 1) % 3), ()),
                )
            )
    conns.sort(key=SaddleConnection.sort_key)
    return conns, nodes


def _exact_square_bound(lmax) -> QScalar:
    if isinstance(lmax, QScalar):
        if lmax.sign() < 0:
            raise ValueError("lmax must be non-negative")
        return lmax * lmax
    if isinstance(lmax, (int, Fraction)):
        return QScalar(lmax) * QScalar(lmax)
    if isinstance(lmax, float):
        if not math.isfinite(lmax) or lmax < 0:
            raise ValueError("lmax must be a finite non-negative number")
        f = Fraction(lmax)
        return QScalar(f * f)
    raise TypeError(f"unsupported lmax type {type(lmax).__name__}")


def enumerate_saddle_connections(
    s: Surface,
    lmax,
    budget: int = DEFAULT_BUDGET,
    tri: Optional[Triangulation] = None,
    use_extension: bool = True,
) -> List[SaddleConnection]:
    """All saddle connections of length at most ``lmax``, one per unoriented segment.

    Exact surfaces are searched with exact predicates; ``lmax`` may then be
    an int, Fraction, QScalar or float (taken at its exact binary value).
    """
    if tri is None:
        tri = triangulate(s)
    conns, _ = _enumerate(tri, lmax, None, budget, use_extension)
    return conns


def systole(
    s: Surface,
    budget: int = DEFAULT_BUDGET,
    tri: Optional[Triangulation] = None,
    use_extension: bool = True,
) -> SystoleReport:
    """Length and multiplicity of the shortest saddle connections.

    The shortest triangulation edge bounds the systole from above, so one
    enumeration up to that length suffices.
    """
    if tri is None:
        tri = triangulate(s)
    edge_vs = [tri.vector(h) for h in tri.edges()]
    if tri.mode == EXACT:
        l2 = min(v.norm2() for v in edge_vs)
        conns, nodes = _enumerate(tri, None, l2, budget, use_extension)
        best = min(c.length2 for c in conns)
        short = [c for c in conns if c.length2 == best]
        return SystoleReport(math.sqrt(float(best)), best, len(short), short, True, nodes, tri)
    l0 = min(v.length() for v in edge_vs)
    conns, nodes = _enumerate(tri, l0, None, budget, use_extension)
    best = min(c.length for c in conns)
    short = [c for c in conns if c.length <= best + TAU * max(1.0, best)]
    return SystoleReport(best, best * best, len(short), short, False, nodes, tri)


# ---------------------------------------------------------------------------
# certificate replay


def replay_certificate(tri: Triangulation, conn: SaddleConnection):
    """Re-develop a certificate and check it; returns the crossing points.

    Raises ValueError when the certificate does not describe a straight
    segment from its start corner to its end corner with the recorded
    holonomy.
    """
    cert = conn.certificate
    t, k = cert.start_corner
    hol = conn.holonomy
    zero = Vec2(0, 0) if tri.mode == EXACT else Vec2(0.0, 0.0)
    if not cert.crossings:
        v = tri.vectors[t][k]
        if (t, (k + 1) % 3) != cert.end_corner:
            raise ValueError("edge certificate corners do not match")
        if not _close(v, hol):
            raise ValueError("edge certificate holonomy mismatch")
        return []
    e = tri.vectors[t]
    # corner k at origin; far edge k+1 runs v_{k+1} -> v_{k+2}
    b = e[k]
    a = -e[(k + 2) % 3]
    if cert.crossings[0] != (t, (k + 1) % 3):
        raise ValueError("certificate does not leave through the far edge")
    points = []
    cur_t = t
    for step, he in enumerate(cert.crossings):
        if he[0] != cur_t:
            raise ValueError(f"crossing {step} is not an edge of the current triangle")
        # the edge of he in the plane: a is its end, b its start (B -> A)
        if orient(zero, b, hol) <= 0 or orient(zero, hol, a) <= 0:
            raise ValueError(f"segment misses the interior of crossing {step}")
        if orient(b, a, hol) >= 0:
            raise ValueError(f"segment ends before crossing {step}")
        points.append(_intersect(b, a, hol))
        t2, j = tri.pair[he]
        f = tri.vectors[t2]
        c = b + f[(j + 1) % 3]
        if step + 1 < len(cert.crossings):
            nxt = cert.crossings[step + 1]
            if nxt == (t2, (j + 1) % 3):
                a = c
            elif nxt == (t2, (j + 2) % 3):
                b = c
            else:
                raise ValueError(f"crossing {step + 1} does not follow crossing {step}")
            cur_t = t2
        else:
            if (t2, (j + 2) % 3) != cert.end_corner:
                raise ValueError("certificate end corner mismatch")
            if not _close(c, hol):
                raise ValueError("certificate holonomy mismatch")
    return points


def _close(u: Vec2, v: Vec2) -> bool:
    if u.mode == EXACT and v.mode == EXACT:
        return u == v
    u, v = u.to_float(), v.to_float()
    return math.hypot(u.x - v.x, u.y - v.y) <= 1e-9 * max(1.0, math.hypot(v.x, v.y))


def _intersect(p: Vec2, q: Vec2, r: Vec2):
    p, q, r = p.to_float(), q.to_float(), r.to_float()
    dx, dy = q.x - p.x, q.y - p.y
    den = r.x * dy - r.y * dx
    lam = (p.x * dy - p.y * dx) / den
    return (lam * r.x, lam * r.y)
