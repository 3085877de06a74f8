"""Triangulations of translation surfaces by saddle connections.

A triangle is stored by its three edge holonomies ``e0, e1, e2`` (edge i
runs from corner i to corner i+1, counterclockwise, and the three sum to
zero) plus the singularity class of each corner.  Half-edges ``(t, i)``
are paired across the surface.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .geometry import Vec2, incircle, orient
from .surface import EdgeRef, Surface, build_surface

HalfEdge = Tuple[int, int]

STRICT = "strict"
DEGENERATE = "degenerate"
NON_DELAUNAY = "non_delaunay"


class FlipLimitError(RuntimeError):
    """The flip loop exceeded its iteration cap."""


@dataclass
class Triangulation:
    mode: str
    vectors: List[Tuple[Vec2, Vec2, Vec2]]
    corners: List[Tuple[int, int, int]]
    pair: Dict[HalfEdge, HalfEdge]
    origin: Dict[HalfEdge, Optional[EdgeRef]]
    source: List[Optional[int]]
    genus: int
    num_classes: int
    flips: int = 0
    anchors: List[Optional[Vec2]] = field(default_factory=list)

    @property
    def num_triangles(self) -> int:
        return len(self.vectors)

    def half_edges(self):
        for t in range(len(self.vectors)):
            for i in range(3):
                yield (t, i)

    def edges(self) -> List[HalfEdge]:
        """One representative half-edge per edge, in index order."""
        return [h for h in self.half_edges() if h < self.pair[h]]

    @property
    def num_edges(self) -> int:
        return len(self.pair) // 2

    def vector(self, h: HalfEdge) -> Vec2:
        return self.vectors[h[0]][h[1]]

    def start_class(self, h: HalfEdge) -> int:
        return self.corners[h[0]][h[1]]

    def end_class(self, h: HalfEdge) -> int:
        return self.corners[h[0]][(h[1] + 1) % 3]

    def copy(self) -> "Triangulation":
        return Triangulation(
            self.mode,
            list(self.vectors),
            list(self.corners),
            dict(self.pair),
            dict(self.origin),
            list(self.source),
            self.genus,
            self.num_classes,
            self.flips,
            list(self.anchors),
        )

    def triangle_area(self, t: int):
        e0, e1, _ = self.vectors[t]
        c = e0.cross(e1)
        return c / 2 if self.mode == "exact" else c / 2.0

    def area(self):
        total = None
        for t in range(self.num_triangles):
            a = self.triangle_area(t)
            total = a if total is None else total + a
        return total

    # Delaunay status ---------------------------------------------------

    def quad(self, h: HalfEdge):
        """Developed quadrilateral (A, B, C, D) around the edge of half-edge h.

        A and B are the edge endpoints (h runs A -> B), C is the apex of
        h's triangle and D the apex of the neighbour.
        """
        t, i = h
        t2, j = self.pair[h]
        e = self.vectors[t]
        zero = Vec2(0, 0) if self.mode == "exact" else Vec2(0.0, 0.0)
        a = zero
        b = e[i]
        c = e[i] + e[(i + 1) % 3]
        d = self.vectors[t2][(j + 1) % 3]
        return a, b, c, d

    def edge_status(self, h: HalfEdge) -> str:
        a, b, c, d = self.quad(h)
        s = incircle(a, b, c, d)
        if s > 0:
            return NON_DELAUNAY
        if s == 0:
            return DEGENERATE
        return STRICT

    def delaunay_status(self) -> Dict[HalfEdge, str]:
        return {h: self.edge_status(h) for h in self.edges()}

    def is_delaunay(self) -> bool:
        return all(s != NON_DELAUNAY for s in self.delaunay_status().values())

    # flips -------------------------------------------------------------

    def flip(self, h: HalfEdge) -> None:
        """Replace the diagonal h of its quadrilateral by the other diagonal, in place."""
        t, i = h
        t2, j = self.pair[h]
        if t == t2:
            raise ValueError("cannot flip an edge glued inside one triangle")
        a, b, c, d = self.quad(h)
        if not (orient(c, a, d) > 0 and orient(d, b, c) > 0):
            raise ValueError("edge quadrilateral is not strictly convex; flip refused")
        i1, i2 = (i + 1) % 3, (i + 2) % 3
        j1, j2 = (j + 1) % 3, (j + 2) % 3
        e, f = self.vectors[t], self.vectors[t2]
        ca, cb, cc = self.corners[t][i], self.corners[t][i1], self.corners[t][i2]
        cd = self.corners[t2][j2]
        # T1 = (C, A, D) at index t, T2 = (D, B, C) at index t2
        n1 = (e[i2], f[j1], -(e[i2] + f[j1]))
        n2 = (f[j2], e[i1], -(f[j2] + e[i1]))
        remap = {
            (t, i2): (t, 0),
            (t2, j1): (t, 1),
            (t2, j2): (t2, 0),
            (t, i1): (t2, 1),
        }
        outer = {old: self.pair[old] for old in remap}
        origins = {old: self.origin.get(old) for old in remap}
        for k in range(3):
            self.pair.pop((t, k), None)
            self.pair.pop((t2, k), None)
            self.origin.pop((t, k), None)
            self.origin.pop((t2, k), None)
        for old, new in remap.items():
            partner = outer[old]
            partner_new = remap.get(partner, partner)
            self.pair[new] = partner_new
            self.pair[partner_new] = new
            self.origin[new] = origins[old]
        self.pair[(t, 2)] = (t2, 2)
        self.pair[(t2, 2)] = (t, 2)
        self.origin[(t, 2)] = None
        self.origin[(t2, 2)] = None
        self.vectors[t] = n1
        self.vectors[t2] = n2
        self.corners[t] = (cc, ca, cd)
        self.corners[t2] = (cd, cb, cc)
        # drawing positions survive only if the flipped edge is a plain
        # adjacency in the drawing (both triangles place A and B alike)
        pa, pb = self.anchors[t], self.anchors[t2]
        if pa is not None and pb is not None:
            pos_a = pa + _prefix(e, i)
            pos_b2 = pb + _prefix(f, j)
            if pos_a + e[i] == pos_b2:
                self.anchors[t] = pos_a + c
                self.anchors[t2] = pos_a + d
            else:
                self.anchors[t] = self.anchors[t2] = None
        if self.source[t] != self.source[t2]:
            self.source[t] = self.source[t2] = None
        self.flips += 1

    def position(self, t: int, k: int) -> Optional[Vec2]:
        """Drawing position of corner k of triangle t, when still known."""
        a = self.anchors[t]
        return None if a is None else a + _prefix(self.vectors[t], k)

    def find_edge(self, p: Vec2, q: Vec2) -> HalfEdge:
        """The half-edge running from drawing point p to drawing point q."""
        for t in range(self.num_triangles):
            if self.anchors[t] is None:
                continue
            for k in range(3):
                if self.position(t, k) == p and self.position(t, (k + 1) % 3) == q:
                    return (t, k)
        raise KeyError(f"no edge from {p} to {q} in the drawing")


def _prefix(e, k):
    out = e[0] - e[0]
    for m in range(k):
        out = out + e[m]
    return out


def _ear_clip(poly) -> List[Tuple[int, int, int]]:
    idx = list(range(len(poly)))
    out = []
    while len(idx) > 3:
        n = len(idx)
        for k in range(n):
            ia, ib, ic = idx[(k - 1) % n], idx[k], idx[(k + 1) % n]
            a, b, c = poly[ia], poly[ib], poly[ic]
            if orient(a, b, c) <= 0:
                continue
            blocked = False
            for m in idx:
                if m in (ia, ib, ic):
                    continue
                p = poly[m]
                if orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0:
                    blocked = True
                    break
            if not blocked:
                out.append((ia, ib, ic))
                del idx[k]
                break
        else:
            raise ValueError("ear clipping failed (polygon not simple?)")
    out.append(tuple(idx))
    return out


def triangulate(s: Surface) -> Triangulation:
    """Ear-clip every polygon; all polygon edges become triangulation edges."""
    vectors, corners, source, anchors = [], [], [], []
    pair: Dict[HalfEdge, HalfEdge] = {}
    origin: Dict[HalfEdge, Optional[EdgeRef]] = {}
    by_origin: Dict[EdgeRef, HalfEdge] = {}
    for p, poly in enumerate(s.polygons):
        n = len(poly)
        diag: Dict[Tuple[int, int], HalfEdge] = {}
        for tri in _ear_clip(poly):
            t = len(vectors)
            vs = [poly[k] for k in tri]
            vectors.append((vs[1] - vs[0], vs[2] - vs[1], vs[0] - vs[2]))
            corners.append(tuple(s.corner_class[(p, k)] for k in tri))
            source.append(p)
            anchors.append(vs[0])
            for i in range(3):
                u, v = tri[i], tri[(i + 1) % 3]
                h = (t, i)
                if v == (u + 1) % n:
                    ref = EdgeRef(p, u)
                    origin[h] = ref
                    by_origin[ref] = h
                else:
                    origin[h] = None
                    if (v, u) in diag:
                        other = diag.pop((v, u))
                        pair[h] = other
                        pair[other] = h
                    else:
                        diag[(u, v)] = h
        if diag:
            raise ValueError("internal error: unmatched diagonal")
    for ref, h in by_origin.items():
        pair[h] = by_origin[s.gluing[ref]]
    return Triangulation(
        s.mode, vectors, corners, pair, origin, source, s.genus, s.num_singularities, 0, anchors
    )


def flip_to_delaunay(
    t: Triangulation, seed: Optional[int] = None, max_flips: int = 100_000
) -> Triangulation:
    """Flip non-Delaunay edges until every edge is strict or degenerate.

    Without a seed the lowest-index non-Delaunay edge is flipped first;
    a seed picks uniformly among the current non-Delaunay edges instead.
    Cocircular edges are never flipped.
    """
    out = t.copy()
    rng = random.Random(seed) if seed is not None else None
    count = 0
    while True:
        bad = [h for h in out.edges() if out.edge_status(h) == "non_delaunay"]
        if not bad:
            return out
        if count >= max_flips:
            raise FlipLimitError(f"flip loop exceeded {max_flips} flips")
        h = bad[0] if rng is None else rng.choice(bad)
        out.flip(h)
        count += 1


def triangulation_surface(t: Triangulation, name: Optional[str] = None) -> Surface:
    """The surface cut into the triangles of ``t`` (one polygon per triangle)."""
    polys = []
    zero = Vec2(0, 0) if t.mode == "exact" else Vec2(0.0, 0.0)
    for e0, e1, _ in t.vectors:
        polys.append([zero, e0, e0 + e1])
    glue = [(h, t.pair[h]) for h in t.edges()]
    return build_surface(polys, glue, name)


def triangulation_to_dict(t: Triangulation) -> dict:
    from .qfield import QScalar, format_literal

    def coord(x):
        return format_literal(x) if isinstance(x, QScalar) else float(x)

    status = t.delaunay_status()
    tris = []
    for k in range(t.num_triangles):
        edges = []
        for i in range(3):
            h = (k, i)
            rep = h if h in status else t.pair[h]
            v = t.vectors[k][i]
            ref = t.origin.get(h)
            edges.append(
                {
                    "holonomy": [coord(v.x), coord(v.y)],
                    "status": status[rep],
                    "glued_to": list(t.pair[h]),
                    "polygon_edge": list(ref) if ref is not None else None,
                }
            )
        tris.append({"corners": list(t.corners[k]), "edges": edges})
    return {"mode": t.mode, "num_triangles": t.num_triangles, "flips": t.flips, "triangles": tris}
