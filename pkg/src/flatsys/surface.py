"""Translation surfaces as polygons with edges glued by translation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .geometry import (
    APPROX,
    EXACT,
    TAU,
    Mat2,
    ModeError,
    Vec2,
    orient,
)
from .qfield import QScalar, format_literal, parse_literal


class SurfaceError(ValueError):
    """Invalid polygon or gluing data."""


class EdgeRef(NamedTuple):
    polygon: int
    edge: int


@dataclass(frozen=True)
class StratumSignature:
    orders: Tuple[int, ...]
    genus: int

    def __post_init__(self):
        if any(k < 0 for k in self.orders):
            raise ValueError("singularity orders must be non-negative")
        if sum(self.orders) != 2 * self.genus - 2:
            raise ValueError("orders must sum to 2g - 2")

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "StratumSignature":
        orders = tuple(sorted((int(k) for k in orders), reverse=True))
        total = sum(orders)
        if total % 2:
            raise ValueError("sum of orders must be even")
        return cls(orders, total // 2 + 1)

    @property
    def r(self) -> int:
        return len(self.orders)

    def __str__(self):
        return "H(" + ",".join(str(k) for k in self.orders) + ")"


def _same_direction(u: Vec2, d: Vec2) -> bool:
    return orient(_ORIGIN[u.mode], u, d) == 0 and _sign(u.dot(d)) > 0


_ORIGIN = {EXACT: Vec2(0, 0), APPROX: Vec2(0.0, 0.0)}


def _sign(x) -> int:
    if isinstance(x, QScalar):
        return x.sign()
    return (x > 0) - (x < 0)


def _in_sweep(u: Vec2, w: Vec2, d: Vec2) -> bool:
    """Is direction d in the half-open counterclockwise sweep [u, w)?

    The sweep angle is assumed to lie strictly between 0 and 2*pi.
    """
    o = _ORIGIN[u.mode]
    if _same_direction(u, d):
        return True
    turn = orient(o, u, w)
    if turn > 0:
        return orient(o, u, d) > 0 and orient(o, d, w) > 0
    if turn == 0:
        # w = -u: the upper half-plane relative to u
        return orient(o, u, d) > 0
    # reflex sweep: complement of [w, u)
    if _same_direction(w, d):
        return False
    return not (orient(o, w, d) > 0 and orient(o, d, u) > 0)


def _segments_touch(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool:
    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True

    def on_seg(a, b, c):
        # c collinear with ab: is it inside the closed segment?
        return _sign((c - a).dot(c - b)) <= 0

    if o1 == 0 and on_seg(p1, p2, q1):
        return True
    if o2 == 0 and on_seg(p1, p2, q2):
        return True
    if o3 == 0 and on_seg(q1, q2, p1):
        return True
    if o4 == 0 and on_seg(q1, q2, p2):
        return True
    return False


def polygon_signed_area2(vertices: Sequence[Vec2]):
    n = len(vertices)
    total = None
    for i in range(n):
        term = vertices[i].cross(vertices[(i + 1) % n])
        total = term if total is None else total + term
    return total


def validate_polygon(vertices: Sequence[Vec2]) -> None:
    n = len(vertices)
    if n < 3:
        raise SurfaceError("a polygon needs at least 3 vertices")
    mode = vertices[0].mode
    if any(v.mode != mode for v in vertices):
        raise ModeError("polygon mixes exact and approximate coordinates")
    if _sign(polygon_signed_area2(vertices)) <= 0:
        raise SurfaceError("polygon is not counterclockwise")
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        if a == b:
            raise SurfaceError("polygon has a repeated vertex")
        nxt = edges[(i + 1) % n][1]
        if orient(a, b, nxt) == 0 and _sign((b - a).dot(nxt - b)) < 0:
            raise SurfaceError("polygon folds back on itself")
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_touch(a, b, *edges[j]):
                raise SurfaceError("polygon is not simple")


class Surface:
    """A validated translation surface; build with :func:`build_surface`."""

    def __init__(self, polygons, gluing, name=None, *, _derived=None):
        self.polygons: Tuple[Tuple[Vec2, ...], ...] = polygons
        self.gluing: Dict[EdgeRef, EdgeRef] = gluing
        self.name: Optional[str] = name
        (
            self.corner_class,
            self.classes,
            self.multiplicities,
            self.genus,
            self.area,
        ) = _derived
        self.mode = polygons[0][0].mode
        self.stratum = StratumSignature(
            tuple(sorted((m - 1 for m in self.multiplicities), reverse=True)), self.genus
        )

    # convenient derived data -------------------------------------------

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    @property
    def num_singularities(self) -> int:
        return len(self.classes)

    def order(self, cls: int) -> int:
        return self.multiplicities[cls] - 1

    def cone_angle(self, cls: int) -> float:
        return 2.0 * math.pi * self.multiplicities[cls]

    def edge_vector(self, ref: EdgeRef) -> Vec2:
        poly = self.polygons[ref.polygon]
        return poly[(ref.edge + 1) % len(poly)] - poly[ref.edge]

    def edge_refs(self) -> List[EdgeRef]:
        return [EdgeRef(p, e) for p, poly in enumerate(self.polygons) for e in range(len(poly))]

    def edge_pairs(self) -> List[Tuple[EdgeRef, EdgeRef]]:
        return sorted((a, b) for a, b in self.gluing.items() if a < b)

    def __eq__(self, other):
        if not isinstance(other, Surface):
            return NotImplemented
        return self.polygons == other.polygons and self.gluing == other.gluing

    def __hash__(self):
        return hash((self.polygons, tuple(sorted(self.gluing.items()))))

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (
            f"<Surface{label} {self.stratum} genus={self.genus} "
            f"polygons={len(self.polygons)} mode={self.mode}>"
        )


def _normalize_gluing(gluing, polygons) -> Dict[EdgeRef, EdgeRef]:
    if isinstance(gluing, dict):
        pairs = list(gluing.items())
    else:
        pairs = [tuple(pair) for pair in gluing]
    out: Dict[EdgeRef, EdgeRef] = {}
    for a, b in pairs:
        a, b = EdgeRef(*a), EdgeRef(*b)
        for ref in (a, b):
            if not (0 <= ref.polygon < len(polygons)) or not (
                0 <= ref.edge < len(polygons[ref.polygon])
            ):
                raise SurfaceError(f"edge reference {tuple(ref)} out of range")
        if a == b:
            raise SurfaceError(f"edge {tuple(a)} glued to itself")
        for x, y in ((a, b), (b, a)):
            if x in out and out[x] != y:
                raise SurfaceError(f"edge {tuple(x)} glued twice")
            out[x] = y
    total = sum(len(p) for p in polygons)
    if len(out) != total:
        raise SurfaceError("gluing does not cover every edge exactly once")
    return out


def _paired_edges_match(u: Vec2, v: Vec2) -> bool:
    if u.exact:
        return u.x == -v.x and u.y == -v.y
    scale = max(1.0, u.length())
    return abs(u.x + v.x) <= TAU * scale and abs(u.y + v.y) <= TAU * scale


def build_surface(polygons, gluing, name: Optional[str] = None) -> Surface:
    """Validate polygons and gluing and compute the derived singularity data."""
    polys = []
    for raw in polygons:
        verts = tuple(v if isinstance(v, Vec2) else Vec2(*v) for v in raw)
        validate_polygon(verts)
        polys.append(verts)
    if not polys:
        raise SurfaceError("a surface needs at least one polygon")
    modes = {p[0].mode for p in polys}
    if len(modes) != 1:
        raise ModeError("polygons mix exact and approximate coordinates")
    polys = tuple(polys)
    glue = _normalize_gluing(gluing, polys)

    def evec(ref):
        poly = polys[ref.polygon]
        return poly[(ref.edge + 1) % len(poly)] - poly[ref.edge]

    for a, b in glue.items():
        if not _paired_edges_match(evec(a), evec(b)):
            raise SurfaceError(f"edges {tuple(a)} and {tuple(b)} are not parallel opposite translates")

    # connectivity of the gluing graph
    seen = {0}
    stack = [0]
    while stack:
        p = stack.pop()
        for e in range(len(polys[p])):
            q = glue[EdgeRef(p, e)].polygon
            if q not in seen:
                seen.add(q)
                stack.append(q)
    if len(seen) != len(polys):
        raise SurfaceError("surface is disconnected")

    # vertex classes by walking corners counterclockwise
    mode = polys[0][0].mode
    ref_dir = Vec2(1, 0) if mode == EXACT else Vec2(1.0, 0.0)
    corner_class: Dict[Tuple[int, int], int] = {}
    classes: List[List[Tuple[int, int]]] = []
    multiplicities: List[int] = []
    for p, poly in enumerate(polys):
        n = len(poly)
        for i in range(n):
            if (p, i) in corner_class:
                continue
            cid = len(classes)
            walk = []
            turns = 0
            corner = (p, i)
            while corner not in corner_class:
                corner_class[corner] = cid
                walk.append(corner)
                cp, ci = corner
                cpoly = polys[cp]
                m = len(cpoly)
                v = cpoly[ci]
                u = cpoly[(ci + 1) % m] - v
                w = cpoly[(ci - 1) % m] - v
                if _in_sweep(u, w, ref_dir):
                    turns += 1
                nxt = glue[EdgeRef(cp, (ci - 1) % m)]
                corner = (nxt.polygon, nxt.edge)
            if corner != (p, i):
                raise SurfaceError("inconsistent corner walk")
            if turns < 1:
                raise SurfaceError("cone angle is not a positive multiple of 2*pi")
            classes.append(walk)
            multiplicities.append(turns)

    V = len(classes)
    E = len(glue) // 2
    F = len(polys)
    chi = V - E + F
    if chi % 2 or chi > 2:
        raise SurfaceError(f"Euler characteristic {chi} does not come from a closed orientable surface")
    genus = (2 - chi) // 2
    if sum(m - 1 for m in multiplicities) != 2 * genus - 2:
        raise SurfaceError("cone angles are inconsistent with Gauss-Bonnet")

    area2 = None
    for poly in polys:
        a = polygon_signed_area2(poly)
        area2 = a if area2 is None else area2 + a
    area = area2 / 2 if mode == EXACT else area2 / 2.0

    return Surface(
        polys,
        glue,
        name,
        _derived=(corner_class, classes, multiplicities, genus, area),
    )


def area(s: Surface):
    return s.area


def apply_matrix(s: Surface, m: Mat2) -> Surface:
    """Act linearly on every polygon; the gluing is unchanged."""
    if m.mode != s.mode:
        if s.mode == APPROX:
            m = m.to_float()
        else:
            raise ModeError("apply an exact matrix to an exact surface (or convert with to_approx)")
    if _sign(m.det()) <= 0:
        raise ValueError("matrix must have positive determinant")
    polys = [[m.apply(v) for v in poly] for poly in s.polygons]
    return build_surface(polys, s.gluing, s.name)


def scale(s: Surface, factor) -> Surface:
    if s.exact:
        return apply_matrix(s, Mat2(factor, 0, 0, factor))
    f = float(factor)
    return apply_matrix(s, Mat2(f, 0.0, 0.0, f))


def to_approx(s: Surface) -> Surface:
    if not s.exact:
        return s
    polys = [[v.to_float() for v in poly] for poly in s.polygons]
    return build_surface(polys, s.gluing, s.name)


def normalize_area(s: Surface) -> Surface:
    """Homothety to area one (approximate mode)."""
    t = to_approx(s)
    f = 1.0 / math.sqrt(float(t.area))
    return apply_matrix(t, Mat2(f, 0.0, 0.0, f))


# ---------------------------------------------------------------------------
# surface file format


_FIELDS = {"polygons", "gluings", "name"}


def _coord_to_json(x):
    if isinstance(x, QScalar):
        return format_literal(x)
    return float(x)


def _coord_from_json(x):
    if isinstance(x, str):
        return parse_literal(x)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SurfaceError(f"bad coordinate {x!r}")
    if isinstance(x, int):
        return QScalar(x)
    return float(x)


def surface_to_dict(s: Surface) -> dict:
    doc = {
        "polygons": [
            {"vertices": [[_coord_to_json(v.x), _coord_to_json(v.y)] for v in poly]}
            for poly in s.polygons
        ],
        "gluings": [[[a.polygon, a.edge], [b.polygon, b.edge]] for a, b in s.edge_pairs()],
    }
    if s.name is not None:
        doc["name"] = s.name
    return doc


def surface_from_dict(doc: dict) -> Surface:
    if not isinstance(doc, dict):
        raise SurfaceError("surface document must be a JSON object")
    unknown = set(doc) - _FIELDS
    if unknown:
        raise SurfaceError(f"unknown fields in surface document: {sorted(unknown)}")
    if "polygons" not in doc or "gluings" not in doc:
        raise SurfaceError("surface document needs 'polygons' and 'gluings'")
    polys = []
    for entry in doc["polygons"]:
        if not isinstance(entry, dict) or set(entry) != {"vertices"}:
            raise SurfaceError("each polygon must be an object with only 'vertices'")
        verts = []
        for pt in entry["vertices"]:
            if not isinstance(pt, list) or len(pt) != 2:
                raise SurfaceError("a vertex is a pair of coordinates")
            verts.append(Vec2(_coord_from_json(pt[0]), _coord_from_json(pt[1])))
        polys.append(verts)
    pairs = []
    listed = set()
    for pair in doc["gluings"]:
        try:
            (p1, e1), (p2, e2) = pair
        except (TypeError, ValueError):
            raise SurfaceError(f"malformed gluing {pair!r}") from None
        for ref in ((p1, e1), (p2, e2)):
            if ref in listed:
                raise SurfaceError(f"edge {ref} listed in more than one gluing")
            listed.add(ref)
        pairs.append(((int(p1), int(e1)), (int(p2), int(e2))))
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise SurfaceError("name must be a string")
    return build_surface(polys, pairs, name)


def dumps_surface(s: Surface) -> str:
    return json.dumps(surface_to_dict(s), indent=1)


def loads_surface(text: str) -> Surface:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SurfaceError(f"not valid JSON: {exc}") from None
    return surface_from_dict(doc)


def load_surface(path) -> Surface:
    with open(path, encoding="utf-8") as fh:
        return loads_surface(fh.read())


def save_surface(s: Surface, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_surface(s))
        fh.write("\n")
