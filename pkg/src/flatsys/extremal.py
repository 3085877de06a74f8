"""Constructors for extremal surfaces.

Coordinates of the hand-drawn examples are given in half-units: the
integer pair ``(x2, yh)`` is the point ``(x2/2, yh*sqrt(3)/2)``, so every
vertex of a unit triangle tiling has integer coordinates.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .geometry import Mat2, Vec2
from .qfield import QScalar
from .saddle import SaddleConnection, systole
from .surface import (
    StratumSignature,
    Surface,
    SurfaceError,
    apply_matrix,
    build_surface,
    dumps_surface,
    polygon_signed_area2,
)
from .triangulation import Triangulation, flip_to_delaunay, triangulate

HALF = Fraction(1, 2)
SHEAR_BUDGET = 100

NAMES = ("s4", "s22", "s20", "s1100", "s110", "nonrigid_h2", "nonrigid_h000")


def pt(x2: int, yh: int) -> Vec2:
    """Point (x2/2, yh*sqrt(3)/2)."""
    return Vec2(QScalar(Fraction(x2, 2)), QScalar(0, Fraction(yh, 2)))


# ---------------------------------------------------------------------------
# assembling surfaces from drawings


def _ccw(poly: List[Vec2]) -> List[Vec2]:
    return poly if polygon_signed_area2(poly).sign() > 0 else poly[::-1]


def labelled_polygon(points, labels, name=None) -> Surface:
    """One polygon whose edges with equal labels are glued."""
    poly = [pt(*p) for p in points]
    if polygon_signed_area2(poly).sign() < 0:
        raise ValueError("drawing must be counterclockwise")
    by_label: Dict[Hashable, List[int]] = {}
    for i, lab in enumerate(labels):
        by_label.setdefault(lab, []).append(i)
    glue = []
    for lab, idx in by_label.items():
        if len(idx) != 2:
            raise ValueError(f"label {lab!r} used {len(idx)} times")
        glue.append(((0, idx[0]), (0, idx[1])))
    return build_surface([poly], glue, name)


def assemble(pieces, pairs, name=None) -> Surface:
    """Glue polygons of one drawing.

    Edges that coincide in the drawing are glued to each other; the
    remaining edges are glued by ``pairs``, a list of segment pairs
    ``((p, q), (p2, q2))`` in half-unit coordinates.
    """
    polys = [_ccw([pt(*p) for p in piece]) for piece in pieces]
    edges: Dict[Tuple[Vec2, Vec2], Tuple[int, int]] = {}
    for k, poly in enumerate(polys):
        n = len(poly)
        for i in range(n):
            edges[(poly[i], poly[(i + 1) % n])] = (k, i)
    glue = []
    used = set()
    for (a, b), ref in edges.items():
        other = edges.get((b, a))
        if other is not None and ref < other:
            glue.append((ref, other))
            used.update((ref, other))

    def lookup(seg):
        a, b = pt(*seg[0]), pt(*seg[1])
        ref = edges.get((a, b)) or edges.get((b, a))
        if ref is None:
            raise ValueError(f"segment {seg} is not an edge of the drawing")
        if ref in used:
            raise ValueError(f"segment {seg} is glued twice")
        used.add(ref)
        return ref

    for s1, s2 in pairs:
        glue.append((lookup(s1), lookup(s2)))
    if len(used) != len(edges):
        raise ValueError("some drawing edges are left unglued")
    return build_surface(polys, glue, name)


# ---------------------------------------------------------------------------
# the hand-drawn examples

_TWELVE = [(0, 0), (1, -1), (2, 0), (4, 0), (3, 1), (4, 2), (2, 2), (1, 3), (0, 2), (-2, 2), (-1, 1), (-2, 0)]
_EIGHT = [(0, 0), (1, -1), (2, 0), (3, 1), (2, 2), (1, 3), (0, 2), (-1, 1)]
_HEXAGON = [(0, 0), (2, 0), (3, 1), (2, 2), (0, 2), (-1, 1)]


def _s4():
    return labelled_polygon(_TWELVE, [2, 5, 3, 4, 1, 3, 2, 1, 6, 4, 5, 6], "s4")


def _s110():
    return labelled_polygon(_TWELVE, [5, 4, 6, 5, 1, 6, 2, 1, 3, 2, 4, 3], "s110")


def _s22():
    pts = [(0, 0), (-1, -1), (1, -1), (2, 0), (4, 0), (3, 1), (4, 2), (2, 2), (3, 3), (1, 3), (0, 2), (-2, 2), (-1, 1), (-2, 0)]
    return labelled_polygon(pts, [3, 2, 7, 4, 5, 1, 4, 3, 2, 1, 6, 5, 7, 6], "s22")


def _s20():
    pts = [(0, 0), (1, -1), (2, 0), (4, 0), (3, 1), (4, 2), (2, 2), (1, 3), (0, 2), (-1, 1)]
    return labelled_polygon(pts, [4, 1, 5, 4, 2, 5, 3, 1, 2, 3], "s20")


def _s1100():
    # (2, 2) is an interior marked point, so the drawing is cut into pieces
    pieces = [
        _HEXAGON,
        [(0, 0), (1, -1), (2, 0)],
        [(2, 0), (4, 0), (3, 1)],
        [(3, 1), (4, 2), (2, 2)],
        [(2, 2), (4, 2), (3, 3)],
        [(2, 2), (3, 3), (1, 3)],
        [(0, 2), (2, 2), (1, 3)],
        [(-1, 1), (0, 2), (-2, 2)],
        [(-2, 0), (0, 0), (-1, 1)],
    ]
    pairs = [
        (((0, 0), (1, -1)), ((4, 0), (3, 1))),
        (((1, -1), (2, 0)), ((-1, 1), (-2, 0))),
        (((2, 0), (4, 0)), ((3, 3), (1, 3))),
        (((3, 1), (4, 2)), ((1, 3), (0, 2))),
        (((4, 2), (3, 3)), ((-2, 2), (-1, 1))),
        (((0, 2), (-2, 2)), ((-2, 0), (0, 0))),
    ]
    return assemble(pieces, pairs, "s1100")


def _nonrigid_h2():
    return labelled_polygon(_EIGHT, [2, 1, 3, 4, 2, 1, 3, 4], "nonrigid_h2")


def _nonrigid_h000():
    return labelled_polygon(_EIGHT, [4, 3, 1, 4, 2, 1, 3, 2], "nonrigid_h000")


_BUILDERS = {
    "s4": _s4,
    "s22": _s22,
    "s20": _s20,
    "s1100": _s1100,
    "s110": _s110,
    "nonrigid_h2": _nonrigid_h2,
    "nonrigid_h000": _nonrigid_h000,
}

EXPECTED_STRATA = {
    "s4": (4,),
    "s22": (2, 2),
    "s20": (2, 0),
    "s1100": (1, 1, 0, 0),
    "s110": (1, 1, 0),
    "nonrigid_h2": (2,),
    "nonrigid_h000": (0, 0, 0),
}


def named_example(name: str) -> Surface:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(NAMES)}") from None
    s = builder()
    if s.stratum.orders != EXPECTED_STRATA[name]:
        raise SurfaceError(f"{name}: transcription gives {s.stratum}")
    return s


def golden_checksum(s: Surface) -> str:
    return hashlib.sha256(dumps_surface(s).encode("utf-8")).hexdigest()


def golden_files() -> Dict[str, str]:
    """Checksums shipped with the package for the named examples."""
    import json

    text = resources.files("flatsys").joinpath("data/checksums.json").read_text("utf-8")
    return json.loads(text)


# ---------------------------------------------------------------------------
# one-cylinder origamis


@dataclass(frozen=True)
class CylinderSpec:
    top: Tuple[Hashable, ...]
    bottom: Tuple[Hashable, ...]

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(self.top))
        object.__setattr__(self, "bottom", tuple(self.bottom))
        if len(self.top) == 0:
            raise ValueError("a cylinder needs at least one square")
        if len(set(self.top)) != len(self.top) or sorted(map(repr, self.top)) != sorted(
            map(repr, self.bottom)
        ):
            raise ValueError("top and bottom must be permutations of the same labels")

    @property
    def width(self) -> int:
        return len(self.top)

    @classmethod
    def parse(cls, text: str) -> "CylinderSpec":
        """``"a b c / c b a"``: top labels, a slash, bottom labels."""
        top, _, bottom = text.partition("/")
        return cls(tuple(top.split()), tuple(bottom.split()))

    def rotated(self, n: int) -> "CylinderSpec":
        n %= self.width
        return CylinderSpec(self.top[n:] + self.top[:n], self.bottom)


class _UF:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


def cylinder_points(c: CylinderSpec):
    """Classes of the boundary points and their orders.

    Point ``i`` is ``(i, 0)`` and point ``w + 1 + j`` is ``(j, 1)``.
    Returns ``(root_of_point, order_of_root)``.
    """
    w = c.width
    uf = _UF(2 * w + 2)
    B = lambda i: i
    T = lambda j: w + 1 + j
    uf.union(B(0), B(w))
    uf.union(T(0), T(w))
    where = {lab: i for i, lab in enumerate(c.bottom)}
    for j, lab in enumerate(c.top):
        i = where[lab]
        uf.union(T(j), B(i))
        uf.union(T(j + 1), B(i + 1))
    quarter: Dict[int, int] = {}
    for x in range(w + 1):
        for p in (B(x), T(x)):
            q = 1 if x in (0, w) else 2
            r = uf.find(p)
            quarter[r] = quarter.get(r, 0) + q
    root = [uf.find(p) for p in range(2 * w + 2)]
    orders = {r: q // 4 - 1 for r, q in quarter.items()}
    return root, orders


def cylinder_stratum(c: CylinderSpec) -> Tuple[int, ...]:
    _, orders = cylinder_points(c)
    return tuple(sorted(orders.values(), reverse=True))


def one_cylinder_origami(c: CylinderSpec, height=1, name=None) -> Surface:
    """Rectangle of width ``len(top)``, vertical sides glued, unit segments glued by label."""
    h = QScalar.coerce(height)
    if h.sign() <= 0:
        raise ValueError("height must be positive")
    w = c.width
    verts = [Vec2(i, 0) for i in range(w + 1)] + [Vec2(QScalar(w - m), h) for m in range(w + 1)]
    glue = [((0, w), (0, 2 * w + 1))]
    top_edge = {c.top[w - 1 - m]: w + 1 + m for m in range(w)}
    for i, lab in enumerate(c.bottom):
        glue.append(((0, i), (0, top_edge[lab])))
    return build_surface([verts], glue, name)


EQUILATERAL_SHEAR = Mat2(1, HALF, 0, QScalar(0, HALF))


def shear_to_equilateral(s: Surface) -> Surface:
    """Turn a height-1 one-cylinder origami into a unit-triangle surface."""
    if not s.exact or len(s.polygons) != 1:
        raise ValueError("expected an exact one-cylinder origami")
    for v in s.polygons[0]:
        if not (v.x.is_rational() and v.x.a.denominator == 1 and v.y in (0, 1)):
            raise ValueError("expected a height-1 one-cylinder origami")
    return apply_matrix(s, EQUILATERAL_SHEAR)


# built-in permutations, found by search over bottom rows in lexicographic order
CYLINDER_TABLE: Dict[Tuple[int, ...], CylinderSpec] = {
    (0,): CylinderSpec.parse("a / a"),
    (0, 0): CylinderSpec.parse("a b / a b"),
    (0, 0, 0): CylinderSpec.parse("a b c / a b c"),
    (2,): CylinderSpec.parse("a b c / a c b"),
    (1, 1): CylinderSpec.parse("a b c d / a d c b"),
    (4,): CylinderSpec.parse("a b c d e / a c b e d"),
    (2, 2): CylinderSpec.parse("a b c d e f / a c b d f e"),
    (2, 0): CylinderSpec.parse("a b c d / a b d c"),
    (4, 0): CylinderSpec.parse("a b c d e f / a b d c f e"),
    (6, 0): CylinderSpec.parse("a b c d e f g h / a b d c f e h g"),
    (1, 1, 0): CylinderSpec.parse("a b c d e / a b e d c"),
    (2, 0, 0): CylinderSpec.parse("a b c d e / a b c e d"),
}


def _search_cylinder(orders: Tuple[int, ...], max_width: int = 9) -> Optional[CylinderSpec]:
    w = sum(k + 1 for k in orders)
    if w > max_width:
        return None
    top = tuple(range(w))
    for perm in itertools.permutations(top):
        spec = CylinderSpec(top, perm)
        if cylinder_stratum(spec) == orders:
            return spec
    return None


def cylinder_for(sig: StratumSignature) -> CylinderSpec:
    spec = CYLINDER_TABLE.get(sig.orders)
    if spec is None:
        spec = _search_cylinder(sig.orders)
    if spec is None:
        raise ValueError(f"no built-in one-cylinder diagram for {sig}; pass a CylinderSpec")
    return spec


def _unit_segments(c: CylinderSpec):
    """Point pairs joined by unit connections after the equilateral shear."""
    w = c.width
    for i in range(w):
        yield i, i + 1  # horizontal
        yield i, w + 1 + i  # vertical, becomes (1/2, h)
        yield i + 1, w + 1 + i  # anti-diagonal, becomes (-1/2, h)


def _pair_ok(c: CylinderSpec, pair, sig: StratumSignature) -> bool:
    root, orders = cylinder_points(c)
    ka, kb = pair
    need_distinct = ka != kb or sig.orders.count(ka) > 1
    for p, q in _unit_segments(c):
        rp, rq = root[p], root[q]
        if need_distinct and rp == rq:
            continue
        if sorted((orders[rp], orders[rq])) == sorted((ka, kb)):
            return True
    return False


def global_max_surface(
    sig, pair: Optional[Tuple[int, int]] = None, cylinder: Optional[CylinderSpec] = None
) -> Surface:
    """A unit-triangle surface in the stratum of ``sig``.

    With ``pair = (ki, kj)`` the top row is cyclically shifted (an integer
    shear followed by cut and paste) until some unit connection joins a
    singularity of order ki to one of order kj.
    """
    if not isinstance(sig, StratumSignature):
        sig = StratumSignature.from_orders(sig)
    spec = cylinder if cylinder is not None else cylinder_for(sig)
    if cylinder_stratum(spec) != sig.orders:
        raise ValueError(f"cylinder diagram does not lie in {sig}")
    if pair is not None:
        if any(k not in sig.orders for k in pair):
            raise ValueError(f"pair {pair} not in {sig}")
        for n in range(min(SHEAR_BUDGET, spec.width - 1) + 1):
            cand = spec.rotated(n)
            if _pair_ok(cand, pair, sig):
                spec = cand
                break
        else:
            raise ValueError(f"no unit connection joins orders {pair} within the shear budget")
    name = f"global_max {sig}" + (f" pair {pair[0]},{pair[1]}" if pair else "")
    return shear_to_equilateral(one_cylinder_origami(spec, 1, name))


# ---------------------------------------------------------------------------
# rigid but not maximal family


def rigid_family(n: int) -> Surface:
    """Strip of 2n unit triangles over one big singularity-free polygon, plus four corner triangles."""
    if not isinstance(n, int) or n < 2:
        raise ValueError("rigid_family needs an integer n >= 2")
    x = lambda u: 2 * u  # unit x-coordinate to half-units
    strip = [(x(k), 0) for k in range(1, n + 2)] + [(x(k) + 1, 1) for k in range(n + 1, 0, -1)]
    big = [(2, 0), (1, -1)] + [(x(k), -2) for k in range(1, n + 2)] + [(x(n + 1) + 1, -1)]
    big += [(x(k), 0) for k in range(n + 1, 1, -1)]
    ll_top = [(0, 0), (1, -1), (2, 0)]
    ll_bot = [(0, -2), (2, -2), (1, -1)]
    m = x(n + 1)
    rr_top = [(m, 0), (m + 1, -1), (m + 2, 0)]
    rr_bot = [(m + 1, -1), (m, -2), (m + 2, -2)]
    pairs = [
        (((0, 0), (2, 0)), ((0, -2), (2, -2))),  # a
        (((0, 0), (1, -1)), ((m + 2, -2), (m + 1, -1))),  # b
        (((1, -1), (0, -2)), ((m, 0), (m + 1, 1))),  # c
        (((m + 2, 0), (m, 0)), ((m, -2), (m + 2, -2))),  # d
        (((m + 1, -1), (m + 2, 0)), ((2, 0), (3, 1))),  # e
    ]
    for k in range(1, n + 1):
        top = ((x(k) + 1, 1), (x(k) + 3, 1))
        p = n + 1 - k  # bottom position carrying label k
        bottom = ((x(p), -2), (x(p + 1), -2))
        pairs.append((top, bottom))
    return assemble([strip, big, ll_top, ll_bot, rr_top, rr_bot], pairs, f"rigid_family {n}")


# ---------------------------------------------------------------------------
# slit gluing


@dataclass
class Slit:
    surface: Surface
    connection: SaddleConnection
    triangulation: Triangulation


def delaunay_of(s: Surface) -> Triangulation:
    return flip_to_delaunay(triangulate(s))


def find_slit(
    s: Surface,
    orders: Tuple[int, int],
    holonomy: Optional[Vec2] = None,
    closed: Optional[bool] = None,
) -> Slit:
    """First shortest connection (in sorted order) between singularities of the given orders."""
    tri = delaunay_of(s)
    rep = systole(s, tri=tri)
    want = sorted(orders)
    for c in rep.connections:
        if sorted((s.order(c.start), s.order(c.end))) != want:
            continue
        if holonomy is not None and c.holonomy != holonomy:
            continue
        if closed is not None and c.is_closed != closed:
            continue
        return Slit(s, c, tri)
    raise ValueError(f"no shortest connection joins orders {orders} on {s.name or 'surface'}")


def aligned_slit(s: Surface, orders: Tuple[int, int], holonomy: Vec2) -> Slit:
    """Rotate s by a multiple of 60 degrees so that it has a slit with the given holonomy."""
    for k in range(6):
        rs = s if k == 0 else apply_matrix(s, Mat2.rotation_sixth(k))
        try:
            return find_slit(rs, orders, holonomy=holonomy)
        except ValueError:
            continue
    raise ValueError(f"no rotation of {s.name or 'surface'} has a slit with holonomy {holonomy}")


def _slit_edge(sl: Slit):
    c = sl.connection
    tri = sl.triangulation
    if c.certificate.crossings:
        raise ValueError("slit connection is not an edge of its triangulation")
    h = c.certificate.start_corner
    if tri.vector(h) != c.holonomy:
        raise ValueError("slit certificate does not match its triangulation")
    return h


def slit_glue(a: Slit, b: Slit, name=None) -> Surface:
    """Cut both surfaces along their slits and glue each side to the opposite side of the other."""
    if not (a.surface.exact and b.surface.exact):
        raise ValueError("slit gluing requires exact surfaces")
    if a.connection.holonomy != b.connection.holonomy:
        raise ValueError("slit holonomies differ")
    ha, hb = _slit_edge(a), _slit_edge(b)
    ta, tb = a.triangulation, b.triangulation
    off = ta.num_triangles
    polys = []
    for tri in (ta, tb):
        for e0, e1, _ in tri.vectors:
            polys.append([Vec2(0, 0), e0, e0 + e1])
    ha2, hb2 = ta.pair[ha], tb.pair[hb]
    glue = []
    for h in ta.edges():
        if h not in (ha, ha2):
            glue.append((h, ta.pair[h]))
    for h in tb.edges():
        if h not in (hb, hb2):
            o = tb.pair[h]
            glue.append(((h[0] + off, h[1]), (o[0] + off, o[1])))
    glue.append((ha, (hb2[0] + off, hb2[1])))
    glue.append(((hb[0] + off, hb[1]), ha2))
    return build_surface(polys, glue, name)


def chain_glue(base: Surface, steps: Sequence[Tuple[Tuple[int, int], Sequence[int], Tuple[int, int]]]):
    """Repeated slit gluing.

    Each step is ``(orders_on_current, stratum_of_global_max, orders_on_that_max)``;
    the second surface is rotated by a multiple of 60 degrees to match
    the first slit.  Returns the
    final surface and a log of the connections used.
    """
    cur = base
    log = []
    for orders_a, sig, orders_b in steps:
        sa = find_slit(cur, orders_a)
        other = global_max_surface(sig, pair=tuple(orders_b))
        sb = aligned_slit(other, orders_b, sa.connection.holonomy)
        cur = slit_glue(sa, sb)
        log.append({"a": sa.connection.to_dict(), "b": sb.connection.to_dict(), "stratum": str(cur.stratum)})
    return cur, log
