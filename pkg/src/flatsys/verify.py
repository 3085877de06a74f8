"""Certification: decompositions, global and local maximum checks, kissing
numbers, perturbations in period coordinates and first-order rigidity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import EXACT, TAU, Mat2, Vec2, apex_solve
from .saddle import systole
from .surface import Surface, build_surface
from .triangulation import HalfEdge, Triangulation, flip_to_delaunay, triangulate

SCHEMA_VERSION = 1

TRIANGLE = "unit_triangle"
HEXAGON = "regular_hexagon"
OTHER = "other_polygon"
NON_POLYGONAL = "non_polygonal"

NO_IMPROVEMENT = "no-improvement-found"
IMPROVEMENT = "improvement-found"

ROT60 = Mat2.rotation_sixth(1)


def _delaunay(s: Surface) -> Triangulation:
    return flip_to_delaunay(triangulate(s))


def _is_short(v: Vec2, sys2) -> bool:
    if v.mode == EXACT:
        return v.norm2() == sys2
    return abs(v.length() - math.sqrt(sys2)) <= TAU * max(1.0, math.sqrt(sys2))


# ---------------------------------------------------------------------------
# decomposition along the shortest saddle connections


@dataclass
class Piece:
    kind: str
    triangles: List[int]
    boundary: List[List[HalfEdge]]
    vertices: Optional[List[Vec2]] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "triangles": self.triangles,
            "boundary_edges": sum(len(c) for c in self.boundary),
            "boundary_cycles": len(self.boundary),
        }


@dataclass
class Decomposition:
    pieces: List[Piece]
    adjacency: List[Tuple[int, int]]
    piece_of: List[int]
    triangles_connected: bool
    hexagon_condition: bool
    shortest_edges: List[HalfEdge]
    triangulation: Triangulation

    def count(self, kind: str) -> int:
        return sum(1 for p in self.pieces if p.kind == kind)

    @property
    def only_triangles(self) -> bool:
        return all(p.kind == TRIANGLE for p in self.pieces)

    @property
    def triangles_and_hexagons(self) -> bool:
        return all(p.kind in (TRIANGLE, HEXAGON) for p in self.pieces)

    def to_dict(self) -> dict:
        return {
            "pieces": [p.to_dict() for p in self.pieces],
            "counts": {k: self.count(k) for k in (TRIANGLE, HEXAGON, OTHER, NON_POLYGONAL)},
            "adjacency": [list(a) for a in self.adjacency],
            "triangles_connected": self.triangles_connected,
            "hexagon_condition": self.hexagon_condition,
            "shortest_edges": len(self.shortest_edges),
        }


def _boundary_cycles(tri: Triangulation, tris: set, short: set) -> List[List[HalfEdge]]:
    bnd = [(t, i) for t in sorted(tris) for i in range(3) if (t, i) in short]
    seen = set()
    cycles = []
    for start in bnd:
        if start in seen:
            continue
        cyc = []
        h = start
        while h not in seen:
            seen.add(h)
            cyc.append(h)
            # next boundary half-edge leaving the end vertex of h
            t, i = h
            g = (t, (i + 1) % 3)
            while g not in short:
                t2, j = tri.pair[g]
                g = (t2, (j + 1) % 3)
            h = g
        cycles.append(cyc)
    return cycles


def _develop(tri: Triangulation, cycle: List[HalfEdge]) -> List[Vec2]:
    pts = [Vec2(0, 0) if tri.mode == EXACT else Vec2(0.0, 0.0)]
    for h in cycle[:-1]:
        pts.append(pts[-1] + tri.vector(h))
    return pts


def classify_decomposition(s: Surface, tri: Optional[Triangulation] = None) -> Decomposition:
    """Cut along all shortest saddle connections and classify the pieces (exact mode)."""
    if not s.exact:
        raise ValueError("classify_decomposition requires an exact surface")
    tri = tri if tri is not None else _delaunay(s)
    rep = systole(s, tri=tri)
    sys2 = rep.systole2
    short = {h for h in tri.half_edges() if tri.vector(h).norm2() == sys2}
    if len(short) != 2 * rep.count:
        raise ValueError("a shortest saddle connection is missing from the Delaunay triangulation")
    # union triangles across non-shortest edges
    n = tri.num_triangles
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h in tri.half_edges():
        if h not in short:
            a, b = find(h[0]), find(tri.pair[h][0])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: Dict[int, List[int]] = {}
    for t in range(n):
        groups.setdefault(find(t), []).append(t)
    pieces = []
    piece_of = [0] * n
    for k, root in enumerate(sorted(groups)):
        tris = groups[root]
        for t in tris:
            piece_of[t] = k
        cycles = _boundary_cycles(tri, set(tris), short)
        nb = sum(len(c) for c in cycles)
        kind = NON_POLYGONAL
        verts = None
        if len(cycles) == 1 and len(tris) == nb - 2:
            cyc = cycles[0]
            verts = _develop(tri, cyc)
            kind = OTHER
            if nb == 3:
                kind = TRIANGLE
            elif nb == 6:
                vs = [tri.vector(h) for h in cyc]
                if all(ROT60.apply(vs[m]) == vs[(m + 1) % 6] for m in range(6)):
                    kind = HEXAGON
        pieces.append(Piece(kind, tris, cycles, verts))
    adjacency = []
    for h in sorted(short):
        o = tri.pair[h]
        if h < o:
            adjacency.append((piece_of[h[0]], piece_of[o[0]]))
    tri_pieces = [k for k, p in enumerate(pieces) if p.kind == TRIANGLE]
    connected = _connected(tri_pieces, [(a, b) for a, b in adjacency if a in tri_pieces and b in tri_pieces])
    hex_ok = True
    for k, p in enumerate(pieces):
        if p.kind == TRIANGLE:
            continue
        for cyc in p.boundary:
            for h in cyc:
                if pieces[piece_of[tri.pair[h][0]]].kind != TRIANGLE:
                    hex_ok = False
    return Decomposition(pieces, adjacency, piece_of, connected, hex_ok, sorted(short), tri)


def _connected(nodes, edges) -> bool:
    if not nodes:
        return True
    adj = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(nodes)


# ---------------------------------------------------------------------------
# verdicts


def systole_bound(s: Surface) -> float:
    """((sqrt(3)/2)(2g - 2 + r))^(-1/2), the largest area-one systole in the stratum."""
    return (math.sqrt(3) / 2 * (2 * s.genus - 2 + s.num_singularities)) ** -0.5


def normalized_systole(s: Surface) -> float:
    return systole(s).systole / math.sqrt(float(s.area))


def check_global_max(s: Surface) -> dict:
    dec = classify_decomposition(s)
    ns = normalized_systole(s)
    bound = systole_bound(s)
    ok = dec.only_triangles
    if ok and abs(ns - bound) > 1e-12:
        raise AssertionError(f"unit-triangle surface misses the bound: {ns} vs {bound}")
    return {
        "schema_version": SCHEMA_VERSION,
        "check": "global",
        "verdict": "global-maximum" if ok else "not-global-maximum",
        "ok": ok,
        "normalized_systole": ns,
        "bound": bound,
        "decomposition": dec.to_dict(),
    }


def check_local_max_criterion(s: Surface) -> dict:
    """Sufficient criterion: only unit triangles and regular hexagons, triangles
    connected, and every hexagon edge bordered by a triangle."""
    dec = classify_decomposition(s)
    reasons = []
    if not dec.triangles_and_hexagons:
        reasons.append("pieces other than unit triangles and regular hexagons")
    if not dec.triangles_connected:
        reasons.append("triangle set is disconnected")
    if not dec.hexagon_condition:
        reasons.append("a hexagon is adjacent to itself or to another hexagon")
    ok = not reasons
    return {
        "schema_version": SCHEMA_VERSION,
        "check": "local-criterion",
        "verdict": "criterion-satisfied" if ok else "criterion-violated",
        "ok": ok,
        "reasons": reasons,
        "decomposition": dec.to_dict(),
    }


def kissing_audit(s: Surface) -> dict:
    rep = systole(s)
    bound = sum(3 * (k + 1) for k in s.stratum.orders)
    if rep.count > bound:
        raise AssertionError(f"kissing bound violated: {rep.count} > {bound}")
    equality = rep.count == bound
    out = {
        "schema_version": SCHEMA_VERSION,
        "check": "kissing",
        "count": rep.count,
        "bound": bound,
        "equality": equality,
        "ok": True,
    }
    if s.exact:
        glob = classify_decomposition(s).only_triangles
        if glob != equality:
            raise AssertionError("kissing equality disagrees with the global-maximum check")
        out["global_maximum"] = glob
    return out


# ---------------------------------------------------------------------------
# period coordinates


@dataclass
class PeriodBasis:
    triangulation: Triangulation
    edges: List[HalfEdge]
    coeffs: Dict[HalfEdge, np.ndarray]
    holonomy: np.ndarray  # float (k, 2)

    @property
    def dim(self) -> int:
        return len(self.edges)

    def vectors(self) -> List[Vec2]:
        return [self.triangulation.vector(h) for h in self.edges]


@dataclass
class Deformation:
    deltas: np.ndarray  # (k, 2)

    @classmethod
    def zero(cls, basis: PeriodBasis) -> "Deformation":
        return cls(np.zeros((basis.dim, 2)))

    @classmethod
    def from_flat(cls, x) -> "Deformation":
        x = np.asarray(x, dtype=float)
        return cls(x.reshape(-1, 2))

    def flat(self) -> np.ndarray:
        return self.deltas.reshape(-1)

    def scaled(self, t: float) -> "Deformation":
        return Deformation(self.deltas * t)

    def norm(self) -> float:
        return float(np.abs(self.deltas).max()) if self.deltas.size else 0.0


def _upper(v: Vec2) -> bool:
    y, x = float(v.y), float(v.x)
    scale = math.hypot(x, y)
    if abs(y) <= TAU * scale:
        return x > 0
    return y > 0


def build_period_basis(s: Surface, tri: Optional[Triangulation] = None) -> PeriodBasis:
    """Edges outside a dual spanning tree that prefers long edges.

    Shortest edges therefore end up in the basis whenever possible.  Tree
    edges are expressed as integer combinations by peeling leaves of the
    dual tree.
    """
    tri = tri if tri is not None else _delaunay(s)
    n = tri.num_triangles
    reps = tri.edges()
    lengths = {h: float(tri.vector(h).norm2()) for h in reps}
    order = sorted(reps, key=lambda h: (-lengths[h], h))
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = set()
    for h in order:
        a, b = find(h[0]), find(tri.pair[h][0])
        if a != b:
            parent[max(a, b)] = min(a, b)
            tree.add(h)
    basis = [h for h in reps if h not in tree]
    basis = [h if _upper(tri.vector(h)) else tri.pair[h] for h in basis]

    def bkey(h):
        v = tri.vector(h)
        horiz = abs(float(v.y)) <= TAU * v.length()
        return (not horiz, lengths[min(h, tri.pair[h])], h)

    basis.sort(key=bkey)
    k = len(basis)
    expected = 2 * tri.genus + tri.num_classes - 1
    if k != expected:
        raise AssertionError(f"basis has {k} elements, expected {expected}")
    coeffs: Dict[HalfEdge, np.ndarray] = {}
    for idx, h in enumerate(basis):
        c = np.zeros(k, dtype=np.int64)
        c[idx] = 1
        coeffs[h] = c
        coeffs[tri.pair[h]] = -c
    # leaf peeling on the dual tree
    tree_half = set()
    for h in tree:
        tree_half.add(h)
        tree_half.add(tri.pair[h])
    degree = [0] * n
    for h in tree:
        degree[h[0]] += 1
        degree[tri.pair[h][0]] += 1
    leaves = [t for t in range(n) if degree[t] == 1]
    done = set()
    while leaves:
        t = leaves.pop()
        if t in done:
            continue
        unknown = [(t, i) for i in range(3) if (t, i) not in coeffs]
        if len(unknown) != 1:
            continue
        u = unknown[0]
        c = -sum(coeffs[(t, i)] for i in range(3) if (t, i) != u)
        coeffs[u] = c
        coeffs[tri.pair[u]] = -c
        done.add(t)
        t2 = tri.pair[u][0]
        degree[t2] -= 1
        if degree[t2] == 1:
            leaves.append(t2)
    if len(coeffs) != 3 * n:
        raise AssertionError("leaf peeling did not reach every edge")
    hol = np.array([[float(v.x), float(v.y)] for v in (tri.vector(h) for h in basis)])
    pb = PeriodBasis(tri, basis, coeffs, hol)
    _check_basis(pb)
    return pb


def _check_basis(pb: PeriodBasis) -> None:
    tri = pb.triangulation
    vs = pb.vectors()
    for h, c in pb.coeffs.items():
        if tri.mode == EXACT:
            acc = Vec2(0, 0)
            for ci, v in zip(c, vs):
                if ci:
                    acc = acc + v * int(ci)
            if acc != tri.vector(h):
                raise AssertionError(f"edge {h} is not the combination its coefficients claim")
        else:
            x = c @ pb.holonomy
            v = tri.vector(h)
            if math.hypot(x[0] - v.x, x[1] - v.y) > 1e-9 * max(1.0, v.length()):
                raise AssertionError(f"edge {h} is not the combination its coefficients claim")


class InvertedTriangle(ValueError):
    """The deformation folds a triangle of the reference triangulation."""


def deformed_holonomies(pb: PeriodBasis, d: Deformation) -> Dict[HalfEdge, np.ndarray]:
    tri = pb.triangulation
    out = {}
    for h, c in pb.coeffs.items():
        v = tri.vector(h)
        out[h] = np.array([float(v.x), float(v.y)]) + c @ d.deltas
    return out


def perturb(
    s: Surface, basis: PeriodBasis, d: Deformation, normalize: bool = True
) -> Surface:
    """Move the period coordinates by ``d`` and rebuild the surface from triangles.

    The result is area-normalized and rotated so that the first basis
    element is horizontal and points right.
    """
    if d.deltas.shape != (basis.dim, 2):
        raise ValueError("deformation does not match the basis")
    tri = basis.triangulation
    new = deformed_holonomies(basis, d)
    area2 = 0.0
    for t in range(tri.num_triangles):
        a, b = new[(t, 0)], new[(t, 1)]
        cr = a[0] * b[1] - a[1] * b[0]
        if cr <= TAU * (np.hypot(*a) * np.hypot(*b)):
            raise InvertedTriangle(f"triangle {t} is inverted or degenerate")
        area2 += cr
    g1 = new[basis.edges[0]]
    theta = -math.atan2(g1[1], g1[0])
    scale = 1.0 / math.sqrt(area2 / 2.0) if normalize else 1.0
    ct, st = math.cos(theta) * scale, math.sin(theta) * scale
    polys = []
    for t in range(tri.num_triangles):
        a, b = new[(t, 0)], new[(t, 1)]
        a = Vec2(float(ct * a[0] - st * a[1]), float(st * a[0] + ct * a[1]))
        b = Vec2(float(ct * b[0] - st * b[1]), float(st * b[0] + ct * b[1]))
        polys.append([Vec2(0.0, 0.0), a, a + b])
    glue = [(h, tri.pair[h]) for h in tri.edges()]
    return build_surface(polys, glue, s.name)


# ---------------------------------------------------------------------------
# probes


@dataclass
class ProbeReport:
    baseline: float
    trials: List[dict]
    verdict: str
    witness: Optional[dict] = None
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "check": "probe",
            "baseline": self.baseline,
            "verdict": self.verdict,
            "skipped": self.skipped,
            "witness": self.witness,
            "trials": self.trials,
        }


def random_direction(dim: int, seed: int) -> Deformation:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(2 * dim)
    return Deformation.from_flat(x / np.linalg.norm(x))


def perturbation_probe(
    s: Surface,
    steps: Sequence[float] = (1e-3, 1e-4),
    trials: int = 500,
    seed: int = 0,
    directions: Sequence[Deformation] = (),
    basis: Optional[PeriodBasis] = None,
    tol: float = 1e-10,
) -> ProbeReport:
    """Random deformations of the given sizes; reports any normalized systole gain.

    Extra ``directions`` (already scaled) run first, as trials 0, 1, ...
    Random trial ``i`` uses seed ``seed + i``.
    """
    pb = basis if basis is not None else build_period_basis(s)
    base = normalized_systole(s)
    records = []
    skipped = 0
    witness = None

    def run(d: Deformation, step, trial_seed, label):
        nonlocal skipped, witness
        try:
            ps = perturb(s, pb, d)
        except InvertedTriangle:
            skipped += 1
            records.append({"step": step, "seed": trial_seed, "kind": label, "skipped": True})
            return
        ns = systole(ps).systole
        rec = {"step": step, "seed": trial_seed, "kind": label, "systole": ns, "delta": ns - base}
        records.append(rec)
        if ns - base > tol and witness is None:
            witness = dict(rec, deformation=d.deltas.tolist())

    for j, d in enumerate(directions):
        run(d, d.norm(), None, f"directed {j}")
    for step in steps:
        for i in range(trials):
            d = random_direction(pb.dim, seed + i).scaled(step)
            run(d, step, seed + i, "random")
    verdict = IMPROVEMENT if witness is not None else NO_IMPROVEMENT
    return ProbeReport(base, records, verdict, witness, skipped)


# ---------------------------------------------------------------------------
# rigidity


def _shortest_edges(pb: PeriodBasis) -> List[HalfEdge]:
    tri = pb.triangulation
    if tri.mode == EXACT:
        sys2 = min(tri.vector(h).norm2() for h in tri.edges())
    else:
        sys2 = min(tri.vector(h).length() for h in tri.edges()) ** 2
    return [h for h in tri.edges() if _is_short(tri.vector(h), sys2)]


def rigidity_matrix(pb: PeriodBasis, shortest: Optional[List[HalfEdge]] = None) -> np.ndarray:
    tri = pb.triangulation
    shortest = shortest if shortest is not None else _shortest_edges(pb)
    k = pb.dim
    rows = []
    for h in shortest:
        v = tri.vector(h)
        c = pb.coeffs[h].astype(float)
        row = np.zeros(2 * k)
        row[0::2] = c * float(v.x)
        row[1::2] = c * float(v.y)
        rows.append(row)
    # first basis element stays horizontal
    norm = np.zeros(2 * k)
    norm[1] = 1.0
    rows.append(norm)
    return np.array(rows)


def first_order_rigidity(s: Surface, basis: Optional[PeriodBasis] = None) -> dict:
    """Kernel of the linearized shortest-length constraints."""
    pb = basis if basis is not None else build_period_basis(s)
    shortest = _shortest_edges(pb)
    rep = systole(s, tri=pb.triangulation)
    if rep.count != len(shortest):
        raise AssertionError("shortest connections are not all triangulation edges")
    m = rigidity_matrix(pb, shortest)
    try:
        _, sv, vt = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise RuntimeError(f"rank computation failed: {exc}") from exc
    tol = 1e-9 * (sv[0] if sv.size else 1.0)
    rank = int((sv > tol).sum())
    kernel = vt[rank:]
    dim = kernel.shape[0]
    return {
        "schema_version": SCHEMA_VERSION,
        "check": "rigidity",
        "verdict": "infinitesimally-rigid" if dim == 0 else "infinitesimally-flexible",
        "ok": dim == 0,
        "kernel_dimension": dim,
        "rank": rank,
        "unknowns": 2 * pb.dim,
        "constraints": len(shortest) + 1,
        "singular_values": sv.tolist(),
        "kernel": [row.tolist() for row in kernel],
    }


def follow_flex(
    pb: PeriodBasis, direction: Deformation, step: float, iterations: int = 30
) -> Deformation:
    """Step along ``direction`` and project back onto the set where every
    shortest edge keeps its length and the first basis element stays
    horizontal (Gauss-Newton, minimum-norm corrections)."""
    tri = pb.triangulation
    shortest = _shortest_edges(pb)
    vs = np.array([[float(tri.vector(h).x), float(tri.vector(h).y)] for h in shortest])
    cs = np.array([pb.coeffs[h] for h in shortest], dtype=float)
    k = pb.dim
    x = direction.flat() / np.linalg.norm(direction.flat()) * step

    def residual(x):
        d = x.reshape(k, 2)
        w = vs + cs @ d
        r = (w * w).sum(1) - (vs * vs).sum(1)
        return np.append(r, x[1]), w

    for _ in range(iterations):
        r, w = residual(x)
        if np.abs(r).max() < 1e-15:
            break
        jac = np.zeros((len(shortest) + 1, 2 * k))
        jac[:-1, 0::2] = 2 * cs * w[:, :1]
        jac[:-1, 1::2] = 2 * cs * w[:, 1:]
        jac[-1, 1] = 1.0
        dx, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        x = x + dx
    return Deformation.from_flat(x)


# ---------------------------------------------------------------------------
# explicit deformations of the named examples


def edge_deformation(
    pb: PeriodBasis,
    prescribed: Dict[HalfEdge, Tuple[float, float]],
    free: Sequence[HalfEdge] = (),
) -> Deformation:
    """Deformation that moves the given edges, keeps every other shortest
    edge fixed and lets ``free`` and all longer edges adjust.

    Raises ValueError when triangle closure cannot be satisfied.
    """
    tri = pb.triangulation
    shortest = set(_shortest_edges(pb))

    def rep(h):
        o = tri.pair[h]
        return (h, 1.0) if h < o else (o, -1.0)

    known: Dict[HalfEdge, np.ndarray] = {}
    for h, dv in prescribed.items():
        r, sgn = rep(h)
        known[r] = known.get(r, np.zeros(2)) + sgn * np.asarray(dv, dtype=float)
    free_set = {rep(h)[0] for h in free}
    unknown = [h for h in tri.edges() if h not in known and (h in free_set or h not in shortest)]
    for h in tri.edges():
        if h not in known and h not in unknown:
            known[h] = np.zeros(2)
    col = {h: j for j, h in enumerate(unknown)}
    a = np.zeros((tri.num_triangles, len(unknown)))
    b = np.zeros((tri.num_triangles, 2))
    for t in range(tri.num_triangles):
        for i in range(3):
            r, sgn = rep((t, i))
            if r in col:
                a[t, col[r]] += sgn
            else:
                b[t] -= sgn * known[r]
    sol, *_ = np.linalg.lstsq(a, b, rcond=None) if unknown else (np.zeros((0, 2)),)
    if np.abs(a @ sol - b).max(initial=0.0) > 1e-12:
        raise ValueError("prescribed edge motion is incompatible with triangle closure")
    delta = dict(known)
    for h, j in col.items():
        delta[h] = sol[j]
    out = np.zeros((pb.dim, 2))
    for idx, h in enumerate(pb.edges):
        r, sgn = rep(h)
        out[idx] = sgn * delta[r]
    return Deformation(out)


def _edge_between(tri: Triangulation, p: Vec2, q: Vec2) -> HalfEdge:
    try:
        return tri.find_edge(p, q)
    except KeyError:
        return tri.pair[tri.find_edge(q, p)]


def _rotation_delta(v: Vec2, theta: float):
    x, y = float(v.x), float(v.y)
    c, s_ = math.cos(theta), math.sin(theta)
    return (c * x - s_ * y - x, s_ * x + c * y - y)


# (0.318, 0.948) replaces (1/2, sqrt(3)/2) in the drawn deformation
FLEX_ANGLE = math.atan2(0.948, 0.318) - math.pi / 3


def directed_deformation(target: str, pb: PeriodBasis, t: float = 1.0, n: Optional[int] = None) -> Deformation:
    """Hand-drawn deformations of the named examples, over the basis ``pb``.

    ``rigid_family`` needs ``n``; ``t`` is epsilon there.  For the two
    nonrigid examples ``t`` scales the drawn rotation angle.
    """
    from .extremal import pt

    tri = pb.triangulation
    if target == "rigid_family":
        if n is None:
            raise ValueError("rigid_family deformation needs n")
        eps = t
        pres: Dict[HalfEdge, Tuple[float, float]] = {}

        def add(p, q, dy):
            h = _edge_between(tri, p, q)
            d0 = pres.get(h, (0.0, 0.0))
            pres[h] = (d0[0], d0[1] + dy)

        # fat parallelogram under label 1 leans right, the one under n-1 leans left;
        # top and bottom move together, the short diagonal absorbs the change
        add(pt(3, 1), pt(5, 1), -eps)
        add(pt(2, 0), pt(4, 0), -eps)
        add(pt(2 * n - 1, 1), pt(2 * n + 1, 1), eps)
        add(pt(2 * n, 0), pt(2 * n + 2, 0), eps)
        free = [
            _edge_between(tri, pt(4, 0), pt(3, 1)),
            _edge_between(tri, pt(2 * n, 0), pt(2 * n + 1, 1)),
        ]
        return edge_deformation(pb, pres, free)
    if target == "nonrigid_h2":
        theta = FLEX_ANGLE * t
        h = _edge_between(tri, pt(2, 0), pt(3, 1))
        return edge_deformation(pb, {h: _rotation_delta(tri.vector(h), theta)})
    if target == "nonrigid_h000":
        theta = FLEX_ANGLE * t
        pres = {}
        for p, q in (((2, 0), (3, 1)), ((2, 2), (0, 2)), ((-1, 1), (0, 0))):
            h = _edge_between(tri, pt(*p), pt(*q))
            pres[h] = _rotation_delta(tri.vector(h), theta)
        return edge_deformation(pb, pres)
    raise KeyError(f"no directed deformation for {target!r}")


# ---------------------------------------------------------------------------
# triangle chains


def _unit_strip(l: int):
    h = math.sqrt(3) / 2
    pts = []
    for k in range(l + 2):
        m, odd = divmod(k, 2)
        pts.append(np.array([m + 0.5, h]) if odd else np.array([float(m), 0.0]))
    return pts


def triangle_chain_propagation_test(
    l: int, eps: float, trials: int = 1000, seed: int = 0
) -> dict:
    """Rebuild a strip of l unit triangles from perturbed data; track apex motion.

    Each step's ratio is the apex displacement over the larger of eps and
    the displacement of the two base points.
    """
    if l < 1:
        raise ValueError("chain length must be at least 1")
    rng = np.random.default_rng(seed)
    ref = _unit_strip(l)
    max_ratio = 0.0
    max_final = 0.0
    for _ in range(trials):
        pts = []
        for p in ref[:2]:
            r = eps * math.sqrt(rng.random())
            a = 2 * math.pi * rng.random()
            pts.append(p + r * np.array([math.cos(a), math.sin(a)]))
        for k in range(l):
            a, b = pts[k], pts[k + 1]
            side = -1 if k % 2 == 0 else 1
            la, lb = 1 + eps * rng.random(), 1 + eps * rng.random()
            c = apex_solve(Vec2(float(a[0]), float(a[1])), Vec2(float(b[0]), float(b[1])), la, lb, side)
            c = np.array([c.x, c.y])
            pts.append(c)
            din = max(np.linalg.norm(a - ref[k]), np.linalg.norm(b - ref[k + 1]), eps)
            dout = np.linalg.norm(c - ref[k + 2])
            if din > 0:
                max_ratio = max(max_ratio, dout / din)
        max_final = max(max_final, float(np.linalg.norm(pts[-1] - ref[-1])))
    return {
        "length": l,
        "eps": eps,
        "trials": trials,
        "max_ratio": max_ratio,
        "max_final_displacement": max_final,
        "ok": max_ratio <= 10.0,
    }


def piece_area_change(s: Surface, pb: PeriodBasis, d: Deformation, kind: str = OTHER) -> float:
    """Unnormalized area change of all pieces of the given kind under ``d``."""
    dec = classify_decomposition(s, pb.triangulation)
    new = deformed_holonomies(pb, d)
    tri = pb.triangulation
    total = 0.0
    for p in dec.pieces:
        if p.kind != kind:
            continue
        for t in p.triangles:
            a0, b0 = tri.vector((t, 0)), tri.vector((t, 1))
            a, b = new[(t, 0)], new[(t, 1)]
            total += 0.5 * (a[0] * b[1] - a[1] * b[0])
            total -= 0.5 * float(a0.x * b0.y - a0.y * b0.x)
    return total


def flex_witness(s: Surface, step: float = 1e-3, basis: Optional[PeriodBasis] = None) -> Optional[dict]:
    """Follow each kernel direction (both signs) and report the best systole gain.

    Returns None when the first-order kernel is trivial.
    """
    pb = basis if basis is not None else build_period_basis(s)
    rig = first_order_rigidity(s, pb)
    if not rig["kernel"]:
        return None
    base = normalized_systole(s)
    best = None
    for idx, kv in enumerate(rig["kernel"]):
        for sign in (1.0, -1.0):
            d = follow_flex(pb, Deformation.from_flat(np.asarray(kv) * sign), step)
            try:
                raw = perturb(s, pb, d, normalize=False)
            except InvertedTriangle:
                continue
            rep = systole(raw)
            gain = rep.systole / math.sqrt(float(raw.area)) - base
            rec = {
                "kernel_index": idx,
                "sign": sign,
                "gain": gain,
                "area_change": float(raw.area) - float(s.area),
                "length_drift": abs(rep.systole - math.sqrt(float(systole(s).systole2))),
                "deformation": d,
            }
            if best is None or gain > best["gain"]:
                best = rec
    return best
