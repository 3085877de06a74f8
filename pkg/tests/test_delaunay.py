import math
from collections import Counter

import pytest

from flatsys import Mat2, apply_matrix, global_max_surface, named_example, to_approx
from flatsys.delaunay import (
    DEGENERATE,
    STRICT,
    carnot_audit,
    delaunay_contains_shortest,
    delaunay_triangulation,
    flip_to_delaunay,
    triangulate,
)
from flatsys.extremal import NAMES, rigid_family
from flatsys.qfield import QScalar
from flatsys.triangulation import FlipLimitError, triangulation_surface

from conftest import GLOBAL_STRATA

R3 = QScalar(0, 1)


def _closure_ok(t):
    return all(a + b + c == (a * 0) for a, b, c in t.vectors)


def test_triangle_torus_is_already_triangulated(tri_torus):
    t = triangulate(tri_torus)
    assert t.num_triangles == 2
    assert flip_to_delaunay(t).flips == 0


def test_square_torus_gets_one_diagonal(sq):
    t = triangulate(sq)
    assert t.num_triangles == 2 and t.num_edges == 3


def test_s4_triangles(s4):
    t = triangulate(s4)
    assert t.num_triangles == 10
    assert 2 * t.num_edges == 3 * t.num_triangles
    assert _closure_ok(t)


def test_global_max_h0_needs_no_flips():
    assert flip_to_delaunay(triangulate(global_max_surface((0,)))).flips == 0


def test_s4_hexagon_diagonals_are_cocircular(s4):
    d = delaunay_triangulation(s4)
    counts = Counter(d.delaunay_status().values())
    # a hexagon cut into 4 triangles has 3 interior diagonals
    assert counts[DEGENERATE] == 3
    assert counts[STRICT] == 12
    assert d.is_delaunay()


def _edge_set(t):
    out = set()
    for h in t.edges():
        v = t.vector(h)
        if v.y < 0 or (v.y == 0 and v.x < 0):
            v = -v
        out.add(v)
    return out


def test_flips_undo_a_shear(sq):
    sheared = apply_matrix(sq, Mat2(1, 3, 0, 1))
    d = delaunay_triangulation(sheared)
    ref = delaunay_triangulation(sq)
    assert d.flips >= 1
    # both are Delaunay triangulations of the same square lattice: edges (1,0), (0,1) and one diagonal
    assert {v for v in _edge_set(d) if v.norm2() == 1} == {v for v in _edge_set(ref) if v.norm2() == 1}
    assert d.area() == ref.area()


def test_flips_preserve_area_and_closure():
    for name in NAMES:
        s = named_example(name)
        d = delaunay_triangulation(s, seed=3)
        assert d.area() == s.area
        assert _closure_ok(d)


def test_flip_limit():
    s = apply_matrix(global_max_surface((4,)), Mat2(1, 4, 0, 1))
    with pytest.raises(FlipLimitError):
        flip_to_delaunay(triangulate(s), max_flips=1)


def test_triangulation_surface_round_trip(s4):
    d = delaunay_triangulation(s4)
    back = triangulation_surface(d)
    assert back.stratum == s4.stratum and back.area == s4.area


@pytest.mark.parametrize("name", ["triangle", "square", "s22"])
def test_contains_shortest(name, sq, tri_torus):
    s = {"triangle": tri_torus, "square": sq}.get(name) or named_example(name)
    res = delaunay_contains_shortest(s)
    assert res.ok
    assert res.count == {"triangle": 3, "square": 2, "s22": 15}[name]


def test_contains_shortest_all_seeds():
    for name in NAMES:
        s = named_example(name)
        for seed in range(4):
            assert delaunay_contains_shortest(s, seed=seed)


def test_triangle_count_formula():
    surfaces = [named_example(n) for n in NAMES] + [global_max_surface(g) for g in GLOBAL_STRATA]
    surfaces += [rigid_family(3)]
    for s in surfaces:
        d = delaunay_triangulation(s)
        assert d.num_triangles == 2 * (2 * s.genus - 2 + s.num_singularities)


def test_carnot_triangle_torus(tri_torus):
    rep = carnot_audit(delaunay_triangulation(tri_torus))
    assert rep.ok and all(rep.equality)
    assert rep.area == rep.bound and not rep.strict
    assert rep.carnot == pytest.approx([math.sqrt(3) / 2] * 2, abs=1e-12)


def test_carnot_strict_cases(sq, s4):
    for s in (sq, s4):
        rep = carnot_audit(delaunay_triangulation(s))
        assert rep.ok and rep.strict
    assert carnot_audit(delaunay_triangulation(s4)).bound == 5 * R3 / 2


def test_carnot_needs_unit_systole(sq):
    small = apply_matrix(sq, Mat2(QScalar(1, 0) / 2, 0, 0, QScalar(1, 0) / 2))
    with pytest.raises(ValueError):
        carnot_audit(delaunay_triangulation(small))


def test_carnot_float_mode(s4):
    rep = carnot_audit(delaunay_triangulation(to_approx(s4)))
    assert rep.ok and rep.strict
