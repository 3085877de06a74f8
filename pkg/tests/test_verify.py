import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatsys import global_max_surface, named_example, systole
from flatsys.extremal import NAMES, rigid_family
from flatsys.geometry import TriangleGeom, Vec2, apex_solve
from flatsys.verify import (
    HEXAGON,
    IMPROVEMENT,
    NO_IMPROVEMENT,
    OTHER,
    TRIANGLE,
    Deformation,
    InvertedTriangle,
    build_period_basis,
    check_global_max,
    check_local_max_criterion,
    classify_decomposition,
    deformed_holonomies,
    directed_deformation,
    first_order_rigidity,
    flex_witness,
    follow_flex,
    kissing_audit,
    normalized_systole,
    perturb,
    perturbation_probe,
    piece_area_change,
    random_direction,
    triangle_chain_propagation_test,
)

from conftest import GLOBAL_STRATA, LOCAL_NAMES

BASE_TRI = (math.sqrt(3) / 2) ** -0.5
BASE_S4 = (3 * math.sqrt(3)) ** -0.5


def test_decomposition_triangle_torus(tri_torus):
    d = classify_decomposition(tri_torus)
    assert d.count(TRIANGLE) == 2 and d.count(HEXAGON) == 0
    assert d.triangles_connected


def test_decomposition_s4(s4):
    d = classify_decomposition(s4)
    assert d.count(TRIANGLE) == 6 and d.count(HEXAGON) == 1
    assert d.triangles_connected and d.hexagon_condition


def test_decomposition_nonrigid():
    d = classify_decomposition(named_example("nonrigid_h2"))
    assert d.count(TRIANGLE) == 2 and d.count(HEXAGON) == 1
    assert not d.hexagon_condition
    d = classify_decomposition(named_example("nonrigid_h000"))
    assert not d.triangles_connected and d.hexagon_condition


def test_decomposition_rigid_family():
    d = classify_decomposition(rigid_family(3))
    assert d.count(OTHER) == 1 and d.count(TRIANGLE) == 10


def test_decomposition_needs_exact(s4):
    from flatsys import to_approx

    with pytest.raises(ValueError):
        classify_decomposition(to_approx(s4))


def test_global_max_check(sq, s4):
    assert check_global_max(global_max_surface((4,)))["ok"]
    assert not check_global_max(s4)["ok"]
    assert not check_global_max(sq)["ok"]


@pytest.mark.parametrize("name", LOCAL_NAMES)
def test_local_criterion_holds(name):
    assert check_local_max_criterion(named_example(name))["verdict"] == "criterion-satisfied"


def test_local_criterion_fails(tri_torus):
    rep = check_local_max_criterion(named_example("nonrigid_h000"))
    assert not rep["ok"] and rep["reasons"] == ["triangle set is disconnected"]
    assert not check_local_max_criterion(named_example("nonrigid_h2"))["ok"]
    assert check_local_max_criterion(tri_torus)["ok"]


def test_kissing_examples(tri_torus, s4):
    r = kissing_audit(tri_torus)
    assert (r["count"], r["bound"], r["equality"]) == (3, 3, True)
    r = kissing_audit(global_max_surface((4,)))
    assert (r["count"], r["bound"], r["equality"]) == (15, 15, True)
    r = kissing_audit(s4)
    assert (r["count"], r["bound"], r["equality"]) == (12, 15, False)


def test_kissing_equivalence():
    surfaces = [named_example(n) for n in NAMES] + [global_max_surface(g) for g in GLOBAL_STRATA]
    for s in surfaces:
        assert kissing_audit(s)["equality"] == check_global_max(s)["ok"]


def test_period_basis_dimensions(sq, tri_torus, s4):
    pb = build_period_basis(sq)
    assert pb.dim == 2
    assert {tuple(v) for v in pb.holonomy} == {(1.0, 0.0), (0.0, 1.0)}
    assert build_period_basis(tri_torus).dim == 2
    pb = build_period_basis(s4)
    assert pb.dim == 6
    assert all(v.norm2() == 1 for v in pb.vectors())
    v0 = pb.vectors()[0]
    assert v0.y == 0 and v0.x > 0


def test_period_basis_all_examples():
    for name in NAMES:
        s = named_example(name)
        pb = build_period_basis(s)
        assert pb.dim == 2 * s.genus + s.num_singularities - 1


def test_zero_deformation(s4):
    pb = build_period_basis(s4)
    p = perturb(s4, pb, Deformation.zero(pb))
    assert float(p.area) == pytest.approx(1.0, abs=1e-12)
    assert systole(p).systole == pytest.approx(BASE_S4, abs=1e-12)
    assert systole(p).count == 12
    # same coordinates up to the homothety
    f = 1 / math.sqrt(float(s4.area))
    tri = pb.triangulation
    for t, poly in enumerate(p.polygons):
        e0 = poly[1] - poly[0]
        ref = tri.vector((t, 0))
        assert (e0.x, e0.y) == pytest.approx((float(ref.x) * f, float(ref.y) * f), abs=1e-12)


def test_perturb_is_linear(s4):
    pb = build_period_basis(s4)
    d = random_direction(pb.dim, 7).scaled(1e-3)
    p = perturb(s4, pb, d, normalize=False)
    new = deformed_holonomies(pb, d)
    g1 = new[pb.edges[0]]
    theta = -math.atan2(g1[1], g1[0])
    c, s_ = math.cos(theta), math.sin(theta)
    for t, poly in enumerate(p.polygons):
        for i in range(3):
            e = poly[(i + 1) % 3] - poly[i]
            w = new[(t, i)]
            assert (e.x, e.y) == pytest.approx((c * w[0] - s_ * w[1], s_ * w[0] + c * w[1]), abs=1e-10)


def test_perturb_rejects_inversion(tri_torus):
    pb = build_period_basis(tri_torus)
    with pytest.raises(InvertedTriangle):
        perturb(tri_torus, pb, Deformation(np.full((pb.dim, 2), -3.0)))


def test_triangle_torus_off_the_max(tri_torus):
    pb = build_period_basis(tri_torus)
    d = Deformation(np.array([[0.0, 0.0], [1e-3, 0.0]]))
    assert normalized_systole(perturb(tri_torus, pb, d)) < BASE_TRI


def test_s4_random_directions_decrease(s4):
    pb = build_period_basis(s4)
    for i in range(60):
        p = perturb(s4, pb, random_direction(pb.dim, i).scaled(1e-3))
        assert normalized_systole(p) < BASE_S4 - 1e-8


def test_probe_global_max_h0():
    rep = perturbation_probe(global_max_surface((0,)), steps=(1e-2, 1e-3), trials=40)
    assert rep.verdict == NO_IMPROVEMENT


def test_probe_is_reproducible(s4):
    a = perturbation_probe(s4, steps=(1e-3,), trials=10, seed=4).to_dict()
    b = perturbation_probe(s4, steps=(1e-3,), trials=10, seed=4).to_dict()
    assert a == b


def test_probe_rigid_family_with_directed_trial():
    s = rigid_family(3)
    pb = build_period_basis(s)
    d = directed_deformation("rigid_family", pb, 1e-3, n=3)
    rep = perturbation_probe(s, steps=(1e-3,), trials=20, directions=[d], basis=pb)
    assert rep.verdict == IMPROVEMENT
    assert rep.witness["kind"] == "directed 0"


@pytest.mark.parametrize("name,dim", [("s4", 0), ("s22", 0), ("nonrigid_h2", 2), ("nonrigid_h000", 1)])
def test_rigidity(name, dim):
    r = first_order_rigidity(named_example(name))
    assert r["kernel_dimension"] == dim
    assert r["ok"] == (dim == 0)


def test_rigid_family_is_rigid():
    assert first_order_rigidity(rigid_family(3))["kernel_dimension"] == 0


@pytest.mark.parametrize("name", ["nonrigid_h2", "nonrigid_h000"])
def test_flex_keeps_lengths_and_gains(name):
    s = named_example(name)
    pb = build_period_basis(s)
    w = flex_witness(s, 1e-3, pb)
    assert w["gain"] > 1e-10
    assert w["length_drift"] < 1e-6
    assert w["area_change"] < 0


def test_follow_flex_on_constraint_set():
    s = named_example("nonrigid_h2")
    pb = build_period_basis(s)
    kv = first_order_rigidity(s, pb)["kernel"][0]
    d = follow_flex(pb, Deformation.from_flat(kv), 1e-2)
    p = perturb(s, pb, d, normalize=False)
    rep = systole(p)
    assert rep.systole == pytest.approx(1.0, abs=1e-12)
    assert rep.count == 6


@pytest.mark.parametrize("name", ["nonrigid_h2", "nonrigid_h000"])
def test_drawn_deformations(name):
    s = named_example(name)
    pb = build_period_basis(s)
    d = directed_deformation(name, pb, 1.0)
    p = perturb(s, pb, d, normalize=False)
    rep = systole(p)
    assert rep.systole == pytest.approx(1.0, abs=1e-12)
    assert float(p.area) < float(s.area)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_rigid_family_deformation(n):
    eps = 1e-3
    s = rigid_family(n)
    pb = build_period_basis(s)
    d = directed_deformation("rigid_family", pb, eps, n=n)
    assert piece_area_change(s, pb, d) == pytest.approx(-(2 * n - 3) * eps, rel=1e-9)
    p = perturb(s, pb, d, normalize=False)
    assert float(p.area) - float(s.area) == pytest.approx(-(2 * n - 4) * eps, rel=1e-6)
    assert systole(p).systole == pytest.approx(1.0, abs=1e-12)
    assert normalized_systole(perturb(s, pb, d)) > normalized_systole(s)


def test_rigid_family_two_cancels():
    s = rigid_family(2)
    pb = build_period_basis(s)
    d = directed_deformation("rigid_family", pb, 1e-3, n=2)
    assert not normalized_systole(perturb(s, pb, d)) > normalized_systole(s) + 1e-10


def test_directed_unknown(s4):
    with pytest.raises(KeyError):
        directed_deformation("s4", build_period_basis(s4))


def test_chain_propagation():
    r = triangle_chain_propagation_test(1, 1e-4, trials=1000)
    assert r["ok"] and r["max_ratio"] <= 10
    r = triangle_chain_propagation_test(3, 0.0, trials=5)
    assert r["max_final_displacement"] < 1e-15  # float round-off of the reference strip
    eps = 1e-5
    r = triangle_chain_propagation_test(5, eps, trials=200)
    assert r["max_final_displacement"] <= 1e5 * eps * 2


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-6, 1e-2), st.floats(0, 1), st.floats(0, 1), st.integers(0, 2))
def test_long_side_expands_area(eps, u, v, which):
    sides = [1 + eps * u, 1 + eps * v]
    sides.insert(which, 1 + eps)
    assert TriangleGeom(tuple(sides)).area() > math.sqrt(3) / 4 + 0.25 * eps


@settings(max_examples=300, deadline=None)
@given(st.floats(0.2, 1.95), st.floats(0, 1), st.floats(0, 1))
def test_shorter_sides_comparison(d, xs, ys):
    # apex above [0, d] (both base angles at most a right angle), both sides at least 1
    x = xs * d
    ymin = math.sqrt(max(0.0, 1 - min(x, d - x) ** 2))
    y = ymin + ys
    a, b = Vec2(0.0, 0.0), Vec2(d, 0.0)
    ref = apex_solve(a, b, 1.0, 1.0, 1)
    assert d * y / 2 >= d * ref.y / 2 - 1e-12
