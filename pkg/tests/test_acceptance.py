"""Acceptance criteria, one pass/fail line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from flatsys import global_max_surface, named_example  # noqa: E402
from flatsys.delaunay import delaunay_contains_shortest, delaunay_triangulation  # noqa: E402
from flatsys.extremal import NAMES, aligned_slit, chain_glue, find_slit, rigid_family, slit_glue  # noqa: E402
from flatsys.geometry import hexagon_area_F, isosceles_sum  # noqa: E402
from flatsys.qfield import QScalar  # noqa: E402
from flatsys.saddle import enumerate_saddle_connections  # noqa: E402
from flatsys.verify import (  # noqa: E402
    NO_IMPROVEMENT,
    InvertedTriangle,
    build_period_basis,
    check_global_max,
    check_local_max_criterion,
    directed_deformation,
    first_order_rigidity,
    flex_witness,
    kissing_audit,
    normalized_systole,
    perturb,
    perturbation_probe,
    piece_area_change,
    random_direction,
    triangle_chain_propagation_test,
)

import oracles  # noqa: E402
from conftest import ACCEPTANCE_LINES, GLOBAL_STRATA, LOCAL_NAMES, parallelogram_torus, square_torus, triangle_torus  # noqa: E402


def report(num, ok, text):
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def corpus():
    out = [("square torus", square_torus()), ("triangle torus", triangle_torus())]
    out += [(n, named_example(n)) for n in NAMES]
    out += [(f"global_max {g}", global_max_surface(g)) for g in GLOBAL_STRATA]
    out += [(f"rigid_family {n}", rigid_family(n)) for n in (2, 3, 4)]
    return out


def test_c01_global_bound_equality():
    worst = 0.0
    vals = {}
    for g in GLOBAL_STRATA:
        s = global_max_surface(g)
        ns = normalized_systole(s)
        bound = oracles.systole_bound(s.genus, s.num_singularities)
        vals[g] = ns
        worst = max(worst, abs(ns - bound))
    ok = worst <= 1e-12
    assert report(1, ok, f"global maxima attain the bound: max |Sys - bound| = {worst:.1e} (tol 1e-12); H(4) -> {vals[(4,)]:.7f}")


def test_c02_global_bound_inequality():
    worst = -math.inf
    done = 0
    for g in GLOBAL_STRATA:
        s = global_max_surface(g)
        pb = build_period_basis(s)
        bound = oracles.systole_bound(s.genus, s.num_singularities)
        for i in range(50):
            step = 0.05 * (i + 1) / 50
            try:
                p = perturb(s, pb, random_direction(pb.dim, 1000 + i).scaled(step))
            except InvertedTriangle:
                continue
            done += 1
            worst = max(worst, normalized_systole(p) - bound)
    ok = worst < 0
    assert report(2, ok, f"{done} perturbations (step <= 0.05) stay below the bound: max(Sys - bound) = {worst:.2e} < 0")


def test_c03_triangle_count():
    bad = []
    items = corpus()
    for name, s in items:
        d = delaunay_triangulation(s)
        if d.num_triangles != 2 * (2 * s.genus - 2 + s.num_singularities):
            bad.append(name)
    assert report(3, not bad, f"Delaunay triangle count = 2(2g-2+r) on {len(items)} corpus surfaces; mismatches: {bad or 'none'}")


def test_c04_shortest_are_delaunay_edges():
    items = corpus()
    failures = []
    checked = 0
    for name, s in items:
        for seed in range(10):
            checked += 1
            if not delaunay_contains_shortest(s, seed=seed):
                failures.append((name, seed))
    rng = np.random.default_rng(2024)
    base = [s for _, s in items]
    bases = [build_period_basis(s) for s in base]
    pert = 0
    while pert < 200:
        k = int(rng.integers(len(base)))
        pb = bases[k]
        step = float(rng.uniform(1e-4, 0.05))
        try:
            p = perturb(base[k], pb, random_direction(pb.dim, int(rng.integers(1 << 30))).scaled(step))
        except InvertedTriangle:
            continue
        pert += 1
        for seed in range(10):
            checked += 1
            if not delaunay_contains_shortest(p, seed=seed):
                failures.append((f"perturbed {k}", seed))
    ok = not failures
    assert report(4, ok, f"shortest connections are Delaunay edges in {checked} runs ({len(items)} corpus + 200 perturbed, 10 flip seeds); failures: {len(failures)}")


def test_c05_kissing():
    bad = []
    for name, s in corpus():
        r = kissing_audit(s)
        if r["count"] > r["bound"]:
            bad.append(name)
        if r["equality"] != check_global_max(s)["ok"]:
            bad.append(name + " (equality)")
    spot = {
        "triangle torus": kissing_audit(triangle_torus()),
        "H(4) max": kissing_audit(global_max_surface((4,))),
        "s4": kissing_audit(named_example("s4")),
    }
    want = {"triangle torus": (3, 3), "H(4) max": (15, 15), "s4": (12, 15)}
    got = {k: (v["count"], v["bound"]) for k, v in spot.items()}
    ok = not bad and got == want
    assert report(5, ok, f"count <= bound on corpus, equality iff global max; spot values {got}")


def test_c06_local_maxima():
    t0 = time.perf_counter()
    crit = {n: check_local_max_criterion(named_example(n))["ok"] for n in LOCAL_NAMES}
    verdicts = {}
    best = -math.inf
    for n in LOCAL_NAMES:
        rep = perturbation_probe(named_example(n), steps=(1e-3, 1e-4), trials=500, seed=0, tol=1e-10)
        verdicts[n] = rep.verdict
        best = max(best, max(t["delta"] for t in rep.trials if "delta" in t))
    elapsed = time.perf_counter() - t0
    ok = all(crit.values()) and all(v == NO_IMPROVEMENT for v in verdicts.values()) and elapsed <= 120
    assert report(6, ok, f"criterion holds on {sum(crit.values())}/5; 5 x 1000 probes find no gain (best delta {best:.2e}, tol 1e-10) in {elapsed:.1f}s (limit 120s)")


def test_c07_failure_cases():
    parts = []
    ok = True
    for n in ("nonrigid_h2", "nonrigid_h000"):
        s = named_example(n)
        crit = check_local_max_criterion(s)
        pb = build_period_basis(s)
        dim = first_order_rigidity(s, pb)["kernel_dimension"]
        w = flex_witness(s, 1e-3, pb)
        gain = w["gain"] if w else 0.0
        ok &= (not crit["ok"]) and dim >= 1 and gain > 1e-10
        parts.append(f"{n}: criterion {'fails' if not crit['ok'] else 'holds'}, kernel {dim}, gain {gain:.2e}")
    assert report(7, ok, "; ".join(parts))


def test_c08_rigid_not_maximal():
    eps = 1e-3
    n = 3
    s = rigid_family(n)
    pb = build_period_basis(s)
    dim = first_order_rigidity(s, pb)["kernel_dimension"]
    d = directed_deformation("rigid_family", pb, eps, n=n)
    poly = piece_area_change(s, pb, d)
    target = -(2 * n - 3) * eps
    raw = perturb(s, pb, d, normalize=False)
    total = float(raw.area) - float(s.area)
    gain = normalized_systole(perturb(s, pb, d)) - normalized_systole(s)
    s2 = rigid_family(2)
    pb2 = build_period_basis(s2)
    d2 = directed_deformation("rigid_family", pb2, eps, n=2)
    gain2 = normalized_systole(perturb(s2, pb2, d2)) - normalized_systole(s2)
    ok = dim == 0 and abs(poly - target) <= 0.1 * abs(target) and total < 0 and gain > 0 and gain2 <= 1e-10
    assert report(
        8,
        ok,
        f"n=3 kernel {dim}; polygon area change {poly:.3e} vs -(2n-3)eps = {target:.1e}; total {total:.3e}; "
        f"Sys gain {gain:.2e}; n=2 gain {gain2:.1e}",
    )


def test_c09_surgery():
    t = triangle_torus()
    a = find_slit(t, (0, 0))
    b = aligned_slit(t, (0, 0), a.connection.holonomy)
    g = slit_glue(a, b)
    part1 = g.stratum.orders == (2,) and g.genus == 2 and g.area == QScalar(0, 1)
    out, _ = chain_glue(named_example("s4"), [((4, 4), (0, 0), (0, 0))])
    part2 = out.stratum.orders == (6,) and check_local_max_criterion(out)["ok"]
    ok = part1 and part2
    assert report(
        9,
        ok,
        f"two triangle tori -> {g.stratum}, genus {g.genus}, area {g.area} (wanted H(2), genus 2, area r3); "
        f"s4 + H(0,0) -> {out.stratum}, criterion {'holds' if part2 else 'fails'}",
    )


def test_c10_closed_forms():
    rng = np.random.default_rng(10)
    x = rng.uniform(1.0, 2.0, size=(1000, 2))
    x = x[np.abs(x[:, 0] - x[:, 1]) > 1e-12]
    lo, hi = x.min(axis=1), x.max(axis=1)
    mono = all(isosceles_sum(a) < isosceles_sum(b) for a, b in zip(lo, hi))
    r, h = math.sqrt(3), 1e-5
    grad = []
    for i in range(3):
        up, dn = [r] * 3, [r] * 3
        up[i] += h
        dn[i] -= h
        grad.append((hexagon_area_F(*up) - hexagon_area_F(*dn)) / (2 * h))
    gmax = max(abs(g) for g in grad)
    chain = triangle_chain_propagation_test(1, 1e-4, trials=1000, seed=0)
    ok = mono and gmax < 1e-8 and chain["max_ratio"] <= 10
    assert report(10, ok, f"isosceles sum increasing on {len(lo)} pairs: {mono}; |grad F| = {gmax:.1e} (tol 1e-8); apex ratio {chain['max_ratio']:.2f} <= 10")


def test_c11_oracle_equivalence():
    rng = np.random.default_rng(11)
    mismatched = 0
    total = 0
    for _ in range(20):
        r = rng.uniform(0.5, 1.5)
        th = rng.uniform(0, 2 * math.pi)
        u = (r * math.cos(th), r * math.sin(th))
        shear, height = rng.uniform(-1, 1), rng.uniform(0.5, 1.5)
        v = (shear * u[0] - height * u[1] / r, shear * u[1] + height * u[0] / r)
        lmax = 10.0
        got = sorted((round(float(c.holonomy.x), 9), round(float(c.holonomy.y), 9)) for c in enumerate_saddle_connections(parallelogram_torus(u, v), lmax))
        want = sorted((round(x, 9), round(y, 9)) for x, y in oracles.primitive_lattice_vectors(u, v, lmax))
        total += len(want)
        mismatched += got != want
    ok = mismatched == 0
    assert report(11, ok, f"20 random tori at Lmax = 10: {mismatched} mismatches against the lattice oracle ({total} vectors)")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
