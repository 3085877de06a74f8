"""Compiled versus pure-Python enumeration kernel.

    python3 benchmarks/bench_enumerate.py [--lmax 60] [--repeat 3]

Both kernels run on the same triangulation; the hit lists must agree.
"""

import argparse
import time

from flatsys import HAVE_EXTENSION, build_surface, named_example
from flatsys.geometry import Vec2
from flatsys.saddle import enumerate_saddle_connections
from flatsys.surface import to_approx
from flatsys.triangulation import triangulate


def parallelogram_torus():
    pts = [Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(1.37, 0.91), Vec2(0.37, 0.91)]
    return build_surface([pts], [((0, 0), (0, 2)), ((0, 1), (0, 3))], "parallelogram torus")


def timed(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lmax", type=float, default=60.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not HAVE_EXTENSION:
        print("compiled kernel not built; only the Python kernel is available")
    cases = [("parallelogram torus", parallelogram_torus(), args.lmax),
             ("s4 (float)", to_approx(named_example("s4")), args.lmax / 4)]
    print(f"{'surface':24s} {'lmax':>7s} {'count':>8s} {'python s':>9s} {'ext s':>8s} {'speedup':>8s}")
    for name, s, lmax in cases:
        tri = triangulate(s)
        tp, ref = timed(lambda: enumerate_saddle_connections(s, lmax, tri=tri, use_extension=False), 1)
        if HAVE_EXTENSION:
            tc, got = timed(lambda: enumerate_saddle_connections(s, lmax, tri=tri), args.repeat)
            assert [c.holonomy for c in got] == [c.holonomy for c in ref], "kernels disagree"
            print(f"{name:24s} {lmax:7.1f} {len(ref):8d} {tp:9.3f} {tc:8.3f} {tp / tc:7.1f}x")
        else:
            print(f"{name:24s} {lmax:7.1f} {len(ref):8d} {tp:9.3f} {'-':>8s} {'-':>8s}")


if __name__ == "__main__":
    main()
