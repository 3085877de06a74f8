import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatsys import (
    HAVE_EXTENSION,
    BudgetExceeded,
    enumerate_saddle_connections,
    systole,
    to_approx,
)
from flatsys.saddle import enumerate_float_py, replay_certificate, _float_arrays
from flatsys.triangulation import flip_to_delaunay, triangulate

import oracles
from conftest import parallelogram_torus

# primitive lattice vector counts in the closed upper half-plane, frozen from oracles.py
SQUARE_COUNTS = {1.5: 4, 2: 4, 3: 8, 5: 24, 10: 96}
TRIANGLE_COUNTS = {1: 3, 3: 12, 10: 114}


def _hol(conns):
    return sorted((round(float(c.holonomy.x), 9), round(float(c.holonomy.y), 9)) for c in conns)


def _oracle(u, v, lmax):
    return sorted((round(x, 9), round(y, 9)) for x, y in oracles.primitive_lattice_vectors(u, v, lmax))


@pytest.mark.parametrize("lmax,count", sorted(SQUARE_COUNTS.items()))
@pytest.mark.parametrize("approx", [False, True])
def test_square_torus_counts(sq, lmax, count, approx):
    s = to_approx(sq) if approx else sq
    conns = enumerate_saddle_connections(s, lmax)
    assert len(conns) == count
    assert _hol(conns) == _oracle((1, 0), (0, 1), lmax)


def test_square_torus_small(sq):
    conns = enumerate_saddle_connections(sq, 1.5)
    assert _hol(conns) == [(-1.0, 1.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
    assert enumerate_saddle_connections(sq, 0.5) == []


@pytest.mark.parametrize("lmax,count", sorted(TRIANGLE_COUNTS.items()))
def test_triangle_torus_counts(tri_torus, lmax, count):
    conns = enumerate_saddle_connections(tri_torus, lmax)
    assert len(conns) == count
    assert _hol(conns) == _oracle((1, 0), (0.5, math.sqrt(3) / 2), lmax)


def test_holonomies_in_upper_half_plane(s4):
    for c in enumerate_saddle_connections(s4, 2):
        h = c.holonomy
        assert h.y > 0 or (h.y == 0 and h.x > 0)
        assert c.length2 == h.norm2()


def test_systole_examples(sq, tri_torus, s4):
    r = systole(sq)
    assert r.systole2 == 1 and r.count == 2
    assert _hol(r.connections) == [(0.0, 1.0), (1.0, 0.0)]
    assert systole(tri_torus).count == 3
    r = systole(s4)
    assert r.systole == 1.0 and r.count == 12


def test_systole_independent_of_triangulation(s4):
    a = systole(s4)
    b = systole(s4, tri=flip_to_delaunay(triangulate(s4), seed=5))
    assert a.systole2 == b.systole2 and a.count == b.count
    assert _hol(a.connections) == _hol(b.connections)


def test_exact_and_float_agree(s4):
    a = enumerate_saddle_connections(s4, 2.5)
    b = enumerate_saddle_connections(to_approx(s4), 2.5)
    assert _hol(a) == _hol(b)
    assert [(c.start, c.end) for c in a] == [(c.start, c.end) for c in b]


def test_certificates_replay(s4):
    tri = triangulate(s4)
    conns = enumerate_saddle_connections(s4, 2.2, tri=tri)
    assert any(c.certificate.crossings for c in conns)
    for c in conns:
        replay_certificate(tri, c)


def test_forged_certificate_rejected(sq):
    tri = triangulate(sq)
    conns = enumerate_saddle_connections(sq, 3, tri=tri)
    c = next(c for c in conns if c.certificate.crossings)
    other = next(d for d in conns if d.holonomy != c.holonomy)
    forged = type(c)(other.holonomy, c.start, c.end, other.length2, c.certificate)
    with pytest.raises(ValueError):
        replay_certificate(tri, forged)


def test_budget(s4):
    with pytest.raises(BudgetExceeded):
        enumerate_saddle_connections(s4, 5, budget=50)
    with pytest.raises(BudgetExceeded):
        enumerate_saddle_connections(to_approx(s4), 5, budget=50)


@pytest.mark.skipif(not HAVE_EXTENSION, reason="compiled kernel not built")
def test_kernels_agree(s4):
    tri = triangulate(to_approx(s4))
    ex, ey, nbr = _float_arrays(tri)
    from flatsys._kernels import enumerate_float as fast

    a, na = enumerate_float_py(ex, ey, nbr, 4.0, 1e-9, 10**7)
    b, nb = fast(np.asarray(ex, float), np.asarray(ey, float), np.asarray(nbr, np.int64), 4.0, 1e-9, 10**7)
    assert na == nb
    assert [(h[0], h[1], h[4]) for h in a] == [(h[0], h[1], h[4]) for h in b]
    assert np.allclose([h[2:4] for h in a], [h[2:4] for h in b], atol=0)


def test_python_fallback_matches(s4):
    s = to_approx(s4)
    a = enumerate_saddle_connections(s, 3, use_extension=False)
    b = enumerate_saddle_connections(s, 3)
    assert _hol(a) == _hol(b)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.3, 3.0), st.floats(0, 2 * math.pi),
    st.floats(-1.0, 1.0), st.floats(0.4, 2.0),
)
def test_random_tori_match_oracle(r, theta, shear, height):
    u = (r * math.cos(theta), r * math.sin(theta))
    # second vector to the left of u
    v = (shear * u[0] - height * u[1] / r, shear * u[1] + height * u[0] / r)
    s = parallelogram_torus(u, v)
    lmax = 4.0 * max(r, 1.0)
    got = _hol(enumerate_saddle_connections(s, lmax))
    want = _oracle(u, v, lmax)
    # a vector within rounding of lmax may legitimately go either way
    edge = [p for p in want if abs(math.hypot(*p) - lmax) < 1e-7]
    if not edge:
        assert got == want


def test_fallback_selected_without_extension():
    import subprocess
    import sys

    code = (
        "import sys; sys.modules['flatsys._kernels'] = None\n"
        "import flatsys, flatsys.saddle as m\n"
        "assert not flatsys.HAVE_EXTENSION\n"
        "assert m._enumerate_float is m.enumerate_float_py\n"
        "from flatsys import named_example, systole\n"
        "print(systole(named_example('s4')).count)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "12"
