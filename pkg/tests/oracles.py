"""Independent reference computations used to freeze expected values.

Nothing here touches the triangulation or the enumeration kernels.
"""

import math


def primitive_lattice_vectors(u, v, lmax):
    """Primitive vectors m*u + n*v of length <= lmax, upper half-plane, sorted by length.

    On a torus with one marked point these are exactly the saddle connections.
    """
    ux, uy = u
    vx, vy = v
    det = abs(ux * vy - uy * vx)
    # |m| <= lmax*|v|/det and |n| <= lmax*|u|/det
    mmax = int(lmax * math.hypot(vx, vy) / det) + 1
    nmax = int(lmax * math.hypot(ux, uy) / det) + 1
    out = []
    for m in range(-mmax, mmax + 1):
        for n in range(-nmax, nmax + 1):
            if math.gcd(m, n) != 1:
                continue
            x, y = m * ux + n * vx, m * uy + n * vy
            if x * x + y * y > lmax * lmax:
                continue
            if y > 1e-12 * max(1.0, abs(x)) or (abs(y) <= 1e-12 * max(1.0, abs(x)) and x > 0):
                out.append((x, y))
    out.sort(key=lambda p: (p[0] ** 2 + p[1] ** 2, -p[0], p[1]))
    return out


def carnot_by_circles(a, b, c):
    """R + r from R = abc/(4K) and r = K/s with Heron's K (acute triangles)."""
    s = (a + b + c) / 2
    k = math.sqrt(s * (s - a) * (s - b) * (s - c))
    return a * b * c / (4 * k) + k / s


def incircle_det(a, b, c, d):
    """The 4x4 lifted determinant, exact for Fraction coordinates in Q."""
    rows = []
    for p in (a, b, c, d):
        rows.append([p[0], p[1], p[0] ** 2 + p[1] ** 2, 1])

    def det(m):
        if len(m) == 1:
            return m[0][0]
        return sum((-1) ** j * m[0][j] * det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))

    return det(rows)


def shoelace(points):
    return sum(p[0] * q[1] - q[0] * p[1] for p, q in zip(points, points[1:] + points[:1])) / 2


def hexagon_area_by_vertices(d1, d2, d3):
    """Unit-sided hexagon with alternate diagonals d1, d2, d3, laid out in the plane."""
    # triangle of diagonals
    ax, ay = 0.0, 0.0
    bx, by = d1, 0.0
    cx = (d1 * d1 + d3 * d3 - d2 * d2) / (2 * d1)
    cy = math.sqrt(d3 * d3 - cx * cx)

    def cap(px, py, qx, qy):
        # apex at distance 1 from both, on the right of p->q
        mx, my = (px + qx) / 2, (py + qy) / 2
        dx, dy = qx - px, qy - py
        dl = math.hypot(dx, dy)
        h = math.sqrt(1 - dl * dl / 4)
        return mx + h * dy / dl, my - h * dx / dl

    pts = [(ax, ay), cap(ax, ay, bx, by), (bx, by), cap(bx, by, cx, cy), (cx, cy), cap(cx, cy, ax, ay)]
    return shoelace(pts)


def kissing_bound(orders):
    return sum(3 * (k + 1) for k in orders)


def systole_bound(genus, r):
    return (math.sqrt(3) / 2 * (2 * genus - 2 + r)) ** -0.5
