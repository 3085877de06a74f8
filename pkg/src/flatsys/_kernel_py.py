"""Pure-Python float kernel for saddle connection enumeration.

This mirrors ``_kernels.pyx`` line for line and is used when the compiled
extension is not available.

Inputs are flat arrays indexed by half-edge ``3*t + i``: edge holonomies
``ex, ey`` and the glued partner ``nbr``.  The walk unfolds triangles from
each corner inside an open wedge of directions and reports every vertex
seen in the open wedge within distance ``lmax``.
"""

import math


class BudgetExceeded(RuntimeError):
    pass


def _clip_dist2(px, py, qx, qy, lox, loy, hix, hiy):
    # squared distance from 0 to the part of segment PQ between rays lo, hi
    dx, dy = qx - px, qy - py
    den = dx * loy - dy * lox
    s1 = (lox * py - loy * px) / den if den != 0.0 else 0.0
    den = dx * hiy - dy * hix
    s2 = (hix * py - hiy * px) / den if den != 0.0 else 1.0
    if s1 > s2:
        s1, s2 = s2, s1
    s1 = min(max(s1, 0.0), 1.0)
    s2 = min(max(s2, 0.0), 1.0)
    dd = dx * dx + dy * dy
    s = -(px * dx + py * dy) / dd if dd > 0.0 else 0.0
    s = min(max(s, s1), s2)
    x, y = px + s * dx, py + s * dy
    return x * x + y * y


def _sgn(v, scale, tau):
    if v > tau * scale:
        return 1
    if v < -tau * scale:
        return -1
    return 0


def enumerate_float(ex, ey, nbr, lmax, tau, budget):
    """Return ``(hits, nodes)``.

    Each hit is ``(start_corner, end_corner, hx, hy, path)`` where corners
    are half-edge indices ``3*t + k`` naming corner k of triangle t and
    ``path`` lists the half-edges exited, in order.
    """
    n = len(ex)
    bound2 = lmax * lmax
    prune2 = bound2 * (1.0 + 1e-9) + 1e-12
    hits = []
    nodes = 0
    par = []
    cross_he = []
    for t in range(n // 3):
        for k in range(3):
            base = 3 * t
            k1, k2 = base + (k + 1) % 3, base + (k + 2) % 3
            bx, by = ex[base + k], ey[base + k]
            ax, ay = -ex[k2], -ey[k2]
            par.append(-1)
            cross_he.append(k1)
            stack = [(len(par) - 1, k1, ax, ay, bx, by, bx, by, ax, ay)]
            while stack:
                node, h, ax, ay, bx, by, lox, loy, hix, hiy = stack.pop()
                nodes += 1
                if nodes > budget:
                    raise BudgetExceeded(f"node budget {budget} exhausted")
                g = nbr[h]
                tg = g - g % 3
                j = g % 3
                j1, j2 = tg + (j + 1) % 3, tg + (j + 2) % 3
                cx, cy = bx + ex[j1], by + ey[j1]
                lc = math.hypot(lox, loy) * math.hypot(cx, cy)
                s1 = _sgn(lox * cy - loy * cx, lc, tau)
                hc = math.hypot(hix, hiy) * math.hypot(cx, cy)
                s2 = _sgn(cx * hiy - cy * hix, hc, tau)
                # (B, C) edge is half-edge j1, (C, A) edge is half-edge j2
                if s1 > 0 and s2 > 0:
                    c2 = cx * cx + cy * cy
                    if c2 <= bound2:
                        path = []
                        m = node
                        while m >= 0:
                            path.append(cross_he[m])
                            m = par[m]
                        path.reverse()
                        hits.append((base + k, j2, cx, cy, path))
                    if _clip_dist2(bx, by, cx, cy, lox, loy, cx, cy) <= prune2:
                        par.append(node)
                        cross_he.append(j1)
                        stack.append((len(par) - 1, j1, cx, cy, bx, by, lox, loy, cx, cy))
                    if _clip_dist2(cx, cy, ax, ay, cx, cy, hix, hiy) <= prune2:
                        par.append(node)
                        cross_he.append(j2)
                        stack.append((len(par) - 1, j2, ax, ay, cx, cy, cx, cy, hix, hiy))
                elif s1 <= 0:
                    if _clip_dist2(cx, cy, ax, ay, lox, loy, hix, hiy) <= prune2:
                        par.append(node)
                        cross_he.append(j2)
                        stack.append((len(par) - 1, j2, ax, ay, cx, cy, lox, loy, hix, hiy))
                else:
                    if _clip_dist2(bx, by, cx, cy, lox, loy, hix, hiy) <= prune2:
                        par.append(node)
                        cross_he.append(j1)
                        stack.append((len(par) - 1, j1, cx, cy, bx, by, lox, loy, hix, hiy))
    return hits, nodes
