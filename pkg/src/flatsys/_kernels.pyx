# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernel for saddle connection enumeration.

Same algorithm and output as ``_kernel_py.enumerate_float``.
"""

from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, realloc, free

from ._kernel_py import BudgetExceeded


cdef struct Node:
    Py_ssize_t node
    Py_ssize_t h
    double ax, ay, bx, by, lox, loy, hix, hiy


cdef inline double _dmin(double a, double b) nogil:
    return a if a < b else b


cdef inline double _dmax(double a, double b) nogil:
    return a if a > b else b


cdef inline double _clip_dist2(double px, double py, double qx, double qy,
                               double lox, double loy, double hix, double hiy) nogil:
    cdef double dx = qx - px, dy = qy - py
    cdef double den, s1, s2, dd, s, x, y, tmp
    den = dx * loy - dy * lox
    s1 = (lox * py - loy * px) / den if den != 0.0 else 0.0
    den = dx * hiy - dy * hix
    s2 = (hix * py - hiy * px) / den if den != 0.0 else 1.0
    if s1 > s2:
        tmp = s1
        s1 = s2
        s2 = tmp
    s1 = _dmin(_dmax(s1, 0.0), 1.0)
    s2 = _dmin(_dmax(s2, 0.0), 1.0)
    dd = dx * dx + dy * dy
    s = -(px * dx + py * dy) / dd if dd > 0.0 else 0.0
    s = _dmin(_dmax(s, s1), s2)
    x = px + s * dx
    y = py + s * dy
    return x * x + y * y


cdef inline int _sgn(double v, double scale, double tau) nogil:
    if v > tau * scale:
        return 1
    if v < -tau * scale:
        return -1
    return 0


cdef class _Buf:
    cdef Node* stack
    cdef Py_ssize_t ssize, scap
    cdef Py_ssize_t* par
    cdef Py_ssize_t* cross
    cdef Py_ssize_t nsize, ncap

    def __cinit__(self):
        self.scap = 256
        self.ncap = 1024
        self.ssize = 0
        self.nsize = 0
        self.stack = <Node*> malloc(self.scap * sizeof(Node))
        self.par = <Py_ssize_t*> malloc(self.ncap * sizeof(Py_ssize_t))
        self.cross = <Py_ssize_t*> malloc(self.ncap * sizeof(Py_ssize_t))
        if self.stack == NULL or self.par == NULL or self.cross == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.stack)
        free(self.par)
        free(self.cross)

    cdef Py_ssize_t add_node(self, Py_ssize_t parent, Py_ssize_t he) except -1:
        cdef Py_ssize_t* p
        cdef Py_ssize_t* c
        if self.nsize == self.ncap:
            p = <Py_ssize_t*> realloc(self.par, 2 * self.ncap * sizeof(Py_ssize_t))
            if p == NULL:
                raise MemoryError()
            self.par = p
            c = <Py_ssize_t*> realloc(self.cross, 2 * self.ncap * sizeof(Py_ssize_t))
            if c == NULL:
                raise MemoryError()
            self.cross = c
            self.ncap *= 2
        self.par[self.nsize] = parent
        self.cross[self.nsize] = he
        self.nsize += 1
        return self.nsize - 1

    cdef int push(self, Py_ssize_t node, Py_ssize_t h, double ax, double ay,
                  double bx, double by, double lox, double loy,
                  double hix, double hiy) except -1:
        cdef Node* s
        if self.ssize == self.scap:
            s = <Node*> realloc(self.stack, 2 * self.scap * sizeof(Node))
            if s == NULL:
                raise MemoryError()
            self.stack = s
            self.scap *= 2
        s = &self.stack[self.ssize]
        s.node = node
        s.h = h
        s.ax = ax
        s.ay = ay
        s.bx = bx
        s.by = by
        s.lox = lox
        s.loy = loy
        s.hix = hix
        s.hiy = hiy
        self.ssize += 1
        return 0


def enumerate_float(double[::1] ex, double[::1] ey, long[::1] nbr,
                    double lmax, double tau, long budget):
    cdef Py_ssize_t n = ex.shape[0]
    cdef double bound2 = lmax * lmax
    cdef double prune2 = bound2 * (1.0 + 1e-9) + 1e-12
    cdef long nodes = 0
    cdef Py_ssize_t t, k, base, k1, k2, g, tg, j, j1, j2, m, nd
    cdef double ax, ay, bx, by, lox, loy, hix, hiy, cx, cy, lc, hc
    cdef int s1, s2
    cdef Node cur
    cdef _Buf buf = _Buf()
    hits = []
    for t in range(n // 3):
        for k in range(3):
            base = 3 * t
            k1 = base + (k + 1) % 3
            k2 = base + (k + 2) % 3
            bx = ex[base + k]
            by = ey[base + k]
            ax = -ex[k2]
            ay = -ey[k2]
            nd = buf.add_node(-1, k1)
            buf.push(nd, k1, ax, ay, bx, by, bx, by, ax, ay)
            while buf.ssize > 0:
                buf.ssize -= 1
                cur = buf.stack[buf.ssize]
                nodes += 1
                if nodes > budget:
                    raise BudgetExceeded(f"node budget {budget} exhausted")
                ax = cur.ax
                ay = cur.ay
                bx = cur.bx
                by = cur.by
                lox = cur.lox
                loy = cur.loy
                hix = cur.hix
                hiy = cur.hiy
                g = nbr[cur.h]
                j = g % 3
                tg = g - j
                j1 = tg + (j + 1) % 3
                j2 = tg + (j + 2) % 3
                cx = bx + ex[j1]
                cy = by + ey[j1]
                lc = sqrt(lox * lox + loy * loy) * sqrt(cx * cx + cy * cy)
                s1 = _sgn(lox * cy - loy * cx, lc, tau)
                hc = sqrt(hix * hix + hiy * hiy) * sqrt(cx * cx + cy * cy)
                s2 = _sgn(cx * hiy - cy * hix, hc, tau)
                if s1 > 0 and s2 > 0:
                    if cx * cx + cy * cy <= bound2:
                        path = []
                        m = cur.node
                        while m >= 0:
                            path.append(buf.cross[m])
                            m = buf.par[m]
                        path.reverse()
                        hits.append((base + k, j2, cx, cy, path))
                    if _clip_dist2(bx, by, cx, cy, lox, loy, cx, cy) <= prune2:
                        nd = buf.add_node(cur.node, j1)
                        buf.push(nd, j1, cx, cy, bx, by, lox, loy, cx, cy)
                    if _clip_dist2(cx, cy, ax, ay, cx, cy, hix, hiy) <= prune2:
                        nd = buf.add_node(cur.node, j2)
                        buf.push(nd, j2, ax, ay, cx, cy, cx, cy, hix, hiy)
                elif s1 <= 0:
                    if _clip_dist2(cx, cy, ax, ay, lox, loy, hix, hiy) <= prune2:
                        nd = buf.add_node(cur.node, j2)
                        buf.push(nd, j2, ax, ay, cx, cy, lox, loy, hix, hiy)
                else:
                    if _clip_dist2(bx, by, cx, cy, lox, loy, hix, hiy) <= prune2:
                        nd = buf.add_node(cur.node, j1)
                        buf.push(nd, j1, cx, cy, bx, by, lox, loy, hix, hiy)
    return hits, nodes
