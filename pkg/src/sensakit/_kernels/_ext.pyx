"""Compiled kernels: dense-graph Prim MST and pairwise Gaussian kernel sums.

Semantics match ``sensakit._kernels._numpy_impl`` (same update rules, same
tie-breaking, same summation order per entry); results agree to rounding.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sqrt
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


cdef inline double fast_exp(double x) nogil:
    # exp for x <= 0: 2^k * P13(r) with r = x - k*ln2; inputs below the
    # double underflow threshold are clamped so the exponent bits stay valid.
    # Max relative error ~1 ulp vs libm (checked in tests against np.exp).
    if x < -708.0:
        x = -708.0
    cdef double kd = floor(x * 1.4426950408889634074 + 0.5)
    cdef double r = (x - kd * 6.93147180369123816490e-01) \
        - kd * 1.90821492927058770002e-10
    cdef double p = 1.6059043836821614599e-10      # 1/13!
    p = p * r + 2.0876756987868098979e-09          # 1/12!
    p = p * r + 2.5052108385441718775e-08          # 1/11!
    p = p * r + 2.7557319223985890653e-07          # 1/10!
    p = p * r + 2.7557319223985892511e-06          # 1/9!
    p = p * r + 2.4801587301587301566e-05          # 1/8!
    p = p * r + 1.9841269841269841253e-04          # 1/7!
    p = p * r + 1.3888888888888889419e-03          # 1/6!
    p = p * r + 8.3333333333333332177e-03          # 1/5!
    p = p * r + 4.1666666666666664354e-02          # 1/4!
    p = p * r + 1.6666666666666665741e-01          # 1/3!
    p = p * r + 0.5
    p = p * r + 1.0
    p = p * r + 1.0
    cdef uint64_t bits = (<uint64_t> (<int64_t> kd + 1023)) << 52
    return p * (<double*> &bits)[0]


def pair_sums(double[::1] x, double[::1] y, double h):
    """Self-evaluated Gaussian kernel sums for both marginals and the joint.

    Returns (sx, sy, sxy) with
        sx[j]  = sum_i exp(-((x[j]-x[i])/h)^2 / 2)
        sy[j]  = sum_i exp(-((y[j]-y[i])/h)^2 / 2)
        sxy[j] = sum_i (product of the two factors)
    including the i == j terms. Only i < j pairs are visited; each
    contribution is added to both endpoints, which keeps the role swap
    (x, y) -> (y, x) bit-exact.
    """
    cdef Py_ssize_t n = x.shape[0]
    if y.shape[0] != n:
        raise ValueError("length mismatch")
    if not h > 0.0:
        raise ValueError("bandwidth must be positive")
    sx_arr = np.ones(n)
    sy_arr = np.ones(n)
    sxy_arr = np.ones(n)
    cdef double[::1] sx = sx_arr
    cdef double[::1] sy = sy_arr
    cdef double[::1] sxy = sxy_arr
    # block buffers let the exp loop vectorize; both roles go through the
    # same code path, so swapping (x, y) swaps results bit-exactly
    cdef Py_ssize_t blk = 4096
    buf_arr = np.empty((2, blk))
    cdef double[:, ::1] buf = buf_arr
    cdef double inv_h = 1.0 / h
    cdef Py_ssize_t i0, j, m, t
    cdef double xj, yj, dx, dy, ex, ey, e2, accx, accy, accxy
    with nogil:
        for j in range(n - 1):
            xj = x[j]
            yj = y[j]
            i0 = j + 1
            while i0 < n:
                m = n - i0
                if m > blk:
                    m = blk
                for t in range(m):
                    dx = (x[i0 + t] - xj) * inv_h
                    buf[0, t] = -0.5 * dx * dx
                    dy = (y[i0 + t] - yj) * inv_h
                    buf[1, t] = -0.5 * dy * dy
                for t in range(m):
                    buf[0, t] = fast_exp(buf[0, t])
                for t in range(m):
                    buf[1, t] = fast_exp(buf[1, t])
                accx = 0.0
                accy = 0.0
                accxy = 0.0
                for t in range(m):
                    ex = buf[0, t]
                    ey = buf[1, t]
                    e2 = ex * ey
                    sx[i0 + t] += ex
                    sy[i0 + t] += ey
                    sxy[i0 + t] += e2
                    accx += ex
                    accy += ey
                    accxy += e2
                sx[j] += accx
                sy[j] += accy
                sxy[j] += accxy
                i0 += m
    return sx_arr, sy_arr, sxy_arr


def prim_mst(double[::1] px, double[::1] py):
    """Exact Euclidean MST of a dense 2-D point set (Prim, O(n^2), O(n) memory).

    Returns (edges, total_length): edges is an (n-1, 2) int64 array of
    (tree_vertex, added_vertex) pairs in insertion order; total_length is the
    sum of Euclidean edge lengths. Candidate scan order and strict-< updates
    fix the tie-breaking; comparisons use squared distances.
    """
    cdef Py_ssize_t n = px.shape[0]
    if py.shape[0] != n:
        raise ValueError("length mismatch")
    if n < 2:
        raise ValueError("need at least two points")
    edges_arr = np.empty((n - 1, 2), dtype=np.int64)
    cdef int64_t[:, ::1] edges = edges_arr
    act_arr = np.arange(1, n, dtype=np.int64)
    cdef int64_t[::1] act = act_arr
    dist_arr = np.empty(n - 1)
    parent_arr = np.zeros(n - 1, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef int64_t[::1] parent = parent_arr
    cdef Py_ssize_t cnt = n - 1, step, t, best_t
    cdef int64_t nb
    cdef double cx, cy, dx, dy, d2, best, total = 0.0
    with nogil:
        cx = px[0]
        cy = py[0]
        for t in range(cnt):
            dx = px[act[t]] - cx
            dy = py[act[t]] - cy
            dist[t] = dx * dx + dy * dy
        for step in range(n - 1):
            best = dist[0]
            best_t = 0
            for t in range(1, cnt):
                if dist[t] < best:
                    best = dist[t]
                    best_t = t
            t = best_t
            nb = act[t]
            edges[step, 0] = parent[t]
            edges[step, 1] = nb
            total += sqrt(dist[t])
            cnt -= 1
            act[t] = act[cnt]
            dist[t] = dist[cnt]
            parent[t] = parent[cnt]
            if cnt == 0:
                break
            cx = px[nb]
            cy = py[nb]
            for t in range(cnt):
                dx = px[act[t]] - cx
                dy = py[act[t]] - cy
                d2 = dx * dx + dy * dy
                if d2 < dist[t]:
                    dist[t] = d2
                    parent[t] = nb
    return edges_arr, total
