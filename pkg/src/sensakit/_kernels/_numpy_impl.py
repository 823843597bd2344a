"""Pure-numpy fallback for the compiled kernels.

Same contracts and tie-breaking as ``_ext``; used when the extension is not
built or when SENSAKIT_PURE_PYTHON is set.
"""

import math

import numpy as np

# cap the (chunk, n) temporaries at ~64 MB
_CHUNK_BUDGET = 8_000_000


def pair_sums(x, y, h):
    """Self-evaluated Gaussian kernel sums; see the compiled twin."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = x.size
    if y.size != n:
        raise ValueError("length mismatch")
    if not h > 0.0:
        raise ValueError("bandwidth must be positive")
    xs = x / h
    ys = y / h
    sx = np.empty(n)
    sy = np.empty(n)
    sxy = np.empty(n)
    chunk = max(1, _CHUNK_BUDGET // max(n, 1))
    for s in range(0, n, chunk):
        q = slice(s, min(s + chunk, n))
        dx = xs[q][:, None] - xs[None, :]
        ex = np.exp(-0.5 * dx * dx)
        dy = ys[q][:, None] - ys[None, :]
        ey = np.exp(-0.5 * dy * dy)
        sx[q] = ex.sum(axis=1)
        sy[q] = ey.sum(axis=1)
        ex *= ey
        sxy[q] = ex.sum(axis=1)
    return sx, sy, sxy


def prim_mst(px, py):
    """Exact Euclidean MST, dense Prim with the same update rules as ``_ext``."""
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    n = px.size
    if py.size != n:
        raise ValueError("length mismatch")
    if n < 2:
        raise ValueError("need at least two points")
    edges = np.empty((n - 1, 2), dtype=np.int64)
    act = np.arange(1, n, dtype=np.int64)
    parent = np.zeros(n - 1, dtype=np.int64)
    dx = px[1:] - px[0]
    dy = py[1:] - py[0]
    dist = dx * dx + dy * dy
    cnt = n - 1
    total = 0.0
    for step in range(n - 1):
        t = int(np.argmin(dist[:cnt]))
        nb = int(act[t])
        edges[step, 0] = parent[t]
        edges[step, 1] = nb
        total += math.sqrt(dist[t])
        cnt -= 1
        act[t] = act[cnt]
        dist[t] = dist[cnt]
        parent[t] = parent[cnt]
        if cnt == 0:
            break
        dxa = px[act[:cnt]] - px[nb]
        dya = py[act[:cnt]] - py[nb]
        nd = dxa * dxa + dya * dya
        closer = nd < dist[:cnt]
        dist[:cnt][closer] = nd[closer]
        parent[:cnt][closer] = nb
    return edges, total
