"""Spanning-tree estimator of the Hellinger sensitivity index.

The half-order entropy of a 2-D density can be estimated from the total
Euclidean length of the minimum spanning tree over the sample: for n points,
L / (beta * sqrt(n)) converges to the integral of the square-root density,
with beta the same functional's normalizing constant for uniform samples on
the unit square. Mapping an (x, y) sample to its per-column empirical-CDF
ranks puts it on the unit square with uniform marginals, where that integral
is exactly the Bhattacharyya affinity between the joint and the product of
the marginals, so

    S_hat = 2 - 2 * L / (beta * sqrt(n)).

The rank transform also makes the estimate exactly invariant under strictly
increasing transformations of either column.
"""

import csv
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import SiEstimate, seeded_rng
from .errors import SensakitError

_RANK_OFFSET = 0.5  # midpoint convention: u = (rank - 0.5) / n


@dataclass(frozen=True)
class MstResult:
    """Edges (index pairs, insertion order) and total Euclidean length."""

    edges: np.ndarray
    total_length: float
    n: int


@dataclass(frozen=True)
class MstCalibration:
    """Normalizing constant estimate for the uniform reference at size n."""

    beta: float
    n: int
    d: int
    gamma: float
    n_rep: int
    seed: int

    def __post_init__(self):
        if not self.beta > 0.0:
            raise SensakitError("beta must be positive")


def euclidean_mst(points) -> MstResult:
    """Exact MST of the complete Euclidean graph on an (n, 2) point set."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise SensakitError("points must be an (n, 2) matrix")
    if points.shape[0] < 2:
        raise SensakitError("need at least two points")
    edges, total = _kernels.prim_mst(points[:, 0].copy(), points[:, 1].copy())
    return MstResult(edges=edges, total_length=float(total), n=points.shape[0])


def _uniform_tree_length(n, rng):
    pts = rng.random((n, 2))
    _, total = _kernels.prim_mst(pts[:, 0].copy(), pts[:, 1].copy())
    return total


def estimate_beta(n, n_rep, seed, threads=1) -> MstCalibration:
    """Estimate beta as the mean of L / sqrt(n) over uniform unit-square draws.

    Repetitions use split substreams and are averaged in index order, so the
    result is identical for any thread count.
    """
    n = int(n)
    n_rep = int(n_rep)
    if n < 2:
        raise SensakitError("n must be >= 2")
    if n_rep < 1:
        raise SensakitError("n_rep must be >= 1")
    rngs = [seeded_rng(seed, 0x0B, r) for r in range(n_rep)]
    if threads > 1 and n_rep > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            lengths = list(pool.map(lambda g: _uniform_tree_length(n, g), rngs))
    else:
        lengths = [_uniform_tree_length(n, g) for g in rngs]
    beta = float(np.mean(lengths) / np.sqrt(n))
    return MstCalibration(beta=beta, n=n, d=2, gamma=1.0, n_rep=n_rep, seed=int(seed))


def read_beta_cache(path):
    """Load cached calibrations keyed by (n, n_rep, seed)."""
    cache = {}
    if path is None or not os.path.exists(path):
        return cache
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            cal = MstCalibration(
                beta=float(row["beta"]),
                n=int(row["n"]),
                d=int(row["d"]),
                gamma=float(row["gamma"]),
                n_rep=int(row["n_rep"]),
                seed=int(row["seed"]),
            )
            cache[(cal.n, cal.n_rep, cal.seed)] = cal
    return cache


def append_beta_cache(path, cal):
    """Append one calibration row, creating the file with a header if needed."""
    header_needed = not os.path.exists(path) or os.path.getsize(path) == 0
    line = ""
    if header_needed:
        line += "n,d,gamma,n_rep,seed,beta\n"
    line += f"{cal.n},{cal.d},{cal.gamma!r},{cal.n_rep},{cal.seed},{cal.beta!r}\n"
    with open(path, "a", newline="") as fh:
        fh.write(line)


def calibrated_beta(n, seed, n_rep=50, cache_path=None, threads=1) -> MstCalibration:
    """estimate_beta with a CSV-backed cache keyed by (n, n_rep, seed)."""
    cache = read_beta_cache(cache_path)
    key = (int(n), int(n_rep), int(seed))
    if key in cache:
        return cache[key]
    cal = estimate_beta(n, n_rep, seed, threads=threads)
    if cache_path is not None:
        append_beta_cache(cache_path, cal)
    return cal


def renyi_entropy_half(points, beta):
    """Half-order entropy estimate 2 * log(L / (beta * sqrt(n)))."""
    if not beta > 0.0:
        raise SensakitError("beta must be positive")
    res = euclidean_mst(points)
    if res.total_length <= 0.0:
        raise SensakitError("all points coincide; tree length is zero")
    return 2.0 * float(np.log(res.total_length / (beta * np.sqrt(res.n))))


def rank_to_unit(v):
    """Empirical-CDF rank transform onto (0, 1), midpoint convention.

    Ties get distinct ranks by original index order (stable sort), so the
    output values are always pairwise distinct.
    """
    v = np.asarray(v, dtype=np.float64)
    n = v.size
    ranks = np.empty(n, dtype=np.float64)
    ranks[np.argsort(v, kind="stable")] = np.arange(1, n + 1, dtype=np.float64)
    return (ranks - _RANK_OFFSET) / n


def si_mst(
    xk,
    y,
    cal: MstCalibration,
    *,
    variable_index=1,
    method="sample-mst",
    L=None,
    seed=0,
) -> SiEstimate:
    """Hellinger index estimate from the MST length of the rank-transformed pairs."""
    t0 = time.perf_counter()
    xk = np.asarray(xk, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if xk.shape != y.shape or xk.ndim != 1:
        raise SensakitError("columns must be 1-D and of equal length")
    n = xk.size
    if cal.n != n:
        raise SensakitError(f"calibration is for n={cal.n}, data has n={n}")
    pts = np.column_stack([rank_to_unit(xk), rank_to_unit(y)])
    res = euclidean_mst(pts)
    value = 2.0 - 2.0 * res.total_length / (cal.beta * np.sqrt(n))
    return SiEstimate(
        variable_index=variable_index,
        method=method,
        value=float(value),
        L=n if L is None else int(L),
        N=n,
        seed=int(seed),
        wall_seconds=time.perf_counter() - t0,
    )
