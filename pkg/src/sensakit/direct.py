"""Direct sensitivity indices: dependence removal by rank reindexing.

A low-discrepancy point set fills the unit hypercube nearly uniformly, so
the per-column ranks of its coordinates form column permutations that are
almost uncorrelated with each other. Reindexing each column of a dataset by
those ranks preserves every marginal exactly (same value multiset) while
destroying cross-column dependence; feeding the permuted inputs through a
fitted surrogate then isolates the effect of one input at a time.
"""

import time

import numpy as np

from .data import SiEstimate
from .errors import SensakitError
from .gp import gp_predict_mean
from .kde import HELLINGER, KdeConfig, si_kde
from .mst import MstCalibration, si_mst
from .sampling import SobolSequence, sobol_points


class PermutationPlan:
    """Per-column permutations of {1..n} from the ranks of a Sobol prefix."""

    def __init__(self, ranks):
        ranks = np.asarray(ranks, dtype=np.int64)
        if ranks.ndim != 2:
            raise SensakitError("ranks must be (n, d)")
        n = ranks.shape[0]
        for j in range(ranks.shape[1]):
            if not np.array_equal(np.sort(ranks[:, j]), np.arange(1, n + 1)):
                raise SensakitError(f"column {j} is not a permutation of 1..{n}")
        self.ranks = ranks
        self.n = n
        self.d = ranks.shape[1]


def build_permutation_plan(n, d, seq=None) -> PermutationPlan:
    """Rank the first n points of a d-dimensional Sobol sequence per column."""
    n = int(n)
    d = int(d)
    if n < 1:
        raise SensakitError("n must be >= 1")
    if seq is None:
        seq = SobolSequence(d)
    pts = sobol_points(seq, n)
    if pts.shape[1] != d:
        raise SensakitError("sequence dimension mismatch")
    ranks = np.empty((n, d), dtype=np.int64)
    for j in range(d):
        col = pts[:, j]
        if np.unique(col).size != n:
            raise SensakitError(f"coordinate {j + 1} has duplicate values")
        order = np.argsort(col, kind="stable")
        ranks[order, j] = np.arange(1, n + 1)
    return PermutationPlan(ranks)


def apply_permutation(x, plan: PermutationPlan):
    """Reindex each sorted column by the plan; marginals are preserved exactly."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape != (plan.n, plan.d):
        raise SensakitError(
            f"data shape {x.shape} does not match plan ({plan.n}, {plan.d})"
        )
    out = np.empty_like(x)
    for j in range(plan.d):
        out[:, j] = np.sort(x[:, j])[plan.ranks[:, j] - 1]
    return out


def si_direct(
    x,
    k,
    model,
    estimator="mst",
    cal: MstCalibration | None = None,
    cfg: KdeConfig | None = None,
    plan: PermutationPlan | None = None,
    *,
    seed=0,
    L=None,
) -> SiEstimate:
    """Direct Hellinger index of input k through a fitted surrogate.

    The inputs (in the surrogate's own coordinate space) are decorrelated by
    the permutation plan, the surrogate mean supplies the outputs for the
    permuted rows, and the chosen estimator runs on (permuted column k,
    surrogate output).
    """
    t0 = time.perf_counter()
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    n, d = x.shape
    if not 1 <= k <= d:
        raise SensakitError("variable index out of range")
    if plan is None:
        plan = build_permutation_plan(n, d)
    xp = apply_permutation(x, plan)
    y_tilde = gp_predict_mean(model, xp)
    if np.ptp(y_tilde) == 0.0:
        # a constant output is independent of everything, so the index is
        # exactly zero by definition; the estimators cannot rank or
        # standardize an all-tied column
        if estimator not in ("mst", "kde"):
            raise SensakitError(f"unknown estimator {estimator!r}")
        return SiEstimate(
            variable_index=k,
            method=f"direct-{estimator}",
            value=0.0,
            L=n if L is None else int(L),
            N=n,
            seed=int(seed),
            wall_seconds=time.perf_counter() - t0,
        )
    if estimator == "mst":
        if cal is None:
            raise SensakitError("mst estimator needs a calibration")
        est = si_mst(
            xp[:, k - 1],
            y_tilde,
            cal,
            variable_index=k,
            method="direct-mst",
            L=L,
            seed=seed,
        )
    elif estimator == "kde":
        est = si_kde(
            xp[:, k - 1],
            y_tilde,
            HELLINGER,
            cfg or KdeConfig(),
            variable_index=k,
            method="direct-kde",
            L=L,
            seed=seed,
        )
    else:
        raise SensakitError(f"unknown estimator {estimator!r}")
    return SiEstimate(
        variable_index=est.variable_index,
        method=est.method,
        value=est.value,
        L=est.L,
        N=est.N,
        seed=est.seed,
        wall_seconds=time.perf_counter() - t0,
    )
