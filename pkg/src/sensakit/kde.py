"""Kernel-density plug-in estimator of f-divergence sensitivity indices.

The index of input X against output Y is the f-divergence between the joint
density and the product of the marginals,

    S = E_f[ p_X(x) p_Y(y) / p_XY(x, y) ]  under the joint,

estimated by Gaussian-kernel density estimates evaluated at the sample
points themselves and averaged:

    S_hat = (1/J) sum_j f( fX(x_j) fY(y_j) / fXY(x_j, y_j) ).

Both columns are standardized first and share a single Scott's-rule
bandwidth h = J^(-1/6) (the joint space is two-dimensional and the data has
unit variance after standardization). No boundary correction is applied;
near bounded supports the estimate is known to be biased.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .data import SiEstimate, column_standardize
from .errors import SensakitError

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _hellinger(t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise SensakitError("Hellinger generator needs t >= 0")
    return np.square(np.sqrt(t) - 1.0)


def _kl(t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0.0):
        raise SensakitError("Kullback-Leibler generator needs t > 0")
    return -np.log(t)


@dataclass(frozen=True)
class FDivergence:
    """Convex generator f with f(1) = 0 defining an f-divergence."""

    kind: str
    f: callable = field(repr=False)


HELLINGER = FDivergence("hellinger", _hellinger)
KULLBACK_LEIBLER = FDivergence("kullback-leibler", _kl)

_DIVERGENCES = {
    "hellinger": HELLINGER,
    "kullback-leibler": KULLBACK_LEIBLER,
    "kl": KULLBACK_LEIBLER,
}


def divergence(name):
    """Look up a divergence by name ('hellinger', 'kullback-leibler'/'kl')."""
    try:
        return _DIVERGENCES[name]
    except KeyError:
        raise SensakitError(f"unknown divergence {name!r}") from None


def f_eval(div, t):
    """Evaluate the convex generator of ``div`` at t (scalar or array)."""
    out = div.f(t)
    return float(out) if np.isscalar(t) else out


@dataclass(frozen=True)
class KdeConfig:
    """Bandwidth rule ('scott' or fixed h > 0) and kernel (gaussian only)."""

    bandwidth_rule: str = "scott"
    fixed_h: float | None = None
    kernel: str = "gaussian"

    def __post_init__(self):
        if self.kernel != "gaussian":
            raise SensakitError("only the gaussian kernel is supported")
        if self.bandwidth_rule == "fixed":
            if self.fixed_h is None or not self.fixed_h > 0.0:
                raise SensakitError("fixed bandwidth must be positive")
        elif self.bandwidth_rule != "scott":
            raise SensakitError(f"unknown bandwidth rule {self.bandwidth_rule!r}")

    def bandwidth(self, n):
        if self.bandwidth_rule == "fixed":
            return float(self.fixed_h)
        return scott_bandwidth(n)


def scott_bandwidth(n):
    """Scott's-rule bandwidth for standardized data in a 2-D joint space.

    h = n^(-1/(d+4)) with d = 2 and unit sample standard deviation.
    """
    if n < 2:
        raise SensakitError("need n >= 2 for a bandwidth")
    return float(n) ** (-1.0 / 6.0)


def kde_marginal(v, h, query):
    """Gaussian KDE of a sample evaluated at query points.

    (1/(Jh)) sum_j K((q - v_j)/h); strictly positive everywhere.
    """
    v = np.asarray(v, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64)
    if not h > 0.0:
        raise SensakitError("bandwidth must be positive")
    scalar = query.ndim == 0
    q = np.atleast_1d(query)
    out = np.empty(q.size)
    chunk = max(1, 4_000_000 // max(v.size, 1))
    for s in range(0, q.size, chunk):
        e = slice(s, min(s + chunk, q.size))
        z = (q[e][:, None] - v[None, :]) / h
        out[e] = np.exp(-0.5 * z * z).sum(axis=1)
    out /= v.size * h * _SQRT_2PI
    return float(out[0]) if scalar else out


def kde_joint(x, y, h, qx, qy):
    """Product-kernel joint KDE with the same bandwidth in both coordinates."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise SensakitError("length mismatch")
    if not h > 0.0:
        raise SensakitError("bandwidth must be positive")
    qx = np.asarray(qx, dtype=np.float64)
    qy = np.asarray(qy, dtype=np.float64)
    if qx.shape != qy.shape:
        raise SensakitError("query length mismatch")
    scalar = qx.ndim == 0
    qx = np.atleast_1d(qx)
    qy = np.atleast_1d(qy)
    out = np.empty(qx.size)
    chunk = max(1, 4_000_000 // max(x.size, 1))
    for s in range(0, qx.size, chunk):
        e = slice(s, min(s + chunk, qx.size))
        zx = (qx[e][:, None] - x[None, :]) / h
        zy = (qy[e][:, None] - y[None, :]) / h
        out[e] = np.exp(-0.5 * (zx * zx + zy * zy)).sum(axis=1)
    out /= x.size * h * h * 2.0 * np.pi
    return float(out[0]) if scalar else out


def si_kde(
    xk,
    y,
    div=HELLINGER,
    cfg=KdeConfig(),
    *,
    variable_index=1,
    method="sample-kde",
    L=None,
    seed=0,
) -> SiEstimate:
    """Plug-in KDE estimate of the f-divergence index of one input column.

    Densities are evaluated at the data points themselves; the normalizing
    constants cancel in the ratio, so only the raw kernel sums enter:
    ratio_j = sx_j * sy_j / (J * sxy_j).
    """
    t0 = time.perf_counter()
    xk = np.asarray(xk, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if xk.shape != y.shape or xk.ndim != 1:
        raise SensakitError("columns must be 1-D and of equal length")
    n = xk.size
    if n < 10:
        raise SensakitError("need at least 10 samples")
    xs, _, _ = column_standardize(xk)
    ys, _, _ = column_standardize(y)
    h = cfg.bandwidth(n)
    sx, sy, sxy = _kernels.pair_sums(xs, ys, h)
    ratio = sx * sy / (n * sxy)
    value = float(np.mean(div.f(ratio)))
    return SiEstimate(
        variable_index=variable_index,
        method=method,
        value=value,
        L=n if L is None else int(L),
        N=n,
        seed=int(seed),
        wall_seconds=time.perf_counter() - t0,
    )
