"""Tensor-grid collocation surrogate: Gauss-Legendre nodes, Lagrange interpolation."""

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, SensakitError


def gauss_legendre_nodes(m, lo=-1.0, hi=1.0):
    """Zeros of the degree-m Legendre polynomial mapped affinely to [lo, hi]."""
    if m < 1:
        raise SensakitError("need at least one node")
    nodes, _ = np.polynomial.legendre.leggauss(int(m))
    return lo + (hi - lo) * (nodes + 1.0) / 2.0


def _barycentric_weights(nodes):
    # log-scaled product for stability at larger m; any common factor cancels
    n = nodes.size
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    return sign * np.exp(logw - np.max(logw))


@dataclass(frozen=True)
class ScModel:
    """Per-dimension nodes, barycentric weights, and the m^d output grid."""

    nodes: tuple
    weights: tuple
    values: np.ndarray
    bounds: np.ndarray
    m: int

    @property
    def d(self):
        return self.bounds.shape[0]


def sc_build(bounds, m, evaluator, budget=None) -> ScModel:
    """Evaluate a function on the m^d tensor grid of Gauss-Legendre nodes.

    ``evaluator`` is called once per grid point with a length-d vector. A
    ``budget`` caps the number of evaluations; exceeding it raises before
    any evaluation happens.
    """
    bounds = np.asarray(bounds, dtype=np.float64).reshape(-1, 2)
    d = bounds.shape[0]
    m = int(m)
    if m < 1:
        raise SensakitError("need m >= 1 nodes per dimension")
    count = m**d
    if budget is not None and count > budget:
        raise BudgetExceededError(
            f"tensor grid needs {count} evaluations, budget is {budget}"
        )
    nodes = tuple(gauss_legendre_nodes(m, lo, hi) for lo, hi in bounds)
    weights = tuple(_barycentric_weights(nd) for nd in nodes)
    grids = np.meshgrid(*nodes, indexing="ij")
    points = np.column_stack([g.ravel() for g in grids])
    values = np.array([float(evaluator(points[i])) for i in range(count)])
    return ScModel(
        nodes=nodes,
        weights=weights,
        values=values.reshape((m,) * d),
        bounds=bounds,
        m=m,
    )


def _basis(nodes, weights, q):
    # barycentric Lagrange basis rows for query vector q; exact at nodes
    diff = q[:, None] - nodes[None, :]
    exact_row, exact_col = np.nonzero(diff == 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = weights[None, :] / diff
        b /= np.sum(b, axis=1, keepdims=True)
    if exact_row.size:
        b[exact_row] = 0.0
        b[exact_row, exact_col] = 1.0
    return b


def sc_interpolate(model: ScModel, x_new):
    """Tensor-product Lagrange interpolation at query rows."""
    x_new = np.asarray(x_new, dtype=np.float64)
    if x_new.size == 0:
        return np.empty(0)
    x_new = np.atleast_2d(x_new)
    if x_new.shape[1] != model.d:
        raise SensakitError("query dimension mismatch")
    n = x_new.shape[0]
    m = model.m
    # contract one dimension at a time, keeping the query axis in front
    out = np.broadcast_to(model.values, (n,) + model.values.shape)
    out = out.reshape(n, m, -1)
    for j in range(model.d):
        b = _basis(model.nodes[j], model.weights[j], x_new[:, j])
        out = np.einsum("nmr,nm->nr", out, b)
        if j < model.d - 1:
            out = out.reshape(n, m, -1)
    return out.ravel()
