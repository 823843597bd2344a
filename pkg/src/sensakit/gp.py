"""Gaussian-process surrogate: fit, posterior mean, dataset augmentation, CV.

Anisotropic squared-exponential kernel with a noise term,

    k(x, x') = sf2 * exp(-0.5 * sum_d ((x_d - x'_d) / ell_d)^2) + sn2 * 1{x = x'},

hyperparameters chosen by maximizing the log marginal likelihood with
L-BFGS-B in log space over multiple restarts. Inputs are expected on (or
near) the unit hypercube; callers map their domains before fitting.
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky
from scipy.optimize import minimize

from .data import Dataset, dataset_from_arrays, seeded_rng
from .errors import DegenerateOutputError, IllConditionedFitError, SensakitError

_JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

# log-uniform restart priors; sf2 and sn2 ranges are relative to var(y)
_ELL_RANGE = (1e-2, 1e1)
_SF2_RANGE = (1e-2, 1e2)
_SN2_RANGE = (1e-8, 1e-1)


@dataclass(frozen=True)
class GpModel:
    x: np.ndarray
    y_centered: np.ndarray
    offset: float
    length_scales: np.ndarray
    signal_var: float
    noise_var: float
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float
    lml: float
    start_lmls: tuple
    init_lmls: tuple

    @property
    def d(self):
        return self.x.shape[1]


def _sqdiffs(x):
    # (d, L, L) per-dimension squared coordinate differences
    diff = x[:, None, :] - x[None, :, :]
    return np.ascontiguousarray(np.moveaxis(diff * diff, 2, 0))


def _chol_jittered(k):
    scale = max(float(np.mean(np.diag(k))), 1.0)
    for jit in _JITTERS:
        try:
            return cholesky(k + (jit * scale) * np.eye(k.shape[0]), lower=True), jit * scale
        except np.linalg.LinAlgError:
            continue
    raise IllConditionedFitError("kernel matrix not positive definite after jitter escalation")


def _build_kernel(sqd, ell, sf2, sn2):
    e = np.tensordot(1.0 / (ell * ell), sqd, axes=(0, 0))
    kse = sf2 * np.exp(-0.5 * e)
    return kse + sn2 * np.eye(kse.shape[0]), kse


def _neg_lml_and_grad(theta, sqd, y, fix_noise):
    d = sqd.shape[0]
    n = y.size
    ell = np.exp(theta[:d])
    sf2 = np.exp(theta[d])
    sn2 = np.exp(theta[d + 1]) if fix_noise is None else fix_noise
    k, kse = _build_kernel(sqd, ell, sf2, sn2)
    try:
        low, _ = _chol_jittered(k)
    except IllConditionedFitError:
        return np.inf, np.zeros_like(theta)
    alpha = cho_solve((low, True), y)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.sum(np.log(np.diag(low))))
        - 0.5 * n * np.log(2.0 * np.pi)
    )
    w = np.outer(alpha, alpha) - cho_solve((low, True), np.eye(n))
    wk = w * kse
    grad = np.empty_like(theta)
    for j in range(d):
        grad[j] = 0.5 * np.einsum("ij,ij->", wk, sqd[j]) / (ell[j] * ell[j])
    grad[d] = 0.5 * float(np.sum(wk))
    if fix_noise is None:
        grad[d + 1] = 0.5 * sn2 * float(np.trace(w))
    return -lml, -grad


def _lml_only(theta, sqd, y, fix_noise):
    val, _ = _neg_lml_and_grad(theta, sqd, y, fix_noise)
    return -val


def gp_fit(x, y, restarts=10, rng=None, fix_noise=None) -> GpModel:
    """Fit hyperparameters by maximum marginal likelihood over restarts.

    Each restart starts from a log-uniform draw (length scales in
    [1e-2, 1e1]; signal and noise variances relative to var(y)). The best
    optimum over all restarts wins; per-start initial and achieved
    likelihoods are kept on the model for diagnostics.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    n, d = x.shape
    if n < 2:
        raise SensakitError("need at least two training points")
    if y.size != n:
        raise SensakitError("x and y row counts differ")
    if rng is None:
        rng = seeded_rng(0)
    offset = float(np.mean(y))
    yc = y - offset
    vy = max(float(np.var(yc)), 1e-12)
    sqd = _sqdiffs(x)

    n_par = d + 1 + (0 if fix_noise is not None else 1)
    bounds = [(np.log(1e-3), np.log(1e3))] * d
    bounds.append((np.log(1e-10 * vy), np.log(1e6 * vy)))
    if fix_noise is None:
        bounds.append((np.log(1e-12 * vy), np.log(1e1 * vy)))

    best = None
    init_lmls = []
    start_lmls = []
    for _ in range(max(1, int(restarts))):
        theta0 = np.empty(n_par)
        theta0[:d] = rng.uniform(np.log(_ELL_RANGE[0]), np.log(_ELL_RANGE[1]), size=d)
        theta0[d] = rng.uniform(np.log(_SF2_RANGE[0] * vy), np.log(_SF2_RANGE[1] * vy))
        if fix_noise is None:
            theta0[d + 1] = rng.uniform(
                np.log(_SN2_RANGE[0] * vy), np.log(_SN2_RANGE[1] * vy)
            )
        init_lmls.append(_lml_only(theta0, sqd, yc, fix_noise))
        res = minimize(
            _neg_lml_and_grad,
            theta0,
            args=(sqd, yc, fix_noise),
            method="L-BFGS-B",
            jac=True,
            bounds=bounds,
            options={"maxiter": 100},
        )
        lml = -float(res.fun)
        start_lmls.append(lml)
        if np.isfinite(lml) and (best is None or lml > best[0]):
            best = (lml, res.x.copy())
    if best is None:
        raise IllConditionedFitError("no restart produced a usable fit")

    lml, theta = best
    ell = np.exp(theta[:d])
    sf2 = float(np.exp(theta[d]))
    sn2 = float(np.exp(theta[d + 1])) if fix_noise is None else float(fix_noise)
    k, _ = _build_kernel(sqd, ell, sf2, sn2)
    low, jitter = _chol_jittered(k)
    alpha = cho_solve((low, True), yc)
    # iterative refinement against the unjittered system sharpens the
    # noise-free interpolation; keep the iterate with the smallest residual
    best_alpha = alpha
    best_res = float(np.linalg.norm(yc - k @ alpha))
    for _ in range(3):
        alpha = alpha + cho_solve((low, True), yc - k @ alpha)
        res = float(np.linalg.norm(yc - k @ alpha))
        if res < best_res:
            best_alpha, best_res = alpha, res
    alpha = best_alpha
    return GpModel(
        x=x.copy(),
        y_centered=yc,
        offset=offset,
        length_scales=ell,
        signal_var=sf2,
        noise_var=sn2,
        chol=low,
        alpha=alpha,
        jitter=float(jitter),
        lml=float(lml),
        start_lmls=tuple(start_lmls),
        init_lmls=tuple(init_lmls),
    )


def gp_predict_mean(model: GpModel, x_new):
    """Posterior mean at query rows; deterministic, empty in, empty out."""
    x_new = np.asarray(x_new, dtype=np.float64)
    if x_new.size == 0:
        return np.empty(0)
    x_new = np.atleast_2d(x_new)
    if x_new.shape[1] != model.d:
        raise SensakitError("query dimension mismatch")
    inv_ell2 = 1.0 / (model.length_scales * model.length_scales)
    e = np.zeros((x_new.shape[0], model.x.shape[0]))
    for j in range(model.d):
        diff = x_new[:, j][:, None] - model.x[:, j][None, :]
        e += (diff * diff) * inv_ell2[j]
    kstar = model.signal_var * np.exp(-0.5 * e)
    return model.offset + kstar @ model.alpha


def gp_augment(model: GpModel, x_l, y_l, x_plus) -> Dataset:
    """Stack true samples with surrogate-mean outputs at the extra inputs."""
    x_l = np.atleast_2d(np.asarray(x_l, dtype=np.float64))
    y_l = np.asarray(y_l, dtype=np.float64).ravel()
    x_plus = np.asarray(x_plus, dtype=np.float64)
    if x_plus.size == 0:
        return dataset_from_arrays(x_l, output=y_l)
    x_plus = np.atleast_2d(x_plus)
    y_plus = gp_predict_mean(model, x_plus)
    return dataset_from_arrays(
        np.vstack([x_l, x_plus]), output=np.concatenate([y_l, y_plus])
    )


def cross_validate(x, y, k=10, restarts=10, rng=None):
    """k-fold CV: returns (r2, fraction) with fraction = SS_res / SS_tot.

    Held-out predictions against the global output mean; folds assigned by a
    seeded shuffle and refit with the same restart policy.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    n = y.size
    if not 2 <= k <= n:
        raise SensakitError("need n >= k >= 2")
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot <= 0.0:
        raise DegenerateOutputError("constant output column")
    if rng is None:
        rng = seeded_rng(0)
    perm = rng.permutation(n)
    folds = np.array_split(perm, k)
    fold_rngs = rng.spawn(k)
    ss_res = 0.0
    for fold, frng in zip(folds, fold_rngs):
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        model = gp_fit(x[mask], y[mask], restarts=restarts, rng=frng)
        pred = gp_predict_mean(model, x[fold])
        ss_res += float(np.sum((pred - y[fold]) ** 2))
    fraction = ss_res / ss_tot
    return 1.0 - fraction, fraction


def dump_model(model: GpModel) -> str:
    """Key-value text dump of the fitted hyperparameters."""
    lines = [
        f"length_scales = {' '.join(repr(float(v)) for v in model.length_scales)}",
        f"signal_var = {model.signal_var!r}",
        f"noise_var = {model.noise_var!r}",
        f"offset = {model.offset!r}",
        f"jitter = {model.jitter!r}",
        f"log_marginal_likelihood = {model.lml!r}",
        f"training_points = {model.x.shape[0]}",
    ]
    return "\n".join(lines) + "\n"


def unit_scale(x, bounds):
    """Affine map of columns from per-dimension bounds onto [0, 1]."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    bounds = np.asarray(bounds, dtype=np.float64).reshape(-1, 2)
    lo = bounds[:, 0]
    hi = bounds[:, 1]
    return (x - lo) / (hi - lo)
