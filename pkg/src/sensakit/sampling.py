"""Input designs: Monte Carlo, Latin hypercube, Sobol sequences, Gaussian copula."""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ._sobol_table import DIRECTIONS, MAX_DIM
from .data import Dataset, dataset_from_arrays
from .errors import SensakitError, UnsupportedDesignError

_BITS = 32
_SCALE = 2.0 ** -_BITS


@dataclass(frozen=True)
class InputLaw:
    """Input distribution: independent uniform, or a Gaussian copula.

    ``bounds`` is a (d, 2) array of per-dimension (lower, upper); for the
    copula, ``sigma`` is a symmetric positive-definite correlation matrix
    with unit diagonal and each marginal is the normal CDF transform mapped
    to its bounds.
    """

    kind: str
    bounds: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        bounds = np.asarray(self.bounds, dtype=np.float64).reshape(-1, 2)
        bounds.flags.writeable = False
        object.__setattr__(self, "bounds", bounds)
        if np.any(bounds[:, 0] >= bounds[:, 1]):
            raise SensakitError("bounds must satisfy lower < upper")
        if self.kind == "independent-uniform":
            if self.sigma is not None:
                raise SensakitError("independent-uniform law takes no sigma")
        elif self.kind == "gaussian-copula":
            sigma = np.asarray(self.sigma, dtype=np.float64)
            if sigma.shape != (self.d, self.d):
                raise SensakitError("sigma must be d x d")
            if not np.allclose(sigma, sigma.T, atol=1e-12):
                raise SensakitError("sigma must be symmetric")
            if not np.allclose(np.diag(sigma), 1.0, atol=1e-12):
                raise SensakitError("sigma must have unit diagonal")
            try:
                np.linalg.cholesky(sigma)
            except np.linalg.LinAlgError:
                raise SensakitError("sigma is not positive definite") from None
            sigma = sigma.copy()
            sigma.flags.writeable = False
            object.__setattr__(self, "sigma", sigma)
        else:
            raise SensakitError(f"unknown law kind {self.kind!r}")

    @property
    def d(self):
        return self.bounds.shape[0]


def uniform_law(bounds):
    return InputLaw("independent-uniform", np.asarray(bounds, dtype=np.float64))


def copula_law(sigma, bounds):
    return InputLaw(
        "gaussian-copula", np.asarray(bounds, dtype=np.float64), np.asarray(sigma)
    )


def _as_dataset(u, law) -> Dataset:
    lo = law.bounds[:, 0]
    hi = law.bounds[:, 1]
    return dataset_from_arrays(lo + (hi - lo) * u, bounds=[tuple(b) for b in law.bounds])


def monte_carlo(law, n, rng) -> Dataset:
    """n i.i.d. draws from the law (inputs only)."""
    if n < 1:
        raise SensakitError("n must be >= 1")
    if law.kind == "independent-uniform":
        u = rng.random((n, law.d))
    else:
        chol = np.linalg.cholesky(law.sigma)
        z = rng.standard_normal((n, law.d)) @ chol.T
        u = ndtr(z)
    return _as_dataset(u, law)


def latin_hypercube(law, n, rng) -> Dataset:
    """Stratified design: one uniformly jittered point per stratum per axis.

    Only defined for independent uniform laws; dependent (copula) laws get
    an UnsupportedDesignError because stratified marginals do not represent
    a dependent joint law.
    """
    if law.kind != "independent-uniform":
        raise UnsupportedDesignError("Latin hypercube requires independent-uniform law")
    if n < 1:
        raise SensakitError("n must be >= 1")
    u = np.empty((n, law.d))
    for j in range(law.d):
        perm = rng.permutation(n)
        u[:, j] = (perm + rng.random(n)) / n
    return _as_dataset(u, law)


class SobolSequence:
    """Base-2 digital low-discrepancy sequence in [0, 1)^d, d <= 21.

    Gray-code construction from the bundled direction-number table. The
    initial all-zeros point is skipped, so every coordinate of any emitted
    prefix (up to 2^32 points) consists of pairwise distinct dyadics.
    """

    def __init__(self, d):
        d = int(d)
        if not 1 <= d <= MAX_DIM:
            raise SensakitError(f"dimension must be in 1..{MAX_DIM}")
        self.d = d
        v = np.zeros((_BITS, d), dtype=np.uint64)
        v[:, 0] = [1 << (_BITS - k) for k in range(1, _BITS + 1)]
        for j in range(1, d):
            poly, m_init = DIRECTIONS[j - 1]
            s = poly.bit_length() - 1
            a = (poly - (1 << s) - 1) >> 1
            m = list(m_init)
            for k in range(s, _BITS):
                new = m[k - s] ^ (m[k - s] << s)
                for i in range(1, s):
                    if (a >> (s - 1 - i)) & 1:
                        new ^= m[k - i] << i
                m.append(new)
            for k in range(_BITS):
                v[k, j] = np.uint64(m[k] << (_BITS - 1 - k))
        self._v = v
        self._state = np.zeros(d, dtype=np.uint64)
        self._i = 0  # points consumed, counting the skipped zero point

    def next_points(self, n):
        n = int(n)
        if n < 0 or self._i + n >= 1 << 31:
            raise SensakitError("requested prefix too long (limit 2^31)")
        out = np.empty((n, self.d), dtype=np.uint64)
        state = self._state
        i = self._i
        v = self._v
        for t in range(n):
            c = (~i & (i + 1)).bit_length() - 1  # rightmost zero bit of i
            state ^= v[c]
            out[t] = state
            i += 1
        self._i = i
        return out.astype(np.float64) * _SCALE


def sobol_points(seq, n):
    """The next n points of the sequence as an (n, d) matrix in [0, 1)^d."""
    return seq.next_points(n)
