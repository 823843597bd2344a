import os

# pin BLAS threading before numpy loads anywhere, so thread-count
# comparisons in the determinism tests are meaningful
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")

import numpy as np
import pytest


@pytest.fixture(scope="session")
def beta_cache(tmp_path_factory):
    """Shared spanning-tree calibration cache for the whole test session."""
    return str(tmp_path_factory.mktemp("beta") / "beta_cache.csv")


@pytest.fixture(scope="session")
def threads():
    return min(2, os.cpu_count() or 1)


def make_correlated_normal(rho, n, rng):
    z = rng.standard_normal((n, 2))
    return z[:, 0], rho * z[:, 0] + np.sqrt(1.0 - rho * rho) * z[:, 1]
