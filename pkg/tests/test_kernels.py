import os

import numpy as np
import pytest

from sensakit import _kernels
from sensakit._kernels import _numpy_impl
from sensakit.data import seeded_rng


def test_backend_selected():
    assert _kernels.BACKEND in ("ext", "numpy")
    if not os.environ.get("SENSAKIT_PURE_PYTHON"):
        assert _kernels.BACKEND == "ext"


class TestPairSums:
    @pytest.mark.parametrize("n,h", [(50, 0.5), (500, 0.3), (2000, 0.2)])
    def test_backends_agree(self, n, h):
        rng = seeded_rng(n)
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        ext = _kernels.pair_sums(x, y, h)
        ref = _numpy_impl.pair_sums(x, y, h)
        for a, b in zip(ext, ref):
            np.testing.assert_allclose(a, b, rtol=5e-13)

    def test_extreme_arguments_underflow(self):
        # spread data drives kernel arguments far below the exp underflow
        # threshold; both backends must stay finite and agree
        x = np.array([0.0, 1.0, 2.0, 3.0, 1e6, 2e6, -1e6, 5.0, 6.0, 7.0])
        y = x[::-1].copy()
        ext = _kernels.pair_sums(x, y, 0.1)
        ref = _numpy_impl.pair_sums(x, y, 0.1)
        for a, b in zip(ext, ref):
            assert np.all(np.isfinite(a))
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)

    def test_matches_direct_kernel_sums(self):
        rng = seeded_rng(3)
        x = rng.random(200)
        y = rng.random(200)
        h = 0.25
        zx = (x[:, None] - x[None, :]) / h
        zy = (y[:, None] - y[None, :]) / h
        ex = np.exp(-0.5 * zx * zx)
        ey = np.exp(-0.5 * zy * zy)
        sx, sy, sxy = _kernels.pair_sums(x, y, h)
        np.testing.assert_allclose(sx, ex.sum(axis=1), rtol=1e-12)
        np.testing.assert_allclose(sy, ey.sum(axis=1), rtol=1e-12)
        np.testing.assert_allclose(sxy, (ex * ey).sum(axis=1), rtol=1e-12)

    def test_role_swap_bit_exact(self):
        rng = seeded_rng(9)
        x = rng.standard_normal(800)
        y = rng.standard_normal(800)
        for impl in (_kernels, _numpy_impl):
            sx, sy, sxy = impl.pair_sums(x, y, 0.3)
            sy2, sx2, sxy2 = impl.pair_sums(y, x, 0.3)
            assert np.array_equal(sx, sx2)
            assert np.array_equal(sy, sy2)
            assert np.array_equal(sxy, sxy2)

    def test_length_mismatch(self):
        for impl in (_kernels, _numpy_impl):
            with pytest.raises(ValueError):
                impl.pair_sums(np.zeros(3), np.zeros(4), 0.1)


class TestPrim:
    @pytest.mark.parametrize("n", [2, 3, 17, 400, 3000])
    def test_backends_identical(self, n):
        rng = seeded_rng(n + 1)
        pts = rng.random((n, 2))
        e1, t1 = _kernels.prim_mst(pts[:, 0].copy(), pts[:, 1].copy())
        e2, t2 = _numpy_impl.prim_mst(pts[:, 0].copy(), pts[:, 1].copy())
        assert np.array_equal(e1, e2)
        assert t1 == pytest.approx(t2, rel=1e-12)

    def test_too_few_points(self):
        for impl in (_kernels, _numpy_impl):
            with pytest.raises(ValueError):
                impl.prim_mst(np.zeros(1), np.zeros(1))
