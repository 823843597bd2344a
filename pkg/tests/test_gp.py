import numpy as np
import pytest

from sensakit.data import seeded_rng
from sensakit.errors import DegenerateOutputError, SensakitError
from sensakit.functions import ishigami_eval
from sensakit.gp import (
    cross_validate,
    dump_model,
    gp_augment,
    gp_fit,
    gp_predict_mean,
    unit_scale,
)


def fit_linear(n=20, seed=1, **kw):
    rng = seeded_rng(seed)
    x = rng.random((n, 2))
    y = 3.0 * x[:, 0] - 2.0 * x[:, 1] + 0.5
    return x, y, gp_fit(x, y, restarts=6, rng=seeded_rng(seed + 1), **kw)


class TestFit:
    def test_linear_cv_near_perfect(self):
        x, y, _ = fit_linear()
        _, fraction = cross_validate(x, y, k=10, restarts=6, rng=seeded_rng(3))
        assert fraction < 0.01

    def test_noise_free_interpolates(self):
        x, y, model = fit_linear(fix_noise=0.0)
        pred = gp_predict_mean(model, x)
        assert np.max(np.abs(pred - y)) < 1e-6 * np.max(np.abs(y))

    def test_lml_at_least_every_start(self):
        _, _, model = fit_linear()
        assert model.lml >= max(v for v in model.init_lmls if np.isfinite(v)) - 1e-9
        assert model.lml >= max(v for v in model.start_lmls if np.isfinite(v)) - 1e-9

    def test_duplicate_rows_jitter(self):
        rng = seeded_rng(4)
        x = np.vstack([rng.random((10, 1))] * 2)  # exact duplicates
        y = np.sin(3 * x[:, 0])
        model = gp_fit(x, y, restarts=4, rng=seeded_rng(5), fix_noise=0.0)
        assert model.jitter >= 0.0
        assert np.isfinite(gp_predict_mean(model, x)).all()

    def test_pure_noise_flagged_by_cv(self):
        rng = seeded_rng(103)
        x = rng.random((50, 1))
        y = rng.standard_normal(50)
        _, fraction = cross_validate(x, y, k=10, restarts=10, rng=seeded_rng(203))
        assert fraction > 1.0  # fit worse than the constant predictor

    def test_ishigami_design_fits_well(self):
        from sensakit.functions import make_function
        from sensakit.sampling import latin_hypercube, uniform_law

        fn = make_function("ishigami")
        law = uniform_law(fn.bounds)
        design = latin_hypercube(law, 200, seeded_rng(11))
        x = design.input_matrix()
        y = fn.eval_on(x)
        u = unit_scale(x, fn.bounds)
        _, fraction = cross_validate(u, y, k=10, restarts=10, rng=seeded_rng(13))
        assert fraction < 0.05

    def test_output_scaling_smoke_invariant(self):
        x, y, model = fit_linear(seed=21)
        pred = gp_predict_mean(model, x[:7])
        model2 = gp_fit(x, 4.0 * y + 10.0, restarts=6, rng=seeded_rng(22))
        pred2 = gp_predict_mean(model2, x[:7])
        scale = float(np.max(np.abs(4.0 * y + 10.0)))
        assert np.max(np.abs(pred2 - (4.0 * pred + 10.0))) < 1e-3 * scale


class TestPredict:
    def test_far_query_returns_prior_mean(self):
        x, y, model = fit_linear(seed=31)
        far = np.full((1, 2), 1e6)
        assert gp_predict_mean(model, far)[0] == pytest.approx(model.offset, abs=1e-3)

    def test_empty_query(self):
        _, _, model = fit_linear(seed=32)
        assert gp_predict_mean(model, np.empty((0, 2))).size == 0

    def test_dimension_mismatch(self):
        _, _, model = fit_linear(seed=33)
        with pytest.raises(SensakitError):
            gp_predict_mean(model, np.zeros((3, 5)))


class TestAugment:
    def test_no_extra_points_returns_original(self):
        x, y, model = fit_linear(seed=41)
        ds = gp_augment(model, x, y, np.empty((0, 2)))
        assert ds.n == x.shape[0]
        assert np.array_equal(ds.output, y)

    def test_augmented_size_and_prefix(self):
        x, y, model = fit_linear(seed=42)
        extra = seeded_rng(43).random((30, 2))
        ds = gp_augment(model, x, y, extra)
        assert ds.n == x.shape[0] + 30
        assert np.array_equal(ds.output[: x.shape[0]], y)
        assert np.allclose(ds.output[x.shape[0]:], gp_predict_mean(model, extra))

    def test_ishigami_augmentation_feeds_estimators(self):
        from sensakit.functions import make_function
        from sensakit.kde import si_kde
        from sensakit.sampling import latin_hypercube, uniform_law

        fn = make_function("ishigami")
        law = uniform_law(fn.bounds)
        design = latin_hypercube(law, 100, seeded_rng(44))
        x = unit_scale(design.input_matrix(), fn.bounds)
        y = fn.eval_on(design.input_matrix())
        model = gp_fit(x, y, restarts=6, rng=seeded_rng(45))
        extra = seeded_rng(46).random((900, 3))
        ds = gp_augment(model, x, y, extra)
        est = si_kde(ds.input(2), ds.output, variable_index=2, method="gp-kde", L=100)
        assert est.N == 1000 and np.isfinite(est.value)


class TestCrossValidate:
    def test_smooth_function_r2_near_one(self):
        rng = seeded_rng(51)
        x = rng.random((60, 1))
        y = np.sin(4.0 * x[:, 0])
        r2, fraction = cross_validate(x, y, k=10, restarts=6, rng=seeded_rng(52))
        assert r2 > 0.99 and fraction == pytest.approx(1.0 - r2, abs=1e-12)

    def test_constant_output_rejected(self):
        with pytest.raises(DegenerateOutputError):
            cross_validate(np.random.rand(20, 1), np.ones(20), k=5, rng=seeded_rng(0))

    def test_fold_count_bounds(self):
        with pytest.raises(SensakitError):
            cross_validate(np.random.rand(5, 1), np.arange(5.0), k=6, rng=seeded_rng(0))


def test_dump_model_key_value_lines():
    _, _, model = fit_linear(seed=61)
    text = dump_model(model)
    assert "length_scales = " in text and "log_marginal_likelihood = " in text


def test_unit_scale_maps_bounds():
    bounds = [[-np.pi, np.pi], [0.0, 10.0]]
    x = np.array([[-np.pi, 0.0], [np.pi, 10.0], [0.0, 5.0]])
    u = unit_scale(x, bounds)
    assert np.allclose(u, [[0, 0], [1, 1], [0.5, 0.5]], atol=1e-15)
