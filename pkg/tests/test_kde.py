import numpy as np
import pytest

from conftest import make_correlated_normal
from sensakit.data import column_standardize, seeded_rng
from sensakit.errors import SensakitError
from sensakit.kde import (
    HELLINGER,
    KULLBACK_LEIBLER,
    KdeConfig,
    divergence,
    f_eval,
    kde_joint,
    kde_marginal,
    scott_bandwidth,
    si_kde,
)

PHI_0 = 1.0 / np.sqrt(2.0 * np.pi)


class TestGenerators:
    def test_hellinger_values(self):
        assert f_eval(HELLINGER, 1.0) == 0.0
        assert f_eval(HELLINGER, 4.0) == pytest.approx(1.0, abs=1e-15)

    def test_kl_values(self):
        assert f_eval(KULLBACK_LEIBLER, 1.0) == 0.0
        with pytest.raises(SensakitError):
            f_eval(KULLBACK_LEIBLER, 0.0)

    def test_hellinger_domain(self):
        with pytest.raises(SensakitError):
            f_eval(HELLINGER, -0.1)

    @pytest.mark.parametrize("div", [HELLINGER, KULLBACK_LEIBLER])
    def test_convex_on_grid(self, div):
        # midpoint inequality f((a+b)/2) <= (f(a)+f(b))/2 on a positive grid
        grid = np.linspace(0.05, 5.0, 60)
        for a in grid[::7]:
            for b in grid[::7]:
                lhs = f_eval(div, (a + b) / 2.0)
                rhs = (f_eval(div, a) + f_eval(div, b)) / 2.0
                assert lhs <= rhs + 1e-12

    def test_lookup(self):
        assert divergence("kl") is KULLBACK_LEIBLER
        with pytest.raises(SensakitError):
            divergence("tv")


class TestScott:
    def test_power_of_ten(self):
        assert scott_bandwidth(10**6) == pytest.approx(0.1, rel=1e-14)

    def test_thousand(self):
        assert scott_bandwidth(1000) == pytest.approx(0.31622776601683794, rel=1e-14)

    def test_sixty_four(self):
        assert scott_bandwidth(64) == pytest.approx(0.5, rel=1e-14)

    def test_fixed_rule(self):
        assert KdeConfig("fixed", fixed_h=0.2).bandwidth(10**6) == 0.2
        with pytest.raises(SensakitError):
            KdeConfig("fixed", fixed_h=-1.0)


class TestMarginal:
    def test_single_kernel_center(self):
        assert kde_marginal([0.0], 1.0, 0.0) == pytest.approx(PHI_0, rel=1e-14)

    def test_two_samples(self):
        expected = np.exp(-0.5) * PHI_0  # phi(1) = phi(-1)
        assert kde_marginal([-1.0, 1.0], 1.0, 0.0) == pytest.approx(expected, rel=1e-14)

    def test_integrates_to_one(self):
        v = seeded_rng(1).standard_normal(200)
        grid = np.linspace(-12, 12, 4001)
        dens = kde_marginal(v, 0.4, grid)
        assert np.trapezoid(dens, grid) == pytest.approx(1.0, abs=1e-3)

    def test_positive_in_the_tails(self):
        dens = kde_marginal([0.0, 1.0], 0.5, np.array([-5.0, 6.0]))
        assert np.all(dens > 0.0)


class TestJoint:
    def test_single_kernel_center(self):
        val = kde_joint([0.0], [0.0], 1.0, 0.0, 0.0)
        assert val == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-14)

    def test_independent_factorizes(self):
        rng = seeded_rng(2)
        x = rng.standard_normal(10_000)
        y = rng.permutation(x)
        h = scott_bandwidth(10_000)
        q = rng.standard_normal((200, 2)) * 0.8
        joint = kde_joint(x, y, h, q[:, 0], q[:, 1])
        prod = kde_marginal(x, h, q[:, 0]) * kde_marginal(y, h, q[:, 1])
        assert np.mean(np.abs(joint - prod)) < 0.02

    def test_length_mismatch(self):
        with pytest.raises(SensakitError):
            kde_joint([0.0, 1.0], [0.0], 1.0, 0.0, 0.0)


class TestSiKde:
    def test_matches_plugin_formula(self):
        # dual route: the pairwise-sum shortcut must reproduce the literal
        # plug-in estimator built from the marginal/joint KDE evaluators
        rng = seeded_rng(3)
        x, y = make_correlated_normal(0.6, 250, rng)
        xs, _, _ = column_standardize(x)
        ys, _, _ = column_standardize(y)
        h = scott_bandwidth(250)
        ratio = kde_marginal(xs, h, xs) * kde_marginal(ys, h, ys) / kde_joint(
            xs, ys, h, xs, ys
        )
        expected = float(np.mean(f_eval(HELLINGER, ratio)))
        assert si_kde(x, y).value == pytest.approx(expected, rel=1e-12)

    def test_independent_uniform_near_zero(self):
        # anchor: random input/output should give values around zero
        for s in range(10):
            rng = seeded_rng(300 + s)
            val = si_kde(rng.random(1000), rng.random(1000)).value
            assert -0.05 < val < 0.10

    def test_bivariate_normal_anchor(self):
        x, y = make_correlated_normal(0.5, 10_000, seeded_rng(4))
        assert si_kde(x, y).value == pytest.approx(0.0777, abs=0.05)

    def test_identical_columns_strong_dependence(self):
        # oracle-run bound: the plug-in value for y = x at J=1e3 sits near
        # 0.21, two orders above the independence level (~0.002)
        x = seeded_rng(9).random(1000)
        assert si_kde(x, x.copy()).value > 0.15

    def test_symmetry_exact(self):
        x, y = make_correlated_normal(0.4, 600, seeded_rng(5))
        assert si_kde(x, y).value == si_kde(y, x).value

    def test_affine_invariance(self):
        x, y = make_correlated_normal(0.4, 800, seeded_rng(6))
        a = si_kde(x, y).value
        b = si_kde(2.5 * x - 3.0, 0.1 * y + 40.0).value
        assert a == pytest.approx(b, abs=1e-9)

    def test_permutation_invariance(self):
        rng = seeded_rng(7)
        x, y = make_correlated_normal(0.3, 500, rng)
        perm = rng.permutation(500)
        a = si_kde(x, y).value
        b = si_kde(x[perm], y[perm]).value
        assert a == pytest.approx(b, abs=1e-12)

    def test_hellinger_below_two(self):
        for s in range(5):
            rng = seeded_rng(40 + s)
            x = rng.standard_normal(400)
            y = x + 0.01 * rng.standard_normal(400)
            assert si_kde(x, y).value < 2.0

    def test_kl_divergence_runs(self):
        x, y = make_correlated_normal(0.5, 2000, seeded_rng(8))
        val = si_kde(x, y, KULLBACK_LEIBLER).value
        assert np.isfinite(val)

    def test_short_input_rejected(self):
        with pytest.raises(SensakitError):
            si_kde(np.arange(5.0), np.arange(5.0))

    def test_constant_column_rejected(self):
        from sensakit.errors import DegenerateColumnError

        with pytest.raises(DegenerateColumnError):
            si_kde(np.ones(50), np.arange(50.0))

    def test_metadata(self):
        x, y = make_correlated_normal(0.2, 64, seeded_rng(10))
        est = si_kde(x, y, variable_index=2, method="gp-kde", L=16, seed=77)
        assert (est.variable_index, est.method, est.L, est.N, est.seed) == (
            2,
            "gp-kde",
            16,
            64,
            77,
        )
