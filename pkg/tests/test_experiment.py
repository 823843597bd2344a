import numpy as np
import pytest

from sensakit.errors import SensakitError
from sensakit.experiment import (
    ConvergenceRecord,
    ExperimentPlan,
    _sc_grid_m,
    load_plan,
    run_plan,
    run_reference,
    write_records_csv,
)

# deterministic run_reference output for (ishigami, uniform, N_ref=2000, seed=31415)
FROZEN_REFS = {
    (1, "sample-kde"): 0.033619796898141485,
    (1, "sample-mst"): 0.30033497697799993,
    (2, "sample-kde"): 0.03779082195331773,
    (2, "sample-mst"): 0.31252422955120096,
    (3, "sample-kde"): 0.024690382698254125,
    (3, "sample-mst"): 0.1454105217484225,
}


def small_plan(**overrides):
    base = dict(
        function="ishigami",
        law="independent-uniform",
        sigma=None,
        n=120,
        n_ref=2000,
        l_grid=(30, 60, 120),
        n_r=2,
        methods=(
            "sample-kde",
            "sample-mst",
            "gp-kde",
            "gp-mst",
            "sc-kde",
            "direct-kde",
            "direct-mst",
        ),
        seed=808,
    )
    base.update(overrides)
    return ExperimentPlan(**base)


class TestPlanParsing:
    def test_bundled_plan_loads(self):
        from importlib import resources

        path = resources.files("sensakit.plans").joinpath("fig5.plan")
        plan = load_plan(str(path))
        assert plan.function == "ishigami"
        assert plan.l_grid == (30, 50, 100, 200)
        assert plan.n == 1000 and plan.n_ref == 100_000 and plan.n_r == 10

    def test_sigma_rows(self, tmp_path):
        p = tmp_path / "x.plan"
        p.write_text(
            "function = ishigami\nlaw = gaussian-copula\n"
            "sigma = 1 0.8 0.5; 0.8 1 0.8; 0.5 0.8 1\n"
            "N = 100\nN_ref = 200\nL_grid = 30\nn_r = 1\n"
            "methods = sample-kde\nseed = 1\n"
        )
        plan = load_plan(str(p))
        assert plan.sigma.shape == (3, 3) and plan.sigma[0, 1] == 0.8

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "x.plan"
        p.write_text("function = random\nfolds = 3\n")
        with pytest.raises(SensakitError, match="unknown key"):
            load_plan(str(p))

    def test_missing_keys_rejected(self, tmp_path):
        p = tmp_path / "x.plan"
        p.write_text("function = random\n")
        with pytest.raises(SensakitError, match="missing keys"):
            load_plan(str(p))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_plan(str(tmp_path / "nope.plan"))

    def test_grid_exceeding_pool_rejected(self):
        with pytest.raises(SensakitError, match="exceed"):
            small_plan(l_grid=(200,))

    def test_unknown_method_rejected(self):
        with pytest.raises(SensakitError, match="unknown methods"):
            small_plan(methods=("sample-kde", "bootstrap"))

    def test_copula_needs_sigma(self):
        with pytest.raises(SensakitError, match="sigma"):
            small_plan(law="gaussian-copula")


class TestScGrid:
    @pytest.mark.parametrize(
        "budget,d,expected",
        [(30, 3, 3), (50, 3, 3), (100, 3, 4), (200, 3, 5), (200, 7, 2), (100, 7, None), (1000, 1, 1000), (7, 3, None)],
    )
    def test_largest_affordable_grid(self, budget, d, expected):
        assert _sc_grid_m(budget, d) == expected


class TestRunReference:
    def test_frozen_regression(self, beta_cache, threads):
        plan = small_plan(n=500, n_ref=2000, l_grid=(100,), n_r=1, seed=31415)
        refs = run_reference(plan, cache_path=beta_cache, threads=threads)
        assert len(refs) == 6
        for est in refs:
            frozen = FROZEN_REFS[(est.variable_index, est.method)]
            assert est.value == pytest.approx(frozen, abs=1e-9)

    def test_binormal_uses_analytic_value(self):
        plan = ExperimentPlan(
            function="binormal",
            law="independent-uniform",
            sigma=np.array([[1.0, 0.5], [0.5, 1.0]]),
            n=100,
            n_ref=100,
            l_grid=(100,),
            n_r=1,
            methods=("sample-kde", "sample-mst"),
            seed=2,
        )
        refs = run_reference(plan)
        assert len(refs) == 2
        for est in refs:
            assert est.value == pytest.approx(0.07775086869219683, rel=1e-12)


@pytest.fixture(scope="module")
def small_run(beta_cache, threads):
    plan = small_plan()
    return plan, run_plan(plan, cache_path=beta_cache, threads=threads)


class TestRunPlan:
    def test_record_inventory(self, small_run):
        plan, (records, references, summary) = small_run
        # per repetition: sample 2x3x3=18; gp 2x3x2=12; direct 2x3x2=12;
        # sc 3 vars at L in {30, 60} = 6; L=120 == N skips surrogate methods
        assert len(records) == 2 * (18 + 12 + 12 + 6)
        assert len(references) == 6
        assert "note:" in summary

    def test_sc_budget_accounting(self, small_run):
        _, (records, _, _) = small_run
        sc_l = {r.L for r in records if r.method == "sc-kde"}
        assert sc_l == {27}  # m=3 both at L=30 and L=60

    def test_abs_error_definition(self, small_run):
        _, (records, _, _) = small_run
        for r in records:
            assert r.abs_error == abs(r.estimate - r.reference)

    def test_cv_fraction_only_on_surrogate_records(self, small_run):
        _, (records, _, _) = small_run
        for r in records:
            if r.method.startswith(("gp-", "direct-")):
                assert r.cv_fraction is not None
            else:
                assert r.cv_fraction is None

    def test_full_pool_point_has_sample_methods_only(self, small_run):
        _, (records, _, _) = small_run
        at_n = {r.method for r in records if r.L == 120}
        assert at_n == {"sample-kde", "sample-mst"}

    def test_thread_count_does_not_change_estimates(self, beta_cache):
        plan = small_plan(n_r=2, methods=("sample-kde", "sample-mst"), l_grid=(30, 60))
        rec1, _, _ = run_plan(plan, cache_path=beta_cache, threads=1)
        rec2, _, _ = run_plan(plan, cache_path=beta_cache, threads=2)
        assert len(rec1) == len(rec2)
        for a, b in zip(rec1, rec2):
            assert (a.variable, a.method, a.L, a.repetition) == (
                b.variable,
                b.method,
                b.L,
                b.repetition,
            )
            assert a.estimate == b.estimate
            assert a.reference == b.reference

    def test_seed_changes_estimates(self, beta_cache):
        base = small_plan(n_r=1, methods=("sample-kde",), l_grid=(40,))
        other = small_plan(n_r=1, methods=("sample-kde",), l_grid=(40,), seed=809)
        rec1, _, _ = run_plan(base, cache_path=beta_cache)
        rec2, _, _ = run_plan(other, cache_path=beta_cache)
        assert any(a.estimate != b.estimate for a, b in zip(rec1, rec2))


class TestCsvWriters:
    def test_records_schema(self, small_run, tmp_path):
        _, (records, _, _) = small_run
        path = tmp_path / "records.csv"
        with open(path, "w") as fh:
            write_records_csv(records, fh)
        lines = path.read_text().splitlines()
        assert lines[0] == "# sensakit-records v1"
        assert lines[1] == (
            "variable,method,L,repetition,estimate,reference,abs_error,"
            "cv_fraction,wall_seconds"
        )
        assert len(lines) == 2 + len(records)
        # float cells round-trip exactly
        cells = lines[2].split(",")
        assert float(cells[4]) == records[0].estimate

    def test_record_is_frozen(self):
        rec = ConvergenceRecord(1, "sample-kde", 10, 0, 0.1, 0.2, 0.1, None, 0.0)
        with pytest.raises(AttributeError):
            rec.estimate = 0.5
