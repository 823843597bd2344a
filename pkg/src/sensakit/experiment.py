"""Experiment matrix runner: budget grids, repetitions, references, records."""

import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .collocation import sc_build, sc_interpolate
from .data import METHODS, SiEstimate, seeded_rng
from .direct import build_permutation_plan, si_direct
from .errors import SensakitError
from .functions import analytic_hellinger_bivariate_normal, make_function, make_inputs
from .gp import cross_validate, gp_augment, gp_fit, unit_scale
from .kde import si_kde
from .mst import calibrated_beta, si_mst
from .sampling import copula_law, latin_hypercube, monte_carlo, uniform_law

RECORDS_SCHEMA = "# sensakit-records v1"
REFERENCES_SCHEMA = "# sensakit-references v1"

_PLAN_KEYS = ("function", "law", "sigma", "N", "N_ref", "L_grid", "n_r", "methods", "seed")
_GP_METHODS = frozenset({"gp-kde", "gp-mst", "direct-kde", "direct-mst"})
_FAMILY = {
    "sample-kde": "kde",
    "gp-kde": "kde",
    "sc-kde": "kde",
    "direct-kde": "kde",
    "sample-mst": "mst",
    "gp-mst": "mst",
    "direct-mst": "mst",
}

_CV_FOLDS = 10
_RESTARTS = 10

# stream tags for per-repetition substreams
_POOL, _DESIGN, _EVAL, _GP, _CV, _SC, _REF = range(7)


@dataclass(frozen=True)
class ExperimentPlan:
    """Declarative description of one experiment family."""

    function: str
    law: str
    sigma: np.ndarray | None
    n: int
    n_ref: int
    l_grid: tuple
    n_r: int
    methods: tuple
    seed: int
    name: str = "plan"

    def __post_init__(self):
        if self.function not in ("random", "binormal", "ishigami", "piston"):
            raise SensakitError(f"unknown function {self.function!r}")
        if self.law not in ("independent-uniform", "gaussian-copula"):
            raise SensakitError(f"unknown law {self.law!r}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise SensakitError(f"unknown methods {bad}")
        if not self.methods:
            raise SensakitError("methods must not be empty")
        if self.n_r < 1:
            raise SensakitError("n_r must be >= 1")
        if not self.l_grid:
            raise SensakitError("L_grid must not be empty")
        if max(self.l_grid) > self.n:
            raise SensakitError("max(L_grid) may not exceed N")
        if self.sigma is not None:
            object.__setattr__(
                self, "sigma", np.asarray(self.sigma, dtype=np.float64)
            )
        if self.function == "binormal" and self.sigma is None:
            raise SensakitError("binormal plans need a 2x2 sigma to supply rho")
        if self.law == "gaussian-copula" and self.sigma is None:
            raise SensakitError("gaussian-copula law needs sigma")


@dataclass(frozen=True)
class ConvergenceRecord:
    """One estimate with its method-matched reference and absolute error."""

    variable: int
    method: str
    L: int
    repetition: int
    estimate: float
    reference: float
    abs_error: float
    cv_fraction: float | None
    wall_seconds: float


def load_plan(path) -> ExperimentPlan:
    """Parse a key = value plan file; '#' starts a comment.

    sigma rows are separated by ';', entries by ',' or whitespace; L_grid
    and methods are comma-separated lists.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SensakitError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _PLAN_KEYS:
                raise SensakitError(f"{path}:{lineno}: unknown key {key!r}")
            if key in raw:
                raise SensakitError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value
    required = [k for k in _PLAN_KEYS if k != "sigma"]
    missing = [k for k in required if k not in raw]
    if missing:
        raise SensakitError(f"{path}: missing keys {missing}")
    sigma = None
    if "sigma" in raw:
        rows = [r for r in raw["sigma"].split(";") if r.strip()]
        sigma = np.array(
            [[float(v) for v in row.replace(",", " ").split()] for row in rows]
        )
    return ExperimentPlan(
        function=raw["function"],
        law=raw["law"],
        sigma=sigma,
        n=int(raw["N"]),
        n_ref=int(raw["N_ref"]),
        l_grid=tuple(int(v) for v in raw["L_grid"].replace(",", " ").split()),
        n_r=int(raw["n_r"]),
        methods=tuple(m.strip() for m in raw["methods"].split(",")),
        seed=int(raw["seed"]),
        name=os.path.splitext(os.path.basename(path))[0],
    )


def _function_and_law(plan):
    if plan.function == "binormal":
        rho = float(plan.sigma[0, 1])
        return make_function("binormal", rho=rho), None
    fn = make_function(plan.function)
    if plan.law == "independent-uniform":
        return fn, uniform_law(fn.bounds)
    return fn, copula_law(plan.sigma, fn.bounds)


def _sc_grid_m(l_budget, d):
    """Largest m >= 2 with m^d <= the budget; None when even m=2 is too big."""
    m = int(np.floor(l_budget ** (1.0 / d) + 1e-12))
    while (m + 1) ** d <= l_budget:
        m += 1
    while m >= 2 and m**d > l_budget:
        m -= 1
    return m if m >= 2 else None


def run_reference(plan: ExperimentPlan, cache_path=None, threads=1):
    """Per-variable reference estimates at N_ref with true model outputs.

    Emits one KDE and one MST estimate per variable; bivariate-normal plans
    use the analytic closed form for both families instead.
    """
    fn, law = _function_and_law(plan)
    if plan.function == "binormal":
        value = analytic_hellinger_bivariate_normal(fn.params["rho"])
        return [
            SiEstimate(1, "sample-kde", value, plan.n_ref, plan.n_ref, plan.seed, 0.0),
            SiEstimate(1, "sample-mst", value, plan.n_ref, plan.n_ref, plan.seed, 0.0),
        ]
    ds = make_inputs(fn, law, plan.n_ref, seeded_rng(plan.seed, _REF))
    cal = calibrated_beta(
        plan.n_ref, plan.seed, cache_path=cache_path, threads=threads
    )
    y = ds.output

    def one_variable(k):
        xk = ds.input(k)
        kde = si_kde(xk, y, variable_index=k, method="sample-kde", seed=plan.seed)
        mst = si_mst(xk, y, cal, variable_index=k, method="sample-mst", seed=plan.seed)
        return [kde, mst]

    ks = range(1, fn.d + 1)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            parts = list(pool.map(one_variable, ks))
    else:
        parts = [one_variable(k) for k in ks]
    return [est for part in parts for est in part]


def _reference_lookup(references):
    lut = {}
    for est in references:
        lut[(est.variable_index, _FAMILY[est.method])] = est.value
    return lut


def _record(est, rep, ref_lut, cv_fraction=None):
    ref = ref_lut[(est.variable_index, _FAMILY[est.method])]
    return ConvergenceRecord(
        variable=est.variable_index,
        method=est.method,
        L=est.L,
        repetition=rep,
        estimate=est.value,
        reference=ref,
        abs_error=abs(est.value - ref),
        cv_fraction=cv_fraction,
        wall_seconds=est.wall_seconds,
    )


def _binormal_rep(plan, fn, rep, ref_lut, betas, notes):
    seed_rep = plan.seed + rep
    records = []
    for li, l_val in enumerate(plan.l_grid):
        ds = make_inputs(fn, None, l_val, seeded_rng(seed_rep, _DESIGN, li))
        x = ds.input(1)
        y = ds.output
        for method in plan.methods:
            if method == "sample-kde":
                est = si_kde(x, y, method=method, seed=seed_rep)
            elif method == "sample-mst":
                est = si_mst(x, y, betas[l_val], method=method, seed=seed_rep)
            else:
                notes.add(f"method {method} not defined for binormal plans; skipped")
                continue
            records.append(_record(est, rep, ref_lut))
    return records


def _general_rep(plan, fn, law, rep, ref_lut, betas, perm_plan, notes):
    seed_rep = plan.seed + rep
    records = []
    d = fn.d
    pool_inputs = monte_carlo(law, plan.n, seeded_rng(seed_rep, _POOL)).input_matrix()
    u_pool = unit_scale(pool_inputs, law.bounds)
    want_gp = bool(_GP_METHODS.intersection(plan.methods))
    for li, l_val in enumerate(plan.l_grid):
        rng_design = seeded_rng(seed_rep, _DESIGN, li)
        if law.kind == "independent-uniform":
            design = latin_hypercube(law, l_val, rng_design)
        else:
            design = monte_carlo(law, l_val, rng_design)
        x_l = design.input_matrix()
        y_l = fn.eval_on(x_l, rng=seeded_rng(seed_rep, _EVAL, li))
        for method in ("sample-kde", "sample-mst"):
            if method not in plan.methods:
                continue
            for k in range(1, d + 1):
                if method == "sample-kde":
                    est = si_kde(
                        x_l[:, k - 1], y_l, variable_index=k, method=method, seed=seed_rep
                    )
                else:
                    est = si_mst(
                        x_l[:, k - 1],
                        y_l,
                        betas[l_val],
                        variable_index=k,
                        method=method,
                        seed=seed_rep,
                    )
                records.append(_record(est, rep, ref_lut))
        at_full_pool = l_val == plan.n
        if at_full_pool and (want_gp or "sc-kde" in plan.methods):
            notes.add(
                f"L={l_val} equals N; surrogate-based methods skipped at the full-pool point"
            )
        if want_gp and not at_full_pool:
            u_l = unit_scale(x_l, law.bounds)
            model = gp_fit(u_l, y_l, restarts=_RESTARTS, rng=seeded_rng(seed_rep, _GP, li))
            _, fraction = cross_validate(
                u_l,
                y_l,
                k=min(_CV_FOLDS, l_val),
                restarts=_RESTARTS,
                rng=seeded_rng(seed_rep, _CV, li),
            )
            aug = gp_augment(model, u_l, y_l, u_pool[: plan.n - l_val])
            x_aug = aug.input_matrix()
            y_aug = aug.output
            for method in ("gp-kde", "gp-mst"):
                if method not in plan.methods:
                    continue
                for k in range(1, d + 1):
                    if method == "gp-kde":
                        est = si_kde(
                            x_aug[:, k - 1],
                            y_aug,
                            variable_index=k,
                            method=method,
                            L=l_val,
                            seed=seed_rep,
                        )
                    else:
                        est = si_mst(
                            x_aug[:, k - 1],
                            y_aug,
                            betas[plan.n],
                            variable_index=k,
                            method=method,
                            L=l_val,
                            seed=seed_rep,
                        )
                    records.append(_record(est, rep, ref_lut, cv_fraction=fraction))
            for method in ("direct-kde", "direct-mst"):
                if method not in plan.methods:
                    continue
                estimator = method.split("-", 1)[1]
                for k in range(1, d + 1):
                    est = si_direct(
                        x_aug,
                        k,
                        model,
                        estimator=estimator,
                        cal=betas[plan.n] if estimator == "mst" else None,
                        plan=perm_plan,
                        L=l_val,
                        seed=seed_rep,
                    )
                    records.append(_record(est, rep, ref_lut, cv_fraction=fraction))
        if "sc-kde" in plan.methods and not at_full_pool:
            m = _sc_grid_m(l_val, d)
            if m is None:
                notes.add(
                    f"sc-kde skipped at L={l_val}: a 2^{d} tensor grid exceeds the budget"
                )
            else:
                if law.kind == "gaussian-copula":
                    notes.add(
                        "sc-kde on dependent inputs uses uniform-based nodes; "
                        "interpret with care"
                    )
                rng_sc = seeded_rng(seed_rep, _SC, li)
                sc_model = sc_build(
                    law.bounds,
                    m,
                    lambda p: float(fn.eval_on(p[None, :], rng=rng_sc)[0]),
                    budget=l_val,
                )
                y_interp = sc_interpolate(sc_model, pool_inputs)
                for k in range(1, d + 1):
                    est = si_kde(
                        pool_inputs[:, k - 1],
                        y_interp,
                        variable_index=k,
                        method="sc-kde",
                        L=m**d,
                        seed=seed_rep,
                    )
                    records.append(_record(est, rep, ref_lut))
    return records


def run_plan(plan: ExperimentPlan, cache_path=None, threads=1, references=None):
    """Execute all repetitions of a plan.

    Returns (records, references, summary). Repetitions run in parallel when
    ``threads`` > 1 and merge in repetition order, so results are identical
    for any thread count. Precomputed ``references`` (from run_reference on
    the same plan) can be passed to skip the large-N reference stage.
    """
    t_start = time.perf_counter()
    threads = int(threads) if threads else 1
    fn, law = _function_and_law(plan)
    if references is None:
        references = run_reference(plan, cache_path=cache_path, threads=threads)
    ref_lut = _reference_lookup(references)

    beta_sizes = set()
    if plan.function == "binormal":
        if "sample-mst" in plan.methods:
            beta_sizes.update(plan.l_grid)
    else:
        if "sample-mst" in plan.methods:
            beta_sizes.update(plan.l_grid)
        if {"gp-mst", "direct-mst"}.intersection(plan.methods):
            beta_sizes.add(plan.n)
    betas = {
        size: calibrated_beta(size, plan.seed, cache_path=cache_path, threads=threads)
        for size in sorted(beta_sizes)
    }

    perm_plan = None
    if plan.function != "binormal" and {"direct-kde", "direct-mst"}.intersection(
        plan.methods
    ):
        perm_plan = build_permutation_plan(plan.n, fn.d)

    notes = set()

    def worker(rep):
        if plan.function == "binormal":
            return _binormal_rep(plan, fn, rep, ref_lut, betas, notes)
        return _general_rep(plan, fn, law, rep, ref_lut, betas, perm_plan, notes)

    reps = range(plan.n_r)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_rep = list(pool.map(worker, reps))
    else:
        per_rep = [worker(rep) for rep in reps]
    records = [rec for chunk in per_rep for rec in chunk]
    summary = _summarize(plan, records, notes, time.perf_counter() - t_start)
    return records, references, summary


def _summarize(plan, records, notes, wall):
    out = io.StringIO()
    out.write(f"plan {plan.name}: function={plan.function} law={plan.law} ")
    out.write(f"N={plan.n} N_ref={plan.n_ref} n_r={plan.n_r} seed={plan.seed}\n")
    out.write(f"records: {len(records)}; wall time {wall:.1f} s\n")
    degenerate = sum(
        1 for r in records if r.cv_fraction is not None and r.cv_fraction > 1.0
    )
    fitted = sum(1 for r in records if r.cv_fraction is not None)
    if fitted:
        out.write(
            f"degenerate-fit flags (cv_fraction > 1): {degenerate} of {fitted} "
            "surrogate-backed records\n"
        )
    by_key = {}
    for r in records:
        by_key.setdefault((r.method, r.L), []).append(r.abs_error)
    out.write("mean abs_error by (method, L):\n")
    for (method, l_val), errs in sorted(by_key.items()):
        out.write(f"  {method:11s} L={l_val:<6d} {float(np.mean(errs)):.5f}\n")
    for note in sorted(notes):
        out.write(f"note: {note}\n")
    return out.getvalue()


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records, fh):
    fh.write(RECORDS_SCHEMA + "\n")
    fh.write("variable,method,L,repetition,estimate,reference,abs_error,cv_fraction,wall_seconds\n")
    for r in records:
        fields = (
            r.variable,
            r.method,
            r.L,
            r.repetition,
            r.estimate,
            r.reference,
            r.abs_error,
            r.cv_fraction,
            r.wall_seconds,
        )
        fh.write(",".join(_fmt(v) for v in fields) + "\n")


def write_references_csv(references, fh):
    fh.write(REFERENCES_SCHEMA + "\n")
    fh.write("variable,method,value,N,seed,wall_seconds\n")
    for est in references:
        fields = (
            est.variable_index,
            est.method,
            est.value,
            est.N,
            est.seed,
            est.wall_seconds,
        )
        fh.write(",".join(_fmt(v) for v in fields) + "\n")
