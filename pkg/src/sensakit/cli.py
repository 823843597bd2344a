"""Command-line front end: si, beta, surrogate, experiment subcommands.

Exit codes: 0 success, 1 usage error (including missing input files),
2 runtime/estimator error. Every run prints the effective seed.
"""

import os

# single-threaded BLAS keeps repetition-parallel runs bit-reproducible;
# must be set before numpy loads (the package __init__ imports lazily)
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")

import argparse
import sys
from importlib import resources

import numpy as np

from .data import dataset_from_csv, default_role_map, seeded_rng
from .errors import DataError, SensakitError
from .experiment import load_plan, run_plan, write_records_csv, write_references_csv
from .gp import cross_validate, dump_model, gp_fit
from .kde import divergence, si_kde
from .mst import calibrated_beta, si_mst

_DEFAULT_CACHE = "sensakit_beta_cache.csv"


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="sensakit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_si = sub.add_parser("si", help="estimate sensitivity indices from a CSV")
    p_si.add_argument("--data", required=True, help="CSV with inputs and one output column")
    p_si.add_argument("--variable", default="all", help="1-based input index or 'all'")
    p_si.add_argument("--method", choices=("kde", "mst"), required=True)
    p_si.add_argument("--divergence", choices=("hellinger", "kl"), default="hellinger")
    p_si.add_argument("--seed", type=int, default=0)
    p_si.add_argument("--cache", default=_DEFAULT_CACHE, help="beta calibration cache CSV")

    p_beta = sub.add_parser("beta", help="calibrate the spanning-tree constant")
    p_beta.add_argument("--n", type=int, required=True)
    p_beta.add_argument("--reps", type=int, default=50)
    p_beta.add_argument("--seed", type=int, default=0)
    p_beta.add_argument("--cache", default=_DEFAULT_CACHE)
    p_beta.add_argument("--threads", type=int, default=0, help="0 = all cores")

    p_sur = sub.add_parser("surrogate", help="fit a GP and report CV diagnostics")
    p_sur.add_argument("--data", required=True)
    p_sur.add_argument("--folds", type=int, default=10)
    p_sur.add_argument("--restarts", type=int, default=10)
    p_sur.add_argument("--seed", type=int, default=0)

    p_exp = sub.add_parser("experiment", help="run a plan file end to end")
    p_exp.add_argument("--plan", required=True, help="plan file path or bundled name")
    p_exp.add_argument("--out", required=True, help="output directory")
    p_exp.add_argument("--threads", type=int, default=0, help="0 = all cores")
    p_exp.add_argument("--cache", default=None, help="beta cache CSV (default: <out>/beta_cache.csv)")
    return parser


def _load_data(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    import csv as _csv

    with open(path, newline="") as fh:
        header = next(_csv.reader(fh))
    header = [h.strip() for h in header]
    output = None
    for name in header:
        if name.lower() in ("y", "output"):
            output = name
            break
    if output is None:
        output = header[-1]
    return dataset_from_csv(path, default_role_map(header, output=output))


def _resolve_threads(threads):
    return threads if threads and threads > 0 else (os.cpu_count() or 1)


def _cmd_si(args):
    ds = _load_data(args.data)
    if ds.output is None or ds.d == 0:
        raise DataError("data needs at least one input and one output column")
    div = divergence(args.divergence)
    if args.variable == "all":
        variables = list(range(1, ds.d + 1))
    else:
        variables = [int(args.variable)]
        if not 1 <= variables[0] <= ds.d:
            raise DataError(f"variable must be in 1..{ds.d}")
    print(f"# seed = {args.seed}")
    print("variable,method,value,L,N,seed")
    if args.method == "mst":
        cal = calibrated_beta(ds.n, args.seed, cache_path=args.cache)
    for k in variables:
        if args.method == "kde":
            est = si_kde(ds.input(k), ds.output, div, variable_index=k, seed=args.seed)
        else:
            est = si_mst(ds.input(k), ds.output, cal, variable_index=k, seed=args.seed)
        print(f"{est.variable_index},{est.method},{est.value!r},{est.L},{est.N},{est.seed}")
    return 0


def _cmd_beta(args):
    print(f"# seed = {args.seed}")
    cal = calibrated_beta(
        args.n,
        args.seed,
        n_rep=args.reps,
        cache_path=args.cache,
        threads=_resolve_threads(args.threads),
    )
    print("n,d,gamma,n_rep,seed,beta")
    print(f"{cal.n},{cal.d},{cal.gamma!r},{cal.n_rep},{cal.seed},{cal.beta!r}")
    return 0


def _cmd_surrogate(args):
    ds = _load_data(args.data)
    if ds.output is None or ds.d == 0:
        raise DataError("data needs at least one input and one output column")
    x = ds.input_matrix()
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    u = (x - lo) / span
    y = ds.output
    print(f"# seed = {args.seed}")
    model = gp_fit(u, y, restarts=args.restarts, rng=seeded_rng(args.seed))
    r2, fraction = cross_validate(
        u, y, k=args.folds, restarts=args.restarts, rng=seeded_rng(args.seed, 1)
    )
    sys.stdout.write(dump_model(model))
    print(f"r2 = {r2!r}")
    print(f"fraction = {fraction!r}")
    return 0


def _resolve_plan(spec):
    if os.path.exists(spec):
        return spec
    name = spec if spec.endswith(".plan") else spec + ".plan"
    bundled = resources.files("sensakit.plans").joinpath(name)
    if bundled.is_file():
        return str(bundled)
    raise FileNotFoundError(spec)


def _cmd_experiment(args):
    plan_path = _resolve_plan(args.plan)
    plan = load_plan(plan_path)
    os.makedirs(args.out, exist_ok=True)
    cache = args.cache or os.path.join(args.out, "beta_cache.csv")
    print(f"# seed = {plan.seed}")
    records, references, summary = run_plan(
        plan, cache_path=cache, threads=_resolve_threads(args.threads)
    )
    with open(os.path.join(args.out, "records.csv"), "w") as fh:
        write_records_csv(records, fh)
    with open(os.path.join(args.out, "references.csv"), "w") as fh:
        write_references_csv(references, fh)
    with open(os.path.join(args.out, "summary.txt"), "w") as fh:
        fh.write(summary)
    sys.stdout.write(summary)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "si" and args.method == "mst" and args.divergence == "kl":
        parser.error("the mst estimator supports the hellinger divergence only")
    if args.command == "beta" and args.n < 2:
        parser.error("--n must be >= 2")
    handlers = {
        "si": _cmd_si,
        "beta": _cmd_beta,
        "surrogate": _cmd_surrogate,
        "experiment": _cmd_experiment,
    }
    try:
        return handlers[args.command](args)
    except FileNotFoundError as exc:
        print(f"sensakit: missing file: {exc}", file=sys.stderr)
        return 1
    except SensakitError as exc:
        print(f"sensakit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
