"""Divergence-based global sensitivity indices from input/output samples.

Two estimators of the Hellinger-distance sensitivity index (kernel density
plug-in and spanning-tree entropy), Gaussian-process augmentation of scarce
samples, a stochastic-collocation baseline, and direct indices that remove
input dependence. Submodules import lazily so the CLI can pin BLAS threading
before numpy loads.
"""

from importlib import import_module

__version__ = "0.1.0"

_EXPORTS = {
    "Dataset": "data",
    "SiEstimate": "data",
    "column_standardize": "data",
    "dataset_from_arrays": "data",
    "dataset_from_csv": "data",
    "dataset_to_csv": "data",
    "default_role_map": "data",
    "seeded_rng": "data",
    "InputLaw": "sampling",
    "SobolSequence": "sampling",
    "copula_law": "sampling",
    "latin_hypercube": "sampling",
    "monte_carlo": "sampling",
    "sobol_points": "sampling",
    "uniform_law": "sampling",
    "FDivergence": "kde",
    "HELLINGER": "kde",
    "KULLBACK_LEIBLER": "kde",
    "KdeConfig": "kde",
    "f_eval": "kde",
    "kde_joint": "kde",
    "kde_marginal": "kde",
    "scott_bandwidth": "kde",
    "si_kde": "kde",
    "MstCalibration": "mst",
    "MstResult": "mst",
    "calibrated_beta": "mst",
    "estimate_beta": "mst",
    "euclidean_mst": "mst",
    "renyi_entropy_half": "mst",
    "si_mst": "mst",
    "GpModel": "gp",
    "cross_validate": "gp",
    "gp_augment": "gp",
    "gp_fit": "gp",
    "gp_predict_mean": "gp",
    "unit_scale": "gp",
    "ScModel": "collocation",
    "gauss_legendre_nodes": "collocation",
    "sc_build": "collocation",
    "sc_interpolate": "collocation",
    "PermutationPlan": "direct",
    "apply_permutation": "direct",
    "build_permutation_plan": "direct",
    "si_direct": "direct",
    "TestFunction": "functions",
    "analytic_hellinger_bivariate_normal": "functions",
    "ishigami_eval": "functions",
    "make_function": "functions",
    "make_inputs": "functions",
    "piston_eval": "functions",
    "ConvergenceRecord": "experiment",
    "ExperimentPlan": "experiment",
    "load_plan": "experiment",
    "run_plan": "experiment",
    "run_reference": "experiment",
}

_SUBMODULES = {
    "cli",
    "collocation",
    "data",
    "direct",
    "errors",
    "experiment",
    "functions",
    "gp",
    "kde",
    "mst",
    "sampling",
}


def __getattr__(name):
    if name in _EXPORTS:
        return getattr(import_module(f".{_EXPORTS[name]}", __name__), name)
    if name in _SUBMODULES:
        return import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS) | set(_SUBMODULES))
