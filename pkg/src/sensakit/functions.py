"""Benchmark functions, their input laws, and analytic oracles."""

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, dataset_from_arrays
from .errors import SensakitError
from .sampling import InputLaw, monte_carlo, uniform_law

#: Physical input ranges of the piston simulator (cycle-time benchmark).
PISTON_RANGES = np.array(
    [
        [30.0, 60.0],  # piston weight M (kg)
        [0.005, 0.020],  # piston surface area S (m^2)
        [0.002, 0.010],  # initial gas volume V0 (m^3)
        [1000.0, 5000.0],  # spring coefficient k (N/m)
        [90000.0, 110000.0],  # atmospheric pressure P0 (N/m^2)
        [290.0, 296.0],  # ambient temperature Ta (K)
        [340.0, 360.0],  # filling gas temperature T0 (K)
    ]
)


def ishigami_eval(x, y, z, a=7.0, b=0.1):
    """(1 + b z^4) sin(x) + a sin(y)^2, elementwise.

    The quartic is computed as (z*z)*(z*z) so the sign of z drops out
    bit-exactly (libm pow is not exactly even in its base).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    z2 = z * z
    return (1.0 + b * z2 * z2) * np.sin(x) + a * np.sin(y) ** 2


def piston_eval(M, S, V0, k, P0, Ta, T0):
    """Piston cycle time in seconds, elementwise.

    The gas term uses the initial state P0 * V0 / T0; the working volume V
    solves the force balance and feeds the oscillation frequency:

        A = P0 S + 19.62 M - k V0 / S
        V = S/(2k) (sqrt(A^2 + 4 k (P0 V0 / T0) Ta) - A)
        C = 2 pi sqrt(M / (k + S^2 (P0 V0 / T0) Ta / V^2))
    """
    M, S, V0, k, P0, Ta, T0 = (
        np.asarray(v, dtype=np.float64) for v in (M, S, V0, k, P0, Ta, T0)
    )
    gas = P0 * V0 / T0
    A = P0 * S + 19.62 * M - k * V0 / S
    disc = A * A + 4.0 * k * gas * Ta
    if np.any(disc <= 0.0):
        raise SensakitError("nonpositive discriminant in piston evaluation")
    V = S / (2.0 * k) * (np.sqrt(disc) - A)
    if np.any(V <= 0.0):
        raise SensakitError("nonpositive working volume in piston evaluation")
    return 2.0 * np.pi * np.sqrt(M / (k + S * S * gas * Ta / (V * V)))


def analytic_hellinger_bivariate_normal(rho):
    """Closed-form Hellinger index of a unit bivariate normal with correlation rho.

    2 - 2 * BC where BC is the Bhattacharyya affinity between
    N(0, [[1, rho], [rho, 1]]) and the product of standard-normal marginals:
    BC = (1 - rho^2)^(1/4) / (1 - rho^2/4)^(1/2).
    """
    rho = float(rho)
    if not abs(rho) < 1.0:
        raise SensakitError("|rho| must be < 1")
    bc = (1.0 - rho * rho) ** 0.25 / np.sqrt(1.0 - rho * rho / 4.0)
    return 2.0 - 2.0 * bc


@dataclass(frozen=True)
class TestFunction:
    """A named benchmark with input dimension, sampling bounds, and parameters.

    ``bounds`` is the domain the estimators see. The piston is sampled and
    processed on the unit hypercube and only mapped to PISTON_RANGES to
    evaluate the physics; for the random benchmark the output is uniform
    noise independent of the input.
    """

    name: str
    d: int
    bounds: np.ndarray | None
    params: dict = field(default_factory=dict)

    def eval_on(self, inputs, rng=None):
        """Output vector for an (n, d) input matrix in this function's domain."""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        if inputs.shape[1] != self.d:
            raise SensakitError(
                f"{self.name} expects d={self.d}, got {inputs.shape[1]}"
            )
        if self.name == "random":
            if rng is None:
                raise SensakitError("random benchmark needs an rng for outputs")
            return rng.random(inputs.shape[0])
        if self.name == "ishigami":
            return ishigami_eval(
                inputs[:, 0], inputs[:, 1], inputs[:, 2], **self.params
            )
        if self.name == "piston":
            lo = PISTON_RANGES[:, 0]
            hi = PISTON_RANGES[:, 1]
            phys = lo + (hi - lo) * inputs
            return piston_eval(*(phys[:, j] for j in range(7)))
        raise SensakitError(f"{self.name} has no pointwise evaluator")

    def default_law(self) -> InputLaw:
        if self.bounds is None:
            raise SensakitError(f"{self.name} has no sampling domain")
        return uniform_law(self.bounds)


def make_function(name, **params) -> TestFunction:
    """Benchmarks addressable by name: random, binormal, ishigami, piston."""
    if name == "random":
        return TestFunction("random", 1, np.array([[0.0, 1.0]]))
    if name == "binormal":
        rho = float(params.get("rho", 0.5))
        if not abs(rho) < 1.0:
            raise SensakitError("|rho| must be < 1")
        return TestFunction("binormal", 1, None, {"rho": rho})
    if name == "ishigami":
        a = float(params.get("a", 7.0))
        b = float(params.get("b", 0.1))
        return TestFunction(
            "ishigami", 3, np.array([[-np.pi, np.pi]] * 3), {"a": a, "b": b}
        )
    if name == "piston":
        return TestFunction("piston", 7, np.array([[0.0, 1.0]] * 7))
    raise SensakitError(f"unknown test function {name!r}")


def make_inputs(fn: TestFunction, law, n, rng) -> Dataset:
    """Draw inputs from the law and append the evaluated output column.

    For the bivariate-normal benchmark the pair (X, Y) is drawn jointly and
    no law applies; for the random benchmark outputs are i.i.d. uniform.
    """
    if fn.name == "binormal":
        rho = fn.params["rho"]
        z = rng.standard_normal((int(n), 2))
        x = z[:, 0]
        y = rho * z[:, 0] + np.sqrt(1.0 - rho * rho) * z[:, 1]
        return dataset_from_arrays(x[:, None], output=y)
    if law is None:
        law = fn.default_law()
    if law.d != fn.d:
        raise SensakitError(f"law dimension {law.d} does not match d={fn.d}")
    inputs = monte_carlo(law, n, rng)
    y = fn.eval_on(inputs.input_matrix(), rng=rng)
    return dataset_from_arrays(
        inputs.input_matrix(), output=y, bounds=[tuple(b) for b in law.bounds]
    )
