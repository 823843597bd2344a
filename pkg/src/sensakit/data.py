"""Column-oriented datasets, index-estimate records, and seeded randomness."""

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateColumnError

_MASK64 = (1 << 64) - 1

#: Recognized estimation-method tags for SiEstimate records.
METHODS = frozenset(
    {
        "sample-kde",
        "sample-mst",
        "gp-kde",
        "gp-mst",
        "sc-kde",
        "direct-kde",
        "direct-mst",
    }
)


def seeded_rng(seed, *key):
    """Deterministic generator for ``seed`` and an optional stream key.

    Identical (seed, key) pairs produce bit-identical streams on every
    platform; distinct keys give statistically independent streams.
    """
    ss = np.random.SeedSequence(
        entropy=int(seed) & _MASK64, spawn_key=tuple(int(k) for k in key)
    )
    return np.random.default_rng(ss)


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Named, equally long real-valued columns with input/output roles.

    Roles are ``input-1`` .. ``input-d`` plus at most one ``output``.
    Instances are immutable (arrays are marked read-only) and safe for
    concurrent reads.
    """

    names: tuple
    columns: tuple
    roles: tuple
    bounds: tuple | None = None

    def __post_init__(self):
        cols = tuple(_freeze(c) for c in self.columns)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "roles", tuple(self.roles))
        if not (len(self.names) == len(cols) == len(self.roles)):
            raise DataError("names, columns and roles must align")
        if not cols:
            raise DataError("dataset needs at least one column")
        n = cols[0].shape[0]
        if n < 1:
            raise DataError("dataset needs at least one row")
        for c in cols:
            if c.ndim != 1 or c.shape[0] != n:
                raise DataError("all columns must be 1-D of identical length")
            if not np.all(np.isfinite(c)):
                raise DataError("non-finite values are not allowed")
        outs = [r for r in self.roles if r == "output"]
        if len(outs) > 1:
            raise DataError("duplicate output role")
        inputs = sorted(
            int(r.split("-", 1)[1]) for r in self.roles if r.startswith("input-")
        )
        if inputs != list(range(1, len(inputs) + 1)):
            raise DataError("input roles must be input-1..input-d")
        if self.bounds is not None:
            bnds = tuple(
                None if b is None else (float(b[0]), float(b[1])) for b in self.bounds
            )
            object.__setattr__(self, "bounds", bnds)
            if len(bnds) != len(cols):
                raise DataError("bounds must align with columns")
            for c, b in zip(cols, bnds):
                if b is None:
                    continue
                lo, hi = b
                if not lo < hi:
                    raise DataError("bounds must satisfy lower < upper")
                if c.size and (c.min() < lo or c.max() > hi):
                    raise DataError("column values outside declared bounds")

    @property
    def n(self):
        return self.columns[0].shape[0]

    @property
    def d(self):
        return sum(1 for r in self.roles if r.startswith("input-"))

    def input(self, k):
        """Input column k (1-based)."""
        role = f"input-{int(k)}"
        return self.columns[self.roles.index(role)]

    @property
    def output(self):
        if "output" not in self.roles:
            return None
        return self.columns[self.roles.index("output")]

    def input_matrix(self):
        """Inputs stacked as an (n, d) matrix in role order."""
        return np.column_stack([self.input(k) for k in range(1, self.d + 1)])

    def input_bounds(self):
        """(d, 2) array of input-column bounds; raises if any are missing."""
        if self.bounds is None:
            raise DataError("dataset carries no bounds")
        out = []
        for k in range(1, self.d + 1):
            b = self.bounds[self.roles.index(f"input-{k}")]
            if b is None:
                raise DataError(f"input-{k} carries no bounds")
            out.append(b)
        return np.asarray(out, dtype=np.float64)


def dataset_from_arrays(inputs, output=None, names=None, bounds=None):
    """Build a Dataset from an (n, d) input matrix and optional output vector."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    d = inputs.shape[1]
    cols = [inputs[:, j] for j in range(d)]
    roles = [f"input-{j + 1}" for j in range(d)]
    if names is None:
        names = [f"x{j + 1}" for j in range(d)]
    else:
        names = list(names)
    if output is not None:
        cols.append(np.asarray(output, dtype=np.float64))
        roles.append("output")
        if len(names) == d:
            names.append("y")
    if bounds is not None:
        bounds = list(bounds)
        if len(bounds) == d and output is not None:
            bounds.append(None)
    return Dataset(tuple(names), tuple(cols), tuple(roles), None if bounds is None else tuple(bounds))


def _parse_cell(text, where):
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"non-numeric cell {text!r} at {where}") from None
    if not math.isfinite(v):
        raise DataError(f"non-finite cell {text!r} at {where}")
    return v


def dataset_from_csv(path, role_map):
    """Read a rectangular numeric CSV (header row) into a Dataset.

    ``role_map`` maps every header name to its role. NaN/Inf cells, ragged
    rows, and duplicate output roles are rejected.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty file") from None
        header = [h.strip() for h in header]
        missing = [h for h in header if h not in role_map]
        if missing:
            raise DataError(f"no role assigned for columns {missing}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise DataError(f"ragged row at line {lineno}")
            rows.append([_parse_cell(c.strip(), f"line {lineno}") for c in row])
    if not rows:
        raise DataError("no data rows")
    mat = np.asarray(rows, dtype=np.float64)
    cols = tuple(mat[:, j] for j in range(len(header)))
    roles = tuple(role_map[h] for h in header)
    return Dataset(tuple(header), cols, roles)


def dataset_to_csv(ds, path):
    """Write a Dataset back to CSV with round-trip-exact float formatting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ds.names)
        for i in range(ds.n):
            writer.writerow([repr(float(c[i])) for c in ds.columns])


def default_role_map(names, output=None):
    """Role map assigning inputs in order, with ``output`` (or none) as output."""
    role_map = {}
    k = 0
    for name in names:
        if name == output:
            role_map[name] = "output"
        else:
            k += 1
            role_map[name] = f"input-{k}"
    return role_map


def column_standardize(v):
    """Center and scale to unit sample standard deviation (n-1 denominator).

    Returns (standardized, mean, std); the pair (mean, std) inverts the map.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.size < 2:
        raise DataError("need at least two values to standardize")
    mean = float(np.mean(v))
    std = float(np.std(v, ddof=1))
    if std <= 0.0:
        raise DegenerateColumnError("zero-variance column")
    return (v - mean) / std, mean, std


@dataclass(frozen=True)
class SiEstimate:
    """One sensitivity-index value with its method and provenance."""

    variable_index: int
    method: str
    value: float
    L: int
    N: int
    seed: int
    wall_seconds: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.variable_index < 1:
            raise ValueError("variable_index is 1-based")
        if self.L > self.N:
            raise ValueError("L may not exceed N")
