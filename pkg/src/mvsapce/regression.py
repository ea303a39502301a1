"""Design-matrix assembly and multi-right-hand-side least squares.

One orthonormal-basis design matrix serves all response components at once:
a single SVD factorization resolves every column of the right-hand side,
falling back to the minimum-2-norm solution when the system is
rank-deficient or underdetermined.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .multi_index import MultiIndexSet
from .polynomial_basis import DEGREE_CAP, DistributionSpec, univariate_table

#: Relative cutoff under which singular values are treated as zero in the
#: least-squares solve (min-norm behavior below the cutoff).
OLS_RANK_RTOL = 1e-12

#: Relative floor under which the smallest singular value counts as zero
#: when computing condition numbers.
COND_SINGULARITY_RTOL = 1e-15


@dataclass(frozen=True)
class TrainingData:
    """Paired input and response samples, one row per model evaluation."""

    inputs: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        responses = np.asarray(self.responses, dtype=float)
        if responses.ndim == 1:
            responses = responses[:, None]
        if inputs.shape[0] != responses.shape[0]:
            raise DataError(
                f"inputs have {inputs.shape[0]} rows but responses have {responses.shape[0]}"
            )
        if inputs.shape[0] < 1:
            raise DataError("training data must contain at least one row")
        if not np.all(np.isfinite(inputs)):
            raise DataError("non-finite entries in inputs")
        if not np.all(np.isfinite(responses)):
            raise DataError("non-finite entries in responses")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "responses", responses)

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.responses.shape[1]


@dataclass(frozen=True)
class DesignMatrix:
    """Basis evaluations at the training inputs; columns follow set order."""

    entries: np.ndarray
    column_index: MultiIndexSet


class DesignBuilder:
    """Reusable design-matrix assembler for one fixed input sample.

    Standardizes the inputs once and caches per-dimension univariate
    tables and per-multi-index columns, so that repeated assemblies over
    growing or shrinking bases (as in adaptive fitting) cost only the new
    columns.
    """

    def __init__(self, spec: DistributionSpec, inputs, degree_cap: int = DEGREE_CAP):
        self.spec = spec
        self.degree_cap = degree_cap
        self.z = spec.standardize_rows(np.atleast_2d(np.asarray(inputs, dtype=float)))
        self._tables: list[np.ndarray | None] = [None] * spec.dim
        self._columns: dict[tuple[int, ...], np.ndarray] = {}

    @property
    def n_rows(self) -> int:
        return self.z.shape[0]

    def _table(self, n: int, degree: int) -> np.ndarray:
        table = self._tables[n]
        if table is None or table.shape[1] <= degree:
            table = univariate_table(
                self.spec.families[n], degree, self.z[:, n], self.degree_cap
            )
            self._tables[n] = table
        return table

    def column(self, index) -> np.ndarray:
        index = tuple(int(v) for v in index)
        cached = self._columns.get(index)
        if cached is not None:
            return cached
        col = np.ones(self.n_rows)
        for n, degree in enumerate(index):
            if degree:
                col = col * self._table(n, degree)[:, degree]
        self._columns[index] = col
        return col

    def matrix(self, basis: MultiIndexSet) -> np.ndarray:
        if basis.dim != self.spec.dim:
            raise DataError(
                f"basis dimension {basis.dim} does not match input width {self.spec.dim}"
            )
        return np.column_stack([self.column(index) for index in basis])


def assemble_design(spec: DistributionSpec, basis: MultiIndexSet, inputs) -> DesignMatrix:
    """Design matrix d_qk = Psi_k(x_q) over the given basis and inputs."""
    builder = DesignBuilder(spec, inputs)
    return DesignMatrix(entries=builder.matrix(basis), column_index=basis)


def _entries(design) -> np.ndarray:
    matrix = design.entries if isinstance(design, DesignMatrix) else np.asarray(design, dtype=float)
    return np.atleast_2d(matrix)


def solve_ols(design, rhs) -> np.ndarray:
    """Least-squares coefficients for all response columns at once.

    Returns the K x M coefficient matrix minimizing the residual Frobenius
    norm; when rank-deficient or underdetermined, each column is the
    minimum-2-norm minimizer (singular values below ``OLS_RANK_RTOL`` times
    the largest are treated as zero).
    """
    matrix = _entries(design)
    b = np.asarray(rhs, dtype=float)
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    if matrix.shape[0] != b.shape[0]:
        raise DataError(
            f"design has {matrix.shape[0]} rows but right-hand side has {b.shape[0]}"
        )
    if not np.all(np.isfinite(matrix)):
        raise DataError("non-finite entries in design matrix")
    if not np.all(np.isfinite(b)):
        raise DataError("non-finite entries in right-hand side")
    coeffs, _, _, _ = np.linalg.lstsq(matrix, b, rcond=OLS_RANK_RTOL)
    return coeffs[:, 0] if squeeze else coeffs


def condition_from_singular_values(s: np.ndarray, n_rows: int, n_cols: int) -> float:
    """Spectral condition number from precomputed singular values."""
    if n_cols > n_rows:
        return float("inf")
    smax = float(s[0]) if len(s) else 0.0
    smin = float(s[-1]) if len(s) else 0.0
    if smin <= smax * COND_SINGULARITY_RTOL:
        return float("inf")
    return smax / smin


def condition_number(design) -> float:
    """Spectral condition number sigma_max / sigma_min of the design.

    Returns +inf when the matrix has more columns than rows or when the
    smallest singular value falls below ``COND_SINGULARITY_RTOL`` times the
    largest.
    """
    matrix = _entries(design)
    s = np.linalg.svd(matrix, compute_uv=False)
    return condition_from_singular_values(s, matrix.shape[0], matrix.shape[1])


def rmse(predicted, actual) -> np.ndarray:
    """Root-mean-square error per response column."""
    pred = np.asarray(predicted, dtype=float)
    act = np.asarray(actual, dtype=float)
    if pred.shape != act.shape:
        raise DataError(f"shape mismatch: predicted {pred.shape} vs actual {act.shape}")
    if pred.ndim == 1:
        pred = pred[:, None]
        act = act[:, None]
    return np.sqrt(np.mean((pred - act) ** 2, axis=0))


# -- CSV interface ------------------------------------------------------------
#
# Data files carry a header row x1,...,xN,y1,...,yM; the widths N and M come
# from the caller (CLI flags or experiment config), never from guessing.


def _expected_header(n_inputs: int, n_outputs: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n_inputs)] + [f"y{j + 1}" for j in range(n_outputs)]


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty CSV file: {path}") from None
        rows = [row for row in reader if row]
    return [name.strip() for name in header], rows


def _parse_matrix(rows: list[list[str]], width: int, path) -> np.ndarray:
    if not rows:
        return np.empty((0, width))
    out = np.empty((len(rows), width))
    for q, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {q + 1} has {len(row)} fields, expected {width}")
        try:
            out[q] = [float(v) for v in row]
        except ValueError as exc:
            raise DataError(f"{path}: row {q + 1}: {exc}") from None
    return out


def load_data_csv(path, n_inputs: int, n_outputs: int) -> TrainingData:
    """Load a paired x/y data file with header ``x1..xN,y1..yM``."""
    header, rows = _read_rows(path)
    expected = _expected_header(n_inputs, n_outputs)
    if header != expected:
        raise DataError(
            f"{path}: expected header {','.join(expected)} "
            f"({n_inputs} inputs, {n_outputs} outputs), got {','.join(header)}"
        )
    data = _parse_matrix(rows, n_inputs + n_outputs, path)
    if data.shape[0] == 0:
        raise DataError(f"{path}: no data rows")
    return TrainingData(inputs=data[:, :n_inputs], responses=data[:, n_inputs:])


def load_inputs_csv(path, n_inputs: int) -> np.ndarray:
    """Load input columns ``x1..xN`` from a data file, ignoring y columns."""
    header, rows = _read_rows(path)
    expected_x = _expected_header(n_inputs, 0)
    if header[:n_inputs] != expected_x:
        raise DataError(
            f"{path}: expected leading columns {','.join(expected_x)} "
            f"({n_inputs} inputs), got {','.join(header[:n_inputs])}"
        )
    extra = len(header) - n_inputs
    if extra and header[n_inputs:] != [f"y{j + 1}" for j in range(extra)]:
        raise DataError(f"{path}: trailing columns must be y1..yM, got {','.join(header[n_inputs:])}")
    data = _parse_matrix(rows, len(header), path)
    return data[:, :n_inputs]


def write_data_csv(path, inputs: np.ndarray, responses: np.ndarray) -> None:
    """Write a paired x/y data file with header ``x1..xN,y1..yM``."""
    inputs = np.atleast_2d(inputs)
    responses = np.atleast_2d(responses)
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(_expected_header(inputs.shape[1], responses.shape[1]))
        for x_row, y_row in zip(inputs, responses):
            writer.writerow([repr(float(v)) for v in x_row] + [repr(float(v)) for v in y_row])


def write_responses_csv(path, responses: np.ndarray, n_outputs: int | None = None) -> None:
    """Write responses only, header ``y1..yM``."""
    responses = np.atleast_2d(responses)
    width = n_outputs if responses.size == 0 and n_outputs is not None else responses.shape[1]
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"y{j + 1}" for j in range(width)])
        for row in responses:
            writer.writerow([repr(float(v)) for v in row])
