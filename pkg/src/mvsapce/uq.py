"""Moments, Sobol indices, and generalized sensitivity indices of a fit.

All estimates are read directly off the orthonormal-expansion coefficients:
the constant term is the mean, summed squared coefficients are variances,
and partitioning those sums by which dimensions a multi-index activates
yields first-order and total-effect indices.  For vector-valued responses
the same sums aggregated over outputs give the generalized indices (trace
ratios of the covariance decomposition).  A seeded Monte-Carlo estimator
provides reference moments.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigError, DataError
from .mvsa_engine import PceModel
from .polynomial_basis import DistributionSpec

#: Generator behind every seeded draw in the toolkit; recorded in reports
#: so published numbers can be regenerated.
RNG_ALGORITHM = "pcg64"


@dataclass(frozen=True)
class MomentReport:
    """Per-output mean, variance, and standard deviation."""

    mean: np.ndarray
    variance: np.ndarray
    std: np.ndarray
    constant_term_present: bool = True


@dataclass(frozen=True)
class SensitivityReport:
    """First-order and total-effect indices, per output and aggregated.

    Outputs with zero variance are masked: their per-output columns are
    reported as 0 and flagged in ``zero_variance_outputs``.  When every
    output has zero variance the generalized indices are undefined and
    ``generalized_defined`` is False.
    """

    per_output_first: np.ndarray
    per_output_total: np.ndarray
    generalized_first: np.ndarray
    generalized_total: np.ndarray
    zero_variance_outputs: np.ndarray
    generalized_defined: bool


def _squared_coefficients(model: PceModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    degrees = np.asarray(model.basis.indices, dtype=int)
    squared = model.coefficients * model.coefficients
    nonconstant = degrees.sum(axis=1) > 0
    return degrees, squared, nonconstant


def moments(model: PceModel) -> MomentReport:
    """Mean and variance estimates read off the expansion coefficients.

    The mean is the coefficient row of the zero multi-index (zeros with a
    flag when the basis lacks it); the variance is the sum of squared
    coefficients over all other rows.
    """
    degrees, squared, nonconstant = _squared_coefficients(model)
    variance = squared[nonconstant].sum(axis=0) if nonconstant.any() else np.zeros(model.n_outputs)
    zero = (0,) * model.basis.dim
    if zero in model.basis:
        row = model.basis.indices.index(zero)
        mean = model.coefficients[row].copy()
        present = True
    else:
        mean = np.zeros(model.n_outputs)
        present = False
    return MomentReport(
        mean=mean,
        variance=variance,
        std=np.sqrt(variance),
        constant_term_present=present,
    )


def _index_partitions(degrees: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Selector matrices (N x K) for first-order and total-effect subsets.

    Row n of the first selector marks indices active in dimension n only;
    row n of the total selector marks all indices active in dimension n.
    """
    active = degrees.T > 0
    totals = degrees.sum(axis=1)
    only_n = degrees.T == totals
    first = active & only_n
    return first, active


def sobol_indices(model: PceModel) -> tuple[np.ndarray, np.ndarray]:
    """First-order and total-effect indices per (input, output).

    Returns two N x M matrices; columns of zero-variance outputs are zero
    (see sensitivity_report for the explicit mask).
    """
    degrees, squared, nonconstant = _squared_coefficients(model)
    variance = squared[nonconstant].sum(axis=0) if nonconstant.any() else np.zeros(model.n_outputs)
    first_sel, total_sel = _index_partitions(degrees)
    first_num = first_sel.astype(float) @ squared
    total_num = total_sel.astype(float) @ squared
    defined = variance > 0.0
    first = np.zeros_like(first_num)
    total = np.zeros_like(total_num)
    first[:, defined] = first_num[:, defined] / variance[defined]
    total[:, defined] = total_num[:, defined] / variance[defined]
    return first, total


def generalized_sobol(model: PceModel) -> tuple[np.ndarray, np.ndarray]:
    """Aggregated-variance sensitivity indices over all outputs.

    The numerators and the total variance are summed over outputs before
    taking the ratio; for a single output this reduces exactly to the
    per-output indices.  Returns zero vectors when the aggregated variance
    vanishes (see sensitivity_report for the defined flag).
    """
    degrees, squared, nonconstant = _squared_coefficients(model)
    variance = squared[nonconstant].sum(axis=0) if nonconstant.any() else np.zeros(model.n_outputs)
    aggregated = float(variance.sum())
    n_dims = model.basis.dim
    if aggregated <= 0.0:
        return np.zeros(n_dims), np.zeros(n_dims)
    first_sel, total_sel = _index_partitions(degrees)
    first = (first_sel.astype(float) @ squared).sum(axis=1) / aggregated
    total = (total_sel.astype(float) @ squared).sum(axis=1) / aggregated
    return first, total


def sensitivity_report(model: PceModel) -> SensitivityReport:
    """Full sensitivity post-processing with zero-variance masking."""
    report = moments(model)
    first, total = sobol_indices(model)
    gen_first, gen_total = generalized_sobol(model)
    return SensitivityReport(
        per_output_first=first,
        per_output_total=total,
        generalized_first=gen_first,
        generalized_total=gen_total,
        zero_variance_outputs=report.variance == 0.0,
        generalized_defined=bool(report.variance.sum() > 0.0),
    )


def monte_carlo_reference(
    f: Callable,
    spec: DistributionSpec,
    samples: int,
    seed,
    vectorized: bool = False,
    batch_size: int = 4096,
) -> MomentReport:
    """Seeded Monte-Carlo moments of ``f`` under the input distribution.

    ``f`` maps one N-vector to an M-vector, or a Q x N batch to Q x M when
    ``vectorized`` is set.  Draws are consumed in fixed-size batches from a
    single pcg64 stream, so results are deterministic per (seed,
    batch_size).  Uses a shifted two-pass accumulation and the unbiased
    variance estimator.
    """
    if samples < 2:
        raise ConfigError(f"Monte-Carlo reference needs at least 2 samples, got {samples}")
    rng = np.random.default_rng(seed)
    count = 0
    offset = None
    sum_d = None
    sum_d2 = None
    while count < samples:
        n = min(batch_size, samples - count)
        x = spec.sample(n, rng)
        if vectorized:
            try:
                y = np.asarray(f(x), dtype=float)
            except Exception as exc:
                raise DataError(
                    f"model evaluation failed on samples {count}..{count + n - 1}: {exc}"
                ) from exc
            if y.shape[0] != n:
                raise DataError(f"vectorized model returned {y.shape[0]} rows for {n} inputs")
        else:
            rows = []
            for i, row in enumerate(x):
                try:
                    rows.append(np.asarray(f(row), dtype=float).ravel())
                except Exception as exc:
                    raise DataError(f"model evaluation failed at sample {count + i}: {exc}") from exc
            y = np.vstack(rows)
        if y.ndim == 1:
            y = y[:, None]
        if not np.all(np.isfinite(y)):
            raise DataError(f"non-finite model output within samples {count}..{count + n - 1}")
        if offset is None:
            offset = y[0].copy()
            sum_d = np.zeros_like(offset)
            sum_d2 = np.zeros_like(offset)
        d = y - offset
        sum_d += d.sum(axis=0)
        sum_d2 += (d * d).sum(axis=0)
        count += n
    mean_d = sum_d / samples
    mean = offset + mean_d
    variance = np.maximum(sum_d2 - samples * mean_d * mean_d, 0.0) / (samples - 1)
    return MomentReport(mean=mean, variance=variance, std=np.sqrt(variance))


# -- report serialization -------------------------------------------------------


def write_moments_csv(report: MomentReport, path) -> None:
    """One row per output: index, mean, variance, std, zero-variance flag."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["output", "mean", "variance", "std", "zero_variance"])
        for m in range(len(report.mean)):
            writer.writerow(
                [
                    m + 1,
                    repr(float(report.mean[m])),
                    repr(float(report.variance[m])),
                    repr(float(report.std[m])),
                    int(report.variance[m] == 0.0),
                ]
            )


def write_sobol_csv(report: SensitivityReport, path) -> None:
    """One row per input: first-order then total-effect values per output."""
    n_inputs, n_outputs = report.per_output_first.shape
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        header = (
            ["input"]
            + [f"first_y{m + 1}" for m in range(n_outputs)]
            + [f"total_y{m + 1}" for m in range(n_outputs)]
        )
        writer.writerow(header)
        for n in range(n_inputs):
            writer.writerow(
                [n + 1]
                + [repr(float(v)) for v in report.per_output_first[n]]
                + [repr(float(v)) for v in report.per_output_total[n]]
            )


def write_generalized_csv(report: SensitivityReport, path) -> None:
    """One row per input: generalized first-order and total-effect indices."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["input", "generalized_first", "generalized_total"])
        for n in range(len(report.generalized_first)):
            writer.writerow(
                [
                    n + 1,
                    repr(float(report.generalized_first[n])),
                    repr(float(report.generalized_total[n])),
                ]
            )


def uq_report_json(model: PceModel) -> dict:
    """Combined moments and sensitivity report as a JSON-ready dict."""
    moment_report = moments(model)
    sens = sensitivity_report(model)
    return {
        "moments": {
            "mean": [float(v) for v in moment_report.mean],
            "variance": [float(v) for v in moment_report.variance],
            "std": [float(v) for v in moment_report.std],
            "constant_term_present": moment_report.constant_term_present,
        },
        "sensitivity": {
            "per_output_first": [[float(v) for v in row] for row in sens.per_output_first],
            "per_output_total": [[float(v) for v in row] for row in sens.per_output_total],
            "generalized_first": [float(v) for v in sens.generalized_first],
            "generalized_total": [float(v) for v in sens.generalized_total],
            "zero_variance_outputs": [bool(v) for v in sens.zero_variance_outputs],
            "generalized_defined": sens.generalized_defined,
        },
        "rng_algorithm": RNG_ALGORITHM,
    }


def write_uq_report_json(model: PceModel, path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        json.dump(uq_report_json(model), handle)
        handle.write("\n")
