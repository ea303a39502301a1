"""Beam deflection benchmark and the method-comparison experiment harness.

The test problem is a simply supported beam under uniform load whose
deflection is evaluated on a grid of interior points along its length.
Five lognormal physical parameters (width, height, length, Young's
modulus, load) drive the response; a configurable number of lognormal
dummy inputs inflate the input dimension without affecting the output,
which is what makes the case discriminating for adaptive basis selection.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, DomainError, MvsaError
from .multi_index import total_degree_set
from .mvsa_engine import FitDiagnostics, MvsaConfig, PceModel, fit_fixed, fit_mvsa, predict
from .polynomial_basis import DistributionSpec, Marginal
from .regression import TrainingData, rmse
from .uq import RNG_ALGORITHM, MomentReport, moments, monte_carlo_reference


@dataclass(frozen=True)
class BeamConfig:
    """Beam benchmark setup: response grid size and parameter table.

    Each physical parameter is lognormal with the given (mean, std) of the
    variable itself; every dummy input is lognormal(10, 1) and ignored by
    the model.
    """

    response_dim: int = 1000
    dummy_count: int = 15
    width: tuple[float, float] = (0.15, 0.0075)
    height: tuple[float, float] = (0.3, 0.015)
    length: tuple[float, float] = (5.0, 0.05)
    youngs_modulus: tuple[float, float] = (3e10, 4.5e9)
    load: tuple[float, float] = (1e4, 2e3)
    dummy: tuple[float, float] = (10.0, 1.0)

    def __post_init__(self):
        if self.response_dim < 1:
            raise ConfigError(f"response_dim must be >= 1, got {self.response_dim}")
        if self.dummy_count < 0:
            raise ConfigError(f"dummy_count must be >= 0, got {self.dummy_count}")

    @property
    def n_inputs(self) -> int:
        return 5 + self.dummy_count

    def distribution_spec(self) -> DistributionSpec:
        physical = [self.width, self.height, self.length, self.youngs_modulus, self.load]
        marginals = [Marginal.lognormal(*params) for params in physical]
        marginals += [Marginal.lognormal(*self.dummy)] * self.dummy_count
        return DistributionSpec.of(marginals)

    def response(self, inputs: np.ndarray) -> np.ndarray:
        """Vectorized beam response for a Q x N input matrix."""
        return beam_deflection_rows(inputs, self.response_dim)


def beam_deflection(params, n_points: int) -> np.ndarray:
    """Deflection on the interior grid l_m = m L / (M + 1), m = 1..M.

    ``params`` holds (w, h, L, E, P) first; any further entries (dummy
    inputs) are ignored.
    """
    params = np.asarray(params, dtype=float).ravel()
    if params.size < 5:
        raise DataError(f"beam model needs 5 physical parameters, got {params.size}")
    return beam_deflection_rows(params[None, :], n_points)[0]


def beam_deflection_rows(inputs, n_points: int) -> np.ndarray:
    """Beam response for every row of a Q x N matrix; returns Q x M."""
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    if x.shape[1] < 5:
        raise DataError(f"beam model needs 5 physical parameters, got width {x.shape[1]}")
    if np.min(x[:, :5]) <= 0.0:
        raise DomainError("beam parameters must all be positive")
    w, h, length, modulus, load = (x[:, j][:, None] for j in range(5))
    # same association as the scalar path so both agree bitwise
    ell = np.arange(1, n_points + 1)[None, :] * (length / (n_points + 1))
    return load * ell * (length**3 - 2.0 * ell**2 * length + ell**3) / (2.0 * modulus * w * h**3)


def sample_inputs(spec: DistributionSpec, size: int, seed) -> np.ndarray:
    """Draw ``size`` independent input rows; deterministic per seed.

    ``seed`` is anything accepted by numpy's default_rng (an int or a
    sequence of ints for derived streams).
    """
    if size < 1:
        raise ConfigError(f"sample size must be >= 1, got {size}")
    return spec.sample(size, np.random.default_rng(seed))


@dataclass(frozen=True)
class ExperimentPlan:
    """Training sizes, seeds, and methods of one comparison run."""

    training_sizes: tuple[int, ...]
    test_size: int = 1000
    seeds: tuple[int, ...] = tuple(range(10))
    methods: tuple[str, ...] = ("mvsa", "td:2", "td:3")
    kappa: float = 100.0
    mcs_samples: int = 100_000
    mcs_seed: int = 123456789

    def __post_init__(self):
        object.__setattr__(self, "training_sizes", tuple(int(q) for q in self.training_sizes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.training_sizes:
            raise ConfigError("plan needs at least one training size")
        if self.test_size < 1:
            raise ConfigError(f"test_size must be >= 1, got {self.test_size}")
        if len(set(self.seeds)) != len(self.seeds) or not self.seeds:
            raise ConfigError("plan seeds must be non-empty and distinct")
        if self.mcs_seed in self.seeds:
            raise ConfigError("mcs_seed must lie outside the plan's seed list")
        if self.mcs_samples < 2:
            raise ConfigError(f"mcs_samples must be >= 2, got {self.mcs_samples}")
        for method in self.methods:
            _parse_method(method)


def _parse_method(method: str) -> int | None:
    """Validate a method name; returns the TD degree or None for mvsa."""
    if method == "mvsa":
        return None
    if method.startswith("td:"):
        try:
            degree = int(method[3:])
        except ValueError:
            raise ConfigError(f"malformed method {method!r}") from None
        if degree < 0:
            raise ConfigError(f"total-degree method needs degree >= 0, got {degree}")
        return degree
    raise ConfigError(f"unknown method {method!r} (expected 'mvsa' or 'td:<p>')")


def _fit_method(method: str, data: TrainingData, spec: DistributionSpec, kappa: float) -> PceModel:
    degree = _parse_method(method)
    if degree is None:
        return fit_mvsa(data, spec, MvsaConfig(kappa=kappa))
    return fit_fixed(data, spec, total_degree_set(spec.dim, degree))


@dataclass(frozen=True)
class CellResult:
    """Outcome of one (method, Q, seed) cell."""

    method: str
    training_size: int
    seed: int
    ok: bool
    error: str = ""
    rmse: np.ndarray | None = None
    mean: np.ndarray | None = None
    std: np.ndarray | None = None
    fit_seconds: float = float("nan")
    diagnostics: FitDiagnostics | None = None


@dataclass(frozen=True)
class ExperimentReport:
    config: BeamConfig
    plan: ExperimentPlan
    reference: MomentReport
    cells: tuple[CellResult, ...]


def plan_hash(config: BeamConfig, plan: ExperimentPlan) -> str:
    payload = json.dumps({"config": asdict(config), "plan": asdict(plan)}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def run_beam_experiment(config: BeamConfig, plan: ExperimentPlan) -> ExperimentReport:
    """Execute the full comparison protocol for the beam case.

    For every training size and seed, one training and one test set are
    drawn (streams derived from the seed), all requested methods are fitted
    on the same data, and per-output test RMSE, moment estimates, fit time,
    and basis diagnostics are collected.  A single Monte-Carlo moment
    reference, drawn with the dedicated mcs_seed, is shared by all cells.
    Fit failures are recorded in their cell and the run continues.
    """
    spec = config.distribution_spec()
    reference = monte_carlo_reference(
        config.response,
        spec,
        plan.mcs_samples,
        plan.mcs_seed,
        vectorized=True,
    )
    cells: list[CellResult] = []
    for q in plan.training_sizes:
        for seed in plan.seeds:
            train_x = sample_inputs(spec, q, [seed, 0])
            test_x = sample_inputs(spec, plan.test_size, [seed, 1])
            data = TrainingData(inputs=train_x, responses=config.response(train_x))
            test_y = config.response(test_x)
            for method in plan.methods:
                try:
                    started = time.perf_counter()
                    model = _fit_method(method, data, spec, plan.kappa)
                    fit_seconds = time.perf_counter() - started
                    cell_rmse = rmse(predict(model, test_x), test_y)
                    moment_report = moments(model)
                    cells.append(
                        CellResult(
                            method=method,
                            training_size=q,
                            seed=seed,
                            ok=True,
                            rmse=cell_rmse,
                            mean=moment_report.mean,
                            std=moment_report.std,
                            fit_seconds=fit_seconds,
                            diagnostics=model.diagnostics,
                        )
                    )
                except MvsaError as exc:
                    cells.append(
                        CellResult(
                            method=method,
                            training_size=q,
                            seed=seed,
                            ok=False,
                            error=str(exc),
                        )
                    )
    return ExperimentReport(config=config, plan=plan, reference=reference, cells=tuple(cells))


# -- report files ---------------------------------------------------------------
#
# One CSV per metric with a common (method, Q, seed, output_index_or_aggregate,
# value) layout, plus a JSON summary.  File names carry the plan hash.  All
# files except timing.csv are byte-identical across reruns with identical
# flags; timing is wall-clock by nature and is kept out of the summary for
# that reason.


def _csv_line(parts) -> str:
    return ",".join(str(p) for p in parts) + "\r\n"


def write_experiment_report(report: ExperimentReport, out_dir) -> dict[str, str]:
    """Write the metric CSVs and the JSON summary; returns the file map."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = plan_hash(report.config, report.plan)
    paths = {
        "rmse": out_dir / f"rmse_{tag}.csv",
        "moments": out_dir / f"moments_{tag}.csv",
        "timing": out_dir / f"timing_{tag}.csv",
        "degrees": out_dir / f"degrees_{tag}.csv",
        "summary": out_dir / f"summary_{tag}.json",
    }
    header = _csv_line(["method", "Q", "seed", "output_index_or_aggregate", "value"])

    with paths["rmse"].open("w", encoding="utf-8", newline="") as handle:
        handle.write(header)
        for cell in report.cells:
            if not cell.ok:
                continue
            for m, value in enumerate(cell.rmse):
                handle.write(
                    _csv_line([cell.method, cell.training_size, cell.seed, m + 1, repr(float(value))])
                )
            handle.write(
                _csv_line(
                    [cell.method, cell.training_size, cell.seed, "max", repr(float(np.max(cell.rmse)))]
                )
            )

    with paths["moments"].open("w", encoding="utf-8", newline="") as handle:
        handle.write(header)
        for m in range(len(report.reference.mean)):
            handle.write(
                _csv_line(
                    ["mcs", 0, report.plan.mcs_seed, f"mean:{m + 1}", repr(float(report.reference.mean[m]))]
                )
            )
        for m in range(len(report.reference.std)):
            handle.write(
                _csv_line(
                    ["mcs", 0, report.plan.mcs_seed, f"std:{m + 1}", repr(float(report.reference.std[m]))]
                )
            )
        for cell in report.cells:
            if not cell.ok:
                continue
            for m, value in enumerate(cell.mean):
                handle.write(
                    _csv_line(
                        [cell.method, cell.training_size, cell.seed, f"mean:{m + 1}", repr(float(value))]
                    )
                )
            for m, value in enumerate(cell.std):
                handle.write(
                    _csv_line(
                        [cell.method, cell.training_size, cell.seed, f"std:{m + 1}", repr(float(value))]
                    )
                )

    with paths["timing"].open("w", encoding="utf-8", newline="") as handle:
        handle.write(header)
        for cell in report.cells:
            if not cell.ok:
                continue
            handle.write(
                _csv_line(
                    [cell.method, cell.training_size, cell.seed, "fit_seconds", repr(float(cell.fit_seconds))]
                )
            )

    with paths["degrees"].open("w", encoding="utf-8", newline="") as handle:
        handle.write(header)
        for cell in report.cells:
            if not cell.ok:
                continue
            diag = cell.diagnostics
            for name, value in (
                ("max_total_degree", diag.max_total_degree),
                ("max_univariate_degree", diag.max_univariate_degree),
                ("basis_size", diag.basis_size),
                ("condition_number", repr(float(diag.condition_number))),
                ("iterations", diag.iterations),
                ("pruned_count", diag.pruned_count),
            ):
                handle.write(_csv_line([cell.method, cell.training_size, cell.seed, name, value]))

    with paths["summary"].open("w", encoding="utf-8") as handle:
        json.dump(_summary_payload(report, tag), handle)
        handle.write("\n")

    return {name: str(path) for name, path in paths.items()}


def _aggregate(values) -> dict:
    values = [float(v) for v in values]
    return {
        "mean": sum(values) / len(values),
        "min": min(values),
        "max": max(values),
    }


def _summary_payload(report: ExperimentReport, tag: str) -> dict:
    ref_mean = report.reference.mean
    ref_std = report.reference.std
    aggregates: dict[str, dict] = {}
    for method in report.plan.methods:
        aggregates[method] = {}
        for q in report.plan.training_sizes:
            group = [
                c for c in report.cells
                if c.ok and c.method == method and c.training_size == q
            ]
            if not group:
                aggregates[method][str(q)] = {"completed_seeds": 0}
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                mean_errors = [
                    float(np.max(np.abs(c.mean - ref_mean) / np.abs(ref_mean))) for c in group
                ]
                std_errors = [
                    float(np.max(np.abs(c.std - ref_std) / np.abs(ref_std))) for c in group
                ]
            aggregates[method][str(q)] = {
                "completed_seeds": len(group),
                "max_rmse": _aggregate(np.max(c.rmse) for c in group),
                "mean_rel_error_max": _aggregate(mean_errors),
                "std_rel_error_max": _aggregate(std_errors),
                "max_total_degree": _aggregate(c.diagnostics.max_total_degree for c in group),
                "max_univariate_degree": _aggregate(c.diagnostics.max_univariate_degree for c in group),
                "basis_size": _aggregate(c.diagnostics.basis_size for c in group),
            }
    failures = [
        {
            "method": c.method,
            "Q": c.training_size,
            "seed": c.seed,
            "error": c.error,
        }
        for c in report.cells
        if not c.ok
    ]
    return {
        "plan_hash": tag,
        "config": asdict(report.config),
        "plan": asdict(report.plan),
        "rng_algorithm": RNG_ALGORITHM,
        "aggregates": aggregates,
        "failures": failures,
    }
