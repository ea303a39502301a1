"""Sensitivity-adaptive basis expansion, pruning, and fitted-model handling.

The adaptive fit grows a downward-closed multi-index set one term at a
time, always accepting the admissible forward neighbor whose coefficients
contribute the most aggregated response variance, and stops as soon as the
least-squares problem would become underdetermined or ill-conditioned.
The extended set reached at that point is then pruned back, removing the
weakest terms until both the sample-size and the condition-number limits
hold again.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .multi_index import MultiIndex, MultiIndexSet, zero_set
from .polynomial_basis import DistributionSpec
from .regression import (
    DesignBuilder,
    OLS_RANK_RTOL,
    TrainingData,
    condition_from_singular_values,
)

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class MvsaConfig:
    """Knobs of the adaptive fit.

    kappa is the largest tolerated spectral condition number of the design
    matrix (must exceed 1); initial_set defaults to the zero index;
    max_iterations, when given, caps the number of accepted expansion steps;
    protect_zero_index exempts the constant term from pruning.
    """

    kappa: float = 100.0
    initial_set: MultiIndexSet | None = None
    max_iterations: int | None = None
    protect_zero_index: bool = True

    def __post_init__(self):
        if not self.kappa > 1.0:
            raise ConfigError(f"kappa must exceed 1, got {self.kappa}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")

    def resolve_initial_set(self, dim: int) -> MultiIndexSet:
        if self.initial_set is None:
            return zero_set(dim)
        if self.initial_set.dim != dim:
            raise ConfigError(
                f"initial set dimension {self.initial_set.dim} does not match inputs ({dim})"
            )
        if not self.initial_set.is_downward_closed():
            raise ConfigError("initial multi-index set must be downward-closed")
        return self.initial_set


@dataclass(frozen=True)
class ExpansionStep:
    """One accepted expansion: which index entered and on what evidence."""

    added: MultiIndex
    eta: float
    condition_number: float
    extended_size: int


@dataclass(frozen=True)
class ExpansionTrace:
    initial: MultiIndexSet
    steps: tuple[ExpansionStep, ...]
    termination: str


@dataclass(frozen=True)
class PruneResult:
    basis: MultiIndexSet
    coefficients: np.ndarray
    removed: tuple[MultiIndex, ...]
    condition_number: float


@dataclass(frozen=True)
class FitDiagnostics:
    condition_number: float
    iterations: int
    pruned_count: int
    max_total_degree: int
    max_univariate_degree: int
    basis_size: int
    termination: str

    def to_dict(self) -> dict:
        return {
            "condition_number": self.condition_number,
            "iterations": self.iterations,
            "pruned_count": self.pruned_count,
            "max_total_degree": self.max_total_degree,
            "max_univariate_degree": self.max_univariate_degree,
            "basis_size": self.basis_size,
            "termination": self.termination,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FitDiagnostics":
        return cls(
            condition_number=float(payload["condition_number"]),
            iterations=int(payload["iterations"]),
            pruned_count=int(payload["pruned_count"]),
            max_total_degree=int(payload["max_total_degree"]),
            max_univariate_degree=int(payload["max_univariate_degree"]),
            basis_size=int(payload["basis_size"]),
            termination=str(payload["termination"]),
        )


@dataclass(frozen=True)
class PceModel:
    """Fitted expansion: distribution spec, basis, and K x M coefficients.

    Immutable once constructed; safe to share across threads for
    prediction and post-processing.
    """

    spec: DistributionSpec
    basis: MultiIndexSet
    coefficients: np.ndarray
    diagnostics: FitDiagnostics
    trace: ExpansionTrace | None = field(default=None, compare=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        if coeffs.shape[0] != len(self.basis):
            raise DataError(
                f"coefficient rows ({coeffs.shape[0]}) do not match basis size ({len(self.basis)})"
            )
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n_outputs(self) -> int:
        return self.coefficients.shape[1]


def sensitivity_indicators(coefficients) -> np.ndarray:
    """Per-term aggregated variance contribution: eta_k = sum_m c_{m,k}^2."""
    coeffs = np.asarray(coefficients, dtype=float)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    return np.sum(coeffs * coeffs, axis=1)


def _solve_with_cond(matrix: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    # lstsq already computes the SVD; reuse its singular values for the
    # condition check instead of factorizing twice.
    coeffs, _, _, s = np.linalg.lstsq(matrix, rhs, rcond=OLS_RANK_RTOL)
    return coeffs, condition_from_singular_values(s, matrix.shape[0], matrix.shape[1])


def expand_basis(
    data: TrainingData,
    spec: DistributionSpec,
    config: MvsaConfig | None = None,
    _builder: DesignBuilder | None = None,
) -> tuple[MultiIndexSet, ExpansionTrace]:
    """Adaptive basis expansion; returns the final extended set and a trace.

    Each pass forms the extended set (current basis plus all admissible
    forward neighbors), stops before solving if that set outgrows the sample
    count, solves the least-squares problem otherwise, stops if the design
    is conditioned worse than kappa, and else accepts the single admissible
    index with the largest sensitivity indicator (ties broken toward the
    lexicographically smallest index).
    """
    config = config or MvsaConfig()
    if data.n_inputs != spec.dim:
        raise DataError(f"data width {data.n_inputs} does not match spec dimension {spec.dim}")
    basis = config.resolve_initial_set(spec.dim)
    if len(basis) >= data.n_samples:
        raise ConfigError(
            f"initial set size {len(basis)} must be smaller than the sample count {data.n_samples}"
        )
    builder = _builder or DesignBuilder(spec, data.inputs)
    steps: list[ExpansionStep] = []
    while True:
        admissible = basis.admissible_forward_neighbors()
        extended = basis.union(admissible)
        if len(extended) > data.n_samples:
            termination = "underdetermined"
            break
        coeffs, cond = _solve_with_cond(builder.matrix(extended), data.responses)
        if cond > config.kappa:
            termination = "ill_conditioned"
            break
        eta = sensitivity_indicators(coeffs)
        # Admissible candidates sit after the current basis, in sorted
        # order, so the first strict maximum is the lexicographic winner.
        offset = len(basis)
        best = max(range(len(admissible)), key=lambda i: (eta[offset + i], -i))
        chosen = admissible.indices[best]
        steps.append(
            ExpansionStep(
                added=chosen,
                eta=float(eta[offset + best]),
                condition_number=cond,
                extended_size=len(extended),
            )
        )
        basis = basis.with_index(chosen)
        if config.max_iterations is not None and len(steps) >= config.max_iterations:
            termination = "max_iterations"
            break
    trace = ExpansionTrace(
        initial=config.resolve_initial_set(spec.dim),
        steps=tuple(steps),
        termination=termination,
    )
    return extended, trace


def prune_basis(
    data: TrainingData,
    spec: DistributionSpec,
    basis: MultiIndexSet,
    config: MvsaConfig | None = None,
    _builder: DesignBuilder | None = None,
) -> PruneResult:
    """Remove minimum-sensitivity terms until size and conditioning hold.

    While the design is conditioned worse than kappa or the basis outsizes
    the sample count, re-solves the least-squares problem and drops the
    index with the smallest sensitivity indicator (lexicographic tie-break;
    the zero index is exempt while protect_zero_index is set).  Returns the
    final basis together with a fresh solve on it.
    """
    config = config or MvsaConfig()
    if len(basis) == 0:
        raise ConfigError("cannot prune an empty basis")
    zero = (0,) * basis.dim
    if zero not in basis:
        raise ConfigError("prune_basis expects the zero multi-index in the basis")
    builder = _builder or DesignBuilder(spec, data.inputs)
    removed: list[MultiIndex] = []
    while True:
        coeffs, cond = _solve_with_cond(builder.matrix(basis), data.responses)
        if cond <= config.kappa and len(basis) <= data.n_samples:
            return PruneResult(
                basis=basis,
                coefficients=coeffs,
                removed=tuple(removed),
                condition_number=cond,
            )
        eta = sensitivity_indicators(coeffs)
        victim = None
        victim_eta = np.inf
        for i, index in enumerate(basis.indices):
            if config.protect_zero_index and index == zero:
                continue
            if eta[i] < victim_eta or (eta[i] == victim_eta and index < victim):
                victim = index
                victim_eta = eta[i]
        # A lone all-ones column has condition number 1 and size 1 <= Q,
        # so the loop must have exited before running out of candidates.
        assert victim is not None, "pruning exhausted all removable indices"
        basis = basis.without_index(victim)
        removed.append(victim)


def fit_mvsa(
    data: TrainingData,
    spec: DistributionSpec,
    config: MvsaConfig | None = None,
) -> PceModel:
    """Full adaptive fit: expansion, pruning, and final solve."""
    config = config or MvsaConfig()
    builder = DesignBuilder(spec, data.inputs)
    extended, trace = expand_basis(data, spec, config, _builder=builder)
    result = prune_basis(data, spec, extended, config, _builder=builder)
    diagnostics = FitDiagnostics(
        condition_number=result.condition_number,
        iterations=len(trace.steps),
        pruned_count=len(result.removed),
        max_total_degree=result.basis.max_total_degree(),
        max_univariate_degree=result.basis.max_univariate_degree(),
        basis_size=len(result.basis),
        termination=trace.termination,
    )
    return PceModel(
        spec=spec,
        basis=result.basis,
        coefficients=result.coefficients,
        diagnostics=diagnostics,
        trace=trace,
    )


def fit_fixed(data: TrainingData, spec: DistributionSpec, basis: MultiIndexSet) -> PceModel:
    """Single least-squares solve on a fixed basis, min-norm if needed.

    No adaptivity and no condition-number enforcement; the diagnostics
    record the condition number as observed.
    """
    if len(basis) == 0:
        raise ConfigError("fixed-basis fit requires a non-empty basis")
    if data.n_inputs != spec.dim:
        raise DataError(f"data width {data.n_inputs} does not match spec dimension {spec.dim}")
    builder = DesignBuilder(spec, data.inputs)
    coeffs, cond = _solve_with_cond(builder.matrix(basis), data.responses)
    diagnostics = FitDiagnostics(
        condition_number=cond,
        iterations=0,
        pruned_count=0,
        max_total_degree=basis.max_total_degree(),
        max_univariate_degree=basis.max_univariate_degree(),
        basis_size=len(basis),
        termination="fixed",
    )
    return PceModel(spec=spec, basis=basis, coefficients=coeffs, diagnostics=diagnostics)


def predict(model: PceModel, inputs) -> np.ndarray:
    """Evaluate the expansion at new inputs; returns a Q' x M matrix."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if inputs.shape[1] != model.spec.dim:
        raise DataError(
            f"inputs have width {inputs.shape[1]}, model expects {model.spec.dim}"
        )
    if inputs.shape[0] == 0:
        return np.empty((0, model.n_outputs))
    builder = DesignBuilder(model.spec, inputs)
    return builder.matrix(model.basis) @ model.coefficients


# -- persistence ----------------------------------------------------------------


def model_to_json(model: PceModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "spec": model.spec.to_json(),
        "basis": model.basis.to_json(),
        "coefficients": [[float(v) for v in row] for row in model.coefficients],
        "diagnostics": model.diagnostics.to_dict(),
    }


def model_from_json(payload: dict) -> PceModel:
    try:
        version = payload["format_version"]
        if version != MODEL_FORMAT_VERSION:
            raise DataError(f"unsupported model format_version {version}")
        spec = DistributionSpec.from_json(payload["spec"])
        basis = MultiIndexSet.from_json(payload["basis"], dim=spec.dim)
        coefficients = np.asarray(payload["coefficients"], dtype=float)
        diagnostics = FitDiagnostics.from_dict(payload["diagnostics"])
    except KeyError as exc:
        raise DataError(f"model JSON is missing field {exc}") from None
    return PceModel(spec=spec, basis=basis, coefficients=coefficients, diagnostics=diagnostics)


def save_model(model: PceModel, path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        json.dump(model_to_json(model), handle)
        handle.write("\n")


def load_model(path) -> PceModel:
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    try:
        with path.open(encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    return model_from_json(payload)
