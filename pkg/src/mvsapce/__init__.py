"""Adaptive polynomial chaos surrogates for vector-valued model responses.

Core workflow: describe the inputs with a DistributionSpec, fit with
fit_mvsa (adaptive) or fit_fixed (total-degree baseline), then post-process
the model for moments and sensitivity indices.
"""

from .benchmark import (
    BeamConfig,
    ExperimentPlan,
    beam_deflection,
    beam_deflection_rows,
    run_beam_experiment,
    sample_inputs,
    write_experiment_report,
)
from .errors import ConfigError, DataError, DomainError, MvsaError
from .multi_index import MultiIndexSet, hyperbolic_set, total_degree_set, zero_set
from .mvsa_engine import (
    MvsaConfig,
    PceModel,
    expand_basis,
    fit_fixed,
    fit_mvsa,
    load_model,
    predict,
    prune_basis,
    save_model,
    sensitivity_indicators,
)
from .polynomial_basis import (
    DistributionSpec,
    Marginal,
    eval_multivariate,
    eval_univariate,
)
from .regression import (
    TrainingData,
    assemble_design,
    condition_number,
    rmse,
    solve_ols,
)
from .uq import (
    MomentReport,
    SensitivityReport,
    generalized_sobol,
    moments,
    monte_carlo_reference,
    sensitivity_report,
    sobol_indices,
)

__version__ = "0.1.0"

__all__ = [
    "BeamConfig",
    "ConfigError",
    "DataError",
    "DistributionSpec",
    "DomainError",
    "ExperimentPlan",
    "Marginal",
    "MomentReport",
    "MultiIndexSet",
    "MvsaConfig",
    "MvsaError",
    "PceModel",
    "SensitivityReport",
    "TrainingData",
    "assemble_design",
    "beam_deflection",
    "beam_deflection_rows",
    "condition_number",
    "eval_multivariate",
    "eval_univariate",
    "expand_basis",
    "fit_fixed",
    "fit_mvsa",
    "generalized_sobol",
    "hyperbolic_set",
    "load_model",
    "moments",
    "monte_carlo_reference",
    "predict",
    "prune_basis",
    "rmse",
    "run_beam_experiment",
    "sample_inputs",
    "save_model",
    "sensitivity_indicators",
    "sensitivity_report",
    "sobol_indices",
    "solve_ols",
    "total_degree_set",
    "write_experiment_report",
    "zero_set",
]
