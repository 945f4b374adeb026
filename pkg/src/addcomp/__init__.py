"""Estimation of one nonparametric component in an additive regression model.

The raw data are projected obliquely onto the sampled expansion space of
the component of interest, along the span of the nuisance components;
penalized least-squares model selection on the projected data then picks
the resolution (nested family) or the individual coefficients (complete
family, by exact thresholding).  A Monte Carlo harness reproduces the
oracle-ratio and baseline-comparison experiments.
"""

from .bases import SampledBasis, dims_for, fourier_eval, haar_design, haar_eval, nuisance_design
from .estimator import AdditiveComponentRegressor
from .exceptions import ConfigurationError, DesignDegeneracyError
from .projection import (
    ObliqueProjector,
    build_projector,
    default_variance_space,
    estimate_variance,
    model_trace,
    residual_trace,
)
from .selection import (
    Model,
    ModelCollection,
    PenaltySpec,
    SelectionOutcome,
    least_squares_fit,
    oracle_benchmark,
    penalty,
    select,
    select_baseline,
    select_complete,
    select_nested,
)
from .simulation import (
    ExperimentConfig,
    RatioReport,
    emit_figure_data,
    figure_data,
    generate_dataset,
    run_baseline_comparison,
    run_ratio_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveComponentRegressor",
    "ConfigurationError",
    "DesignDegeneracyError",
    "ExperimentConfig",
    "Model",
    "ModelCollection",
    "ObliqueProjector",
    "PenaltySpec",
    "RatioReport",
    "SampledBasis",
    "SelectionOutcome",
    "build_projector",
    "default_variance_space",
    "dims_for",
    "emit_figure_data",
    "estimate_variance",
    "figure_data",
    "fourier_eval",
    "generate_dataset",
    "haar_design",
    "haar_eval",
    "least_squares_fit",
    "model_trace",
    "nuisance_design",
    "oracle_benchmark",
    "penalty",
    "residual_trace",
    "run_baseline_comparison",
    "run_ratio_experiment",
    "select",
    "select_baseline",
    "select_complete",
    "select_nested",
    "__version__",
]
