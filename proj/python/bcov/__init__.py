"""Bayesian block-structured covariance estimation."""

from ._core import (
    ConfigError,
    DataError,
    NumericError,
    __version__,
    ari,
    banding,
    estimate,
    estimator_names,
    frobenius_ratio,
    hard_threshold,
    log_marginal_likelihood,
    lw_linear,
    r2_loss,
    sample_cov,
    scenario_names,
    simulate,
    tapering,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericError",
    "__version__",
    "ari",
    "banding",
    "estimate",
    "estimator_names",
    "frobenius_ratio",
    "hard_threshold",
    "log_marginal_likelihood",
    "lw_linear",
    "r2_loss",
    "sample_cov",
    "scenario_names",
    "simulate",
    "tapering",
]
