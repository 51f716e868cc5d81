"""Intergenerational occupational mobility estimation."""

from ._occmob import (
    ConfigError,
    DataError,
    NumericError,
    bootstrap_ci,
    correlations,
    estimate_mobility,
    estimate_sei,
    generate_survey,
    percentile_ranks,
    transition_matrix,
    wls,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericError",
    "bootstrap_ci",
    "correlations",
    "estimate_mobility",
    "estimate_sei",
    "generate_survey",
    "percentile_ranks",
    "transition_matrix",
    "wls",
]
