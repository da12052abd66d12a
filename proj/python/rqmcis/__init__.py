"""Randomized quasi-Monte Carlo option pricing with preintegration and importance sampling."""

import os
from pathlib import Path

_data = Path(__file__).resolve().parent / "data" / "new-joe-kuo-6.1024.txt"
if _data.is_file():
    os.environ.setdefault("RQMCIS_DIRECTIONS", str(_data))

from ._core import (  # noqa: E402
    BasketSpec,
    BsAsianSpec,
    ConfigError,
    DomainError,
    HestonSpec,
    InsufficientDataError,
    NumericError,
    black_scholes_call,
    brownian_covariance,
    drift,
    estimate,
    norm_cdf,
    norm_ppf,
    path_factor,
    reference_value,
    rmse_study,
    smooth_clip,
    sobol,
    validate,
)

__all__ = [
    "BasketSpec",
    "BsAsianSpec",
    "ConfigError",
    "DomainError",
    "HestonSpec",
    "InsufficientDataError",
    "NumericError",
    "black_scholes_call",
    "brownian_covariance",
    "drift",
    "estimate",
    "norm_cdf",
    "norm_ppf",
    "path_factor",
    "reference_value",
    "rmse_study",
    "smooth_clip",
    "sobol",
    "validate",
]
