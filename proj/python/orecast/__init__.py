"""Mineral production forecasting: ARIMA and structural models, residual
diagnostics, k-NN cleaning of production tables and the JSON service."""

import json

from ._core import (
    Config,
    OrecastError,
    Service,
    auto_arima,
    clean_monthly,
    difference,
    fit_arima,
    fit_structural,
    forecast,
    inverse_difference,
    ljung_box,
    shapiro_wilk,
)

__all__ = [
    "Config",
    "OrecastError",
    "Service",
    "auto_arima",
    "clean_monthly",
    "difference",
    "fit_arima",
    "fit_structural",
    "forecast",
    "get_json",
    "inverse_difference",
    "ljung_box",
    "shapiro_wilk",
]

__version__ = "0.3.0"


def get_json(service, path, query=None):
    """Like Service.get, with the body decoded."""
    status, body = service.get(path, query)
    return status, json.loads(body)
