"""Multi-scale ARCH volatility forecasting.

Thin python surface over the compiled core: process builders, EMA state
updates, forward-variance / forecasted-volatility term structures, Monte Carlo
simulation of the return- and variance-level dynamics, linear market models
for the forward-variance curve, and distance statistics.
"""

from ._core import (
    Date,
    FactorFit,
    ForecastCurve,
    ForecastWeights,
    InnovationDist,
    MarketModelSpec,
    MartingaleReport,
    ProcessSpec,
    SimPath,
    build_garch11,
    build_igarch1,
    build_igarch2,
    build_lm_arch,
    chi_from_epsilon,
    compatibility_residual,
    effective_variance,
    fit_factors,
    forecast_weights,
    forecasted_volatility,
    forward_variance,
    init_state,
    log_returns,
    mae,
    mae_log,
    martingale_check,
    realized_volatility,
    rmse,
    simulate_induced_variance,
    simulate_market_model,
    simulate_returns,
    term_structure,
    update_state,
)

__all__ = [
    "Date",
    "FactorFit",
    "ForecastCurve",
    "ForecastWeights",
    "InnovationDist",
    "MarketModelSpec",
    "MartingaleReport",
    "ProcessSpec",
    "SimPath",
    "build_garch11",
    "build_igarch1",
    "build_igarch2",
    "build_lm_arch",
    "chi_from_epsilon",
    "compatibility_residual",
    "effective_variance",
    "fit_factors",
    "forecast_weights",
    "forecasted_volatility",
    "forward_variance",
    "init_state",
    "log_returns",
    "mae",
    "mae_log",
    "martingale_check",
    "realized_volatility",
    "rmse",
    "simulate_induced_variance",
    "simulate_market_model",
    "simulate_returns",
    "term_structure",
    "update_state",
]

__version__ = "0.1.0"
