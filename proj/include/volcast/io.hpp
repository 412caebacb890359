#pragma once

#include <span>
#include <string>
#include <vector>

#include "volcast/evaluate.hpp"
#include "volcast/forecast.hpp"
#include "volcast/market_model.hpp"

namespace volcast::io {

/// "%.12g"; empty string for NaN (missing cell).
std::string format_double(double x);

/// Writes content via a temp file in the same directory plus rename, so
/// readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

/// horizon,component_tau,weight: long format, one row per (h, tau_k).
std::string weights_csv(const ProcessSpec& spec, const ForecastWeights& weights);
/// horizon,sum_weights,w_inf: sum over components and the mean-component weight.
std::string weights_sum_csv(const ForecastWeights& weights);

/// date,horizon_days,forward_vol,forecast_vol (forward_vol = sqrt of the
/// annualized forward variance).
std::string term_structure_csv(std::span<const ForecastCurve> curves);

/// date,spec,horizon,forecast,implied,realized
std::string records_csv(std::span<const EvalRecord> records);

/// spec,horizon,pair,mae,rmse,mae_log,n,eff_n
std::string distances_csv(const DistanceTable& table);

/// date,horizon,<process...>,implied,realized
std::string snapshot_csv(const SnapshotTable& table);

/// date,v1[,v2],residual
std::string market_fit_csv(std::span<const Date> dates, std::span<const FactorFit> fits);

}  // namespace volcast::io
