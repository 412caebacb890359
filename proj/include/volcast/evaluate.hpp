#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "volcast/arch_process.hpp"
#include "volcast/forecast.hpp"
#include "volcast/timeseries.hpp"

namespace volcast {

/// Distance statistics over two aligned series. Pairs with a missing (NaN)
/// side are dropped; throws std::runtime_error when no pairs remain.
double mae(std::span<const double> x, std::span<const double> y);
double rmse(std::span<const double> x, std::span<const double> y);
/// MAE of ln(x) vs ln(y); every retained value must be > 0.
double mae_log(std::span<const double> x, std::span<const double> y);

enum class VolPair { forecast_implied, forecast_realized, implied_realized };
std::string to_string(VolPair pair);

/// One (date, process, horizon) triple of annualized volatilities.
/// NaN marks a missing implied quote or a realized window that leaves the sample.
struct EvalRecord {
    Date date;
    std::string process;
    int horizon = 0;
    double forecast_vol = std::numeric_limits<double>::quiet_NaN();
    double implied_vol = std::numeric_limits<double>::quiet_NaN();
    double realized_vol = std::numeric_limits<double>::quiet_NaN();
};

struct DistanceRow {
    std::string process;
    int horizon = 0;
    VolPair pair = VolPair::forecast_realized;
    double mae = 0.0;
    double rmse = 0.0;
    /// Computed over the strictly positive pairs; NaN when none exist.
    double mae_log = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;
    /// Overlapping windows shrink the information content: ~ n / horizon.
    double effective_n = 0.0;
};

struct DistanceTable {
    std::vector<DistanceRow> rows;
    const DistanceRow* find(const std::string& process, int horizon, VolPair pair) const;
};

struct EvalOptions {
    double year_days = kDefaultYearDays;
    /// Returns used for the initial sample-variance state (>= 25).
    int warmup = 25;
    /// Burn-in returns discarded before scoring; 0 = ceil(max tau_n over specs).
    int burn_in = 0;
    /// Evaluate every stride-th business day (1 = overlapping daily windows).
    int stride = 1;
};

struct EvalResult {
    std::vector<EvalRecord> records;
    DistanceTable distances;
};

/// Rolling construction of (forecast, implied, realized) triples: walk the
/// return series, update every spec's state, emit the term structure at each
/// requested horizon, join with implied (same date and horizon) and realized
/// (future window), and aggregate distances per process/horizon/pair.
EvalResult rolling_evaluation(const PriceSeries& prices, const ImpliedVolSeries* implied,
                              const std::vector<ProcessSpec>& specs, std::vector<int> horizons,
                              const EvalOptions& opts = {});

/// Term-structure snapshot at one date: horizon vs each volatility.
struct SnapshotTable {
    Date date;
    std::vector<std::string> processes;
    std::vector<int> horizons;
    std::vector<std::vector<double>> forecast;  // [horizon index][process index]
    std::vector<double> implied;
    std::vector<double> realized;
};

SnapshotTable snapshot(std::span<const EvalRecord> records, const Date& date);

}  // namespace volcast
