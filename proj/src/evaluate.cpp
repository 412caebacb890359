#include "volcast/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("distance: series lengths differ");
    }
}

bool both_present(double a, double b) { return std::isfinite(a) && std::isfinite(b); }

}  // namespace

double mae(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!both_present(x[i], y[i])) continue;
        sum += std::abs(x[i] - y[i]);
        ++n;
    }
    if (n == 0) throw std::runtime_error("mae: no overlapping observations");
    return sum / static_cast<double>(n);
}

double rmse(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!both_present(x[i], y[i])) continue;
        const double d = x[i] - y[i];
        sum += d * d;
        ++n;
    }
    if (n == 0) throw std::runtime_error("rmse: no overlapping observations");
    return std::sqrt(sum / static_cast<double>(n));
}

double mae_log(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!both_present(x[i], y[i])) continue;
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::runtime_error("mae_log: non-positive value at index " + std::to_string(i));
        }
        sum += std::abs(std::log(x[i]) - std::log(y[i]));
        ++n;
    }
    if (n == 0) throw std::runtime_error("mae_log: no overlapping observations");
    return sum / static_cast<double>(n);
}

std::string to_string(VolPair pair) {
    switch (pair) {
        case VolPair::forecast_implied: return "forecast_implied";
        case VolPair::forecast_realized: return "forecast_realized";
        case VolPair::implied_realized: return "implied_realized";
    }
    return "unknown";
}

const DistanceRow* DistanceTable::find(const std::string& process, int horizon, VolPair pair) const {
    for (const auto& row : rows) {
        if (row.process == process && row.horizon == horizon && row.pair == pair) return &row;
    }
    return nullptr;
}

namespace {

// Distance row over aligned columns; pairs with a missing side dropped,
// the log metric additionally restricted to strictly positive pairs.
bool accumulate_pair(const std::string& process, int horizon, VolPair pair,
                     std::span<const double> x, std::span<const double> y, DistanceTable& table) {
    double abs_sum = 0.0, sq_sum = 0.0, log_sum = 0.0;
    std::size_t n = 0, n_log = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!both_present(x[i], y[i])) continue;
        const double d = x[i] - y[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
        ++n;
        if (x[i] > 0.0 && y[i] > 0.0) {
            log_sum += std::abs(std::log(x[i]) - std::log(y[i]));
            ++n_log;
        }
    }
    if (n == 0) return false;
    DistanceRow row;
    row.process = process;
    row.horizon = horizon;
    row.pair = pair;
    row.mae = abs_sum / static_cast<double>(n);
    row.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    row.mae_log = n_log > 0 ? log_sum / static_cast<double>(n_log) : kNaN;
    row.n = n;
    row.effective_n = static_cast<double>(n) / static_cast<double>(horizon);
    table.rows.push_back(std::move(row));
    return true;
}

}  // namespace

EvalResult rolling_evaluation(const PriceSeries& prices, const ImpliedVolSeries* implied,
                              const std::vector<ProcessSpec>& specs, std::vector<int> horizons,
                              const EvalOptions& opts) {
    if (specs.empty()) throw std::invalid_argument("rolling_evaluation: no process specs");
    if (horizons.empty()) throw std::invalid_argument("rolling_evaluation: no horizons");
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    if (horizons.front() < 1) throw std::invalid_argument("rolling_evaluation: horizons must be >= 1");
    if (opts.stride < 1) throw std::invalid_argument("rolling_evaluation: stride must be >= 1");
    if (opts.warmup < 25) throw std::invalid_argument("rolling_evaluation: warmup must be >= 25");
    if (implied) implied->validate();

    const ReturnSeries returns = log_returns(prices);
    const int n_ret = static_cast<int>(returns.size());
    const int max_h = horizons.back();

    int burn_in = opts.burn_in;
    if (burn_in == 0) {
        double max_tau = 0.0;
        for (const auto& spec : specs) max_tau = std::max(max_tau, spec.max_tau());
        burn_in = static_cast<int>(std::ceil(max_tau));
    }
    burn_in = std::max(burn_in, opts.warmup);

    // One scored date with a full realized window at the largest horizon.
    const int required = burn_in + max_h;
    if (n_ret < required) {
        throw std::runtime_error("insufficient sample: need at least " + std::to_string(required + 1) +
                                 " prices (" + std::to_string(required) + " returns) for burn-in " +
                                 std::to_string(burn_in) + " + horizon " + std::to_string(max_h) +
                                 ", got " + std::to_string(n_ret) + " returns");
    }

    // Prefix sums of r^2 make every realized window O(1).
    std::vector<double> sq_prefix(static_cast<std::size_t>(n_ret) + 1, 0.0);
    for (int i = 0; i < n_ret; ++i) {
        sq_prefix[i + 1] = sq_prefix[i] + returns.returns[i] * returns.returns[i];
    }

    ReturnSeries warmup;
    warmup.dates.assign(returns.dates.begin(), returns.dates.begin() + opts.warmup);
    warmup.returns.assign(returns.returns.begin(), returns.returns.begin() + opts.warmup);

    struct Tracked {
        const ProcessSpec* spec;
        ForecastWeights weights;
        VolState state;
    };
    std::vector<Tracked> tracked;
    tracked.reserve(specs.size());
    for (const auto& spec : specs) {
        tracked.push_back({&spec, ForecastWeights(spec, max_h), init_state(spec, warmup)});
    }

    EvalResult result;
    const int first_eval = burn_in - 1;  // state has then consumed exactly burn_in returns
    for (int i = opts.warmup; i < n_ret; ++i) {
        for (auto& t : tracked) {
            update_state(t.state, *t.spec, returns.returns[i], returns.dates[i]);
        }
        if (i < first_eval || (i - first_eval) % opts.stride != 0) continue;

        for (auto& t : tracked) {
            for (int h : horizons) {
                EvalRecord rec;
                rec.date = returns.dates[i];
                rec.process = t.spec->label();
                rec.horizon = h;
                rec.forecast_vol =
                    forecasted_volatility(t.state.sigma_sq, *t.spec, t.weights, h, opts.year_days);
                if (implied) {
                    if (auto iv = implied->lookup(rec.date, h)) rec.implied_vol = *iv;
                }
                if (i + h <= n_ret - 1) {
                    const double sum_sq = sq_prefix[i + 1 + h] - sq_prefix[i + 1];
                    rec.realized_vol = std::sqrt(opts.year_days / static_cast<double>(h) * sum_sq);
                }
                result.records.push_back(std::move(rec));
            }
        }
    }

    // Aggregate: records are emitted date-major, so gather per (process, horizon).
    for (const auto& spec : specs) {
        for (int h : horizons) {
            std::vector<double> fc, iv, rv;
            for (const auto& rec : result.records) {
                if (rec.process != spec.label() || rec.horizon != h) continue;
                fc.push_back(rec.forecast_vol);
                iv.push_back(rec.implied_vol);
                rv.push_back(rec.realized_vol);
            }
            accumulate_pair(spec.label(), h, VolPair::forecast_implied, fc, iv, result.distances);
            accumulate_pair(spec.label(), h, VolPair::forecast_realized, fc, rv, result.distances);
            accumulate_pair(spec.label(), h, VolPair::implied_realized, iv, rv, result.distances);
        }
    }
    return result;
}

SnapshotTable snapshot(std::span<const EvalRecord> records, const Date& date) {
    SnapshotTable table;
    table.date = date;

    for (const auto& rec : records) {
        if (rec.date != date) continue;
        if (std::find(table.processes.begin(), table.processes.end(), rec.process) ==
            table.processes.end()) {
            table.processes.push_back(rec.process);
        }
        if (std::find(table.horizons.begin(), table.horizons.end(), rec.horizon) ==
            table.horizons.end()) {
            table.horizons.push_back(rec.horizon);
        }
    }
    if (table.processes.empty()) {
        throw std::runtime_error("snapshot: no records at date " + date.to_string());
    }
    std::sort(table.horizons.begin(), table.horizons.end());

    table.forecast.assign(table.horizons.size(),
                          std::vector<double>(table.processes.size(), kNaN));
    table.implied.assign(table.horizons.size(), kNaN);
    table.realized.assign(table.horizons.size(), kNaN);

    for (const auto& rec : records) {
        if (rec.date != date) continue;
        const auto hi = static_cast<std::size_t>(
            std::find(table.horizons.begin(), table.horizons.end(), rec.horizon) -
            table.horizons.begin());
        const auto pi = static_cast<std::size_t>(
            std::find(table.processes.begin(), table.processes.end(), rec.process) -
            table.processes.begin());
        table.forecast[hi][pi] = rec.forecast_vol;
        if (std::isfinite(rec.implied_vol)) table.implied[hi] = rec.implied_vol;
        if (std::isfinite(rec.realized_vol)) table.realized[hi] = rec.realized_vol;
    }
    return table;
}

}  // namespace volcast
