#pragma once

#include <span>
#include <vector>

#include "volcast/arch_process.hpp"

namespace volcast {

/// Horizon-dependent forward-variance weights of a process spec.
///
/// forward(h) holds w_k(h) with
///
///   E[sigma_eff^2(t+h) | O(t)] = sigma_inf^2_step
///                              + sum_k w_k(h) (sigma_k^2(t) - sigma_inf^2_step),
///
/// obtained by iterating the row vector w(h) = w^T M^h where M is the one-step
/// expectation matrix M_kj = mu_k 1{k=j} + (1-mu_k) w_j (augmented with the
/// mean component for affine specs). h = 0 is the spec weight vector itself:
/// the one-step forecast E[r^2(t+1)|O(t)] = sigma_eff^2(t).
///
/// averaged(dT) holds the realized-window forecast weights, the arithmetic
/// mean of forward(0..dT-1): same functional form, different weights.
///
/// w_inf(h) = 1 - sum_k w_k(h) by construction (exactly 0 for linear specs).
/// Exact per-step mu_k are used throughout; no dt/tau expansion.
class ForecastWeights {
public:
    ForecastWeights(const ProcessSpec& spec, int max_horizon);

    int max_horizon() const { return max_horizon_; }
    std::size_t components() const { return n_; }

    /// w_k(h) for h in [0, max_horizon].
    std::span<const double> forward(int h) const;
    double forward_w_inf(int h) const;

    /// Window-averaged weights for delta_t in [1, max_horizon].
    std::span<const double> averaged(int delta_t) const;
    double averaged_w_inf(int delta_t) const;

private:
    std::size_t n_ = 0;
    int max_horizon_ = 0;
    bool linear_ = true;
    std::vector<double> forward_;   // (max_horizon+1) x n, row-major
    std::vector<double> fwd_inf_;   // max_horizon+1
    std::vector<double> averaged_;  // max_horizon x n, row dT-1
    std::vector<double> avg_inf_;   // max_horizon
};

ForecastWeights forecast_weights(const ProcessSpec& spec, int max_horizon);

/// Annualized forward variance v(t, t+h) = E[sigma_eff^2(t+h)] from the state
/// at t; h = 0 returns the (annualized) current effective variance.
double forward_variance(std::span<const double> sigma_sq, const ProcessSpec& spec,
                        const ForecastWeights& weights, int h, double year_days = kDefaultYearDays);

/// Annualized forecast of the realized volatility over the next delta_t steps:
/// the square root of the mean of the forward variances v(t, t+h), h = 0..delta_t-1.
double forecasted_volatility(std::span<const double> sigma_sq, const ProcessSpec& spec,
                             const ForecastWeights& weights, int delta_t,
                             double year_days = kDefaultYearDays);

/// Per-horizon forward variance and forecasted volatility, both annualized.
struct ForecastCurve {
    Date as_of;
    std::vector<int> horizons;
    std::vector<double> forward_variance;
    std::vector<double> forecast_vol;
};

/// Curve at every requested horizon (sorted ascending, all >= 1).
ForecastCurve term_structure(const VolState& state, const ProcessSpec& spec,
                             const ForecastWeights& weights, std::span<const int> horizons,
                             double year_days = kDefaultYearDays);

}  // namespace volcast
