#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "volcast/timeseries.hpp"

namespace volcast {

/// Multi-component ARCH process: per-step EMA variances sigma_k^2 at time
/// scales tau_k (business days) with decay mu_k = exp(-1/tau_k), combined into
/// the effective variance
///
///   sigma_eff^2 = sum_k w_k sigma_k^2 + w_inf * sigma_inf^2_step,
///   sum_k w_k + w_inf = 1.
///
/// Linear process: w_inf = 0 (no mean-variance anchor). Affine: w_inf > 0 with
/// an annualized mean variance sigma_inf^2. Internal variances are per-step;
/// annualization happens only at reporting boundaries.
class ProcessSpec {
public:
    ProcessSpec(std::vector<double> taus, std::vector<double> weights, double w_inf,
                double sigma_inf_sq, std::string label);

    std::size_t size() const { return taus_.size(); }
    double tau(std::size_t k) const { return taus_[k]; }
    double mu(std::size_t k) const { return mus_[k]; }
    double weight(std::size_t k) const { return weights_[k]; }
    const std::vector<double>& taus() const { return taus_; }
    const std::vector<double>& mus() const { return mus_; }
    const std::vector<double>& weights() const { return weights_; }
    double w_inf() const { return w_inf_; }
    /// Annualized mean variance; 0 for linear specs.
    double sigma_inf_sq() const { return sigma_inf_sq_; }
    bool is_linear() const { return w_inf_ == 0.0; }
    double max_tau() const { return taus_.back(); }
    const std::string& label() const { return label_; }

private:
    std::vector<double> taus_;
    std::vector<double> mus_;
    std::vector<double> weights_;
    double w_inf_ = 0.0;
    double sigma_inf_sq_ = 0.0;
    std::string label_;
};

/// One EMA scale, w_1 = 1 (integrated GARCH(1,1), the RiskMetrics estimator).
ProcessSpec build_igarch1(double tau, std::string label = "igarch1");

/// Two EMA scales with logarithmically decaying weights
/// w_k ~ 1 - ln(tau_k)/ln(tau0), normalized; linear.
ProcessSpec build_igarch2(double tau1, double tau2, double tau0, std::string label = "igarch2");

/// One EMA scale plus a mean-variance anchor (the 1-component affine model).
/// sigma_inf_sq is annualized.
ProcessSpec build_garch11(double tau1, double w_inf, double sigma_inf_sq,
                          std::string label = "garch11");

/// Long-memory ladder: tau_k = tau1 * rho^(k-1) for all tau_k <= tau_n, with
/// weights w_k ~ 1 - ln(tau_k)/ln(tau0) normalized to 1 - w_inf. The default
/// w_inf = 0 is the linear long-memory process; w_inf > 0 gives the affine
/// variant with annualized mean variance sigma_inf_sq.
ProcessSpec build_lm_arch(double tau1, double tau_n, double rho, double tau0, double w_inf = 0.0,
                          double sigma_inf_sq = 0.0, std::string label = "lm_arch");

/// EMA variance vector sigma_k^2 (per-step units) as of a date.
struct VolState {
    std::vector<double> sigma_sq;
    Date as_of;
};

/// All sigma_k^2 start at the sample mean of r^2 over the warmup window
/// (>= 25 returns); as-of = last warmup date.
VolState init_state(const ProcessSpec& spec, const ReturnSeries& warmup);

/// sigma_k^2 <- mu_k sigma_k^2 + (1 - mu_k) r^2 for every component.
void ema_update(std::span<double> sigma_sq, const ProcessSpec& spec, double r);

void update_state(VolState& state, const ProcessSpec& spec, double r, const Date& date);
/// Convenience overload for synthetic series: advances as-of by one calendar day.
void update_state(VolState& state, const ProcessSpec& spec, double r);

/// Per-step effective variance; year_days converts the annualized
/// sigma_inf_sq of affine specs.
double effective_variance(std::span<const double> sigma_sq, const ProcessSpec& spec,
                          double year_days = kDefaultYearDays);
double effective_variance(const VolState& state, const ProcessSpec& spec,
                          double year_days = kDefaultYearDays);

}  // namespace volcast
