#include "volcast/arch_process.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace volcast {

namespace {

constexpr double kWeightTol = 1e-12;

std::vector<double> log_decay_weights(const std::vector<double>& taus, double tau0,
                                      double total_weight) {
    std::vector<double> w(taus.size());
    double norm = 0.0;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        double a = 1.0 - std::log(taus[k]) / std::log(tau0);
        if (a <= 0.0) {
            throw std::invalid_argument("tau0 too small: weight for tau = " +
                                        std::to_string(taus[k]) + " would not be positive");
        }
        w[k] = a;
        norm += a;
    }
    for (double& x : w) x *= total_weight / norm;
    return w;
}

}  // namespace

ProcessSpec::ProcessSpec(std::vector<double> taus, std::vector<double> weights, double w_inf,
                         double sigma_inf_sq, std::string label)
    : taus_(std::move(taus)),
      weights_(std::move(weights)),
      w_inf_(w_inf),
      sigma_inf_sq_(sigma_inf_sq),
      label_(std::move(label)) {
    if (taus_.empty()) throw std::invalid_argument("process spec: no components");
    if (taus_.size() != weights_.size()) {
        throw std::invalid_argument("process spec: taus and weights differ in length");
    }
    double sum = w_inf_;
    for (std::size_t k = 0; k < taus_.size(); ++k) {
        if (!(taus_[k] > 0.0)) throw std::invalid_argument("process spec: tau must be > 0");
        if (k > 0 && !(taus_[k - 1] < taus_[k])) {
            throw std::invalid_argument("process spec: taus must be strictly increasing");
        }
        if (weights_[k] < 0.0) throw std::invalid_argument("process spec: negative weight");
        sum += weights_[k];
    }
    if (w_inf_ < 0.0 || w_inf_ > 1.0) throw std::invalid_argument("process spec: w_inf not in [0,1]");
    if (std::abs(sum - 1.0) > kWeightTol) {
        throw std::invalid_argument("process spec: weights must sum to 1 (got " +
                                    std::to_string(sum) + ")");
    }
    if (w_inf_ > 0.0 && !(sigma_inf_sq_ > 0.0)) {
        throw std::invalid_argument("process spec: affine spec needs sigma_inf_sq > 0");
    }
    if (w_inf_ == 0.0 && sigma_inf_sq_ != 0.0) {
        throw std::invalid_argument("process spec: linear spec must not carry sigma_inf_sq");
    }
    mus_.resize(taus_.size());
    for (std::size_t k = 0; k < taus_.size(); ++k) mus_[k] = std::exp(-1.0 / taus_[k]);
}

ProcessSpec build_igarch1(double tau, std::string label) {
    if (!(tau >= 1.0)) throw std::invalid_argument("build_igarch1: tau must be >= 1 day");
    return ProcessSpec({tau}, {1.0}, 0.0, 0.0, std::move(label));
}

ProcessSpec build_igarch2(double tau1, double tau2, double tau0, std::string label) {
    if (!(tau1 >= 1.0) || !(tau1 < tau2) || !(tau2 < tau0)) {
        throw std::invalid_argument("build_igarch2: need 1 <= tau1 < tau2 < tau0");
    }
    std::vector<double> taus{tau1, tau2};
    return ProcessSpec(taus, log_decay_weights(taus, tau0, 1.0), 0.0, 0.0, std::move(label));
}

ProcessSpec build_garch11(double tau1, double w_inf, double sigma_inf_sq, std::string label) {
    if (!(tau1 >= 1.0)) throw std::invalid_argument("build_garch11: tau1 must be >= 1 day");
    if (!(w_inf > 0.0) || !(w_inf < 1.0)) {
        throw std::invalid_argument("build_garch11: w_inf must be in (0,1); use build_igarch1 for w_inf = 0");
    }
    if (!(sigma_inf_sq > 0.0)) throw std::invalid_argument("build_garch11: sigma_inf_sq must be > 0");
    return ProcessSpec({tau1}, {1.0 - w_inf}, w_inf, sigma_inf_sq, std::move(label));
}

ProcessSpec build_lm_arch(double tau1, double tau_n, double rho, double tau0, double w_inf,
                          double sigma_inf_sq, std::string label) {
    if (!(tau1 >= 1.0) || !(tau1 <= tau_n)) {
        throw std::invalid_argument("build_lm_arch: need 1 <= tau1 <= tau_n");
    }
    if (!(rho > 1.0)) throw std::invalid_argument("build_lm_arch: rho must be > 1");
    if (!(tau0 > tau_n)) throw std::invalid_argument("build_lm_arch: tau0 must exceed tau_n");
    if (w_inf < 0.0 || w_inf >= 1.0) throw std::invalid_argument("build_lm_arch: w_inf not in [0,1)");

    std::vector<double> taus;
    for (int k = 0;; ++k) {
        double tau = tau1 * std::pow(rho, k);
        if (tau > tau_n * (1.0 + 1e-9)) break;  // absorb rounding in rho^k
        taus.push_back(tau);
    }
    return ProcessSpec(taus, log_decay_weights(taus, tau0, 1.0 - w_inf), w_inf, sigma_inf_sq,
                       std::move(label));
}

VolState init_state(const ProcessSpec& spec, const ReturnSeries& warmup) {
    if (warmup.size() < 25) {
        throw std::invalid_argument("init_state: warmup needs at least 25 returns, got " +
                                    std::to_string(warmup.size()));
    }
    double mean_sq = 0.0;
    for (double r : warmup.returns) mean_sq += r * r;
    mean_sq /= static_cast<double>(warmup.size());
    return VolState{std::vector<double>(spec.size(), mean_sq), warmup.dates.back()};
}

void ema_update(std::span<double> sigma_sq, const ProcessSpec& spec, double r) {
    if (sigma_sq.size() != spec.size()) {
        throw std::invalid_argument("ema_update: state size does not match spec");
    }
    const double r_sq = r * r;
    const auto& mus = spec.mus();
    for (std::size_t k = 0; k < sigma_sq.size(); ++k) {
        sigma_sq[k] = mus[k] * sigma_sq[k] + (1.0 - mus[k]) * r_sq;
    }
}

void update_state(VolState& state, const ProcessSpec& spec, double r, const Date& date) {
    if (!(state.as_of < date)) {
        throw std::invalid_argument("update_state: date must advance");
    }
    ema_update(state.sigma_sq, spec, r);
    state.as_of = date;
}

void update_state(VolState& state, const ProcessSpec& spec, double r) {
    ema_update(state.sigma_sq, spec, r);
    state.as_of = state.as_of.next_day();
}

double effective_variance(std::span<const double> sigma_sq, const ProcessSpec& spec,
                          double year_days) {
    if (sigma_sq.size() != spec.size()) {
        throw std::invalid_argument("effective_variance: state size does not match spec");
    }
    double v = 0.0;
    const auto& w = spec.weights();
    for (std::size_t k = 0; k < sigma_sq.size(); ++k) v += w[k] * sigma_sq[k];
    if (!spec.is_linear()) v += spec.w_inf() * (spec.sigma_inf_sq() / year_days);
    return v;
}

double effective_variance(const VolState& state, const ProcessSpec& spec, double year_days) {
    return effective_variance(std::span<const double>(state.sigma_sq), spec, year_days);
}

}  // namespace volcast
