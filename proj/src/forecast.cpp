#include "volcast/forecast.hpp"

#include <cmath>
#include <stdexcept>

namespace volcast {

ForecastWeights::ForecastWeights(const ProcessSpec& spec, int max_horizon)
    : n_(spec.size()), max_horizon_(max_horizon), linear_(spec.is_linear()) {
    if (max_horizon < 1) throw std::invalid_argument("forecast_weights: max_horizon must be >= 1");

    const auto& mus = spec.mus();
    const auto& w = spec.weights();
    const std::size_t rows = static_cast<std::size_t>(max_horizon) + 1;

    forward_.resize(rows * n_);
    fwd_inf_.resize(rows);
    averaged_.resize(static_cast<std::size_t>(max_horizon) * n_);
    avg_inf_.resize(static_cast<std::size_t>(max_horizon));

    // w(h+1) = w(h) M: only the component block feeds back, since the mean
    // row of the augmented matrix is the identity.
    std::vector<double> u(w.begin(), w.end());
    std::vector<double> cum(n_, 0.0);
    for (std::size_t h = 0; h < rows; ++h) {
        double row_sum = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            forward_[h * n_ + k] = u[k];
            row_sum += u[k];
        }
        fwd_inf_[h] = linear_ ? 0.0 : 1.0 - row_sum;

        // running average over forward rows 0..h -> averaged weights for dT = h+1
        if (h < static_cast<std::size_t>(max_horizon)) {
            double avg_sum = 0.0;
            for (std::size_t k = 0; k < n_; ++k) {
                cum[k] += u[k];
                double a = cum[k] / static_cast<double>(h + 1);
                averaged_[h * n_ + k] = a;
                avg_sum += a;
            }
            avg_inf_[h] = linear_ ? 0.0 : 1.0 - avg_sum;
        }

        if (h + 1 == rows) break;
        double s = 0.0;
        for (std::size_t k = 0; k < n_; ++k) s += (1.0 - mus[k]) * u[k];
        for (std::size_t k = 0; k < n_; ++k) u[k] = mus[k] * u[k] + w[k] * s;
    }
}

std::span<const double> ForecastWeights::forward(int h) const {
    if (h < 0 || h > max_horizon_) throw std::invalid_argument("forward weights: horizon out of range");
    return {forward_.data() + static_cast<std::size_t>(h) * n_, n_};
}

double ForecastWeights::forward_w_inf(int h) const {
    if (h < 0 || h > max_horizon_) throw std::invalid_argument("forward weights: horizon out of range");
    return fwd_inf_[static_cast<std::size_t>(h)];
}

std::span<const double> ForecastWeights::averaged(int delta_t) const {
    if (delta_t < 1 || delta_t > max_horizon_) {
        throw std::invalid_argument("averaged weights: delta_t out of range");
    }
    return {averaged_.data() + static_cast<std::size_t>(delta_t - 1) * n_, n_};
}

double ForecastWeights::averaged_w_inf(int delta_t) const {
    if (delta_t < 1 || delta_t > max_horizon_) {
        throw std::invalid_argument("averaged weights: delta_t out of range");
    }
    return avg_inf_[static_cast<std::size_t>(delta_t - 1)];
}

ForecastWeights forecast_weights(const ProcessSpec& spec, int max_horizon) {
    return ForecastWeights(spec, max_horizon);
}

namespace {

double weighted_variance_step(std::span<const double> sigma_sq, const ProcessSpec& spec,
                              std::span<const double> w, double year_days) {
    if (sigma_sq.size() != spec.size()) {
        throw std::invalid_argument("forecast: state size does not match spec");
    }
    if (spec.is_linear()) {
        double v = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) v += w[k] * sigma_sq[k];
        return v;
    }
    const double mean_step = spec.sigma_inf_sq() / year_days;
    double v = mean_step;
    for (std::size_t k = 0; k < w.size(); ++k) v += w[k] * (sigma_sq[k] - mean_step);
    return v;
}

}  // namespace

double forward_variance(std::span<const double> sigma_sq, const ProcessSpec& spec,
                        const ForecastWeights& weights, int h, double year_days) {
    return year_days * weighted_variance_step(sigma_sq, spec, weights.forward(h), year_days);
}

double forecasted_volatility(std::span<const double> sigma_sq, const ProcessSpec& spec,
                             const ForecastWeights& weights, int delta_t, double year_days) {
    double v = weighted_variance_step(sigma_sq, spec, weights.averaged(delta_t), year_days);
    return std::sqrt(year_days * std::max(v, 0.0));
}

ForecastCurve term_structure(const VolState& state, const ProcessSpec& spec,
                             const ForecastWeights& weights, std::span<const int> horizons,
                             double year_days) {
    ForecastCurve curve;
    curve.as_of = state.as_of;
    curve.horizons.assign(horizons.begin(), horizons.end());
    for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
        if (curve.horizons[i] < 1) throw std::invalid_argument("term_structure: horizons must be >= 1");
        if (i > 0 && curve.horizons[i - 1] >= curve.horizons[i]) {
            throw std::invalid_argument("term_structure: horizons must be sorted ascending");
        }
    }
    curve.forward_variance.reserve(curve.horizons.size());
    curve.forecast_vol.reserve(curve.horizons.size());
    for (int h : curve.horizons) {
        curve.forward_variance.push_back(
            forward_variance(state.sigma_sq, spec, weights, h, year_days));
        curve.forecast_vol.push_back(
            forecasted_volatility(state.sigma_sq, spec, weights, h, year_days));
    }
    return curve;
}

}  // namespace volcast
