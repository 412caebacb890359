#include "volcast/market_model.hpp"

#include <cmath>
#include <stdexcept>

#include "volcast/simulate.hpp"

namespace volcast {

namespace {

void check_common(double v_inf, double beta, double gamma) {
    if (!(v_inf >= 0.0)) throw std::invalid_argument("market model: v_inf must be >= 0");
    if (!(beta >= 0.5) || !(beta <= 1.0)) {
        throw std::invalid_argument("market model: beta must lie in [1/2, 1]");
    }
    if (!(gamma >= 0.0)) throw std::invalid_argument("market model: gamma must be >= 0");
}

}  // namespace

MarketModelSpec MarketModelSpec::one_factor(double tau1, double v_inf, double w1, double beta,
                                            double gamma) {
    if (!(tau1 > 0.0)) throw std::invalid_argument("market model: tau1 must be > 0");
    check_common(v_inf, beta, gamma);
    MarketModelSpec m;
    m.n_factors_ = 1;
    m.taus_ = {tau1};
    m.ws_ = {w1};
    m.v_inf_ = v_inf;
    m.beta_ = beta;
    m.gamma_ = gamma;
    return m;
}

MarketModelSpec MarketModelSpec::two_factor(double tau1, double tau2, double v_inf, double w1,
                                            double w2, double beta, double gamma) {
    if (!(tau1 > 0.0)) throw std::invalid_argument("market model: tau1 must be > 0");
    if (!(tau1 < tau2)) throw std::invalid_argument("market model: need tau1 < tau2 strictly");
    check_common(v_inf, beta, gamma);
    MarketModelSpec m;
    m.n_factors_ = 2;
    m.taus_ = {tau1, tau2};
    m.ws_ = {w1, w2};
    m.v_inf_ = v_inf;
    m.beta_ = beta;
    m.gamma_ = gamma;
    return m;
}

double MarketModelSpec::factor_weight(int k, double delta_t) const {
    if (k < 0 || k >= n_factors_) throw std::invalid_argument("market model: factor index out of range");
    if (k == 0) return ws_[0] * std::exp(-delta_t / taus_[0]);
    // two-factor second loading
    const double e1 = std::exp(-delta_t / taus_[0]);
    const double e2 = std::exp(-delta_t / taus_[1]);
    return (-ws_[0] * e1 + (ws_[0] + ws_[1]) * e2) / (1.0 - taus_[0] / taus_[1]);
}

double MarketModelSpec::curve_value(std::span<const double> factors, double delta_t) const {
    if (factors.size() != static_cast<std::size_t>(n_factors_)) {
        throw std::invalid_argument("market model: factor count does not match model");
    }
    double g = v_inf_;
    for (int k = 0; k < n_factors_; ++k) {
        g += factor_weight(k, delta_t) * (factors[static_cast<std::size_t>(k)] - v_inf_);
    }
    return g;
}

double MarketModelSpec::drift(int k, std::span<const double> factors) const {
    if (factors.size() != static_cast<std::size_t>(n_factors_)) {
        throw std::invalid_argument("market model: factor count does not match model");
    }
    if (k < 0 || k >= n_factors_) throw std::invalid_argument("market model: factor index out of range");
    if (n_factors_ == 1) return -(factors[0] - v_inf_) / taus_[0];
    if (k == 0) return -(factors[0] - factors[1]) / taus_[0];
    return -(factors[1] - v_inf_) / taus_[1];
}

void ForwardCurveObs::validate() const {
    if (horizons.size() != values.size()) {
        throw std::invalid_argument("forward curve: horizons and values differ in length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) throw std::invalid_argument("forward curve: negative variance");
        if (i > 0 && !(horizons[i - 1] < horizons[i])) {
            throw std::invalid_argument("forward curve: horizons must be increasing");
        }
    }
}

FactorFit fit_factors(const MarketModelSpec& model, const ForwardCurveObs& obs) {
    const int n = model.n_factors();
    const std::size_t m = obs.size();
    if (obs.horizons.size() != m) {
        throw std::invalid_argument("fit_factors: horizons and values differ in length");
    }
    if (m < static_cast<std::size_t>(n)) {
        throw std::invalid_argument("fit_factors: need at least as many observations as factors");
    }

    // G(v; dT_i) = v_inf (1 - sum_k X_ik) + sum_k X_ik v_k with X_ik = w_k(dT_i):
    // linear least squares in the factors via normal equations (n <= 2).
    std::vector<double> x(m * static_cast<std::size_t>(n));
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        double wsum = 0.0;
        for (int k = 0; k < n; ++k) {
            const double wk = model.factor_weight(k, obs.horizons[i]);
            x[i * n + static_cast<std::size_t>(k)] = wk;
            wsum += wk;
        }
        y[i] = obs.values[i] - model.v_inf() * (1.0 - wsum);
    }

    FactorFit fit;
    if (n == 1) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            a += x[i] * x[i];
            b += x[i] * y[i];
        }
        if (!(a > 1e-300)) throw std::runtime_error("fit_factors: rank-deficient design");
        fit.factors = {b / a};
    } else {
        double a00 = 0.0, a01 = 0.0, a11 = 0.0, b0 = 0.0, b1 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double x0 = x[i * 2], x1 = x[i * 2 + 1];
            a00 += x0 * x0;
            a01 += x0 * x1;
            a11 += x1 * x1;
            b0 += x0 * y[i];
            b1 += x1 * y[i];
        }
        const double det = a00 * a11 - a01 * a01;
        if (!(std::abs(det) > 1e-12 * std::max(a00 * a11, 1e-300))) {
            throw std::runtime_error("fit_factors: rank-deficient design");
        }
        fit.factors = {(a11 * b0 - a01 * b1) / det, (a00 * b1 - a01 * b0) / det};
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double g = model.v_inf();
        for (int k = 0; k < n; ++k) {
            g += x[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] *
                 (fit.factors[static_cast<std::size_t>(k)] - model.v_inf());
        }
        const double r = g - obs.values[i];
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(m));
    for (double v : fit.factors) {
        if (v < 0.0) fit.negative_factor = true;
    }
    return fit;
}

double compatibility_residual(const MarketModelSpec& model, std::span<const double> factors,
                              double delta_t, double fd_step_rel) {
    if (!(fd_step_rel > 0.0)) throw std::invalid_argument("compatibility_residual: step must be > 0");

    const double ht = fd_step_rel * std::max(std::abs(delta_t), 1.0);
    const double d_dt =
        (model.curve_value(factors, delta_t + ht) - model.curve_value(factors, delta_t - ht)) /
        (2.0 * ht);

    double drift_term = 0.0;
    std::vector<double> bumped(factors.begin(), factors.end());
    for (int k = 0; k < model.n_factors(); ++k) {
        const std::size_t idx = static_cast<std::size_t>(k);
        const double hv = fd_step_rel * std::max(std::abs(factors[idx]), 1e-8);
        bumped[idx] = factors[idx] + hv;
        const double up = model.curve_value(bumped, delta_t);
        bumped[idx] = factors[idx] - hv;
        const double down = model.curve_value(bumped, delta_t);
        bumped[idx] = factors[idx];
        drift_term += model.drift(k, factors) * (up - down) / (2.0 * hv);
    }
    // second-order term omitted: d2G/dv_i dv_j = 0 for the linear curve
    return std::abs(d_dt - drift_term);
}

std::vector<std::vector<double>> simulate_market_model(const MarketModelSpec& model,
                                                       std::span<const double> initial,
                                                       std::size_t n_steps, double dt,
                                                       std::uint64_t seed) {
    const int n = model.n_factors();
    if (initial.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("simulate_market_model: factor count does not match model");
    }
    for (double v : initial) {
        if (!(v > 0.0)) throw std::invalid_argument("simulate_market_model: initial factors must be > 0");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_market_model: dt must be > 0");

    std::vector<std::vector<double>> out;
    out.reserve(n_steps + 1);
    std::vector<double> v(initial.begin(), initial.end());
    out.emplace_back(v);

    Rng rng(seed);
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> trunc(v.size());
    for (std::size_t t = 0; t < n_steps; ++t) {
        for (std::size_t k = 0; k < v.size(); ++k) trunc[k] = std::max(v[k], 0.0);
        for (int k = 0; k < n; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k);
            const double diffusion = model.gamma() * std::pow(trunc[idx], model.beta());
            v[idx] += model.drift(k, trunc) * dt + diffusion * sqrt_dt * rng.normal();
        }
        out.emplace_back(v);
    }
    return out;
}

}  // namespace volcast
