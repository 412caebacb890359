#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace volcast {

/// Linear market model for the forward-variance curve,
///
///   G(v; dT) = v_inf + sum_k w_k(dT) (v_k - v_inf),
///
/// with exponentially decaying factor loadings:
///   1 factor:  w_1(dT) = w1 exp(-dT/tau1)
///   2 factors: w_1(dT) as above,
///              w_2(dT) = (-w1 exp(-dT/tau1) + (w1+w2) exp(-dT/tau2)) / (1 - tau1/tau2)
///
/// compatible with the mean-reverting factor SDEs
///   dv1 = -(v1 - v_inf) dt/tau1 + gamma v1^beta dW      (1 factor)
///   dv1 = -(v1 - v2)    dt/tau1 + gamma v1^beta dW1     (2 factors)
///   dv2 = -(v2 - v_inf) dt/tau2 + gamma v2^beta dW2
///
/// Times in business days, variances annualized. beta in [1/2, 1]
/// (1/2 Heston-like, 1 log-normal); because G is linear in the factors the
/// martingale condition does not constrain gamma or beta.
class MarketModelSpec {
public:
    static MarketModelSpec one_factor(double tau1, double v_inf, double w1 = 1.0,
                                      double beta = 0.5, double gamma = 0.0);
    static MarketModelSpec two_factor(double tau1, double tau2, double v_inf, double w1 = 1.0,
                                      double w2 = 0.0, double beta = 0.5, double gamma = 0.0);

    int n_factors() const { return n_factors_; }
    double tau(int k) const { return taus_[static_cast<std::size_t>(k)]; }
    double v_inf() const { return v_inf_; }
    double w(int k) const { return ws_[static_cast<std::size_t>(k)]; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }

    /// Loading w_k(dT) of factor k on the curve.
    double factor_weight(int k, double delta_t) const;
    /// G(v; dT); factors.size() must equal n_factors().
    double curve_value(std::span<const double> factors, double delta_t) const;
    /// Mean-reversion drift of factor k, per day.
    double drift(int k, std::span<const double> factors) const;

private:
    MarketModelSpec() = default;

    int n_factors_ = 0;
    std::vector<double> taus_;
    std::vector<double> ws_;
    double v_inf_ = 0.0;
    double beta_ = 0.5;
    double gamma_ = 0.0;
};

/// Observed forward-variance curve (annualized) on a horizon grid in days.
struct ForwardCurveObs {
    std::vector<double> horizons;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    void validate() const;
};

struct FactorFit {
    std::vector<double> factors;
    double rms_residual = 0.0;
    /// Negative fitted factors are reported, not rejected.
    bool negative_factor = false;
};

/// Least-squares estimate of the factors from an observed curve; the model's
/// taus and v_inf are fixed inputs, so the fit is linear. Throws on a
/// rank-deficient design (e.g. all horizons equal).
FactorFit fit_factors(const MarketModelSpec& model, const ForwardCurveObs& obs);

/// |d_dT G - sum_k mu_k d_vk G| with central finite differences (relative step
/// fd_step_rel per coordinate). Identically zero for a compatible linear model
/// up to the O(step^2) differencing error; second derivatives vanish since G
/// is linear in the factors.
double compatibility_residual(const MarketModelSpec& model, std::span<const double> factors,
                              double delta_t, double fd_step_rel = 1e-3);

/// Full-truncation Euler paths of the factor SDEs (drift and diffusion
/// evaluated at max(v, 0)), one independent Gaussian driver per factor.
/// Returns [step][factor] with the initial row included; dt in days.
std::vector<std::vector<double>> simulate_market_model(const MarketModelSpec& model,
                                                       std::span<const double> initial,
                                                       std::size_t n_steps, double dt,
                                                       std::uint64_t seed);

}  // namespace volcast
