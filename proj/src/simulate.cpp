#include "volcast/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace volcast {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

InnovationDist InnovationDist::student_t(double dof) {
    if (!(dof > 2.0)) {
        throw std::invalid_argument("student_t innovations need dof > 2 for a finite variance");
    }
    return {Kind::student_t, dof};
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x517cc1b727220a95ULL))) {}

double Rng::draw(const InnovationDist& dist) {
    switch (dist.kind) {
        case InnovationDist::Kind::gaussian:
            return normal();
        case InnovationDist::Kind::student_t: {
            std::student_t_distribution<double> t(dist.dof);
            return t(engine_) * std::sqrt((dist.dof - 2.0) / dist.dof);
        }
        case InnovationDist::Kind::zero:
            return 0.0;
    }
    throw std::logic_error("unreachable innovation kind");
}

SimPath simulate_returns(const ProcessSpec& spec, const InnovationDist& dist, std::size_t n_steps,
                         std::uint64_t seed, std::span<const double> initial_sigma_sq,
                         double year_days, std::uint64_t stream) {
    if (n_steps < 1) throw std::invalid_argument("simulate_returns: n_steps must be >= 1");
    if (initial_sigma_sq.size() != spec.size()) {
        throw std::invalid_argument("simulate_returns: initial state size does not match spec");
    }
    const std::size_t n = spec.size();

    SimPath path;
    path.seed = seed;
    path.n_components = n;
    path.returns.resize(n_steps);
    path.sigma_eff_sq.resize(n_steps + 1);
    path.sigma_sq.resize((n_steps + 1) * n);

    std::vector<double> state(initial_sigma_sq.begin(), initial_sigma_sq.end());
    Rng rng(seed, stream);
    for (std::size_t k = 0; k < n; ++k) path.sigma_sq[k] = state[k];
    path.sigma_eff_sq[0] = effective_variance(state, spec, year_days);

    for (std::size_t t = 0; t < n_steps; ++t) {
        const double eps = rng.draw(dist);
        const double r = std::sqrt(path.sigma_eff_sq[t]) * eps;
        path.returns[t] = r;
        ema_update(state, spec, r);
        for (std::size_t k = 0; k < n; ++k) path.sigma_sq[(t + 1) * n + k] = state[k];
        path.sigma_eff_sq[t + 1] = effective_variance(state, spec, year_days);
    }
    return path;
}

InducedVarianceProcess::InducedVarianceProcess(const ProcessSpec& spec, std::vector<double> initial_v)
    : spec_(spec), v_(std::move(initial_v)) {
    if (v_.size() != spec_.size()) {
        throw std::invalid_argument("induced variance: initial state size does not match spec");
    }
    for (double x : v_) {
        if (!(x >= 0.0)) throw std::invalid_argument("induced variance: initial v_k must be >= 0");
    }
}

double InducedVarianceProcess::v_eff() const {
    double v = 0.0;
    const auto& w = spec_.weights();
    for (std::size_t k = 0; k < v_.size(); ++k) v += w[k] * v_[k];
    if (!spec_.is_linear()) v += spec_.w_inf() * spec_.sigma_inf_sq();
    return v;
}

void InducedVarianceProcess::step(double chi) {
    if (chi < -1.0) {
        throw std::invalid_argument("induced variance: chi < -1 is not admissible (chi = eps^2 - 1)");
    }
    const double shock = (chi + 1.0) * v_eff();
    const auto& mus = spec_.mus();
    for (std::size_t k = 0; k < v_.size(); ++k) {
        v_[k] = mus[k] * v_[k] + (1.0 - mus[k]) * shock;
    }
}

std::vector<std::vector<double>> simulate_induced_variance(const ProcessSpec& spec,
                                                           std::span<const double> chi,
                                                           std::vector<double> initial_v) {
    InducedVarianceProcess proc(spec, std::move(initial_v));
    std::vector<std::vector<double>> out;
    out.reserve(chi.size() + 1);
    out.emplace_back(proc.v().begin(), proc.v().end());
    for (double x : chi) {
        proc.step(x);
        out.emplace_back(proc.v().begin(), proc.v().end());
    }
    return out;
}

MartingaleReport martingale_check(const ProcessSpec& spec, std::span<const double> initial_sigma_sq,
                                  int t_prime, int target_step, std::size_t n_paths,
                                  std::uint64_t seed, const InnovationDist& dist, double year_days) {
    if (t_prime < 0 || t_prime >= target_step) {
        throw std::invalid_argument("martingale_check: need 0 <= t_prime < T");
    }
    if (n_paths < 2) throw std::invalid_argument("martingale_check: need at least 2 paths");

    const ForecastWeights weights(spec, target_step);
    MartingaleReport report;
    report.n_paths = n_paths;
    report.target = forward_variance(initial_sigma_sq, spec, weights, target_step, year_days);

    double mean = 0.0;
    double m2 = 0.0;  // Welford
    std::vector<double> state;
    for (std::size_t p = 0; p < n_paths; ++p) {
        state.assign(initial_sigma_sq.begin(), initial_sigma_sq.end());
        Rng rng(seed, p);
        for (int t = 0; t < t_prime; ++t) {
            const double r = std::sqrt(effective_variance(state, spec, year_days)) * rng.draw(dist);
            ema_update(state, spec, r);
        }
        const double v = forward_variance(state, spec, weights, target_step - t_prime, year_days);
        const double delta = v - mean;
        mean += delta / static_cast<double>(p + 1);
        m2 += delta * (v - mean);
    }
    const double n = static_cast<double>(n_paths);
    report.mean = mean;
    report.std_error = std::sqrt(m2 / (n - 1.0) / n);
    const double diff = std::abs(report.mean - report.target);
    report.z = diff == 0.0 ? 0.0 : diff / report.std_error;
    return report;
}

}  // namespace volcast
