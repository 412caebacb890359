#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "volcast/arch_process.hpp"
#include "volcast/forecast.hpp"

namespace volcast {

/// Unit-variance innovation law for r(t+1) = sigma_eff(t) eps(t+1).
/// student_t draws are scaled by sqrt((dof-2)/dof) so E[eps^2] = 1.
/// `zero` is a degenerate test hook (eps identically 0).
struct InnovationDist {
    enum class Kind { gaussian, student_t, zero };

    Kind kind = Kind::gaussian;
    double dof = 0.0;

    static InnovationDist gaussian() { return {Kind::gaussian, 0.0}; }
    static InnovationDist student_t(double dof = 5.0);
    static InnovationDist zero() { return {Kind::zero, 0.0}; }
};

/// Seedable generator with reproducible substreams: Rng(seed, stream) derives
/// an independent stream per (seed, path index) via splitmix64, so path loops
/// stay deterministic whether or not they run in parallel.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}
    Rng(std::uint64_t seed, std::uint64_t stream);

    double normal() { return normal_dist_(engine_); }
    double uniform() { return uniform_dist_(engine_); }
    double draw(const InnovationDist& dist);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_dist_;
    std::uniform_real_distribution<double> uniform_dist_{0.0, 1.0};
};

/// One simulated path of the return-level process, with the per-step
/// component states kept so the trajectory can be replayed and checked.
struct SimPath {
    std::uint64_t seed = 0;
    std::size_t n_components = 0;
    std::vector<double> returns;       // r(1..n_steps)
    std::vector<double> sigma_eff_sq;  // steps 0..n_steps
    std::vector<double> sigma_sq;      // row-major (n_steps+1) x n_components

    std::span<const double> state_at(std::size_t step) const {
        return {sigma_sq.data() + step * n_components, n_components};
    }
    double sigma_sq_at(std::size_t step, std::size_t k) const {
        return sigma_sq[step * n_components + k];
    }
};

/// r(t+1) = sigma_eff(t) eps(t+1), states updated by the EMA recursion.
/// Deterministic given (seed, stream); pass the path index as stream when
/// drawing several paths from one seed.
SimPath simulate_returns(const ProcessSpec& spec, const InnovationDist& dist, std::size_t n_steps,
                         std::uint64_t seed, std::span<const double> initial_sigma_sq,
                         double year_days = kDefaultYearDays, std::uint64_t stream = 0);

/// chi = eps^2 - 1: zero-mean driver of the induced variance dynamics,
/// bounded below by -1.
inline double chi_from_epsilon(double epsilon) { return epsilon * epsilon - 1.0; }

/// Variance-level form of the ARCH dynamics on annualized variances v_k:
///
///   v_k <- v_k + (1 - mu_k) { (chi + 1) v_eff - v_k },
///   v_eff = sum_k w_k v_k + w_inf v_inf,
///
/// computed as mu_k v_k + (1 - mu_k)(chi + 1) v_eff, whose terms are all
/// non-negative: v_k stays >= 0 for every admissible chi and any finite step.
class InducedVarianceProcess {
public:
    InducedVarianceProcess(const ProcessSpec& spec, std::vector<double> initial_v);

    /// Advances one step; chi must be >= -1 (chi = -1 is the eps = 0 boundary).
    void step(double chi);
    std::span<const double> v() const { return v_; }
    double v_eff() const;

private:
    ProcessSpec spec_;
    std::vector<double> v_;
};

/// Trajectories [step][k] for step = 0..chi.size(), initial row included.
std::vector<std::vector<double>> simulate_induced_variance(const ProcessSpec& spec,
                                                           std::span<const double> chi,
                                                           std::vector<double> initial_v);

/// Monte Carlo check of E[v(t', T)] = v(t, T): simulates n_paths to t',
/// re-evaluates the forward variance for target step T on each, and compares
/// the sample mean against v(t, T) computed at t.
struct MartingaleReport {
    double target = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    std::size_t n_paths = 0;
};

MartingaleReport martingale_check(const ProcessSpec& spec, std::span<const double> initial_sigma_sq,
                                  int t_prime, int target_step, std::size_t n_paths,
                                  std::uint64_t seed,
                                  const InnovationDist& dist = InnovationDist::gaussian(),
                                  double year_days = kDefaultYearDays);

}  // namespace volcast
