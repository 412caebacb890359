#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "test_helpers.hpp"
#include "volcast/market_model.hpp"
#include "volcast/simulate.hpp"

using namespace volcast;

namespace {

// Test-local corrupted two-factor loading: denominator with the taus swapped.
double corrupted_curve(const MarketModelSpec& m, std::span<const double> v, double dt) {
    const double w1 = m.w(0) * std::exp(-dt / m.tau(0));
    const double w2 = (-m.w(0) * std::exp(-dt / m.tau(0)) +
                       (m.w(0) + m.w(1)) * std::exp(-dt / m.tau(1))) /
                      (1.0 - m.tau(1) / m.tau(0));  // should be (1 - tau1/tau2)
    return m.v_inf() + w1 * (v[0] - m.v_inf()) + w2 * (v[1] - m.v_inf());
}

}  // namespace

TEST_SUITE("market_model") {

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(MarketModelSpec::two_factor(64.0, 64.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(MarketModelSpec::two_factor(64.0, 4.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(MarketModelSpec::one_factor(4.0, 0.01, 1.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(MarketModelSpec::one_factor(4.0, 0.01, 1.0, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(MarketModelSpec::one_factor(4.0, 0.01, 1.0, 0.5, -0.1), std::invalid_argument);
}

TEST_CASE("curve values: fixed point, identification, decay") {
    const auto one = MarketModelSpec::one_factor(16.0, 0.0144);
    for (double dt : {0.0, 1.0, 21.0, 252.0}) {
        const std::vector<double> at_mean{0.0144};
        CHECK(one.curve_value(at_mean, dt) == doctest::Approx(0.0144).epsilon(1e-15));
    }
    CHECK(one.factor_weight(0, 0.0) == 1.0);  // w1(0) = w1 = 1

    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    const std::vector<double> v{0.0225, 0.0169};
    CHECK(two.factor_weight(0, 0.0) == 1.0);
    CHECK(two.factor_weight(1, 0.0) == 0.0);
    CHECK(two.curve_value(v, 0.0) == doctest::Approx(v[0]).epsilon(1e-14));

    // dT -> infinity: both loadings vanish, G -> v_inf
    CHECK(two.curve_value(v, 1e7) == doctest::Approx(0.01).epsilon(1e-12));
    double prev = 2.0;
    for (double dt : {0.0, 4.0, 16.0, 64.0, 256.0, 1024.0}) {
        const double sum = two.factor_weight(0, dt) + two.factor_weight(1, dt);
        CHECK(sum < prev);
        prev = sum;
    }
}

TEST_CASE("two-factor loadings at dT = 4 match the closed form") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    // w1(4) = e^-1, w2(4) = (-e^-1 + e^-1/16)/(1 - 1/16), high-precision cross-check
    CHECK(two.factor_weight(0, 4.0) == doctest::Approx(0.3678794411714423).epsilon(1e-12));
    CHECK(two.factor_weight(1, 4.0) == doctest::Approx(0.6096358630848357).epsilon(1e-12));
}

TEST_CASE("G is affine in the factors") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> level(0.001, 0.09);
    for (int rep = 0; rep < 20; ++rep) {
        const std::vector<double> a{level(gen), level(gen)};
        const std::vector<double> b{level(gen), level(gen)};
        const double dt = 32.0 * level(gen) / 0.09;
        for (std::size_t k = 0; k < 2; ++k) {
            const double delta = 0.013;
            auto a_bumped = a;
            a_bumped[k] += delta;
            auto b_bumped = b;
            b_bumped[k] += delta;
            const double da = two.curve_value(a_bumped, dt) - two.curve_value(a, dt);
            const double db = two.curve_value(b_bumped, dt) - two.curve_value(b, dt);
            CHECK(da == doctest::Approx(db).epsilon(1e-12));
        }
    }
}

TEST_CASE("compatibility residual vanishes for both models") {
    std::mt19937_64 gen(43);
    std::uniform_real_distribution<double> level(0.002, 0.09);
    std::uniform_real_distribution<double> horizon(1.0, 512.0);

    const auto one = MarketModelSpec::one_factor(16.0, 0.0144);
    for (int rep = 0; rep < 100; ++rep) {
        const std::vector<double> v{level(gen)};
        CHECK(compatibility_residual(one, v, horizon(gen)) < 1e-6);
    }

    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    for (int rep = 0; rep < 100; ++rep) {
        const std::vector<double> v{level(gen), level(gen)};
        CHECK(compatibility_residual(two, v, horizon(gen)) < 1e-6);
    }
}

TEST_CASE("corrupted loading fails the compatibility check (negative control)") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    const std::vector<double> v{0.04, 0.06};
    const double dt = 2.0;

    // same finite-difference residual, evaluated on the corrupted curve
    const double ht = 1e-3 * std::max(std::abs(dt), 1.0);
    const double d_dt = (corrupted_curve(two, v, dt + ht) - corrupted_curve(two, v, dt - ht)) / (2.0 * ht);
    double drift_term = 0.0;
    std::vector<double> bumped(v.begin(), v.end());
    for (int k = 0; k < 2; ++k) {
        const double hv = 1e-3 * std::max(std::abs(v[static_cast<std::size_t>(k)]), 1e-8);
        bumped[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)] + hv;
        const double up = corrupted_curve(two, bumped, dt);
        bumped[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)] - hv;
        const double down = corrupted_curve(two, bumped, dt);
        bumped[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)];
        drift_term += two.drift(k, v) * (up - down) / (2.0 * hv);
    }
    CHECK(std::abs(d_dt - drift_term) > 1e-3);
}

TEST_CASE("fit recovers exact curves") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    const std::vector<double> truth{0.03, 0.018};
    ForwardCurveObs obs;
    for (double h : {1.0, 5.0, 10.0, 21.0, 63.0, 126.0, 252.0}) {
        obs.horizons.push_back(h);
        obs.values.push_back(two.curve_value(truth, h));
    }
    const auto fit = fit_factors(two, obs);
    CHECK(fit.factors[0] == doctest::Approx(truth[0]).epsilon(1e-10));
    CHECK(fit.factors[1] == doctest::Approx(truth[1]).epsilon(1e-10));
    CHECK(fit.rms_residual < 1e-12);
    CHECK_FALSE(fit.negative_factor);
}

TEST_CASE("fit of a flat curve at v_inf returns v_inf") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.0144);
    ForwardCurveObs obs;
    for (double h : {2.0, 8.0, 32.0, 128.0}) {
        obs.horizons.push_back(h);
        obs.values.push_back(0.0144);
    }
    const auto fit = fit_factors(two, obs);
    CHECK(fit.factors[0] == doctest::Approx(0.0144).epsilon(1e-9));
    CHECK(fit.factors[1] == doctest::Approx(0.0144).epsilon(1e-9));
    CHECK(fit.rms_residual < 1e-14);
}

TEST_CASE("fit is linear: adding a design-span curve leaves the residual unchanged") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    ForwardCurveObs obs;
    std::mt19937_64 gen(47);
    std::uniform_real_distribution<double> noise(-0.002, 0.002);
    const std::vector<double> truth{0.03, 0.018};
    for (double h : {1.0, 5.0, 10.0, 21.0, 63.0, 126.0, 252.0}) {
        obs.horizons.push_back(h);
        obs.values.push_back(two.curve_value(truth, h) + noise(gen));
    }
    const auto base = fit_factors(two, obs);

    // shift the observations by a curve inside the design span
    ForwardCurveObs shifted = obs;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
        shifted.values[i] += 0.004 * two.factor_weight(0, shifted.horizons[i]) +
                             0.002 * two.factor_weight(1, shifted.horizons[i]);
    }
    const auto moved = fit_factors(two, shifted);
    CHECK(moved.rms_residual == doctest::Approx(base.rms_residual).epsilon(1e-8));
    CHECK(moved.factors[0] == doctest::Approx(base.factors[0] + 0.004).epsilon(1e-8));
    CHECK(moved.factors[1] == doctest::Approx(base.factors[1] + 0.002).epsilon(1e-8));
}

TEST_CASE("fit under multiplicative noise is unbiased") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    const std::vector<double> truth{0.03, 0.018};
    const std::vector<double> horizons{1.0, 5.0, 10.0, 21.0, 63.0, 126.0, 252.0};
    std::vector<double> clean;
    for (double h : horizons) clean.push_back(two.curve_value(truth, h));

    std::mt19937_64 gen(53);
    std::normal_distribution<double> z(0.0, 1.0);
    const int resamples = 1000;
    std::vector<double> v1(resamples), v2(resamples);
    for (int rep = 0; rep < resamples; ++rep) {
        ForwardCurveObs obs;
        obs.horizons = horizons;
        for (double c : clean) obs.values.push_back(c * (1.0 + 0.01 * z(gen)));
        const auto fit = fit_factors(two, obs);
        v1[rep] = fit.factors[0];
        v2[rep] = fit.factors[1];
    }
    const double se1 = test::stdev_of(v1) / std::sqrt(static_cast<double>(resamples));
    const double se2 = test::stdev_of(v2) / std::sqrt(static_cast<double>(resamples));
    CHECK(std::abs(test::mean_of(v1) - truth[0]) < 3.0 * se1);
    CHECK(std::abs(test::mean_of(v2) - truth[1]) < 3.0 * se2);
}

TEST_CASE("degenerate fits") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01);
    ForwardCurveObs same;
    same.horizons = {21.0, 21.0, 21.0};
    same.values = {0.02, 0.02, 0.02};
    CHECK_THROWS_WITH_AS(fit_factors(two, same), doctest::Contains("rank-deficient"),
                         std::runtime_error);

    ForwardCurveObs few;
    few.horizons = {21.0};
    few.values = {0.02};
    CHECK_THROWS_AS(fit_factors(two, few), std::invalid_argument);

    // a curve far below v_inf drives the fitted factor negative: warn, not fail
    const auto one = MarketModelSpec::one_factor(16.0, 0.04);
    ForwardCurveObs low;
    low.horizons = {8.0, 16.0, 24.0};
    low.values = {0.001, 0.001, 0.001};
    const auto fit = fit_factors(one, low);
    CHECK(fit.negative_factor);
    CHECK(fit.factors[0] < 0.0);
}

TEST_CASE("factor SDE: deterministic mean reversion at gamma = 0") {
    const auto one = MarketModelSpec::one_factor(16.0, 0.0144, 1.0, 0.5, 0.0);
    const std::vector<double> init{0.04};
    const double dt = 0.05;
    const std::size_t steps = 6400;  // 320 days = 20 tau
    const auto traj = simulate_market_model(one, init, steps, dt, 99);
    for (std::size_t i : {std::size_t(640), std::size_t(3200), std::size_t(6400)}) {
        const double t = static_cast<double>(i) * dt;
        const double expect = 0.0144 + (0.04 - 0.0144) * std::exp(-t / 16.0);
        CHECK(traj[i][0] == doctest::Approx(expect).epsilon(0.01));
    }

    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.0144, 1.0, 0.0, 0.5, 0.0);
    const std::vector<double> init2{0.05, 0.03};
    const auto traj2 = simulate_market_model(two, init2, 40000, 0.05, 99);
    // v1 relaxes toward v2, then both decay to v_inf
    CHECK(traj2.back()[0] == doctest::Approx(0.0144).epsilon(0.01));
    CHECK(traj2.back()[1] == doctest::Approx(0.0144).epsilon(0.01));
    CHECK(std::abs(traj2[400][0] - traj2[400][1]) < std::abs(init2[0] - init2[1]));
}

TEST_CASE("heston-like factor keeps its long-run mean") {
    const auto one = MarketModelSpec::one_factor(16.0, 0.0144, 1.0, 0.5, 0.004);
    const std::vector<double> init{0.0144};
    const std::size_t steps = 400000;
    const auto traj = simulate_market_model(one, init, steps, 1.0, 4242);
    double mean = 0.0;
    double min_v = 1.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        mean += traj[i][0];
        min_v = std::min(min_v, traj[i][0]);
    }
    mean /= static_cast<double>(steps);
    CHECK(mean == doctest::Approx(0.0144).epsilon(0.10));
    CHECK(min_v > -1e-12);  // full truncation keeps the scheme sane near zero
}

TEST_CASE("simulated market model respects the martingale within discretization error") {
    const auto two = MarketModelSpec::two_factor(4.0, 64.0, 0.01, 1.0, 0.0, 0.5, 0.01);
    const std::vector<double> init{0.03, 0.015};
    const double T = 20.0;
    const double t_prime = 5.0;
    const double dt = 0.05;
    const auto steps = static_cast<std::size_t>(t_prime / dt);

    const double target = two.curve_value(init, T);
    const std::size_t n_paths = 40000;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        Rng rng(31415, p);
        std::vector<double> v = init;
        std::vector<double> trunc(v.size());
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t k = 0; k < v.size(); ++k) trunc[k] = std::max(v[k], 0.0);
            for (int k = 0; k < 2; ++k) {
                const auto idx = static_cast<std::size_t>(k);
                v[idx] += two.drift(k, trunc) * dt +
                          two.gamma() * std::pow(trunc[idx], two.beta()) * std::sqrt(dt) * rng.normal();
            }
        }
        const double g = two.curve_value(v, T - t_prime);
        const double delta = g - mean;
        mean += delta / static_cast<double>(p + 1);
        m2 += delta * (g - mean);
    }
    const double se = std::sqrt(m2 / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths));
    CHECK(std::abs(mean - target) < std::max(3.0 * se, 0.015 * target));
}

}  // TEST_SUITE
