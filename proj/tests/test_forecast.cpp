#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "test_helpers.hpp"
#include "volcast/forecast.hpp"
#include "volcast/simulate.hpp"

using namespace volcast;

namespace {

// Independent oracle: iterate the expected state forward,
// E[sigma_k^2(t+h+1)] = mu_k E_h,k + (1-mu_k) E[sigma_eff^2(t+h)],
// instead of the weight-covector recursion used by ForecastWeights.
std::vector<double> expected_eff_variance_by_state_iteration(const ProcessSpec& spec,
                                                             std::vector<double> state,
                                                             int max_h, double year_days) {
    std::vector<double> out;
    for (int h = 0; h <= max_h; ++h) {
        const double eff = effective_variance(std::span<const double>(state), spec, year_days);
        out.push_back(eff);
        for (std::size_t k = 0; k < spec.size(); ++k) {
            state[k] = spec.mu(k) * state[k] + (1.0 - spec.mu(k)) * eff;
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("forecast") {

TEST_CASE("igarch1 weights are identically one") {
    const auto spec = build_igarch1(16.0);
    const ForecastWeights w(spec, 512);
    for (int h = 0; h <= 512; ++h) {
        CHECK(w.forward(h)[0] == 1.0);
        CHECK(w.forward_w_inf(h) == 0.0);
        CHECK(w.averaged(std::max(h, 1))[0] == 1.0);
    }
}

TEST_CASE("h = 0 row is the spec weight vector") {
    const auto spec = build_lm_arch(4.0, 512.0, std::sqrt(2.0), 1560.0);
    const ForecastWeights w(spec, 8);
    const auto row = w.forward(0);
    for (std::size_t k = 0; k < spec.size(); ++k) CHECK(row[k] == spec.weight(k));
}

TEST_CASE("weight normalization holds for every horizon") {
    const std::vector<ProcessSpec> specs{
        build_igarch2(4.0, 512.0, 1560.0),
        build_lm_arch(4.0, 512.0, std::sqrt(2.0), 1560.0),
        build_lm_arch(2.0, 256.0, 2.0, 1560.0, 0.1, 0.01),
        build_garch11(16.0, 0.2, 0.04),
    };
    for (const auto& spec : specs) {
        const ForecastWeights w(spec, 1024);
        for (int h = 0; h <= 1024; ++h) {
            double sum = 0.0;
            for (double x : w.forward(h)) {
                CHECK(x >= 0.0);
                sum += x;
            }
            CHECK(sum + w.forward_w_inf(h) == doctest::Approx(1.0).epsilon(1e-12));
            if (spec.is_linear()) {
                CHECK(w.forward_w_inf(h) == 0.0);
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("forward variance: fixed point and flat term structures") {
    const auto garch = build_garch11(16.0, 0.1, 0.04);
    const ForecastWeights w(garch, 64);
    const double mean_step = garch.sigma_inf_sq() / 260.0;
    const std::vector<double> at_mean{mean_step};
    for (int h : {0, 1, 5, 64}) {
        CHECK(forward_variance(at_mean, garch, w, h) == doctest::Approx(0.04).epsilon(1e-14));
    }

    const auto ig1 = build_igarch1(16.0);
    const ForecastWeights w1(ig1, 512);
    const std::vector<double> s{3.1e-5};
    for (int h : {0, 1, 100, 512}) {
        CHECK(forward_variance(s, ig1, w1, h) == 260.0 * 3.1e-5);
    }
}

TEST_CASE("two-component affine spec matches hand iteration at h = 1, 2, 3") {
    const ProcessSpec spec({4.0, 32.0}, {0.5, 0.3}, 0.2, 0.0312, "toy");
    const ForecastWeights w(spec, 3);
    const std::vector<double> state{2.0e-4, 0.7e-4};
    const auto oracle = expected_eff_variance_by_state_iteration(spec, state, 3, 260.0);
    for (int h = 1; h <= 3; ++h) {
        CHECK(forward_variance(state, spec, w, h) ==
              doctest::Approx(260.0 * oracle[static_cast<std::size_t>(h)]).epsilon(1e-13));
    }
}

TEST_CASE("forecasted volatility: one step reduces to the effective variance") {
    const auto spec = build_lm_arch(4.0, 64.0, 2.0, 1560.0);
    const ForecastWeights w(spec, 21);
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> level(1e-5, 4e-4);
    std::vector<double> state(spec.size());
    for (double& s : state) s = level(gen);

    const double sigma = forecasted_volatility(state, spec, w, 1);
    const double eff = effective_variance(std::span<const double>(state), spec);
    CHECK(sigma * sigma == doctest::Approx(260.0 * eff).epsilon(1e-14));
}

TEST_CASE("forecasted variance is the mean of forward variances") {
    const auto spec = build_lm_arch(4.0, 128.0, 2.0, 1560.0, 0.15, 0.02);
    const ForecastWeights w(spec, 63);
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> level(1e-5, 4e-4);
    std::vector<double> state(spec.size());
    for (double& s : state) s = level(gen);

    for (int dt : {1, 2, 5, 21, 63}) {
        double acc = 0.0;
        for (int h = 0; h < dt; ++h) acc += forward_variance(state, spec, w, h);
        acc /= dt;
        const double sigma = forecasted_volatility(state, spec, w, dt);
        CHECK(sigma * sigma == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("igarch1 forecast is flat across the window length") {
    const auto spec = build_igarch1(16.0);
    const ForecastWeights w(spec, 256);
    const std::vector<double> s{6.5e-5};
    const double first = forecasted_volatility(s, spec, w, 1);
    for (int dt : {2, 21, 100, 256}) CHECK(forecasted_volatility(s, spec, w, dt) == first);
}

TEST_CASE("martingale identity: one expected step commutes with the weights") {
    const auto spec = build_lm_arch(4.0, 128.0, 2.0, 1560.0, 0.1, 0.025);
    const ForecastWeights w(spec, 64);
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> level(1e-5, 4e-4);
    std::vector<double> state(spec.size());
    for (double& s : state) s = level(gen);

    // E[s(t+1)] under the process, then h more expected steps == h+1 steps from s(t)
    const double eff = effective_variance(std::span<const double>(state), spec);
    std::vector<double> stepped(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        stepped[k] = spec.mu(k) * state[k] + (1.0 - spec.mu(k)) * eff;
    }
    for (int h : {0, 1, 5, 21, 63}) {
        CHECK(forward_variance(stepped, spec, w, h) ==
              doctest::Approx(forward_variance(state, spec, w, h + 1)).epsilon(1e-12));
    }
}

TEST_CASE("monte carlo oracle: forward weights predict E[sigma_eff^2(t+h)]") {
    const ProcessSpec spec({2.0, 8.0, 32.0}, {0.4, 0.35, 0.25}, 0.0, 0.0, "mc3");
    const ForecastWeights w(spec, 21);
    const std::vector<double> initial{3.0e-4, 0.6e-4, 1.4e-4};

    const std::size_t n_paths = 100000;
    const std::vector<int> check_h{1, 5, 21};
    std::vector<double> mean(check_h.size(), 0.0), m2(check_h.size(), 0.0);

    std::vector<double> state;
    for (std::size_t p = 0; p < n_paths; ++p) {
        state = initial;
        Rng rng(777, p);
        int next = 0;
        for (int t = 1; t <= 21; ++t) {
            const double r = std::sqrt(effective_variance(std::span<const double>(state), spec)) *
                             rng.normal();
            ema_update(state, spec, r);
            if (next < static_cast<int>(check_h.size()) && t == check_h[next]) {
                const double eff = effective_variance(std::span<const double>(state), spec);
                const double delta = eff - mean[next];
                mean[next] += delta / static_cast<double>(p + 1);
                m2[next] += delta * (eff - mean[next]);
                ++next;
            }
        }
    }
    for (std::size_t i = 0; i < check_h.size(); ++i) {
        const double se = std::sqrt(m2[i] / static_cast<double>(n_paths - 1) /
                                    static_cast<double>(n_paths));
        const double predicted = forward_variance(initial, spec, w, check_h[i]) / 260.0;
        CHECK(std::abs(mean[i] - predicted) < 3.0 * se);
    }
}

TEST_CASE("affine spec: component weight sum decays and forward variance reverts") {
    const auto spec = build_lm_arch(2.0, 64.0, 2.0, 1560.0, 0.1, 0.0256);
    const int max_h = 4096;
    const ForecastWeights w(spec, max_h);

    double prev = 2.0;
    for (int h = 0; h <= max_h; ++h) {
        double sum = 0.0;
        for (double x : w.forward(h)) sum += x;
        CHECK(sum <= prev + 1e-14);
        prev = sum;
    }
    CHECK(prev < 0.02);  // -> 0 as h grows

    std::vector<double> state(spec.size(), 4.0e-4);
    CHECK(forward_variance(state, spec, w, max_h) ==
          doctest::Approx(spec.sigma_inf_sq()).epsilon(0.02));
}

TEST_CASE("term structure curves") {
    const auto spec = build_lm_arch(4.0, 64.0, 2.0, 1560.0);
    const ForecastWeights w(spec, 128);

    VolState flat{std::vector<double>(spec.size(), 9e-5), Date{2004, 6, 1}};
    const std::vector<int> horizons{1, 5, 21, 63, 126};
    const auto curve = term_structure(flat, spec, w, horizons);
    CHECK(curve.as_of == Date{2004, 6, 1});
    REQUIRE(curve.horizons == horizons);
    // flat state + linear spec -> flat curve
    for (double v : curve.forward_variance) {
        CHECK(v == doctest::Approx(260.0 * 9e-5).epsilon(1e-12));
    }
    for (double v : curve.forecast_vol) {
        CHECK(v == doctest::Approx(std::sqrt(260.0 * 9e-5)).epsilon(1e-12));
    }

    const std::vector<int> single{21};
    CHECK(term_structure(flat, spec, w, single).horizons.size() == 1);

    const std::vector<int> unsorted{21, 5};
    CHECK_THROWS_AS(term_structure(flat, spec, w, unsorted), std::invalid_argument);
}

TEST_CASE("curve responds Lipschitz-continuously to state perturbations") {
    const auto spec = build_lm_arch(4.0, 64.0, 2.0, 1560.0);
    const ForecastWeights w(spec, 63);
    std::mt19937_64 gen(37);
    std::uniform_real_distribution<double> level(5e-5, 3e-4);
    std::vector<double> state(spec.size());
    for (double& s : state) s = level(gen);

    const double delta = 1e-6;
    for (int h : {1, 21, 63}) {
        const double base = forward_variance(state, spec, w, h);
        auto bumped = state;
        for (double& s : bumped) s += delta;
        const double moved = forward_variance(bumped, spec, w, h);
        double bound = 0.0;
        for (double x : w.forward(h)) bound += std::abs(x);
        CHECK(std::abs(moved - base) <= 260.0 * bound * delta * (1.0 + 1e-10));
    }
}

}  // TEST_SUITE
