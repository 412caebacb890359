#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "volcast/arch_process.hpp"
#include "volcast/evaluate.hpp"
#include "volcast/forecast.hpp"
#include "volcast/market_model.hpp"
#include "volcast/simulate.hpp"
#include "volcast/timeseries.hpp"

namespace py = pybind11;
using namespace volcast;

namespace {

ReturnSeries returns_from_list(const std::vector<double>& returns) {
    ReturnSeries out;
    out.returns = returns;
    Date d{2000, 1, 1};
    out.dates.reserve(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) {
        out.dates.push_back(d);
        d = d.next_day();
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-scale ARCH volatility forecasting core";

    py::class_<Date>(m, "Date")
        .def(py::init<int, int, int>(), py::arg("year"), py::arg("month"), py::arg("day"))
        .def_static("parse", &Date::parse)
        .def_readonly("year", &Date::year)
        .def_readonly("month", &Date::month)
        .def_readonly("day", &Date::day)
        .def("next_day", &Date::next_day)
        .def("__str__", &Date::to_string)
        .def("__repr__", [](const Date& d) { return "Date(" + d.to_string() + ")"; })
        .def(py::self == py::self)
        .def(py::self < py::self);

    py::class_<ProcessSpec>(m, "ProcessSpec")
        .def(py::init<std::vector<double>, std::vector<double>, double, double, std::string>(),
             py::arg("taus"), py::arg("weights"), py::arg("w_inf") = 0.0,
             py::arg("sigma_inf_sq") = 0.0, py::arg("label") = "custom")
        .def_property_readonly("taus", &ProcessSpec::taus)
        .def_property_readonly("mus", &ProcessSpec::mus)
        .def_property_readonly("weights", &ProcessSpec::weights)
        .def_property_readonly("w_inf", &ProcessSpec::w_inf)
        .def_property_readonly("sigma_inf_sq", &ProcessSpec::sigma_inf_sq)
        .def_property_readonly("label", &ProcessSpec::label)
        .def_property_readonly("is_linear", &ProcessSpec::is_linear)
        .def("__len__", &ProcessSpec::size);

    m.def("build_igarch1", &build_igarch1, py::arg("tau"), py::arg("label") = "igarch1");
    m.def("build_igarch2", &build_igarch2, py::arg("tau1"), py::arg("tau2"), py::arg("tau0"),
          py::arg("label") = "igarch2");
    m.def("build_garch11", &build_garch11, py::arg("tau1"), py::arg("w_inf"),
          py::arg("sigma_inf_sq"), py::arg("label") = "garch11");
    m.def("build_lm_arch", &build_lm_arch, py::arg("tau1"), py::arg("tau_n"), py::arg("rho"),
          py::arg("tau0"), py::arg("w_inf") = 0.0, py::arg("sigma_inf_sq") = 0.0,
          py::arg("label") = "lm_arch");

    m.def(
        "log_returns",
        [](const std::vector<double>& prices) {
            PriceSeries series;
            series.prices = prices;
            Date d{2000, 1, 1};
            for (std::size_t i = 0; i < prices.size(); ++i) {
                series.dates.push_back(d);
                d = d.next_day();
            }
            return log_returns(series).returns;
        },
        py::arg("prices"));
    m.def(
        "realized_volatility",
        [](const std::vector<double>& returns, std::size_t first, int horizon_days,
           double year_days) {
            return realized_volatility_at(returns_from_list(returns), first, horizon_days,
                                          year_days);
        },
        py::arg("returns"), py::arg("first"), py::arg("horizon_days"),
        py::arg("year_days") = kDefaultYearDays);

    m.def(
        "init_state",
        [](const ProcessSpec& spec, const std::vector<double>& warmup) {
            return init_state(spec, returns_from_list(warmup)).sigma_sq;
        },
        py::arg("spec"), py::arg("warmup_returns"));
    m.def(
        "update_state",
        [](const ProcessSpec& spec, std::vector<double> state, double r) {
            ema_update(state, spec, r);
            return state;
        },
        py::arg("spec"), py::arg("state"), py::arg("r"));
    m.def(
        "effective_variance",
        [](const ProcessSpec& spec, const std::vector<double>& state, double year_days) {
            return effective_variance(std::span<const double>(state), spec, year_days);
        },
        py::arg("spec"), py::arg("state"), py::arg("year_days") = kDefaultYearDays);

    py::class_<ForecastWeights>(m, "ForecastWeights")
        .def(py::init<const ProcessSpec&, int>(), py::arg("spec"), py::arg("max_horizon"))
        .def_property_readonly("max_horizon", &ForecastWeights::max_horizon)
        .def("forward",
             [](const ForecastWeights& w, int h) {
                 auto row = w.forward(h);
                 return std::vector<double>(row.begin(), row.end());
             })
        .def("forward_w_inf", &ForecastWeights::forward_w_inf)
        .def("averaged",
             [](const ForecastWeights& w, int delta_t) {
                 auto row = w.averaged(delta_t);
                 return std::vector<double>(row.begin(), row.end());
             })
        .def("averaged_w_inf", &ForecastWeights::averaged_w_inf);

    m.def("forecast_weights", &forecast_weights, py::arg("spec"), py::arg("max_horizon"));
    m.def(
        "forward_variance",
        [](const std::vector<double>& state, const ProcessSpec& spec, const ForecastWeights& w,
           int h, double year_days) {
            return forward_variance(std::span<const double>(state), spec, w, h, year_days);
        },
        py::arg("state"), py::arg("spec"), py::arg("weights"), py::arg("h"),
        py::arg("year_days") = kDefaultYearDays);
    m.def(
        "forecasted_volatility",
        [](const std::vector<double>& state, const ProcessSpec& spec, const ForecastWeights& w,
           int delta_t, double year_days) {
            return forecasted_volatility(std::span<const double>(state), spec, w, delta_t,
                                         year_days);
        },
        py::arg("state"), py::arg("spec"), py::arg("weights"), py::arg("delta_t"),
        py::arg("year_days") = kDefaultYearDays);

    py::class_<ForecastCurve>(m, "ForecastCurve")
        .def_readonly("horizons", &ForecastCurve::horizons)
        .def_readonly("forward_variance", &ForecastCurve::forward_variance)
        .def_readonly("forecast_vol", &ForecastCurve::forecast_vol);
    m.def(
        "term_structure",
        [](const std::vector<double>& state, const ProcessSpec& spec, const ForecastWeights& w,
           const std::vector<int>& horizons, double year_days) {
            VolState s{state, Date{2000, 1, 1}};
            return term_structure(s, spec, w, horizons, year_days);
        },
        py::arg("state"), py::arg("spec"), py::arg("weights"), py::arg("horizons"),
        py::arg("year_days") = kDefaultYearDays);

    py::class_<InnovationDist>(m, "InnovationDist")
        .def_static("gaussian", &InnovationDist::gaussian)
        .def_static("student_t", &InnovationDist::student_t, py::arg("dof") = 5.0)
        .def_static("zero", &InnovationDist::zero);

    py::class_<SimPath>(m, "SimPath")
        .def_readonly("seed", &SimPath::seed)
        .def_readonly("returns", &SimPath::returns)
        .def_readonly("sigma_eff_sq", &SimPath::sigma_eff_sq)
        .def("state_at", [](const SimPath& p, std::size_t step) {
            auto s = p.state_at(step);
            return std::vector<double>(s.begin(), s.end());
        });
    m.def(
        "simulate_returns",
        [](const ProcessSpec& spec, const InnovationDist& dist, std::size_t n_steps,
           std::uint64_t seed, const std::vector<double>& initial, double year_days,
           std::uint64_t stream) {
            return simulate_returns(spec, dist, n_steps, seed, initial, year_days, stream);
        },
        py::arg("spec"), py::arg("dist"), py::arg("n_steps"), py::arg("seed"),
        py::arg("initial_sigma_sq"), py::arg("year_days") = kDefaultYearDays,
        py::arg("stream") = 0);

    m.def("chi_from_epsilon", &chi_from_epsilon, py::arg("epsilon"));
    m.def(
        "simulate_induced_variance",
        [](const ProcessSpec& spec, const std::vector<double>& chi, std::vector<double> initial) {
            return simulate_induced_variance(spec, chi, std::move(initial));
        },
        py::arg("spec"), py::arg("chi"), py::arg("initial_v"));

    py::class_<MartingaleReport>(m, "MartingaleReport")
        .def_readonly("target", &MartingaleReport::target)
        .def_readonly("mean", &MartingaleReport::mean)
        .def_readonly("std_error", &MartingaleReport::std_error)
        .def_readonly("z", &MartingaleReport::z)
        .def_readonly("n_paths", &MartingaleReport::n_paths);
    m.def(
        "martingale_check",
        [](const ProcessSpec& spec, const std::vector<double>& initial, int t_prime, int target_step,
           std::size_t n_paths, std::uint64_t seed, double year_days) {
            return martingale_check(spec, initial, t_prime, target_step, n_paths, seed,
                                    InnovationDist::gaussian(), year_days);
        },
        py::arg("spec"), py::arg("initial_sigma_sq"), py::arg("t_prime"), py::arg("target_step"),
        py::arg("n_paths"), py::arg("seed"), py::arg("year_days") = kDefaultYearDays);

    py::class_<MarketModelSpec>(m, "MarketModelSpec")
        .def_static("one_factor", &MarketModelSpec::one_factor, py::arg("tau1"), py::arg("v_inf"),
                    py::arg("w1") = 1.0, py::arg("beta") = 0.5, py::arg("gamma") = 0.0)
        .def_static("two_factor", &MarketModelSpec::two_factor, py::arg("tau1"), py::arg("tau2"),
                    py::arg("v_inf"), py::arg("w1") = 1.0, py::arg("w2") = 0.0,
                    py::arg("beta") = 0.5, py::arg("gamma") = 0.0)
        .def_property_readonly("n_factors", &MarketModelSpec::n_factors)
        .def_property_readonly("v_inf", &MarketModelSpec::v_inf)
        .def("factor_weight", &MarketModelSpec::factor_weight, py::arg("k"), py::arg("delta_t"))
        .def(
            "curve_value",
            [](const MarketModelSpec& mm, const std::vector<double>& factors, double delta_t) {
                return mm.curve_value(factors, delta_t);
            },
            py::arg("factors"), py::arg("delta_t"))
        .def(
            "drift",
            [](const MarketModelSpec& mm, int k, const std::vector<double>& factors) {
                return mm.drift(k, factors);
            },
            py::arg("k"), py::arg("factors"));

    py::class_<FactorFit>(m, "FactorFit")
        .def_readonly("factors", &FactorFit::factors)
        .def_readonly("rms_residual", &FactorFit::rms_residual)
        .def_readonly("negative_factor", &FactorFit::negative_factor);
    m.def(
        "fit_factors",
        [](const MarketModelSpec& model, const std::vector<double>& horizons,
           const std::vector<double>& values) {
            ForwardCurveObs obs{horizons, values};
            obs.validate();
            return fit_factors(model, obs);
        },
        py::arg("model"), py::arg("horizons"), py::arg("values"));
    m.def(
        "compatibility_residual",
        [](const MarketModelSpec& model, const std::vector<double>& factors, double delta_t,
           double fd_step_rel) {
            return compatibility_residual(model, factors, delta_t, fd_step_rel);
        },
        py::arg("model"), py::arg("factors"), py::arg("delta_t"), py::arg("fd_step_rel") = 1e-3);
    m.def(
        "simulate_market_model",
        [](const MarketModelSpec& model, const std::vector<double>& initial, std::size_t n_steps,
           double dt, std::uint64_t seed) {
            return simulate_market_model(model, initial, n_steps, dt, seed);
        },
        py::arg("model"), py::arg("initial"), py::arg("n_steps"), py::arg("dt"), py::arg("seed"));

    m.def(
        "mae",
        [](const std::vector<double>& x, const std::vector<double>& y) { return mae(x, y); },
        py::arg("x"), py::arg("y"));
    m.def(
        "rmse",
        [](const std::vector<double>& x, const std::vector<double>& y) { return rmse(x, y); },
        py::arg("x"), py::arg("y"));
    m.def(
        "mae_log",
        [](const std::vector<double>& x, const std::vector<double>& y) { return mae_log(x, y); },
        py::arg("x"), py::arg("y"));
}
