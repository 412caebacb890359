// volcast command-line front end: weights / forecast / simulate / evaluate /
// market-fit subcommands around the library, wired through a JSON config file
// with flag overrides (flags win). All volatilities in output files are
// annualized fractions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "volcast/evaluate.hpp"
#include "volcast/forecast.hpp"
#include "volcast/io.hpp"
#include "volcast/market_model.hpp"
#include "volcast/simulate.hpp"
#include "volcast/timeseries.hpp"

using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> year_days;
};

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw std::runtime_error("config: " + path + ": " + what);
}

const json& require_key(const json& obj, const std::string& ctx, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) config_error(ctx + "." + key, "missing");
    return obj.at(key);
}

double require_double(const json& obj, const std::string& ctx, const char* key) {
    const json& v = require_key(obj, ctx, key);
    if (!v.is_number()) config_error(ctx + "." + key, "must be a number");
    return v.get<double>();
}

double optional_double(const json& obj, const std::string& ctx, const char* key, double fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) config_error(ctx + "." + key, "must be a number");
    return v.get<double>();
}

std::int64_t optional_int(const json& obj, const std::string& ctx, const char* key,
                          std::int64_t fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) config_error(ctx + "." + key, "must be an integer");
    return v.get<std::int64_t>();
}

std::string optional_string(const json& obj, const std::string& ctx, const char* key,
                            const std::string& fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) config_error(ctx + "." + key, "must be a string");
    return v.get<std::string>();
}

bool optional_bool(const json& obj, const std::string& ctx, const char* key, bool fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) config_error(ctx + "." + key, "must be a boolean");
    return v.get<bool>();
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: " + path + ": " + e.what());
    }
}

volcast::ProcessSpec spec_from_config(const json& p, const std::string& ctx) {
    if (!p.is_object()) config_error(ctx, "must be an object");
    std::string label = optional_string(p, ctx, "label", "");

    if (p.contains("preset")) {
        const std::string preset = optional_string(p, ctx, "preset", "");
        if (label.empty()) label = preset;
        if (preset == "igarch1") {
            return volcast::build_igarch1(require_double(p, ctx, "tau"), label);
        }
        if (preset == "igarch2") {
            return volcast::build_igarch2(require_double(p, ctx, "tau1"),
                                          require_double(p, ctx, "tau2"),
                                          require_double(p, ctx, "tau0"), label);
        }
        if (preset == "garch11") {
            return volcast::build_garch11(require_double(p, ctx, "tau1"),
                                          require_double(p, ctx, "w_inf"),
                                          require_double(p, ctx, "sigma_inf_sq"), label);
        }
        if (preset == "lm_arch") {
            return volcast::build_lm_arch(require_double(p, ctx, "tau1"),
                                          require_double(p, ctx, "tau_n"),
                                          require_double(p, ctx, "rho"),
                                          require_double(p, ctx, "tau0"),
                                          optional_double(p, ctx, "w_inf", 0.0),
                                          optional_double(p, ctx, "sigma_inf_sq", 0.0), label);
        }
        config_error(ctx + ".preset", "unknown preset '" + preset + "'");
    }

    if (p.contains("components")) {
        const json& comps = p.at("components");
        if (!comps.is_array() || comps.empty()) config_error(ctx + ".components", "must be a non-empty array");
        std::vector<double> taus, ws;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const std::string cctx = ctx + ".components[" + std::to_string(k) + "]";
            taus.push_back(require_double(comps[k], cctx, "tau"));
            ws.push_back(require_double(comps[k], cctx, "w"));
        }
        if (label.empty()) label = "custom";
        return volcast::ProcessSpec(taus, ws, optional_double(p, ctx, "w_inf", 0.0),
                                    optional_double(p, ctx, "sigma_inf_sq", 0.0), label);
    }
    config_error(ctx, "needs either 'preset' or 'components'");
}

std::vector<volcast::ProcessSpec> specs_from_config(const json& cfg) {
    if (!cfg.contains("processes")) config_error("processes", "missing");
    const json& arr = cfg.at("processes");
    if (!arr.is_array() || arr.empty()) config_error("processes", "must be a non-empty array");
    std::vector<volcast::ProcessSpec> specs;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        specs.push_back(spec_from_config(arr[i], "processes[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            if (specs[i].label() == specs[j].label()) {
                config_error("processes", "duplicate label '" + specs[i].label() + "'");
            }
        }
    }
    return specs;
}

const volcast::ProcessSpec& pick_spec(const std::vector<volcast::ProcessSpec>& specs,
                                      const std::string& label, const std::string& ctx) {
    if (label.empty()) return specs.front();
    for (const auto& s : specs) {
        if (s.label() == label) return s;
    }
    config_error(ctx, "no process with label '" + label + "'");
}

std::vector<int> horizons_from_config(const json& cfg) {
    if (!cfg.contains("horizons")) return {5, 10, 21, 42, 63, 126, 252};
    const json& arr = cfg.at("horizons");
    if (!arr.is_array() || arr.empty()) config_error("horizons", "must be a non-empty array");
    std::vector<int> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number_integer()) config_error("horizons[" + std::to_string(i) + "]", "must be an integer");
        const std::int64_t h = arr[i].get<std::int64_t>();
        if (h < 1) config_error("horizons[" + std::to_string(i) + "]", "must be >= 1");
        out.push_back(static_cast<int>(h));
    }
    return out;
}

struct Resolved {
    json cfg;
    std::string out_dir;
    std::uint64_t seed;
    double year_days;
};

Resolved resolve(const CommonArgs& args) {
    Resolved r;
    r.cfg = load_config(args.config_path);
    r.out_dir = !args.out_dir.empty() ? args.out_dir : optional_string(r.cfg, "", "out_dir", "out");
    r.seed = args.seed ? *args.seed
                       : static_cast<std::uint64_t>(optional_int(r.cfg, "", "seed", 12345));
    r.year_days = args.year_days ? *args.year_days : optional_double(r.cfg, "", "year_days", 260.0);
    if (!(r.year_days > 0.0)) config_error("year_days", "must be > 0");
    return r;
}

std::string out_path(const Resolved& r, const std::string& name) { return r.out_dir + "/" + name; }

// Shared by forecast/evaluate: initial state from the first `warmup` returns,
// then sequential updates; scoring is valid from return index burn_in-1 on.
struct BurnInPlan {
    int warmup = 25;
    int burn_in = 0;
    int first_index = 0;
};

BurnInPlan burn_in_plan(const json& cfg, const std::vector<volcast::ProcessSpec>& specs,
                        int n_returns) {
    BurnInPlan plan;
    plan.warmup = static_cast<int>(optional_int(cfg, "", "warmup", 25));
    plan.burn_in = static_cast<int>(optional_int(cfg, "", "burn_in", 0));
    if (plan.burn_in == 0) {
        double max_tau = 0.0;
        for (const auto& s : specs) max_tau = std::max(max_tau, s.max_tau());
        plan.burn_in = static_cast<int>(std::ceil(max_tau));
    }
    plan.burn_in = std::max(plan.burn_in, plan.warmup);
    plan.first_index = plan.burn_in - 1;
    if (n_returns <= plan.burn_in) {
        throw std::runtime_error("insufficient sample: need more than " + std::to_string(plan.burn_in) +
                                 " returns for the burn-in, got " + std::to_string(n_returns));
    }
    return plan;
}

int cmd_weights(const Resolved& r) {
    const auto specs = specs_from_config(r.cfg);
    const json sub = r.cfg.contains("weights") ? r.cfg.at("weights") : json::object();
    const auto& spec = pick_spec(specs, optional_string(sub, "weights", "process", ""), "weights.process");
    const int max_h = static_cast<int>(optional_int(sub, "weights", "max_horizon", 512));
    const volcast::ForecastWeights weights(spec, max_h);
    volcast::io::atomic_write(out_path(r, "weights.csv"), volcast::io::weights_csv(spec, weights));
    volcast::io::atomic_write(out_path(r, "weights_sum.csv"), volcast::io::weights_sum_csv(weights));
    return 0;
}

int cmd_forecast(const Resolved& r, const std::string& prices_path) {
    const auto specs = specs_from_config(r.cfg);
    const json sub = r.cfg.contains("forecast") ? r.cfg.at("forecast") : json::object();
    const auto horizons = horizons_from_config(r.cfg);

    const auto prices = volcast::load_price_csv(prices_path);
    const auto returns = volcast::log_returns(prices);
    const auto plan = burn_in_plan(r.cfg, specs, static_cast<int>(returns.size()));

    // which as-of dates: "last" (default), "all", or an explicit list
    std::vector<volcast::Date> wanted;
    bool all_dates = false;
    if (sub.contains("dates") && sub.at("dates").is_array()) {
        for (const auto& d : sub.at("dates")) {
            if (!d.is_string()) config_error("forecast.dates", "entries must be date strings");
            wanted.push_back(volcast::Date::parse(d.get<std::string>()));
        }
    } else {
        const std::string mode = optional_string(sub, "forecast", "dates", "last");
        if (mode == "all") {
            all_dates = true;
        } else if (mode == "last") {
            wanted.push_back(returns.dates.back());
        } else {
            config_error("forecast.dates", "must be \"all\", \"last\", or a date array");
        }
    }

    std::string process_filter = optional_string(sub, "forecast", "process", "");
    volcast::ReturnSeries warmup;
    warmup.dates.assign(returns.dates.begin(), returns.dates.begin() + plan.warmup);
    warmup.returns.assign(returns.returns.begin(), returns.returns.begin() + plan.warmup);

    for (const auto& spec : specs) {
        if (!process_filter.empty() && spec.label() != process_filter) continue;
        const volcast::ForecastWeights weights(spec, horizons.back());
        auto state = volcast::init_state(spec, warmup);
        std::vector<volcast::ForecastCurve> curves;
        for (int i = plan.warmup; i < static_cast<int>(returns.size()); ++i) {
            volcast::update_state(state, spec, returns.returns[i], returns.dates[i]);
            if (i < plan.first_index) continue;
            const bool take = all_dates ||
                              std::find(wanted.begin(), wanted.end(), returns.dates[i]) != wanted.end();
            if (take) {
                curves.push_back(volcast::term_structure(state, spec, weights, horizons, r.year_days));
            }
        }
        if (!all_dates && curves.size() < wanted.size()) {
            throw std::runtime_error("forecast: some requested dates are missing or inside the burn-in");
        }
        volcast::io::atomic_write(out_path(r, "term_structure_" + spec.label() + ".csv"),
                                  volcast::io::term_structure_csv(curves));
    }
    return 0;
}

int cmd_simulate(const Resolved& r, bool dump_paths_flag) {
    const auto specs = specs_from_config(r.cfg);
    const json sub = r.cfg.contains("simulate") ? r.cfg.at("simulate") : json::object();
    const auto& spec = pick_spec(specs, optional_string(sub, "simulate", "process", ""), "simulate.process");

    const std::size_t n_steps = static_cast<std::size_t>(optional_int(sub, "simulate", "n_steps", 1000));
    const std::size_t n_paths = static_cast<std::size_t>(optional_int(sub, "simulate", "n_paths", 1));
    const double initial_vol = optional_double(sub, "simulate", "initial_vol", 0.10);
    const bool dump_paths = dump_paths_flag || optional_bool(sub, "simulate", "dump_paths", false);

    volcast::InnovationDist dist = volcast::InnovationDist::gaussian();
    const std::string innovation = optional_string(sub, "simulate", "innovation", "gaussian");
    if (innovation == "student_t") {
        dist = volcast::InnovationDist::student_t(optional_double(sub, "simulate", "dof", 5.0));
    } else if (innovation != "gaussian") {
        config_error("simulate.innovation", "must be \"gaussian\" or \"student_t\"");
    }

    // linear-spec fixed point: all sigma_k^2 at the requested level
    const std::vector<double> initial(spec.size(), initial_vol * initial_vol / r.year_days);

    std::string summary = "path,n_steps,mean_return,stdev_return,kurtosis,final_vol\n";
    std::string dump = "path,step,return,sigma_eff_sq\n";
    for (std::size_t p = 0; p < n_paths; ++p) {
        const auto path = volcast::simulate_returns(spec, dist, n_steps, r.seed, initial,
                                                    r.year_days, p);
        double mean = 0.0;
        for (double x : path.returns) mean += x;
        mean /= static_cast<double>(n_steps);
        double m2 = 0.0, m4 = 0.0;
        for (double x : path.returns) {
            const double d = x - mean;
            m2 += d * d;
            m4 += d * d * d * d;
        }
        m2 /= static_cast<double>(n_steps);
        m4 /= static_cast<double>(n_steps);
        const double kurt = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;

        summary += std::to_string(p) + ',' + std::to_string(n_steps) + ',' +
                   volcast::io::format_double(mean) + ',' +
                   volcast::io::format_double(std::sqrt(m2)) + ',' +
                   volcast::io::format_double(kurt) + ',' +
                   volcast::io::format_double(std::sqrt(r.year_days * path.sigma_eff_sq.back())) +
                   '\n';
        if (dump_paths) {
            for (std::size_t t = 0; t < n_steps; ++t) {
                dump += std::to_string(p) + ',' + std::to_string(t + 1) + ',' +
                        volcast::io::format_double(path.returns[t]) + ',' +
                        volcast::io::format_double(path.sigma_eff_sq[t + 1]) + '\n';
            }
        }
    }
    volcast::io::atomic_write(out_path(r, "simulate_summary.csv"), summary);
    if (dump_paths) volcast::io::atomic_write(out_path(r, "simulate_paths.csv"), dump);
    return 0;
}

int cmd_evaluate(const Resolved& r, const std::string& prices_path, const std::string& implied_path) {
    const auto specs = specs_from_config(r.cfg);
    const auto horizons = horizons_from_config(r.cfg);

    const auto prices = volcast::load_price_csv(prices_path);
    std::optional<volcast::ImpliedVolSeries> implied;
    if (!implied_path.empty()) implied = volcast::load_implied_csv(implied_path);

    volcast::EvalOptions opts;
    opts.year_days = r.year_days;
    opts.warmup = static_cast<int>(optional_int(r.cfg, "", "warmup", 25));
    opts.burn_in = static_cast<int>(optional_int(r.cfg, "", "burn_in", 0));
    opts.stride = static_cast<int>(optional_int(r.cfg, "", "stride", 1));

    const auto result = volcast::rolling_evaluation(prices, implied ? &*implied : nullptr, specs,
                                                    horizons, opts);
    volcast::io::atomic_write(out_path(r, "records.csv"), volcast::io::records_csv(result.records));
    volcast::io::atomic_write(out_path(r, "distances.csv"),
                              volcast::io::distances_csv(result.distances));

    const json sub = r.cfg.contains("evaluate") ? r.cfg.at("evaluate") : json::object();
    if (sub.contains("snapshot_dates")) {
        const json& arr = sub.at("snapshot_dates");
        if (!arr.is_array()) config_error("evaluate.snapshot_dates", "must be an array of dates");
        for (const auto& d : arr) {
            if (!d.is_string()) config_error("evaluate.snapshot_dates", "entries must be date strings");
            const auto date = volcast::Date::parse(d.get<std::string>());
            const auto table = volcast::snapshot(result.records, date);
            volcast::io::atomic_write(out_path(r, "snapshot_" + date.to_string() + ".csv"),
                                      volcast::io::snapshot_csv(table));
        }
    }
    return 0;
}

int cmd_market_fit(const Resolved& r, const std::string& curve_path) {
    const json sub = r.cfg.contains("market_fit") ? r.cfg.at("market_fit") : json::object();
    const int factors = static_cast<int>(optional_int(sub, "market_fit", "factors", 1));
    const double v_inf = require_double(sub, "market_fit", "v_inf");
    const double beta = optional_double(sub, "market_fit", "beta", 0.5);
    const double gamma = optional_double(sub, "market_fit", "gamma", 0.0);

    std::vector<double> taus;
    const json& tau_arr = require_key(sub, "market_fit", "tau");
    if (!tau_arr.is_array()) config_error("market_fit.tau", "must be an array of time scales");
    for (const auto& t : tau_arr) taus.push_back(t.get<double>());
    if (static_cast<int>(taus.size()) != factors) {
        config_error("market_fit.tau", "length must equal 'factors'");
    }

    std::vector<double> ws;
    if (sub.contains("w")) {
        for (const auto& w : sub.at("w")) ws.push_back(w.get<double>());
        if (static_cast<int>(ws.size()) != factors) config_error("market_fit.w", "length must equal 'factors'");
    } else {
        ws.assign(static_cast<std::size_t>(factors), 0.0);
        ws[0] = 1.0;  // identification default
    }

    volcast::MarketModelSpec model =
        factors == 1 ? volcast::MarketModelSpec::one_factor(taus[0], v_inf, ws[0], beta, gamma)
        : factors == 2
            ? volcast::MarketModelSpec::two_factor(taus[0], taus[1], v_inf, ws[0], ws[1], beta, gamma)
            : throw std::runtime_error("config: market_fit.factors: must be 1 or 2");

    // input: term-structure CSV with date,horizon_days,forward_vol[,...]
    std::ifstream in(curve_path);
    if (!in) throw std::runtime_error("cannot open file: " + curve_path);
    std::string line;
    std::size_t line_no = 0;
    std::map<volcast::Date, volcast::ForwardCurveObs> by_date;
    std::vector<volcast::Date> order;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line.rfind("date,horizon_days,forward_vol", 0) != 0) {
                throw std::runtime_error(curve_path + ":1: expected header 'date,horizon_days,forward_vol[,...]'");
            }
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 3) {
            throw std::runtime_error(curve_path + ":" + std::to_string(line_no) + ": expected at least 3 fields");
        }
        try {
            const auto date = volcast::Date::parse(fields[0]);
            const double horizon = std::stod(fields[1]);
            const double vol = std::stod(fields[2]);
            auto [it, inserted] = by_date.try_emplace(date);
            if (inserted) order.push_back(date);
            it->second.horizons.push_back(horizon);
            it->second.values.push_back(vol * vol);  // vol -> forward variance
        } catch (const std::exception& e) {
            throw std::runtime_error(curve_path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (order.empty()) throw std::runtime_error(curve_path + ": no data rows");

    std::vector<volcast::FactorFit> fits;
    fits.reserve(order.size());
    for (const auto& date : order) {
        auto& obs = by_date[date];
        obs.validate();
        fits.push_back(volcast::fit_factors(model, obs));
    }
    volcast::io::atomic_write(out_path(r, "market_fit.csv"), volcast::io::market_fit_csv(order, fits));
    return 0;
}

std::string single_line(std::string msg) {
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return msg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-scale ARCH volatility forecasting toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string prices_path, implied_path, curve_path;
    bool dump_paths = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON config file")->required();
        sub->add_option("--out-dir", common.out_dir, "output directory (overrides config)");
        sub->add_option("--seed", common.seed, "RNG seed (overrides config)");
        sub->add_option("--year-days", common.year_days, "business days per year (overrides config)");
    };

    CLI::App* weights = app.add_subcommand("weights", "forecast-weight tables for one process");
    add_common(weights);

    CLI::App* forecast = app.add_subcommand("forecast", "term structures from a price series");
    add_common(forecast);
    forecast->add_option("--prices", prices_path, "price CSV (date,price)")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo paths of the return process");
    add_common(simulate);
    simulate->add_flag("--dump-paths", dump_paths, "also write the per-step path dump");

    CLI::App* evaluate = app.add_subcommand("evaluate", "rolling forecast/implied/realized comparison");
    add_common(evaluate);
    evaluate->add_option("--prices", prices_path, "price CSV (date,price)")->required();
    evaluate->add_option("--implied", implied_path, "implied-vol CSV (date,iv_<h>,...)");

    CLI::App* market_fit = app.add_subcommand("market-fit", "fit market-model factors to forward curves");
    add_common(market_fit);
    market_fit->add_option("--curve", curve_path, "forward-curve CSV (date,horizon_days,forward_vol)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const Resolved r = resolve(common);
        if (weights->parsed()) return cmd_weights(r);
        if (forecast->parsed()) return cmd_forecast(r, prices_path);
        if (simulate->parsed()) return cmd_simulate(r, dump_paths);
        if (evaluate->parsed()) return cmd_evaluate(r, prices_path, implied_path);
        if (market_fit->parsed()) return cmd_market_fit(r, curve_path);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << single_line(e.what()) << "\n";
        return 1;
    }
}
