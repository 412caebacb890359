#include "volcast/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace volcast::io {

std::string format_double(double x) {
    if (!std::isfinite(x)) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string weights_csv(const ProcessSpec& spec, const ForecastWeights& weights) {
    std::string out = "horizon,component_tau,weight\n";
    for (int h = 0; h <= weights.max_horizon(); ++h) {
        const auto row = weights.forward(h);
        for (std::size_t k = 0; k < row.size(); ++k) {
            out += std::to_string(h);
            out += ',';
            out += format_double(spec.tau(k));
            out += ',';
            out += format_double(row[k]);
            out += '\n';
        }
    }
    return out;
}

std::string weights_sum_csv(const ForecastWeights& weights) {
    std::string out = "horizon,sum_weights,w_inf\n";
    for (int h = 0; h <= weights.max_horizon(); ++h) {
        double sum = 0.0;
        for (double w : weights.forward(h)) sum += w;
        out += std::to_string(h);
        out += ',';
        out += format_double(sum);
        out += ',';
        out += format_double(weights.forward_w_inf(h));
        out += '\n';
    }
    return out;
}

std::string term_structure_csv(std::span<const ForecastCurve> curves) {
    std::string out = "date,horizon_days,forward_vol,forecast_vol\n";
    for (const auto& curve : curves) {
        const std::string date = curve.as_of.to_string();
        for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
            out += date;
            out += ',';
            out += std::to_string(curve.horizons[i]);
            out += ',';
            out += format_double(std::sqrt(curve.forward_variance[i]));
            out += ',';
            out += format_double(curve.forecast_vol[i]);
            out += '\n';
        }
    }
    return out;
}

std::string records_csv(std::span<const EvalRecord> records) {
    std::string out = "date,spec,horizon,forecast,implied,realized\n";
    for (const auto& rec : records) {
        out += rec.date.to_string();
        out += ',';
        out += rec.process;
        out += ',';
        out += std::to_string(rec.horizon);
        out += ',';
        out += format_double(rec.forecast_vol);
        out += ',';
        out += format_double(rec.implied_vol);
        out += ',';
        out += format_double(rec.realized_vol);
        out += '\n';
    }
    return out;
}

std::string distances_csv(const DistanceTable& table) {
    std::string out = "spec,horizon,pair,mae,rmse,mae_log,n,eff_n\n";
    for (const auto& row : table.rows) {
        out += row.process;
        out += ',';
        out += std::to_string(row.horizon);
        out += ',';
        out += to_string(row.pair);
        out += ',';
        out += format_double(row.mae);
        out += ',';
        out += format_double(row.rmse);
        out += ',';
        out += format_double(row.mae_log);
        out += ',';
        out += std::to_string(row.n);
        out += ',';
        out += format_double(row.effective_n);
        out += '\n';
    }
    return out;
}

std::string snapshot_csv(const SnapshotTable& table) {
    std::string out = "date,horizon";
    for (const auto& p : table.processes) {
        out += ',';
        out += p;
    }
    out += ",implied,realized\n";
    const std::string date = table.date.to_string();
    for (std::size_t i = 0; i < table.horizons.size(); ++i) {
        out += date;
        out += ',';
        out += std::to_string(table.horizons[i]);
        for (std::size_t p = 0; p < table.processes.size(); ++p) {
            out += ',';
            out += format_double(table.forecast[i][p]);
        }
        out += ',';
        out += format_double(table.implied[i]);
        out += ',';
        out += format_double(table.realized[i]);
        out += '\n';
    }
    return out;
}

std::string market_fit_csv(std::span<const Date> dates, std::span<const FactorFit> fits) {
    if (dates.size() != fits.size()) {
        throw std::invalid_argument("market_fit_csv: dates and fits differ in length");
    }
    const std::size_t n_factors = fits.empty() ? 1 : fits.front().factors.size();
    std::string out = "date,v1";
    if (n_factors > 1) out += ",v2";
    out += ",residual\n";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        out += dates[i].to_string();
        for (double v : fits[i].factors) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += format_double(fits[i].rms_residual);
        out += '\n';
    }
    return out;
}

}  // namespace volcast::io
