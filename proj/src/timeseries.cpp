#include "volcast/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace volcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return lengths[month - 1];
}

int parse_int_field(std::string_view s) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    }
    return value;
}

double parse_double_field(std::string_view s) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

[[noreturn]] void fail_at_line(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw std::invalid_argument("bad date '" + std::string(iso) + "', expected YYYY-MM-DD");
    }
    Date d;
    d.year = parse_int_field(iso.substr(0, 4));
    d.month = parse_int_field(iso.substr(5, 2));
    d.day = parse_int_field(iso.substr(8, 2));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        throw std::invalid_argument("bad date '" + std::string(iso) + "'");
    }
    return d;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::next_day() const {
    Date d = *this;
    if (++d.day > days_in_month(d.year, d.month)) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

void PriceSeries::validate() const {
    if (dates.size() != prices.size()) {
        throw std::invalid_argument("price series: dates and prices differ in length");
    }
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0)) {
            throw std::invalid_argument("price series: non-positive price at index " + std::to_string(i));
        }
        if (i > 0 && !(dates[i - 1] < dates[i])) {
            throw std::invalid_argument("price series: dates not strictly increasing at index " +
                                        std::to_string(i));
        }
    }
}

bool ImpliedVolSeries::has(std::size_t i, std::size_t j) const {
    return i < values.size() && j < values[i].size() && std::isfinite(values[i][j]);
}

std::optional<double> ImpliedVolSeries::lookup(const Date& date, int horizon) const {
    auto it = std::lower_bound(dates.begin(), dates.end(), date);
    if (it == dates.end() || *it != date) return std::nullopt;
    auto hit = std::lower_bound(horizons.begin(), horizons.end(), horizon);
    if (hit == horizons.end() || *hit != horizon) return std::nullopt;
    std::size_t i = static_cast<std::size_t>(it - dates.begin());
    std::size_t j = static_cast<std::size_t>(hit - horizons.begin());
    if (!has(i, j)) return std::nullopt;
    return values[i][j];
}

void ImpliedVolSeries::validate() const {
    if (dates.size() != values.size()) {
        throw std::invalid_argument("implied series: dates and value rows differ in length");
    }
    for (std::size_t j = 1; j < horizons.size(); ++j) {
        if (horizons[j - 1] >= horizons[j]) {
            throw std::invalid_argument("implied series: horizons not strictly increasing");
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != horizons.size()) {
            throw std::invalid_argument("implied series: row " + std::to_string(i) + " has wrong width");
        }
        if (i > 0 && !(dates[i - 1] < dates[i])) {
            throw std::invalid_argument("implied series: dates not strictly increasing at index " +
                                        std::to_string(i));
        }
        for (double v : values[i]) {
            if (std::isfinite(v) && !(v > 0.0)) {
                throw std::invalid_argument("implied series: non-positive volatility at row " +
                                            std::to_string(i));
            }
        }
    }
}

ReturnSeries log_returns(const PriceSeries& prices) {
    prices.validate();
    if (prices.size() < 2) {
        throw std::invalid_argument("log_returns: need at least 2 prices");
    }
    ReturnSeries out;
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    out.returns.resize(prices.size() - 1);
    for (std::size_t i = 0; i + 1 < prices.size(); ++i) {
        out.returns[i] = std::log(prices.prices[i + 1] / prices.prices[i]);
    }
    return out;
}

double realized_volatility_at(const ReturnSeries& returns, std::size_t first, int horizon_days,
                              double year_days) {
    if (horizon_days < 1) {
        throw std::invalid_argument("realized_volatility: horizon must be >= 1 day");
    }
    std::size_t n = static_cast<std::size_t>(horizon_days);
    if (first + n > returns.size()) {
        throw std::runtime_error("realized_volatility: insufficient future data");
    }
    double sum_sq = 0.0;
    for (std::size_t i = first; i < first + n; ++i) {
        sum_sq += returns.returns[i] * returns.returns[i];
    }
    return std::sqrt(year_days / static_cast<double>(n) * sum_sq);
}

double realized_volatility(const ReturnSeries& returns, const Date& t, int horizon_days,
                           double year_days) {
    auto it = std::upper_bound(returns.dates.begin(), returns.dates.end(), t);
    std::size_t first = static_cast<std::size_t>(it - returns.dates.begin());
    return realized_volatility_at(returns, first, horizon_days, year_days);
}

PriceSeries load_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    PriceSeries out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split_csv(sv);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "date" || fields[1] != "price") {
                fail_at_line(path, line_no, "expected header 'date,price'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) fail_at_line(path, line_no, "expected 2 fields");
        try {
            Date d = Date::parse(fields[0]);
            double p = parse_double_field(fields[1]);
            if (!(p > 0.0)) fail_at_line(path, line_no, "non-positive price");
            if (!out.dates.empty() && !(out.dates.back() < d)) {
                fail_at_line(path, line_no, "dates not strictly increasing");
            }
            out.dates.push_back(d);
            out.prices.push_back(p);
        } catch (const std::invalid_argument& e) {
            fail_at_line(path, line_no, e.what());
        }
    }
    if (out.size() == 0) throw std::runtime_error(path + ": no data rows");
    return out;
}

ImpliedVolSeries load_implied_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    ImpliedVolSeries out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split_csv(sv);
        if (!header_seen) {
            if (fields.size() < 2 || fields[0] != "date") {
                fail_at_line(path, line_no, "expected header 'date,iv_<h1>,iv_<h2>,...'");
            }
            for (std::size_t j = 1; j < fields.size(); ++j) {
                std::string_view f = fields[j];
                if (f.substr(0, 3) != "iv_") {
                    fail_at_line(path, line_no, "bad implied-vol column '" + std::string(f) + "'");
                }
                int h = 0;
                try {
                    h = parse_int_field(f.substr(3));
                } catch (const std::invalid_argument& e) {
                    fail_at_line(path, line_no, e.what());
                }
                if (h < 1) fail_at_line(path, line_no, "horizon must be >= 1 day");
                if (!out.horizons.empty() && out.horizons.back() >= h) {
                    fail_at_line(path, line_no, "horizons not strictly increasing");
                }
                out.horizons.push_back(h);
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != out.horizons.size() + 1) {
            fail_at_line(path, line_no, "expected " + std::to_string(out.horizons.size() + 1) + " fields");
        }
        try {
            Date d = Date::parse(fields[0]);
            if (!out.dates.empty() && !(out.dates.back() < d)) {
                fail_at_line(path, line_no, "dates not strictly increasing");
            }
            std::vector<double> row(out.horizons.size(), kNaN);
            for (std::size_t j = 0; j < out.horizons.size(); ++j) {
                if (fields[j + 1].empty()) continue;  // missing cell
                double v = parse_double_field(fields[j + 1]);
                if (!(v > 0.0)) fail_at_line(path, line_no, "non-positive implied volatility");
                row[j] = v;
            }
            out.dates.push_back(d);
            out.values.push_back(std::move(row));
        } catch (const std::invalid_argument& e) {
            fail_at_line(path, line_no, e.what());
        }
    }
    if (out.size() == 0) throw std::runtime_error(path + ": no data rows");
    return out;
}

}  // namespace volcast
