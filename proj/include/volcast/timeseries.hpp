#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace volcast {

/// Business days per year used to annualize variances; configurable at call
/// sites, 260 by default.
inline constexpr double kDefaultYearDays = 260.0;

/// Calendar date with ISO-8601 text form. Input dates are taken as given
/// (already business days); no weekend or holiday logic anywhere.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    /// Parses "YYYY-MM-DD"; throws std::invalid_argument on malformed input.
    static Date parse(std::string_view iso);
    std::string to_string() const;
    /// Next calendar day; used to label synthetic series.
    Date next_day() const;
};

/// Daily close prices. The series granularity is fixed to one business day.
struct PriceSeries {
    std::vector<Date> dates;     // strictly increasing
    std::vector<double> prices;  // strictly positive, one per date

    std::size_t size() const { return prices.size(); }
    /// Throws std::invalid_argument (with the offending index) on broken invariants.
    void validate() const;
};

/// Per-step unannualized returns; returns[i] covers (dates[i]-1 step, dates[i]].
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> returns;

    std::size_t size() const { return returns.size(); }
};

/// Annualized ATM implied volatilities on a fixed grid of times to maturity
/// (business days). Quiet NaN marks a missing cell.
struct ImpliedVolSeries {
    std::vector<Date> dates;
    std::vector<int> horizons;                // strictly increasing
    std::vector<std::vector<double>> values;  // values[i][j]: date i, horizon j

    std::size_t size() const { return dates.size(); }
    bool has(std::size_t i, std::size_t j) const;
    /// Value at (date, horizon) or nullopt when the date/horizon is absent or
    /// the cell is missing. Exact match only; no maturity interpolation.
    std::optional<double> lookup(const Date& date, int horizon) const;
    void validate() const;
};

/// returns[i] = ln(prices[i+1]/prices[i]), dated at the later date.
ReturnSeries log_returns(const PriceSeries& prices);

/// Annualized realized volatility over the n returns strictly after t:
/// sigma = sqrt(year_days/n * sum r^2). Throws std::runtime_error when the
/// window extends past the end of the series.
double realized_volatility(const ReturnSeries& returns, const Date& t, int horizon_days,
                           double year_days = kDefaultYearDays);

/// Same window given by its first return index instead of a date.
double realized_volatility_at(const ReturnSeries& returns, std::size_t first, int horizon_days,
                              double year_days = kDefaultYearDays);

/// CSV loaders; UTF-8 with a header row. Price file: "date,price". Implied
/// file: "date,iv_<h1>,iv_<h2>,..." with horizons in business days; an empty
/// cell is recorded as missing. Errors carry the offending line number.
PriceSeries load_price_csv(const std::string& path);
ImpliedVolSeries load_implied_csv(const std::string& path);

}  // namespace volcast
