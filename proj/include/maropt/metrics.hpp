#pragma once

#include <span>
#include <string>
#include <vector>

#include "maropt/dates.hpp"

namespace maropt::metrics {

inline constexpr double kDrawdownEps = 1e-9;   // floor for MAR denominators
inline constexpr double kStdEps = 1e-12;       // floor for vol denominators
inline constexpr double kTradingDaysPerYear = 252.0;

// Daily portfolio values; the substrate every metric is computed from.
struct EquityCurve {
    std::vector<Date> dates;    // strictly increasing
    std::vector<double> values; // positive, same length

    size_t size() const { return values.size(); }
};

struct MetricsReport {
    double cagr = 0.0;          // fraction per year
    double max_drawdown = 0.0;  // fraction in [0, 1)
    double sharpe = 0.0;        // annualized
    double sortino = 0.0;       // annualized
    double mar = 0.0;           // cagr / max(max_drawdown, kDrawdownEps)
};

// Largest peak-to-trough fractional decline; 0 for non-decreasing curves.
double max_drawdown(const EquityCurve& curve);
double max_drawdown(std::span<const double> values);

// Compound annual growth: (end/start)^(365.25/days) - 1 with fractional
// days supported; the curve overload uses the calendar span of its dates.
double cagr(const EquityCurve& curve);
double cagr_between(double start_value, double end_value, double elapsed_days);

// Annualized mean/vol with rf = 0 and sample (n-1) standard deviation.
double sharpe(std::span<const double> returns, double periods_per_year);

// Downside deviation uses all n returns with min(r, 0), target 0.
double sortino(std::span<const double> returns, double periods_per_year);

double mar_ratio(double cagr, double max_drawdown);

// Per-period simple returns of a curve, length size() - 1.
std::vector<double> curve_returns(const EquityCurve& curve);

MetricsReport report(const EquityCurve& curve,
                     double periods_per_year = kTradingDaysPerYear);

std::string to_json(const MetricsReport& report);

} // namespace maropt::metrics
