#include "maropt/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "maropt/errors.hpp"

namespace maropt::metrics {

namespace {

void check_curve(const EquityCurve& curve) {
    if (curve.size() < 2)
        raise(Errc::too_few_points, "equity curve needs at least 2 points, has " +
                                        std::to_string(curve.size()));
}

void check_returns(std::span<const double> returns) {
    if (returns.size() < 2)
        raise(Errc::too_few_points, "need at least 2 returns, have " +
                                        std::to_string(returns.size()));
}

} // namespace

double max_drawdown(std::span<const double> values) {
    if (values.size() < 2)
        raise(Errc::too_few_points, "drawdown needs at least 2 points");
    double peak = values[0];
    double worst = 0.0;
    for (double v : values) {
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return worst;
}

double max_drawdown(const EquityCurve& curve) {
    check_curve(curve);
    return max_drawdown(std::span<const double>(curve.values));
}

double cagr_between(double start_value, double end_value, double elapsed_days) {
    if (elapsed_days <= 0.0)
        raise(Errc::too_few_points, "elapsed time must be positive");
    // exp/log form keeps huge growth rates finite instead of overflowing.
    double exponent = (kDaysPerYear / elapsed_days) * std::log(end_value / start_value);
    return std::expm1(std::min(exponent, 700.0));
}

double cagr(const EquityCurve& curve) {
    check_curve(curve);
    double days = static_cast<double>(days_between(curve.dates.front(), curve.dates.back()));
    return cagr_between(curve.values.front(), curve.values.back(), days);
}

double sharpe(std::span<const double> returns, double periods_per_year) {
    check_returns(returns);
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    double stdev = std::sqrt(ss / static_cast<double>(returns.size() - 1));
    return mean / std::max(stdev, kStdEps) * std::sqrt(periods_per_year);
}

double sortino(std::span<const double> returns, double periods_per_year) {
    check_returns(returns);
    double mean = 0.0;
    double downside_ss = 0.0;
    for (double r : returns) {
        mean += r;
        double d = std::min(r, 0.0);
        downside_ss += d * d;
    }
    mean /= static_cast<double>(returns.size());
    double downside_dev = std::sqrt(downside_ss / static_cast<double>(returns.size()));
    return mean / std::max(downside_dev, kStdEps) * std::sqrt(periods_per_year);
}

double mar_ratio(double cagr, double max_drawdown) {
    return cagr / std::max(max_drawdown, kDrawdownEps);
}

std::vector<double> curve_returns(const EquityCurve& curve) {
    check_curve(curve);
    std::vector<double> out;
    out.reserve(curve.size() - 1);
    for (size_t t = 0; t + 1 < curve.size(); ++t)
        out.push_back(curve.values[t + 1] / curve.values[t] - 1.0);
    return out;
}

MetricsReport report(const EquityCurve& curve, double periods_per_year) {
    MetricsReport out;
    out.cagr = cagr(curve);
    out.max_drawdown = max_drawdown(curve);
    auto returns = curve_returns(curve);
    out.sharpe = sharpe(returns, periods_per_year);
    out.sortino = sortino(returns, periods_per_year);
    out.mar = mar_ratio(out.cagr, out.max_drawdown);
    return out;
}

std::string to_json(const MetricsReport& report) {
    nlohmann::ordered_json j{{"cagr", report.cagr},
                             {"max_drawdown", report.max_drawdown},
                             {"sharpe", report.sharpe},
                             {"sortino", report.sortino},
                             {"mar", report.mar}};
    return j.dump(2) + "\n";
}

} // namespace maropt::metrics
