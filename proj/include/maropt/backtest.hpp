#pragma once

#include <span>
#include <string>
#include <vector>

#include "maropt/market_data.hpp"
#include "maropt/metrics.hpp"

namespace maropt::backtest {

// Target allocation over a named universe; non-negative, sums to 1.
struct Weights {
    std::vector<std::string> tickers;
    std::vector<double> values;

    size_t size() const { return values.size(); }

    // Throws when negative, length-mismatched, or not summing to 1 (1e-9).
    void validate() const;
};

enum class Rebalance { none, monthly, quarterly, annual };

Rebalance parse_rebalance(const std::string& name);
std::string rebalance_name(Rebalance frequency);

struct BacktestConfig {
    Rebalance rebalance = Rebalance::annual;
    double initial_value = 1.0;
    double transaction_cost_bps = 0.0;  // per unit of traded value
};

struct RebalanceEvent {
    Date date;
    double turnover = 0.0;  // traded value / portfolio value
    double cost = 0.0;      // currency units deducted
};

struct BacktestResult {
    metrics::EquityCurve curve;
    metrics::MetricsReport report;
    std::vector<RebalanceEvent> rebalances;
};

// First trading day of the series plus the first trading day of each new
// period (year / quarter / month); `none` keeps only the first day.
std::vector<Date> rebalance_dates(std::span<const Date> dates, Rebalance frequency);

// Fixed-target-weight simulation: holdings reset to V*w/p on each
// rebalance date, drift with prices in between. The weight span must be
// index-aligned with prices.tickers. Optional event sink for turnover.
metrics::EquityCurve simulate_equity(const data::PriceMatrix& prices,
                                     std::span<const double> weights,
                                     const BacktestConfig& config,
                                     std::vector<RebalanceEvent>* events = nullptr);

// Aligns weights to the price columns by name (exact same ticker set
// required), simulates, and attaches the metrics report.
BacktestResult run_backtest(const data::PriceMatrix& prices, const Weights& weights,
                            const BacktestConfig& config);

// Weight 1 on a single ticker, never rebalanced.
BacktestResult buy_and_hold_benchmark(const data::PriceMatrix& prices,
                                      const std::string& ticker,
                                      double initial_value = 1.0);

} // namespace maropt::backtest
