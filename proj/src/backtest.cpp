#include "maropt/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "maropt/errors.hpp"

namespace maropt::backtest {

void Weights::validate() const {
    if (tickers.size() != values.size())
        raise(Errc::ticker_mismatch, "weights carry " + std::to_string(values.size()) +
                                         " values for " + std::to_string(tickers.size()) +
                                         " tickers");
    double sum = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0)
            raise(Errc::unparsable_value,
                  "negative weight for " + tickers[i]);
        sum += values[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        raise(Errc::unparsable_value,
              "weights sum to " + std::to_string(sum) + ", expected 1");
}

Rebalance parse_rebalance(const std::string& name) {
    if (name == "none") return Rebalance::none;
    if (name == "monthly") return Rebalance::monthly;
    if (name == "quarterly") return Rebalance::quarterly;
    if (name == "annual") return Rebalance::annual;
    raise(Errc::invalid_config,
          "rebalance must be none|monthly|quarterly|annual, got '" + name + "'");
}

std::string rebalance_name(Rebalance frequency) {
    switch (frequency) {
        case Rebalance::none: return "none";
        case Rebalance::monthly: return "monthly";
        case Rebalance::quarterly: return "quarterly";
        case Rebalance::annual: return "annual";
    }
    return "none";
}

namespace {

// Identifier of the period a date falls in; a rebalance happens on the
// first trading day whose period differs from the previous day's.
long period_key(Date date, Rebalance frequency) {
    switch (frequency) {
        case Rebalance::annual: return date.year();
        case Rebalance::quarterly:
            return date.year() * 4L + static_cast<long>((date.month() - 1) / 3);
        case Rebalance::monthly:
            return date.year() * 12L + static_cast<long>(date.month() - 1);
        case Rebalance::none: return 0;
    }
    return 0;
}

} // namespace

std::vector<Date> rebalance_dates(std::span<const Date> dates, Rebalance frequency) {
    std::vector<Date> out;
    if (dates.empty()) return out;
    out.push_back(dates.front());
    if (frequency == Rebalance::none) return out;
    for (size_t i = 1; i < dates.size(); ++i)
        if (period_key(dates[i], frequency) != period_key(dates[i - 1], frequency))
            out.push_back(dates[i]);
    return out;
}

metrics::EquityCurve simulate_equity(const data::PriceMatrix& prices,
                                     std::span<const double> weights,
                                     const BacktestConfig& config,
                                     std::vector<RebalanceEvent>* events) {
    const size_t n = prices.cols();
    if (weights.size() != n)
        raise(Errc::ticker_mismatch, "weight vector length " +
                                         std::to_string(weights.size()) +
                                         " does not match " + std::to_string(n) +
                                         " price columns");
    if (prices.rows() < 2)
        raise(Errc::too_few_rows, "backtest needs at least 2 price rows");

    auto rebalances = rebalance_dates(prices.dates, config.rebalance);
    size_t next_rebalance = 0;

    metrics::EquityCurve curve;
    curve.dates = prices.dates;
    curve.values.resize(prices.rows());

    std::vector<double> holdings(n, 0.0);
    double value = config.initial_value;
    for (size_t t = 0; t < prices.rows(); ++t) {
        auto px = prices.row(t);
        if (t > 0) {
            value = 0.0;
            for (size_t j = 0; j < n; ++j) value += holdings[j] * px[j];
        }
        if (next_rebalance < rebalances.size() &&
            prices.dates[t] == rebalances[next_rebalance]) {
            ++next_rebalance;
            double traded = 0.0;
            for (size_t j = 0; j < n; ++j)
                traded += std::abs(value * weights[j] - holdings[j] * px[j]);
            double cost = config.transaction_cost_bps * traded / 10000.0;
            double turnover = value > 0.0 ? traded / value : 0.0;
            value -= cost;
            for (size_t j = 0; j < n; ++j)
                holdings[j] = value * weights[j] / px[j];
            if (events) events->push_back({prices.dates[t], turnover, cost});
        }
        curve.values[t] = value;
    }
    return curve;
}

BacktestResult run_backtest(const data::PriceMatrix& prices, const Weights& weights,
                            const BacktestConfig& config) {
    weights.validate();
    if (weights.size() != prices.cols())
        raise(Errc::ticker_mismatch, "weights cover " + std::to_string(weights.size()) +
                                         " tickers, prices have " +
                                         std::to_string(prices.cols()));
    // Align by name so column order never matters.
    std::unordered_map<std::string, double> by_ticker;
    for (size_t i = 0; i < weights.size(); ++i)
        by_ticker.emplace(weights.tickers[i], weights.values[i]);
    std::vector<double> aligned(prices.cols());
    for (size_t j = 0; j < prices.cols(); ++j) {
        auto it = by_ticker.find(prices.tickers[j]);
        if (it == by_ticker.end())
            raise(Errc::ticker_mismatch,
                  "no weight given for price column " + prices.tickers[j]);
        aligned[j] = it->second;
    }

    BacktestResult result;
    result.curve = simulate_equity(prices, aligned, config, &result.rebalances);
    result.report = metrics::report(result.curve);
    return result;
}

BacktestResult buy_and_hold_benchmark(const data::PriceMatrix& prices,
                                      const std::string& ticker,
                                      double initial_value) {
    if (prices.column(ticker) < 0)
        raise(Errc::unknown_ticker, ticker + " is not a price column");
    Weights weights;
    weights.tickers = prices.tickers;
    weights.values.assign(prices.cols(), 0.0);
    weights.values[static_cast<size_t>(prices.column(ticker))] = 1.0;
    BacktestConfig config;
    config.rebalance = Rebalance::none;
    config.initial_value = initial_value;
    return run_backtest(prices, weights, config);
}

} // namespace maropt::backtest
