#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "maropt/dates.hpp"

namespace maropt::data {

// Dense matrix of aligned daily closes: one row per date, one column per
// ticker. Immutable after construction; alignment guarantees no gaps.
struct PriceMatrix {
    std::vector<Date> dates;            // strictly increasing
    std::vector<std::string> tickers;   // column order
    std::vector<double> prices;         // row-major, rows() x cols(), all > 0

    size_t rows() const { return dates.size(); }
    size_t cols() const { return tickers.size(); }

    double at(size_t row, size_t col) const { return prices[row * cols() + col]; }
    double& at(size_t row, size_t col) { return prices[row * cols() + col]; }

    std::span<const double> row(size_t r) const {
        return {prices.data() + r * cols(), cols()};
    }

    // Column index for a ticker, -1 when absent.
    int column(const std::string& ticker) const;
};

struct AssetMeta {
    std::string ticker;
    double market_cap = 0.0;
    Date first_trade_date;
    std::string sector;     // empty = unknown
    bool excluded = false;
};

// Simple per-period returns, r[t][j] = p[t+1][j] / p[t][j] - 1,
// stamped with the date the return realizes.
struct ReturnSeries {
    std::vector<Date> dates;            // source dates minus the first
    std::vector<std::string> tickers;
    std::vector<double> returns;        // row-major, each > -1

    size_t rows() const { return dates.size(); }
    size_t cols() const { return tickers.size(); }
    double at(size_t row, size_t col) const { return returns[row * cols() + col]; }
};

enum class PriceFormat { wide, long_rows };

PriceFormat parse_price_format(const std::string& name);

// Loads closes from a wide (`date,TICKER1,...`) or long (`date,ticker,close`)
// CSV and inner-joins onto the dates where every ticker has a price.
// Rows come back sorted by date. Prices must be positive.
PriceMatrix load_prices(const std::filesystem::path& path, PriceFormat format);

// Metadata CSV: `ticker,market_cap,first_trade_date[,sector][,excluded]`.
std::vector<AssetMeta> load_meta(const std::filesystem::path& path);

ReturnSeries to_returns(const PriceMatrix& prices);

// Keeps rows with start <= date <= end; non-trading endpoints snap inward.
PriceMatrix slice_period(const PriceMatrix& prices, Date start, Date end);

// Column subset in the requested order. Unknown ticker -> UnknownTicker.
PriceMatrix select_tickers(const PriceMatrix& prices,
                           std::span<const std::string> tickers);

} // namespace maropt::data
