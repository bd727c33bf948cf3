#include "maropt/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <unordered_set>

#include "maropt/csv.hpp"
#include "maropt/errors.hpp"

namespace maropt::data {

namespace {

std::optional<double> parse_double(const std::string& field) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

Date parse_date_field(const std::string& field, size_t row, const std::string& file) {
    auto date = Date::parse(field);
    if (!date)
        raise(Errc::unparsable_date,
              "'" + field + "' in row " + std::to_string(row) + " of " + file);
    return *date;
}

double parse_price_field(const std::string& field, const std::string& ticker,
                         const std::string& date, const std::string& file) {
    auto value = parse_double(field);
    if (!value)
        raise(Errc::unparsable_value,
              "price '" + field + "' for " + ticker + " on " + date + " in " + file);
    if (*value <= 0.0)
        raise(Errc::non_positive_price,
              ticker + " on " + date + " has price " + field + " in " + file);
    return *value;
}

PriceMatrix load_wide(const csv::Table& table, const std::string& file) {
    if (table.header.empty() || table.header[0] != "date")
        raise(Errc::missing_column, "wide price file " + file + " must start with 'date'");
    if (table.header.size() < 2)
        raise(Errc::missing_column, "no ticker columns in " + file);

    std::vector<std::string> tickers(table.header.begin() + 1, table.header.end());
    {
        std::unordered_set<std::string> seen;
        for (const auto& t : tickers)
            if (!seen.insert(t).second)
                raise(Errc::duplicate_ticker, t + " appears twice in header of " + file);
    }

    // date -> full row of prices; empty cells mark the row as incomplete and
    // inner-join alignment drops it.
    std::map<Date, std::vector<double>> by_date;
    size_t row_number = 1;
    for (const auto& row : table.rows) {
        ++row_number;
        if (row.size() != table.header.size())
            raise(Errc::missing_column,
                  "row " + std::to_string(row_number) + " of " + file + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(table.header.size()));
        Date date = parse_date_field(row[0], row_number, file);
        if (by_date.count(date))
            raise(Errc::duplicate_date, row[0] + " appears twice in " + file);

        std::vector<double> prices(tickers.size());
        bool complete = true;
        for (size_t j = 0; j < tickers.size(); ++j) {
            const std::string& field = row[j + 1];
            if (field.empty()) {
                complete = false;
                continue;
            }
            prices[j] = parse_price_field(field, tickers[j], row[0], file);
        }
        if (complete) by_date.emplace(date, std::move(prices));
    }

    PriceMatrix out;
    out.tickers = std::move(tickers);
    out.dates.reserve(by_date.size());
    out.prices.reserve(by_date.size() * out.tickers.size());
    for (auto& [date, prices] : by_date) {
        out.dates.push_back(date);
        out.prices.insert(out.prices.end(), prices.begin(), prices.end());
    }
    return out;
}

PriceMatrix load_long(const csv::Table& table, const std::string& file) {
    int date_col = table.column("date");
    int ticker_col = table.column("ticker");
    int close_col = table.column("close");
    if (date_col < 0) raise(Errc::missing_column, "'date' in " + file);
    if (ticker_col < 0) raise(Errc::missing_column, "'ticker' in " + file);
    if (close_col < 0) raise(Errc::missing_column, "'close' in " + file);

    std::vector<std::string> tickers;  // first-appearance order
    std::map<std::string, std::map<Date, double>> series;
    size_t row_number = 1;
    for (const auto& row : table.rows) {
        ++row_number;
        if (row.size() != table.header.size())
            raise(Errc::missing_column,
                  "row " + std::to_string(row_number) + " of " + file +
                      " has missing fields");
        const std::string& ticker = row[ticker_col];
        if (ticker.empty())
            raise(Errc::unparsable_value,
                  "empty ticker in row " + std::to_string(row_number) + " of " + file);
        Date date = parse_date_field(row[date_col], row_number, file);
        double price = parse_price_field(row[close_col], ticker, row[date_col], file);

        auto [it, inserted] = series.try_emplace(ticker);
        if (inserted) tickers.push_back(ticker);
        if (!it->second.emplace(date, price).second)
            raise(Errc::duplicate_date,
                  row[date_col] + " appears twice for " + ticker + " in " + file);
    }
    if (tickers.empty()) raise(Errc::missing_column, "no data rows in " + file);

    // Shared trading calendar: intersection of every ticker's date set.
    std::vector<Date> shared;
    for (auto& [date, price] : series[tickers.front()]) shared.push_back(date);
    for (size_t i = 1; i < tickers.size(); ++i) {
        const auto& s = series[tickers[i]];
        std::erase_if(shared, [&](Date d) { return !s.count(d); });
    }

    PriceMatrix out;
    out.tickers = std::move(tickers);
    out.dates = std::move(shared);
    out.prices.resize(out.rows() * out.cols());
    for (size_t i = 0; i < out.rows(); ++i)
        for (size_t j = 0; j < out.cols(); ++j)
            out.at(i, j) = series[out.tickers[j]].at(out.dates[i]);
    return out;
}

} // namespace

int PriceMatrix::column(const std::string& ticker) const {
    for (size_t j = 0; j < tickers.size(); ++j)
        if (tickers[j] == ticker) return static_cast<int>(j);
    return -1;
}

PriceFormat parse_price_format(const std::string& name) {
    if (name == "wide") return PriceFormat::wide;
    if (name == "long") return PriceFormat::long_rows;
    raise(Errc::invalid_config, "price format must be 'wide' or 'long', got '" + name + "'");
}

PriceMatrix load_prices(const std::filesystem::path& path, PriceFormat format) {
    csv::Table table = csv::read_file(path);
    return format == PriceFormat::wide ? load_wide(table, path.string())
                                       : load_long(table, path.string());
}

std::vector<AssetMeta> load_meta(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    const std::string file = path.string();

    int ticker_col = table.column("ticker");
    int cap_col = table.column("market_cap");
    int first_col = table.column("first_trade_date");
    if (ticker_col < 0) raise(Errc::missing_column, "'ticker' in " + file);
    if (cap_col < 0) raise(Errc::missing_column, "'market_cap' in " + file);
    if (first_col < 0) raise(Errc::missing_column, "'first_trade_date' in " + file);
    int sector_col = table.column("sector");
    int excluded_col = table.column("excluded");

    std::vector<AssetMeta> out;
    std::unordered_set<std::string> seen;
    size_t row_number = 1;
    for (const auto& row : table.rows) {
        ++row_number;
        if (row.size() != table.header.size())
            raise(Errc::missing_column,
                  "row " + std::to_string(row_number) + " of " + file +
                      " has missing fields");
        AssetMeta meta;
        meta.ticker = row[ticker_col];
        if (meta.ticker.empty())
            raise(Errc::unparsable_value,
                  "empty ticker in row " + std::to_string(row_number) + " of " + file);
        if (!seen.insert(meta.ticker).second)
            raise(Errc::duplicate_ticker, meta.ticker + " in " + file);

        auto cap = parse_double(row[cap_col]);
        if (!cap || *cap < 0.0)
            raise(Errc::unparsable_value,
                  "market_cap '" + row[cap_col] + "' for " + meta.ticker + " in " + file);
        meta.market_cap = *cap;
        meta.first_trade_date = parse_date_field(row[first_col], row_number, file);
        if (sector_col >= 0) meta.sector = row[sector_col];
        if (excluded_col >= 0 && !row[excluded_col].empty()) {
            const std::string& flag = row[excluded_col];
            if (flag == "true") meta.excluded = true;
            else if (flag == "false") meta.excluded = false;
            else raise(Errc::unparsable_value,
                       "excluded flag '" + flag + "' for " + meta.ticker + " in " + file);
        }
        out.push_back(std::move(meta));
    }
    return out;
}

ReturnSeries to_returns(const PriceMatrix& prices) {
    if (prices.rows() < 2)
        raise(Errc::too_few_rows, "need at least 2 price rows to compute returns, have " +
                                      std::to_string(prices.rows()));
    ReturnSeries out;
    out.tickers = prices.tickers;
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    out.returns.resize(out.rows() * out.cols());
    for (size_t t = 0; t + 1 < prices.rows(); ++t)
        for (size_t j = 0; j < prices.cols(); ++j)
            out.returns[t * out.cols() + j] = prices.at(t + 1, j) / prices.at(t, j) - 1.0;
    return out;
}

PriceMatrix slice_period(const PriceMatrix& prices, Date start, Date end) {
    if (!(start < end))
        raise(Errc::invalid_config, "period start " + start.to_string() +
                                        " must precede end " + end.to_string());
    auto lo = std::lower_bound(prices.dates.begin(), prices.dates.end(), start);
    auto hi = std::upper_bound(prices.dates.begin(), prices.dates.end(), end);
    if (lo >= hi)
        raise(Errc::empty_window, "no trading days between " + start.to_string() +
                                      " and " + end.to_string());
    size_t first = static_cast<size_t>(lo - prices.dates.begin());
    size_t count = static_cast<size_t>(hi - lo);

    PriceMatrix out;
    out.tickers = prices.tickers;
    out.dates.assign(lo, hi);
    out.prices.assign(prices.prices.begin() + first * prices.cols(),
                      prices.prices.begin() + (first + count) * prices.cols());
    return out;
}

PriceMatrix select_tickers(const PriceMatrix& prices,
                           std::span<const std::string> tickers) {
    std::vector<int> cols;
    cols.reserve(tickers.size());
    std::unordered_set<std::string> seen;
    for (const auto& ticker : tickers) {
        if (!seen.insert(ticker).second)
            raise(Errc::duplicate_ticker, ticker + " requested twice");
        int col = prices.column(ticker);
        if (col < 0)
            raise(Errc::unknown_ticker, ticker + " has no price column");
        cols.push_back(col);
    }

    PriceMatrix out;
    out.dates = prices.dates;
    out.tickers.assign(tickers.begin(), tickers.end());
    out.prices.resize(out.rows() * out.cols());
    for (size_t i = 0; i < out.rows(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            out.at(i, j) = prices.at(i, static_cast<size_t>(cols[j]));
    return out;
}

} // namespace maropt::data
