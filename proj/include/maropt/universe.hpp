#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "maropt/dates.hpp"
#include "maropt/market_data.hpp"

namespace maropt::universe {

// Pre-assignment screening: narrows the asset universe before any weight
// is optimized. Unset criteria are skipped.
struct ScreeningRule {
    std::optional<int> top_n_by_cap;
    std::optional<double> min_history_years;
    std::set<std::string> excluded_tickers;
    std::set<std::string> required_tickers;  // pinned through every filter
    Date as_of;                              // reference date for age

    // Throws InvalidConfig when the rule contradicts itself.
    void validate() const;
};

// Per-asset weight box constraints. Tickers without an explicit entry get
// the default range.
struct WeightBounds {
    double default_min = 0.0;
    double default_max = 1.0;
    std::map<std::string, std::pair<double, double>> per_ticker;

    std::pair<double, double> for_ticker(const std::string& ticker) const {
        auto it = per_ticker.find(ticker);
        return it != per_ticker.end() ? it->second
                                      : std::make_pair(default_min, default_max);
    }
};

// Bounds resolved over an ordered universe, index-aligned with it.
struct BoundVectors {
    std::vector<double> lo;
    std::vector<double> hi;

    size_t size() const { return lo.size(); }

    static BoundVectors unconstrained(size_t n) {
        return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
    }
};

BoundVectors resolve_bounds(const WeightBounds& bounds,
                            std::span<const std::string> tickers);

struct FeasibilityReport {
    bool ok = true;
    double min_sum = 0.0;
    double max_sum = 0.0;
    std::string violation;  // first violated inequality, empty when ok
};

// Checks sum(min) <= 1 <= sum(max) over the active tickers.
FeasibilityReport feasibility_check(const WeightBounds& bounds,
                                    std::span<const std::string> tickers);
FeasibilityReport feasibility_check(const BoundVectors& bounds);

// Applies the rule and returns survivors ordered by market cap descending
// (ties broken by ticker). Throws InfeasibleRule when a required ticker
// fails the age or exclusion filters.
std::vector<std::string> screen(const std::vector<data::AssetMeta>& meta,
                                const ScreeningRule& rule);

inline double age_years(const data::AssetMeta& meta, Date as_of) {
    return years_between(meta.first_trade_date, as_of);
}

} // namespace maropt::universe
