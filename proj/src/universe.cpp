#include "maropt/universe.hpp"

#include <algorithm>

#include "maropt/errors.hpp"

namespace maropt::universe {

void ScreeningRule::validate() const {
    for (const auto& ticker : required_tickers)
        if (excluded_tickers.count(ticker))
            raise(Errc::invalid_config,
                  "ticker " + ticker + " is both required and excluded");
    if (top_n_by_cap) {
        if (*top_n_by_cap <= 0)
            raise(Errc::invalid_config, "top_n_by_cap must be positive");
        if (static_cast<size_t>(*top_n_by_cap) < required_tickers.size())
            raise(Errc::invalid_config,
                  "top_n_by_cap smaller than the required ticker set");
    }
    if (min_history_years && *min_history_years < 0.0)
        raise(Errc::invalid_config, "min_history_years must be non-negative");
}

BoundVectors resolve_bounds(const WeightBounds& bounds,
                            std::span<const std::string> tickers) {
    BoundVectors out;
    out.lo.reserve(tickers.size());
    out.hi.reserve(tickers.size());
    for (const auto& ticker : tickers) {
        auto [lo, hi] = bounds.for_ticker(ticker);
        if (lo < 0.0 || hi > 1.0 || lo > hi)
            raise(Errc::invalid_config,
                  "weight bounds for " + ticker + " must satisfy 0 <= min <= max <= 1");
        out.lo.push_back(lo);
        out.hi.push_back(hi);
    }
    return out;
}

FeasibilityReport feasibility_check(const BoundVectors& bounds) {
    FeasibilityReport report;
    for (double lo : bounds.lo) report.min_sum += lo;
    for (double hi : bounds.hi) report.max_sum += hi;
    if (report.min_sum > 1.0) {
        report.ok = false;
        report.violation = "sum of minimum weights " + std::to_string(report.min_sum) +
                           " exceeds 1";
    } else if (report.max_sum < 1.0) {
        report.ok = false;
        report.violation = "sum of maximum weights " + std::to_string(report.max_sum) +
                           " is below 1";
    }
    return report;
}

FeasibilityReport feasibility_check(const WeightBounds& bounds,
                                    std::span<const std::string> tickers) {
    return feasibility_check(resolve_bounds(bounds, tickers));
}

std::vector<std::string> screen(const std::vector<data::AssetMeta>& meta,
                                const ScreeningRule& rule) {
    rule.validate();

    std::vector<const data::AssetMeta*> survivors;
    survivors.reserve(meta.size());
    for (const auto& asset : meta) {
        bool required = rule.required_tickers.count(asset.ticker) > 0;
        if (asset.excluded || rule.excluded_tickers.count(asset.ticker)) {
            if (required)
                raise(Errc::infeasible_rule,
                      "required ticker " + asset.ticker + " is excluded");
            continue;
        }
        if (rule.min_history_years &&
            age_years(asset, rule.as_of) < *rule.min_history_years) {
            if (required)
                raise(Errc::infeasible_rule,
                      "required ticker " + asset.ticker + " is younger than " +
                          std::to_string(*rule.min_history_years) + " years");
            continue;
        }
        survivors.push_back(&asset);
    }

    for (const auto& ticker : rule.required_tickers) {
        bool present = std::any_of(survivors.begin(), survivors.end(),
                                   [&](const auto* a) { return a->ticker == ticker; });
        if (!present)
            raise(Errc::infeasible_rule,
                  "required ticker " + ticker + " is not in the metadata");
    }

    auto by_cap = [](const data::AssetMeta* a, const data::AssetMeta* b) {
        if (a->market_cap != b->market_cap) return a->market_cap > b->market_cap;
        return a->ticker < b->ticker;
    };
    std::sort(survivors.begin(), survivors.end(), by_cap);

    if (rule.top_n_by_cap && survivors.size() > static_cast<size_t>(*rule.top_n_by_cap)) {
        size_t n = static_cast<size_t>(*rule.top_n_by_cap);
        // Required tickers stay in, consuming slots inside the top n; the
        // remaining slots go to the largest caps.
        std::vector<const data::AssetMeta*> kept;
        kept.reserve(n);
        size_t required_count = 0;
        for (const auto* asset : survivors)
            if (rule.required_tickers.count(asset->ticker)) ++required_count;
        size_t free_slots = n - std::min(n, required_count);
        for (const auto* asset : survivors) {
            if (rule.required_tickers.count(asset->ticker)) {
                kept.push_back(asset);
            } else if (free_slots > 0) {
                kept.push_back(asset);
                --free_slots;
            }
        }
        survivors = std::move(kept);
        std::sort(survivors.begin(), survivors.end(), by_cap);
    }

    std::vector<std::string> out;
    out.reserve(survivors.size());
    for (const auto* asset : survivors) out.push_back(asset->ticker);
    return out;
}

} // namespace maropt::universe
