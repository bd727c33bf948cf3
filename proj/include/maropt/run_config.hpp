#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "maropt/backtest.hpp"
#include "maropt/margin.hpp"
#include "maropt/market_data.hpp"
#include "maropt/pso.hpp"
#include "maropt/universe.hpp"

namespace maropt::cli {

inline constexpr const char* kToolName = "maropt";
inline constexpr const char* kToolVersion = "0.1.0";

// Everything a run needs, read from one sectioned key=value file.
// docs/config.md is the key reference; unknown keys are rejected.
struct RunConfig {
    std::filesystem::path prices_path;
    data::PriceFormat prices_format = data::PriceFormat::wide;
    std::filesystem::path metadata_path;
    std::filesystem::path output_dir = "out";

    Date start;
    Date end;

    universe::ScreeningRule screening;  // as_of defaults to `start`
    universe::WeightBounds bounds;
    backtest::BacktestConfig backtest;
    pso::PsoParams pso;
    int max_assets = 0;  // 0 = keep the full optimized vector
    std::string objective = "mar";
    std::string benchmark_ticker;
    std::optional<margin::MarginConfig> margin;

    std::string config_hash;  // over file bytes and applied overrides
};

// Command-line overrides folded into the config (and its hash).
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> start;
    std::optional<std::string> end;
    std::optional<std::string> objective;
    std::optional<std::string> rebalance;
    std::optional<std::string> output_dir;
};

RunConfig load_run_config(const std::filesystem::path& path,
                          const Overrides& overrides = {});

} // namespace maropt::cli
