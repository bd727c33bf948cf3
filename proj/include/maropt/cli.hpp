#pragma once

#include <filesystem>

#include "maropt/errors.hpp"
#include "maropt/run_config.hpp"

namespace maropt::cli {

// Stable exit-code contract: 0 success, 2 config error, 3 data error,
// 4 optimization failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitOptimizationFailed = 4;

int exit_code_for(Errc code);

// Subcommand bodies; they raise maropt::Error and the caller maps it.
int cmd_filter(const RunConfig& config);
int cmd_optimize(const RunConfig& config);
int cmd_backtest(const RunConfig& config, const std::filesystem::path& weights_path);
int cmd_margin(const RunConfig& config, const std::filesystem::path& weights_path);
int cmd_report(const RunConfig& config, const std::filesystem::path& weights_path);

// Weights CSV (`ticker,weight`) as written by cmd_optimize.
backtest::Weights load_weights_csv(const std::filesystem::path& path);

} // namespace maropt::cli
