// maropt: screen an asset universe, optimize portfolio weights with a
// particle swarm, backtest with periodic rebalancing, and simulate a
// leveraged margin account. One config file drives every subcommand.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "maropt/cli.hpp"

namespace {

struct Args {
    std::string config_path;
    std::string weights_path;
    maropt::cli::Overrides overrides;
};

void add_common_options(CLI::App* cmd, Args& args) {
    cmd->add_option("config", args.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.overrides.seed, "override [pso] seed");
    cmd->add_option("--start", args.overrides.start, "override [period] start");
    cmd->add_option("--end", args.overrides.end, "override [period] end");
    cmd->add_option("--objective", args.overrides.objective, "override [objective] name");
    cmd->add_option("--rebalance", args.overrides.rebalance,
                    "override [backtest] rebalance");
    cmd->add_option("--outdir", args.overrides.output_dir,
                    "override [paths] output_dir");
}

void add_weights_option(CLI::App* cmd, Args& args) {
    cmd->add_option("--weights", args.weights_path, "weights CSV (ticker,weight)")
        ->required()
        ->check(CLI::ExistingFile);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"portfolio screening, swarm optimization, backtesting and "
                 "margin simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(maropt::cli::kToolName) + " " +
                                          maropt::cli::kToolVersion);

    Args args;
    auto* filter = app.add_subcommand("filter", "screen the asset universe");
    add_common_options(filter, args);
    auto* optimize = app.add_subcommand("optimize", "run the swarm optimizer");
    add_common_options(optimize, args);
    auto* backtest = app.add_subcommand("backtest", "backtest a weights file");
    add_common_options(backtest, args);
    add_weights_option(backtest, args);
    auto* margin = app.add_subcommand("margin", "simulate a leveraged account");
    add_common_options(margin, args);
    add_weights_option(margin, args);
    auto* report = app.add_subcommand("report", "backtest + margin + comparison");
    add_common_options(report, args);
    add_weights_option(report, args);

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = maropt::cli::load_run_config(args.config_path, args.overrides);
        if (filter->parsed()) return maropt::cli::cmd_filter(config);
        if (optimize->parsed()) return maropt::cli::cmd_optimize(config);
        if (backtest->parsed()) return maropt::cli::cmd_backtest(config, args.weights_path);
        if (margin->parsed()) return maropt::cli::cmd_margin(config, args.weights_path);
        if (report->parsed()) return maropt::cli::cmd_report(config, args.weights_path);
    } catch (const maropt::Error& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return maropt::cli::exit_code_for(error.code());
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return maropt::cli::kExitDataError;
    }
    return 0;
}
