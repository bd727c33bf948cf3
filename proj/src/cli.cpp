#include "maropt/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "maropt/csv.hpp"

namespace maropt::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::invalid_config:
        case Errc::infeasible_rule:
        case Errc::infeasible_bounds:
            return kExitConfigError;
        default:
            return kExitDataError;
    }
}

namespace {

// Full-precision, locale-independent formatting keeps output files
// byte-identical across runs.
std::string fmt_full(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string fmt_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

std::string fmt_ratio(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open())
        raise(Errc::file_not_found, "cannot write " + path.string());
    out << contents;
}

void write_weights_csv(const fs::path& path, const backtest::Weights& weights) {
    std::string out = "ticker,weight\n";
    for (size_t i = 0; i < weights.size(); ++i)
        out += weights.tickers[i] + "," + fmt_full(weights.values[i]) + "\n";
    write_file(path, out);
}

void write_history_csv(const fs::path& path, const std::vector<double>& history) {
    std::string out = "iteration,best_fitness\n";
    for (size_t i = 0; i < history.size(); ++i)
        out += std::to_string(i) + "," + fmt_full(history[i]) + "\n";
    write_file(path, out);
}

void write_equity_csv(const fs::path& path, const metrics::EquityCurve& curve) {
    std::string out = "date,value,log10_value\n";
    for (size_t i = 0; i < curve.size(); ++i)
        out += curve.dates[i].to_string() + "," + fmt_full(curve.values[i]) + "," +
               fmt_full(std::log10(curve.values[i])) + "\n";
    write_file(path, out);
}

void write_rebalance_events_csv(const fs::path& path,
                                const std::vector<backtest::RebalanceEvent>& events) {
    std::string out = "date,turnover,cost\n";
    for (const auto& event : events)
        out += event.date.to_string() + "," + fmt_full(event.turnover) + "," +
               fmt_full(event.cost) + "\n";
    write_file(path, out);
}

void write_margin_events_csv(const fs::path& path,
                             const std::vector<margin::MarginEvent>& events) {
    std::string out = "date,position_value,equity,equity_ratio,action\n";
    for (const auto& event : events)
        out += event.date.to_string() + "," + fmt_full(event.position_value) + "," +
               fmt_full(event.equity) + "," + fmt_full(event.equity_ratio) + "," +
               margin::margin_action_name(event.action) + "\n";
    write_file(path, out);
}

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string describe_weights(const backtest::Weights& weights, size_t max_listed = 10) {
    std::vector<size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return weights.values[a] > weights.values[b];
    });
    std::string out;
    size_t listed = 0;
    for (size_t idx : order) {
        if (weights.values[idx] < 1e-6) break;
        if (listed == max_listed) {
            out += ", ...";
            break;
        }
        if (listed) out += ", ";
        out += weights.tickers[idx] + " " + fmt_pct(weights.values[idx]);
        ++listed;
    }
    return out.empty() ? "(none)" : out;
}

std::string build_comparison(const RunConfig& config, const backtest::Weights& weights,
                             const backtest::BacktestResult& portfolio,
                             const std::optional<backtest::BacktestResult>& benchmark) {
    const auto& p = portfolio.report;
    std::string out = "\n";
    auto line = [&](const std::string& label, const std::string& a,
                    const std::string& b) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "  %-22s %-34s %s\n", label.c_str(), a.c_str(),
                      b.c_str());
        out += buf;
    };
    line("", "Portfolio",
         benchmark ? "Benchmark (" + config.benchmark_ticker + ")" : "");
    line("Period", config.start.to_string() + " to " + config.end.to_string(), "");
    line("Rebalancing", backtest::rebalance_name(config.backtest.rebalance),
         benchmark ? "none" : "");
    line("Weights", describe_weights(weights),
         benchmark ? config.benchmark_ticker + " 100.00%" : "");
    auto metric = [&](const std::string& label, double value,
                      double bench_value, bool percent) {
        line(label, percent ? fmt_pct(value) : fmt_ratio(value),
             benchmark ? (percent ? fmt_pct(bench_value) : fmt_ratio(bench_value))
                       : std::string());
    };
    const auto b = benchmark ? benchmark->report : metrics::MetricsReport{};
    metric("CAGR", p.cagr, b.cagr, true);
    metric("Maximum drawdown", p.max_drawdown, b.max_drawdown, true);
    metric("Sharpe ratio", p.sharpe, b.sharpe, false);
    metric("Sortino ratio", p.sortino, b.sortino, false);
    metric("CAGR/MaxDD (MAR)", p.mar, b.mar, false);
    out += "\n";
    return out;
}

void print_comparison(const RunConfig& config, const backtest::Weights& weights,
                      const backtest::BacktestResult& portfolio,
                      const std::optional<backtest::BacktestResult>& benchmark) {
    std::fputs(build_comparison(config, weights, portfolio, benchmark).c_str(), stdout);
}

ordered_json manifest_base(const RunConfig& config) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config_hash"] = config.config_hash;
    j["seed"] = config.pso.seed;
    j["period"] = {{"start", config.start.to_string()}, {"end", config.end.to_string()}};
    j["objective"] = config.objective;
    j["backtest"] = {{"rebalance", backtest::rebalance_name(config.backtest.rebalance)},
                     {"initial_value", config.backtest.initial_value},
                     {"transaction_cost_bps", config.backtest.transaction_cost_bps}};
    j["pso"] = {{"particles", config.pso.n_particles},
                {"max_iters", config.pso.max_iters},
                {"inertia", config.pso.inertia},
                {"cognitive", config.pso.cognitive},
                {"social", config.pso.social},
                {"stagnation_iters", config.pso.stagnation_iters},
                {"v_max", config.pso.v_max},
                {"parallel", config.pso.parallel},
                {"max_assets", config.max_assets}};
    return j;
}

struct LoadedWindow {
    data::PriceMatrix all;       // every column in the file, period-sliced
    data::PriceMatrix selected;  // restricted to the requested tickers
};

LoadedWindow load_window(const RunConfig& config,
                         std::span<const std::string> tickers) {
    if (config.prices_path.empty())
        raise(Errc::invalid_config, "[paths] prices is required for this command");
    auto full = data::load_prices(config.prices_path, config.prices_format);
    LoadedWindow window;
    window.all = data::slice_period(full, config.start, config.end);
    window.selected = data::select_tickers(window.all, tickers);
    return window;
}

std::optional<backtest::BacktestResult> run_benchmark(const RunConfig& config,
                                                      const data::PriceMatrix& window_all) {
    if (config.benchmark_ticker.empty()) return std::nullopt;
    std::vector<std::string> one{config.benchmark_ticker};
    auto bench_prices = data::select_tickers(window_all, one);
    return backtest::buy_and_hold_benchmark(bench_prices, config.benchmark_ticker,
                                            config.backtest.initial_value);
}

struct PreparedBacktest {
    backtest::Weights weights;
    LoadedWindow window;
    backtest::BacktestResult portfolio;
    std::optional<backtest::BacktestResult> benchmark;
};

PreparedBacktest prepare_backtest(const RunConfig& config,
                                  const fs::path& weights_path) {
    PreparedBacktest prepared;
    prepared.weights = load_weights_csv(weights_path);
    prepared.window = load_window(config, prepared.weights.tickers);
    prepared.portfolio =
        backtest::run_backtest(prepared.window.selected, prepared.weights, config.backtest);
    prepared.benchmark = run_benchmark(config, prepared.window.all);
    return prepared;
}

void write_backtest_outputs(const RunConfig& config, const PreparedBacktest& prepared) {
    fs::create_directories(config.output_dir);
    write_equity_csv(config.output_dir / "equity.csv", prepared.portfolio.curve);
    write_file(config.output_dir / "metrics.json",
               metrics::to_json(prepared.portfolio.report));
    write_rebalance_events_csv(config.output_dir / "rebalance_events.csv",
                               prepared.portfolio.rebalances);
    if (prepared.benchmark) {
        write_equity_csv(config.output_dir / "benchmark_equity.csv",
                         prepared.benchmark->curve);
        write_file(config.output_dir / "benchmark_metrics.json",
                   metrics::to_json(prepared.benchmark->report));
    }
}

void write_margin_outputs(const RunConfig& config, const PreparedBacktest& prepared) {
    const auto& margin_config = *config.margin;
    auto sim = margin::simulate_margin(prepared.portfolio.curve, margin_config);
    fs::create_directories(config.output_dir);
    write_equity_csv(config.output_dir / "margin_equity.csv", sim.equity);
    write_margin_events_csv(config.output_dir / "margin_events.csv", sim.events);

    double realized_mdd = prepared.portfolio.report.max_drawdown;
    double safe = margin::max_safe_leverage(realized_mdd, margin_config.maintenance_ratio);
    size_t calls = 0, liquidations = 0, exhausted = 0;
    for (const auto& event : sim.events) {
        if (event.action == margin::MarginAction::call_issued) ++calls;
        if (event.action == margin::MarginAction::liquidated) ++liquidations;
        if (event.action == margin::MarginAction::exhausted) ++exhausted;
    }
    std::printf("margin: leverage %.2f, maintenance %.2f, policy %s\n",
                margin_config.leverage, margin_config.maintenance_ratio,
                margin::call_policy_name(margin_config.call_policy).c_str());
    std::printf("margin: %zu call(s), %zu liquidation(s), %zu exhaustion(s)\n", calls,
                liquidations, exhausted);
    std::printf("margin: realized max drawdown %s -> max safe leverage %.4f\n",
                fmt_pct(realized_mdd).c_str(), safe);
}

} // namespace

backtest::Weights load_weights_csv(const fs::path& path) {
    auto table = csv::read_file(path);
    int ticker_col = table.column("ticker");
    int weight_col = table.column("weight");
    if (ticker_col < 0) raise(Errc::missing_column, "'ticker' in " + path.string());
    if (weight_col < 0) raise(Errc::missing_column, "'weight' in " + path.string());

    backtest::Weights weights;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            raise(Errc::missing_column, "short row in " + path.string());
        const std::string& ticker = row[ticker_col];
        if (ticker.empty())
            raise(Errc::unparsable_value, "empty ticker in " + path.string());
        if (std::find(weights.tickers.begin(), weights.tickers.end(), ticker) !=
            weights.tickers.end())
            raise(Errc::duplicate_ticker, ticker + " in " + path.string());
        char* end = nullptr;
        double value = std::strtod(row[weight_col].c_str(), &end);
        if (end != row[weight_col].c_str() + row[weight_col].size())
            raise(Errc::unparsable_value,
                  "weight '" + row[weight_col] + "' for " + ticker);
        weights.tickers.push_back(ticker);
        weights.values.push_back(value);
    }
    weights.validate();
    return weights;
}

int cmd_filter(const RunConfig& config) {
    if (config.metadata_path.empty())
        raise(Errc::invalid_config, "[paths] metadata is required for filter");
    auto meta = data::load_meta(config.metadata_path);
    auto tickers = universe::screen(meta, config.screening);
    if (tickers.empty())
        raise(Errc::empty_window, "no assets after screening");

    std::map<std::string, const data::AssetMeta*> by_ticker;
    for (const auto& m : meta) by_ticker[m.ticker] = &m;

    std::string out = "ticker,cap_rank,market_cap,age_years\n";
    std::printf("  %-8s %-8s %16s %10s\n", "ticker", "rank", "market_cap", "age_yrs");
    for (size_t i = 0; i < tickers.size(); ++i) {
        const auto* m = by_ticker.at(tickers[i]);
        double age = universe::age_years(*m, config.screening.as_of);
        out += tickers[i] + "," + std::to_string(i + 1) + "," + fmt_full(m->market_cap) +
               "," + fmt_full(age) + "\n";
        std::printf("  %-8s %-8zu %16.4g %10.2f\n", tickers[i].c_str(), i + 1,
                    m->market_cap, age);
    }
    fs::create_directories(config.output_dir);
    write_file(config.output_dir / "universe.csv", out);
    std::printf("%zu asset(s) after screening; wrote %s\n", tickers.size(),
                (config.output_dir / "universe.csv").string().c_str());
    return kExitOk;
}

int cmd_optimize(const RunConfig& config) {
    if (config.metadata_path.empty())
        raise(Errc::invalid_config, "[paths] metadata is required for optimize");
    auto meta = data::load_meta(config.metadata_path);
    auto tickers = universe::screen(meta, config.screening);
    if (tickers.empty())
        raise(Errc::empty_window, "no assets after screening");

    auto window = load_window(config, tickers);
    auto bound_vectors = universe::resolve_bounds(config.bounds, window.selected.tickers);
    auto feasibility = universe::feasibility_check(bound_vectors);
    if (!feasibility.ok) raise(Errc::infeasible_bounds, feasibility.violation);

    auto objective = pso::make_objective(config.objective, window.selected,
                                         config.backtest);
    auto result = pso::optimize(window.selected, objective, config.bounds, config.pso);
    if (!std::isfinite(result.fitness)) {
        std::fprintf(stderr, "error: optimization produced no feasible solution\n");
        return kExitOptimizationFailed;
    }

    auto final_weights = result.weights;
    double final_fitness = result.fitness;
    bool sparsified = false;
    if (config.max_assets > 0) {
        final_weights = pso::sparsify(final_weights, config.max_assets, config.bounds);
        final_fitness = objective(final_weights.values);
        sparsified = true;
    }

    fs::create_directories(config.output_dir);
    write_weights_csv(config.output_dir / "weights.csv", final_weights);
    write_history_csv(config.output_dir / "history.csv", result.history);

    ordered_json manifest = manifest_base(config);
    manifest["window"] = {{"first_date", window.selected.dates.front().to_string()},
                          {"last_date", window.selected.dates.back().to_string()},
                          {"trading_days", window.selected.rows()},
                          {"assets", window.selected.cols()}};
    manifest["universe"] = window.selected.tickers;
    manifest["iterations"] = result.iterations;
    manifest["best_fitness"] = result.fitness;
    if (sparsified) manifest["sparsified_fitness"] = final_fitness;
    manifest["generated_at"] = timestamp_now();  // excluded from determinism checks
    write_file(config.output_dir / "manifest.json", manifest.dump(2) + "\n");

    std::printf("optimized %zu assets over %zu trading days: %s fitness %.6f after %d "
                "iteration(s)\n",
                window.selected.cols(), window.selected.rows(),
                config.objective.c_str(), final_fitness, result.iterations);

    auto portfolio = backtest::run_backtest(window.selected, final_weights,
                                            config.backtest);
    auto benchmark = run_benchmark(config, window.all);
    print_comparison(config, final_weights, portfolio, benchmark);
    std::printf("wrote weights.csv, history.csv, manifest.json under %s\n",
                config.output_dir.string().c_str());
    return kExitOk;
}

int cmd_backtest(const RunConfig& config, const fs::path& weights_path) {
    auto prepared = prepare_backtest(config, weights_path);
    write_backtest_outputs(config, prepared);
    auto table = build_comparison(config, prepared.weights, prepared.portfolio,
                                  prepared.benchmark);
    write_file(config.output_dir / "comparison.txt", table);
    std::fputs(table.c_str(), stdout);
    std::printf("wrote equity.csv, metrics.json, rebalance_events.csv, comparison.txt "
                "under %s\n",
                config.output_dir.string().c_str());
    return kExitOk;
}

int cmd_margin(const RunConfig& config, const fs::path& weights_path) {
    if (!config.margin)
        raise(Errc::invalid_config, "[margin] section is required for margin");
    auto prepared = prepare_backtest(config, weights_path);
    write_margin_outputs(config, prepared);
    std::printf("wrote margin_equity.csv, margin_events.csv under %s\n",
                config.output_dir.string().c_str());
    return kExitOk;
}

int cmd_report(const RunConfig& config, const fs::path& weights_path) {
    auto prepared = prepare_backtest(config, weights_path);
    write_backtest_outputs(config, prepared);
    auto table = build_comparison(config, prepared.weights, prepared.portfolio,
                                  prepared.benchmark);
    write_file(config.output_dir / "comparison.txt", table);
    std::fputs(table.c_str(), stdout);
    if (config.margin) write_margin_outputs(config, prepared);
    std::printf("wrote report artifacts under %s\n", config.output_dir.string().c_str());
    return kExitOk;
}

} // namespace maropt::cli
