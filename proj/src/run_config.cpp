#include "maropt/run_config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "maropt/csv.hpp"
#include "maropt/errors.hpp"

namespace maropt::cli {

namespace {

struct ParsedFile {
    // section -> key -> value, file order irrelevant
    std::map<std::string, std::map<std::string, std::string>> sections;
};

ParsedFile parse_ini(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open())
        raise(Errc::file_not_found, "cannot open config file " + path.string());

    ParsedFile parsed;
    std::string section;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string text = csv::trim(line);
        if (text.empty() || text[0] == '#') continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                raise(Errc::invalid_config, "malformed section header at line " +
                                                std::to_string(line_number) + " of " +
                                                path.string());
            section = csv::trim(text.substr(1, text.size() - 2));
            parsed.sections[section];
            continue;
        }
        size_t eq = text.find('=');
        if (eq == std::string::npos)
            raise(Errc::invalid_config, "expected key = value at line " +
                                            std::to_string(line_number) + " of " +
                                            path.string());
        std::string key = csv::trim(text.substr(0, eq));
        std::string value = csv::trim(text.substr(eq + 1));
        if (key.empty())
            raise(Errc::invalid_config, "empty key at line " +
                                            std::to_string(line_number) + " of " +
                                            path.string());
        if (!parsed.sections[section].emplace(key, value).second)
            raise(Errc::invalid_config, "duplicate key '" + key + "' in section [" +
                                            section + "] of " + path.string());
    }
    return parsed;
}

// Pulls typed values out of one section, tracking which keys were read so
// leftovers can be reported as typos.
class Section {
public:
    Section(const ParsedFile& file, const std::string& name) : name_(name) {
        auto it = file.sections.find(name);
        if (it != file.sections.end()) entries_ = &it->second;
    }

    std::optional<std::string> get(const std::string& key) {
        if (!entries_) return std::nullopt;
        auto it = entries_->find(key);
        if (it == entries_->end()) return std::nullopt;
        used_.insert(key);
        if (it->second.empty()) return std::nullopt;
        return it->second;
    }

    std::optional<double> get_double(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
        if (ec != std::errc{} || ptr != raw->data() + raw->size())
            raise(Errc::invalid_config, err_key(key) + " is not a number: '" + *raw + "'");
        return value;
    }

    std::optional<long long> get_int(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        long long value = 0;
        auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
        if (ec != std::errc{} || ptr != raw->data() + raw->size())
            raise(Errc::invalid_config, err_key(key) + " is not an integer: '" + *raw + "'");
        return value;
    }

    std::optional<bool> get_bool(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        if (*raw == "true") return true;
        if (*raw == "false") return false;
        raise(Errc::invalid_config, err_key(key) + " must be true or false");
    }

    std::optional<Date> get_date(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        auto date = Date::parse(*raw);
        if (!date)
            raise(Errc::invalid_config,
                  err_key(key) + " is not an ISO date (YYYY-MM-DD): '" + *raw + "'");
        return date;
    }

    std::vector<std::string> get_list(const std::string& key) {
        auto raw = get(key);
        std::vector<std::string> out;
        if (!raw) return out;
        for (const auto& item : csv::split_line(*raw))
            if (!item.empty()) out.push_back(item);
        return out;
    }

    bool present() const { return entries_ != nullptr; }

    // Per-ticker overrides like `min.AAPL`; collects every matching key.
    std::map<std::string, double> get_prefixed(const std::string& prefix) {
        std::map<std::string, double> out;
        if (!entries_) return out;
        for (const auto& [key, value] : *entries_) {
            if (key.rfind(prefix + ".", 0) != 0) continue;
            std::string ticker = key.substr(prefix.size() + 1);
            if (ticker.empty())
                raise(Errc::invalid_config, err_key(key) + " has no ticker suffix");
            out[ticker] = *get_double(key);
        }
        return out;
    }

    void reject_unknown_keys() const {
        if (!entries_) return;
        for (const auto& [key, value] : *entries_)
            if (!used_.count(key))
                raise(Errc::invalid_config, "unknown key '" + key + "' in section [" +
                                                name_ + "]");
    }

private:
    std::string err_key(const std::string& key) const {
        return "[" + name_ + "] " + key;
    }

    const std::map<std::string, std::string>* entries_ = nullptr;
    std::set<std::string> used_;
    std::string name_;
};

std::uint64_t fnv1a(std::uint64_t hash, std::string_view bytes) {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hash_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::uint64_t hash = fnv1a(14695981039346656037ULL, buffer.str());
    auto mix = [&](const char* key, const std::optional<std::string>& value) {
        if (value) hash = fnv1a(hash, std::string(key) + "=" + *value);
    };
    if (overrides.seed) hash = fnv1a(hash, "seed=" + std::to_string(*overrides.seed));
    mix("start", overrides.start);
    mix("end", overrides.end);
    mix("objective", overrides.objective);
    mix("rebalance", overrides.rebalance);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

Date parse_override_date(const std::string& text, const char* what) {
    auto date = Date::parse(text);
    if (!date)
        raise(Errc::invalid_config,
              std::string("--") + what + " is not an ISO date: '" + text + "'");
    return *date;
}

} // namespace

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
    ParsedFile file = parse_ini(path);

    for (const auto& [name, entries] : file.sections) {
        static const std::set<std::string> known{
            "paths", "period", "screening", "bounds", "backtest",
            "pso",   "objective", "benchmark", "margin"};
        if (!name.empty() && !known.count(name))
            raise(Errc::invalid_config, "unknown section [" + name + "]");
        if (name.empty() && !entries.empty())
            raise(Errc::invalid_config, "keys before the first section header");
    }

    RunConfig config;

    Section paths(file, "paths");
    if (auto v = paths.get("prices")) config.prices_path = *v;
    if (auto v = paths.get("prices_format"))
        config.prices_format = data::parse_price_format(*v);
    if (auto v = paths.get("metadata")) config.metadata_path = *v;
    if (auto v = paths.get("output_dir")) config.output_dir = *v;
    paths.reject_unknown_keys();

    Section period(file, "period");
    auto start = period.get_date("start");
    auto end = period.get_date("end");
    period.reject_unknown_keys();
    if (!start) raise(Errc::invalid_config, "[period] start is required");
    if (!end) raise(Errc::invalid_config, "[period] end is required");
    config.start = *start;
    config.end = *end;

    Section screening(file, "screening");
    if (auto v = screening.get_int("top_n_by_cap"))
        config.screening.top_n_by_cap = static_cast<int>(*v);
    if (auto v = screening.get_double("min_history_years"))
        config.screening.min_history_years = *v;
    for (const auto& t : screening.get_list("excluded"))
        config.screening.excluded_tickers.insert(t);
    for (const auto& t : screening.get_list("required"))
        config.screening.required_tickers.insert(t);
    auto as_of = screening.get_date("as_of");
    screening.reject_unknown_keys();

    Section bounds(file, "bounds");
    if (auto v = bounds.get_double("min_weight")) config.bounds.default_min = *v;
    if (auto v = bounds.get_double("max_weight")) config.bounds.default_max = *v;
    {
        auto mins = bounds.get_prefixed("min");
        auto maxs = bounds.get_prefixed("max");
        std::set<std::string> tickers;
        for (const auto& [t, v] : mins) tickers.insert(t);
        for (const auto& [t, v] : maxs) tickers.insert(t);
        for (const auto& t : tickers) {
            double lo = mins.count(t) ? mins[t] : config.bounds.default_min;
            double hi = maxs.count(t) ? maxs[t] : config.bounds.default_max;
            config.bounds.per_ticker[t] = {lo, hi};
        }
    }
    bounds.reject_unknown_keys();

    Section backtest(file, "backtest");
    if (auto v = backtest.get("rebalance"))
        config.backtest.rebalance = backtest::parse_rebalance(*v);
    if (auto v = backtest.get_double("initial_value")) config.backtest.initial_value = *v;
    if (auto v = backtest.get_double("transaction_cost_bps"))
        config.backtest.transaction_cost_bps = *v;
    backtest.reject_unknown_keys();
    if (config.backtest.initial_value <= 0.0)
        raise(Errc::invalid_config, "[backtest] initial_value must be positive");
    if (config.backtest.transaction_cost_bps < 0.0)
        raise(Errc::invalid_config, "[backtest] transaction_cost_bps must be >= 0");

    Section pso(file, "pso");
    if (auto v = pso.get_int("particles")) config.pso.n_particles = static_cast<int>(*v);
    if (auto v = pso.get_int("max_iters")) config.pso.max_iters = static_cast<int>(*v);
    if (auto v = pso.get_double("inertia")) config.pso.inertia = *v;
    if (auto v = pso.get_double("cognitive")) config.pso.cognitive = *v;
    if (auto v = pso.get_double("social")) config.pso.social = *v;
    if (auto v = pso.get_int("stagnation_iters"))
        config.pso.stagnation_iters = static_cast<int>(*v);
    if (auto v = pso.get_int("seed")) config.pso.seed = static_cast<std::uint64_t>(*v);
    if (auto v = pso.get_double("v_max")) config.pso.v_max = *v;
    if (auto v = pso.get_bool("parallel")) config.pso.parallel = *v;
    if (auto v = pso.get_int("max_assets")) config.max_assets = static_cast<int>(*v);
    pso.reject_unknown_keys();
    if (config.max_assets < 0)
        raise(Errc::invalid_config, "[pso] max_assets must be >= 0");

    Section objective(file, "objective");
    if (auto v = objective.get("name")) config.objective = *v;
    objective.reject_unknown_keys();

    Section benchmark(file, "benchmark");
    if (auto v = benchmark.get("ticker")) config.benchmark_ticker = *v;
    benchmark.reject_unknown_keys();

    Section margin(file, "margin");
    if (margin.present()) {
        margin::MarginConfig m;
        if (auto v = margin.get_double("leverage")) m.leverage = *v;
        if (auto v = margin.get_double("maintenance_ratio")) m.maintenance_ratio = *v;
        if (auto v = margin.get_double("annual_loan_rate")) m.annual_loan_rate = *v;
        if (auto v = margin.get("call_policy")) m.call_policy = margin::parse_call_policy(*v);
        margin.reject_unknown_keys();
        m.validate();
        config.margin = m;
    }

    // Overrides fold in before derived defaults and validation.
    if (overrides.seed) config.pso.seed = *overrides.seed;
    if (overrides.start) config.start = parse_override_date(*overrides.start, "start");
    if (overrides.end) config.end = parse_override_date(*overrides.end, "end");
    if (overrides.objective) config.objective = *overrides.objective;
    if (overrides.rebalance)
        config.backtest.rebalance = backtest::parse_rebalance(*overrides.rebalance);
    if (overrides.output_dir) config.output_dir = *overrides.output_dir;

    config.screening.as_of = as_of.value_or(config.start);
    config.screening.validate();

    if (!(config.start < config.end))
        raise(Errc::invalid_config, "[period] start must precede end");
    if (!pso::is_builtin_objective(config.objective))
        raise(Errc::invalid_config, "[objective] name '" + config.objective +
                                        "' is not one of mar|cagr|neg_mdd|sharpe|sortino");
    config.pso.validate();

    auto require_exists = [](const std::filesystem::path& p, const char* what) {
        if (!p.empty() && !std::filesystem::exists(p))
            raise(Errc::invalid_config,
                  std::string(what) + " file does not exist: " + p.string());
    };
    require_exists(config.prices_path, "[paths] prices");
    require_exists(config.metadata_path, "[paths] metadata");

    config.config_hash = hash_config(path, overrides);
    return config;
}

} // namespace maropt::cli
