#include "maropt/pso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maropt/errors.hpp"

namespace maropt::pso {

namespace {

constexpr double kImprovementEps = 1e-10;

// 53-bit uniform in [0, 1); hand-rolled so swarm trajectories do not
// depend on the standard library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_bounds(const universe::BoundVectors& bounds, int n_assets) {
    if (static_cast<int>(bounds.size()) != n_assets)
        raise(Errc::infeasible_bounds,
              "bounds cover " + std::to_string(bounds.size()) + " assets, expected " +
                  std::to_string(n_assets));
    auto report = universe::feasibility_check(bounds);
    if (!report.ok) raise(Errc::infeasible_bounds, report.violation);
}

} // namespace

void PsoParams::validate() const {
    if (n_particles < 2) raise(Errc::invalid_config, "n_particles must be >= 2");
    if (max_iters < 1) raise(Errc::invalid_config, "max_iters must be >= 1");
    if (inertia < 0.0 || inertia >= 1.0)
        raise(Errc::invalid_config, "inertia must lie in [0, 1)");
    if (cognitive <= 0.0 || social <= 0.0)
        raise(Errc::invalid_config, "cognitive and social factors must be positive");
    if (stagnation_iters < 1) raise(Errc::invalid_config, "stagnation_iters must be >= 1");
    if (v_max <= 0.0) raise(Errc::invalid_config, "v_max must be positive");
}

std::vector<double> repair_to_feasible(std::vector<double> raw,
                                       const universe::BoundVectors& bounds) {
    const size_t n = raw.size();
    check_bounds(bounds, static_cast<int>(n));

    auto clip = [&](size_t i, double v) {
        return std::clamp(std::max(v, 0.0), bounds.lo[i], bounds.hi[i]);
    };
    for (size_t i = 0; i < n; ++i) raw[i] = clip(i, raw[i]);

    if (std::all_of(raw.begin(), raw.end(), [](double v) { return v == 0.0; }))
        for (size_t i = 0; i < n; ++i) raw[i] = clip(i, 1.0 / static_cast<double>(n));

    // Rescale the free coordinates toward total 1; coordinates pushed past
    // a bound freeze there and drop out of the next pass.
    std::vector<bool> frozen(n, false);
    for (size_t pass = 0; pass < n; ++pass) {
        double fixed_sum = 0.0, active_sum = 0.0;
        size_t active_count = 0;
        for (size_t i = 0; i < n; ++i) {
            if (frozen[i]) fixed_sum += raw[i];
            else {
                active_sum += raw[i];
                ++active_count;
            }
        }
        double target = 1.0 - fixed_sum;
        if (active_count == 0) break;
        if (active_sum <= 0.0) {
            for (size_t i = 0; i < n; ++i)
                if (!frozen[i]) raw[i] = target / static_cast<double>(active_count);
        } else {
            double scale = target / active_sum;
            if (std::abs(scale - 1.0) <= 1e-12) break;
            for (size_t i = 0; i < n; ++i)
                if (!frozen[i]) raw[i] *= scale;
        }
        bool changed = false;
        for (size_t i = 0; i < n; ++i) {
            if (frozen[i]) continue;
            if (raw[i] > bounds.hi[i]) {
                raw[i] = bounds.hi[i];
                frozen[i] = true;
                changed = true;
            } else if (raw[i] < bounds.lo[i]) {
                raw[i] = bounds.lo[i];
                frozen[i] = true;
                changed = true;
            }
        }
        if (!changed) break;
    }

    double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9)
        raise(Errc::infeasible_bounds,
              "bounds leave no feasible weight vector (sum " + std::to_string(sum) + ")");
    return raw;
}

void evaluate_swarm(const Objective& objective, std::span<const double> positions,
                    int n_particles, int n_assets, std::span<double> fitness,
                    bool parallel) {
    auto row = [&](int i) {
        return positions.subspan(static_cast<size_t>(i) * n_assets,
                                 static_cast<size_t>(n_assets));
    };
    if (!parallel) {
        // Serial reference path; must match the parallel kernel bit for bit.
        for (int i = 0; i < n_particles; ++i) fitness[i] = objective(row(i));
        return;
    }
#ifdef _OPENMP
    #pragma omp parallel for schedule(static)
    for (int i = 0; i < n_particles; ++i) fitness[i] = objective(row(i));
#else
    for (int i = 0; i < n_particles; ++i) fitness[i] = objective(row(i));
#endif
}

SwarmState init_swarm(const Objective& objective, int n_assets,
                      const universe::BoundVectors& bounds, const PsoParams& params) {
    params.validate();
    if (n_assets < 1) raise(Errc::invalid_config, "need at least one asset");
    check_bounds(bounds, n_assets);

    SwarmState state;
    state.n_assets = n_assets;
    state.rng.seed(params.seed);
    const size_t total = static_cast<size_t>(params.n_particles) * n_assets;
    state.positions.resize(total);
    state.velocities.assign(total, 0.0);

    std::vector<double> draw(n_assets);
    for (int p = 0; p < params.n_particles; ++p) {
        // Exponential spacings give a uniform draw on the simplex.
        double sum = 0.0;
        for (int j = 0; j < n_assets; ++j) {
            draw[j] = -std::log(1.0 - uniform01(state.rng));
            sum += draw[j];
        }
        if (sum > 0.0)
            for (int j = 0; j < n_assets; ++j) draw[j] /= sum;
        auto repaired = repair_to_feasible(draw, bounds);
        std::copy(repaired.begin(), repaired.end(),
                  state.positions.begin() + static_cast<size_t>(p) * n_assets);
    }

    state.pbest_positions = state.positions;
    state.pbest_fitness.resize(params.n_particles);
    evaluate_swarm(objective, state.positions, params.n_particles, n_assets,
                   state.pbest_fitness, params.parallel);

    int best = 0;
    for (int i = 1; i < params.n_particles; ++i)
        if (state.pbest_fitness[i] > state.pbest_fitness[best]) best = i;
    state.gbest_fitness = state.pbest_fitness[best];
    state.gbest_position.assign(
        state.positions.begin() + static_cast<size_t>(best) * n_assets,
        state.positions.begin() + static_cast<size_t>(best + 1) * n_assets);
    return state;
}

void step(SwarmState& state, const Objective& objective,
          const universe::BoundVectors& bounds, const PsoParams& params) {
    const int n = state.n_assets;
    const int particles = params.n_particles;

    std::vector<double> candidate(n);
    for (int p = 0; p < particles; ++p) {
        const size_t base = static_cast<size_t>(p) * n;
        for (int j = 0; j < n; ++j) {
            double x = state.positions[base + j];
            double v = state.velocities[base + j];
            double r1 = uniform01(state.rng);
            double r2 = uniform01(state.rng);
            v = params.inertia * v +
                params.cognitive * r1 * (state.pbest_positions[base + j] - x) +
                params.social * r2 * (state.gbest_position[j] - x);
            v = std::clamp(v, -params.v_max, params.v_max);
            state.velocities[base + j] = v;
            candidate[j] = x + v;
        }
        auto repaired = repair_to_feasible(candidate, bounds);
        std::copy(repaired.begin(), repaired.end(), state.positions.begin() + base);
    }

    std::vector<double> fitness(particles);
    evaluate_swarm(objective, state.positions, particles, n, fitness, params.parallel);

    // Fixed ascending-index reduction keeps tie-breaking identical across
    // serial and parallel evaluation.
    for (int p = 0; p < particles; ++p) {
        if (fitness[p] > state.pbest_fitness[p]) {
            state.pbest_fitness[p] = fitness[p];
            const size_t base = static_cast<size_t>(p) * n;
            std::copy(state.positions.begin() + base, state.positions.begin() + base + n,
                      state.pbest_positions.begin() + base);
            if (fitness[p] > state.gbest_fitness) {
                state.gbest_fitness = fitness[p];
                state.gbest_position.assign(state.positions.begin() + base,
                                            state.positions.begin() + base + n);
            }
        }
    }
    ++state.iteration;
}

OptimizeResult optimize(const data::PriceMatrix& prices, const Objective& objective,
                        const universe::WeightBounds& bounds, const PsoParams& params) {
    const int n = static_cast<int>(prices.cols());
    auto bound_vectors = universe::resolve_bounds(bounds, prices.tickers);

    SwarmState state = init_swarm(objective, n, bound_vectors, params);
    OptimizeResult result;
    result.history.push_back(state.gbest_fitness);

    int stall = 0;
    while (state.iteration < params.max_iters && stall < params.stagnation_iters) {
        double previous = state.gbest_fitness;
        step(state, objective, bound_vectors, params);
        result.history.push_back(state.gbest_fitness);
        stall = state.gbest_fitness > previous + kImprovementEps ? 0 : stall + 1;
    }

    result.weights.tickers = prices.tickers;
    result.weights.values = state.gbest_position;
    result.fitness = state.gbest_fitness;
    result.iterations = state.iteration;
    return result;
}

backtest::Weights sparsify(const backtest::Weights& weights, int max_assets,
                           const universe::WeightBounds& bounds) {
    if (max_assets < 1) raise(Errc::invalid_config, "max_assets must be >= 1");
    const size_t n = weights.size();

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return weights.values[a] > weights.values[b];
    });

    std::vector<double> kept(n, 0.0);
    for (size_t k = 0; k < n && k < static_cast<size_t>(max_assets); ++k)
        kept[order[k]] = weights.values[order[k]];

    backtest::Weights out;
    out.tickers = weights.tickers;
    out.values = repair_to_feasible(std::move(kept),
                                    universe::resolve_bounds(bounds, out.tickers));
    return out;
}

Objective make_objective(const std::string& name, const data::PriceMatrix& prices,
                         const backtest::BacktestConfig& config) {
    const data::PriceMatrix* data = &prices;
    auto curve_of = [data, config](std::span<const double> weights) {
        return backtest::simulate_equity(*data, weights, config);
    };

    Objective objective;
    objective.name = name;
    if (name == "mar") {
        objective.fn = [curve_of](std::span<const double> w) {
            auto curve = curve_of(w);
            return metrics::mar_ratio(metrics::cagr(curve), metrics::max_drawdown(curve));
        };
    } else if (name == "cagr") {
        objective.fn = [curve_of](std::span<const double> w) {
            return metrics::cagr(curve_of(w));
        };
    } else if (name == "neg_mdd") {
        objective.fn = [curve_of](std::span<const double> w) {
            return -metrics::max_drawdown(curve_of(w));
        };
    } else if (name == "sharpe") {
        objective.fn = [curve_of](std::span<const double> w) {
            auto returns = metrics::curve_returns(curve_of(w));
            return metrics::sharpe(returns, metrics::kTradingDaysPerYear);
        };
    } else if (name == "sortino") {
        objective.fn = [curve_of](std::span<const double> w) {
            auto returns = metrics::curve_returns(curve_of(w));
            return metrics::sortino(returns, metrics::kTradingDaysPerYear);
        };
    } else {
        raise(Errc::invalid_config, "unknown objective '" + name +
                                        "'; expected mar|cagr|neg_mdd|sharpe|sortino");
    }
    return objective;
}

bool is_builtin_objective(const std::string& name) {
    return name == "mar" || name == "cagr" || name == "neg_mdd" || name == "sharpe" ||
           name == "sortino";
}

} // namespace maropt::pso
