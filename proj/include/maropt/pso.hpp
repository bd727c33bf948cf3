#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "maropt/backtest.hpp"
#include "maropt/universe.hpp"

namespace maropt::pso {

struct PsoParams {
    int n_particles = 64;
    int max_iters = 500;
    double inertia = 0.7298;      // omega
    double cognitive = 1.49618;   // c1, pull toward personal best
    double social = 1.49618;      // c2, pull toward global best
    int stagnation_iters = 50;    // stop after this many non-improving iters
    std::uint64_t seed = 0;
    double v_max = 0.25;          // per-coordinate velocity clamp
    bool parallel = true;         // OpenMP fitness evaluation (same results)

    void validate() const;
};

// Named fitness over a weight vector aligned with the active universe.
// Must be deterministic and safe to call concurrently.
struct Objective {
    std::string name;
    std::function<double(std::span<const double>)> fn;

    double operator()(std::span<const double> weights) const { return fn(weights); }
};

// Built-in objectives (mar, cagr, neg_mdd, sharpe, sortino) evaluated by
// backtesting the candidate weights. Borrows `prices`; keep it alive.
Objective make_objective(const std::string& name, const data::PriceMatrix& prices,
                         const backtest::BacktestConfig& config);

bool is_builtin_objective(const std::string& name);

struct SwarmState {
    int n_assets = 0;
    std::vector<double> positions;    // n_particles x n_assets, row-major
    std::vector<double> velocities;   // same shape
    std::vector<double> pbest_positions;
    std::vector<double> pbest_fitness;
    std::vector<double> gbest_position;
    double gbest_fitness = 0.0;
    int iteration = 0;
    std::mt19937_64 rng;

    std::span<const double> particle(int i) const {
        return {positions.data() + static_cast<size_t>(i) * n_assets,
                static_cast<size_t>(n_assets)};
    }

    bool operator==(const SwarmState&) const = default;
};

// Projects an arbitrary vector onto the bounded simplex: floor negatives,
// clip to the box, then rescale the unfrozen coordinates until the total
// is 1, freezing any coordinate pushed past a bound (at most n passes).
std::vector<double> repair_to_feasible(std::vector<double> raw,
                                       const universe::BoundVectors& bounds);

// Positions drawn uniformly on the simplex (exponential spacings) and
// repaired to the bounds; velocities zero; bests evaluated immediately.
SwarmState init_swarm(const Objective& objective, int n_assets,
                      const universe::BoundVectors& bounds, const PsoParams& params);

// One global-best PSO iteration: velocity update with per-coordinate
// cognitive/social draws, clamp, move, repair, evaluate, refresh bests
// (strict improvement only, fixed particle order).
void step(SwarmState& state, const Objective& objective,
          const universe::BoundVectors& bounds, const PsoParams& params);

// Fitness of every particle. The OpenMP path and the serial reference
// produce bit-identical output; tests and the benchmark compare them.
void evaluate_swarm(const Objective& objective, std::span<const double> positions,
                    int n_particles, int n_assets, std::span<double> fitness,
                    bool parallel);

struct OptimizeResult {
    backtest::Weights weights;
    double fitness = 0.0;
    std::vector<double> history;  // best fitness after init and each step
    int iterations = 0;
};

// Init + steps until max_iters or stagnation; reproducible from the seed.
// The objective is expected to evaluate candidate weights over
// prices.tickers (see make_objective).
OptimizeResult optimize(const data::PriceMatrix& prices, const Objective& objective,
                        const universe::WeightBounds& bounds, const PsoParams& params);

// Keeps the `max_assets` largest weights, zeroes the rest, and repairs
// back onto the bounded simplex.
backtest::Weights sparsify(const backtest::Weights& weights, int max_assets,
                           const universe::WeightBounds& bounds);

} // namespace maropt::pso
