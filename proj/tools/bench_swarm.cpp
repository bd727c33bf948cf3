// Compares the OpenMP swarm-evaluation kernel against the serial
// reference on a synthetic universe and checks they agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "maropt/backtest.hpp"
#include "maropt/pso.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace maropt;

namespace {

data::PriceMatrix synthetic_prices(int n_assets, int n_days, std::uint64_t seed) {
    data::PriceMatrix prices;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> move(0.0003, 0.012);

    Date day = *Date::parse("2015-01-01");
    prices.tickers.reserve(n_assets);
    for (int j = 0; j < n_assets; ++j) prices.tickers.push_back("A" + std::to_string(j));
    std::vector<double> level(n_assets, 100.0);
    for (int t = 0; t < n_days; ++t) {
        prices.dates.push_back(day);
        for (int j = 0; j < n_assets; ++j) {
            level[j] *= std::exp(move(rng));
            prices.prices.push_back(level[j]);
        }
        // serial 0 was a Thursday; jump Fri -> Mon to stay on weekdays
        day = Date::from_serial(day.serial() + (day.serial() % 7 == 1 ? 3 : 1));
    }
    return prices;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    int particles = argc > 1 ? std::atoi(argv[1]) : 256;
    int assets = argc > 2 ? std::atoi(argv[2]) : 16;
    int days = argc > 3 ? std::atoi(argv[3]) : 1250;
    int reps = argc > 4 ? std::atoi(argv[4]) : 20;

    auto prices = synthetic_prices(assets, days, 7);
    backtest::BacktestConfig config;
    auto objective = pso::make_objective("mar", prices, config);

    pso::PsoParams params;
    params.n_particles = particles;
    params.seed = 42;
    auto bounds = universe::BoundVectors::unconstrained(static_cast<size_t>(assets));
    auto state = pso::init_swarm(objective, assets, bounds, params);

    std::vector<double> fitness_serial(particles), fitness_parallel(particles);

    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r)
        pso::evaluate_swarm(objective, state.positions, particles, assets,
                            fitness_serial, /*parallel=*/false);
    double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r)
        pso::evaluate_swarm(objective, state.positions, particles, assets,
                            fitness_parallel, /*parallel=*/true);
    double parallel_s = seconds_since(t0);

    bool identical = fitness_serial == fitness_parallel;
    double total_evals = static_cast<double>(particles) * reps;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("swarm evaluation: %d particles x %d assets x %d days, %d reps\n",
                particles, assets, days, reps);
    std::printf("  serial   : %8.3f s  (%10.0f evals/s)\n", serial_s,
                total_evals / serial_s);
    std::printf("  parallel : %8.3f s  (%10.0f evals/s, %d thread(s))\n", parallel_s,
                total_evals / parallel_s, threads);
    std::printf("  speedup  : %8.2fx\n", serial_s / parallel_s);
    std::printf("  identical: %s\n", identical ? "yes" : "NO");

    // End-to-end optimizer runs must agree as well.
    params.max_iters = 25;
    params.parallel = false;
    universe::WeightBounds wb;
    auto serial_run = pso::optimize(prices, objective, wb, params);
    params.parallel = true;
    auto parallel_run = pso::optimize(prices, objective, wb, params);
    bool same = serial_run.weights.values == parallel_run.weights.values &&
                serial_run.history == parallel_run.history;
    std::printf("optimize(25 iters): serial and parallel runs %s\n",
                same ? "identical" : "DIFFER");
    return identical && same ? 0 : 1;
}
