#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rdseed/adjoint.hpp"
#include "rdseed/initial_data.hpp"
#include "rdseed/tridiagonal.hpp"

using namespace rdseed;

namespace {

const ReactionModel kBistable = ReactionModel::bistable(0.25);

void BM_Thomas(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -1.0), rhs(n), scratch(n);
    for (auto _ : state) {
        std::fill(rhs.begin(), rhs.end(), 1.0);
        solve_tridiagonal(lo, di, up, rhs, scratch);
        benchmark::DoNotOptimize(rhs.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Thomas)->Arg(512)->Arg(4096);

void BM_Cyclic(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -1.0), rhs(n);
    for (auto _ : state) {
        std::fill(rhs.begin(), rhs.end(), 1.0);
        solve_cyclic_tridiagonal(lo, di, up, rhs);
        benchmark::DoNotOptimize(rhs.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Cyclic)->Arg(1022)->Arg(4094);

// 1D benchmark sized forward solve: n = 512, T = 25, nt = 2500.
void BM_Forward1D(benchmark::State& state) {
    const Grid g = Grid::line(-50.0, 50.0, 512);
    const auto u0 = centered_block(g, 13.0, 0.0);
    const auto tc = TimeConfig::uniform(25.0, 2500);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_objective(u0, kBistable, tc));
}
BENCHMARK(BM_Forward1D)->Unit(benchmark::kMillisecond);

void BM_ForwardAdjoint1D(benchmark::State& state) {
    const Grid g = Grid::line(-50.0, 50.0, 512);
    const auto u0 = centered_block(g, 13.0, 0.0);
    const auto tc = TimeConfig::uniform(25.0, 2500);
    for (auto _ : state) {
        const auto traj = forward_solve(u0, kBistable, tc);
        benchmark::DoNotOptimize(adjoint_solve(traj, kBistable).p.min_value());
    }
}
BENCHMARK(BM_ForwardAdjoint1D)->Unit(benchmark::kMillisecond);

// ADI on the 2D example mesh, shortened horizon.
void BM_Forward2D(benchmark::State& state) {
    const Grid g = Grid::rect(-10.0, 10.0, 91, -10.0, 10.0, 91);
    const auto u0 = disc_indicator(g, 5.8 * M_PI, 0.0, 0.0);
    const auto tc = TimeConfig::uniform(3.0, 30);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_objective(u0, kBistable, tc));
}
BENCHMARK(BM_Forward2D)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
