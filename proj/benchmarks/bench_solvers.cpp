#include <benchmark/benchmark.h>

#include <random>

#include "lqmfg/discounted_solver.hpp"
#include "lqmfg/riccati.hpp"
#include "lqmfg/simulator.hpp"

namespace {

using namespace lqmfg;

SymMatrix random_spd(std::mt19937_64& gen, int d, double lo, double hi) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n01(gen);
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector spec(d);
  for (int i = 0; i < d; ++i) spec(i) = u(gen);
  return SymMatrix::symmetrize(q * spec.asDiagonal() * q.transpose());
}

GameSpec bench_game(int d, int n, double ell) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(d * 100 + n));
  const SymMatrix a = random_spd(gen, d, 0.1, 0.5) * -1.0;
  const double scale = n > 1 ? 1.0 / (n - 1) : 0.0;
  CostStructure cost{random_spd(gen, d, 0.5, 2.0), random_spd(gen, d, 0.1, 0.3) * scale,
                     {random_spd(gen, d, 0.1, 0.2) * scale}, {SymMatrix::zero(d)},
                     Vector::Ones(d), Vector::Zero(d)};
  return GameSpec::n_player(a.matrix(), 1.0, 1.0, ell, n, std::move(cost));
}

void BM_SelectedAREDimension(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 gen(7);
  const AREProblem p(Matrix::Zero(d, d), random_spd(gen, d, 0.1, 3), random_spd(gen, d, 0.1, 3));
  for (auto _ : state) benchmark::DoNotOptimize(solve_are_selected(p));
}
BENCHMARK(BM_SelectedAREDimension)->DenseRange(2, 12, 2);

void BM_EnumerateSolutions(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 gen(11);
  const AREProblem p(Matrix::Zero(d, d), random_spd(gen, d, 0.1, 3), random_spd(gen, d, 0.1, 3));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_symmetric_solutions(p));
  state.SetComplexityN(1 << d);
}
BENCHMARK(BM_EnumerateSolutions)->DenseRange(1, 6, 1);

void BM_ErgodicSolve(benchmark::State& state) {
  const GameSpec spec = bench_game(static_cast<int>(state.range(0)), 50, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ergodic(spec));
}
BENCHMARK(BM_ErgodicSolve)->DenseRange(2, 8, 2);

void BM_DiscountedSolve(benchmark::State& state) {
  const GameSpec spec = bench_game(static_cast<int>(state.range(0)), 50, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_discounted(spec));
}
BENCHMARK(BM_DiscountedSolve)->DenseRange(2, 8, 2);

// Cost per simulated path-step of the equilibrium closed loop.
void BM_SimulateEquilibrium(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GameSpec spec = bench_game(d, 10, 0.0);
  const QGSolution sol = solve_ergodic(spec);
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 10.0;
  cfg.n_paths = 1000;
  cfg.seed = 1;
  const FeedbackLaw law = equilibrium_law(sol, spec.r);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_closed_loop(spec, law, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * static_cast<std::int64_t>(cfg.T / cfg.dt));
}
BENCHMARK(BM_SimulateEquilibrium)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
