#include <benchmark/benchmark.h>

#include "dysonprop/dyson.hpp"
#include "dysonprop/evolution.hpp"
#include "dysonprop/oracle.hpp"
#include "dysonprop/qed.hpp"
#include "dysonprop/random.hpp"
#include "dysonprop/random_models.hpp"

using namespace dysonprop;

static void BM_DysonStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const RandomModel m = random_graded_model(1, dim, 1, false);
  const TimeGrid grid{0.0, 1.0, 8, 8};
  Rng rng(1);
  const Vector xi = random_unit_vector(rng, dim);
  DysonTerm prev{0, std::vector<Vector>(grid.node_count(), xi)};
  for (auto _ : state) benchmark::DoNotOptimize(dyson_step(prev, m.H0, m.H1, grid, 0.0));
}
BENCHMARK(BM_DysonStep)->Arg(8)->Arg(32)->Arg(64);

static void BM_EvolveVector(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const RandomModel m = random_graded_model(2, dim, 2, false);
  const DysonEngine e(m.H0, m.H1);
  Rng rng(2);
  const Vector xi = random_unit_vector(rng, dim);
  for (auto _ : state) benchmark::DoNotOptimize(e.apply(1.0, 0.0, xi, 1e-10));
}
BENCHMARK(BM_EvolveVector)->Arg(16)->Arg(64);

static void BM_Propagator(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const RandomModel m = random_graded_model(3, dim, 1, false);
  const DysonEngine e(m.H0, m.H1);
  for (auto _ : state) benchmark::DoNotOptimize(e.propagator(1.0, 0.0, 1e-10));
}
BENCHMARK(BM_Propagator)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_MatrixExpOracle(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const RandomModel m = random_graded_model(4, dim, 1, false);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_propagator(m.H0, m.H1, 1.0, 0.0));
}
BENCHMARK(BM_MatrixExpOracle)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_QedToyEvolve(benchmark::State& state) {
  const QedModel model(default_toy_config());
  const DysonEngine e(model.H_fr(), model.H_int());
  Vector xi = Vector::Zero(static_cast<Eigen::Index>(model.basis().dim()));
  xi(0) = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(e.apply(1.0, 0.0, xi, 1e-10));
}
BENCHMARK(BM_QedToyEvolve)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
