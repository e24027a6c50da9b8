#include <benchmark/benchmark.h>

#include <cmath>

#include "latrec/fourier.hpp"
#include "latrec/rng.hpp"
#include "latrec/subsampling.hpp"

using namespace latrec;

namespace {

// d=5, gamma=1/2 crosses by radius
IndexSet cross(benchmark::State& state) { return hyperbolic_cross(5, 0.5, static_cast<double>(state.range(0))); }

CoefficientVector ones(std::size_t n) { return CoefficientVector::Ones(static_cast<Eigen::Index>(n)); }

void BM_LatticeForward(benchmark::State& state) {
  const auto set = cross(state);
  const auto op = SystemOperator::lattice(search_generator(set, 1), set);
  const auto a = ones(set.size());
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(a));
  state.counters["card"] = static_cast<double>(set.size());
  state.counters["M"] = static_cast<double>(op.rows());
}
BENCHMARK(BM_LatticeForward)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DenseForward(benchmark::State& state) {
  const auto set = cross(state);
  const auto lat = search_generator(set, 1);
  const auto plan = lattice_points(lat);
  const auto op = SystemOperator::dense(5, plan.points(), set);
  const auto a = ones(set.size());
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(a));
  state.counters["card"] = static_cast<double>(set.size());
}
BENCHMARK(BM_DenseForward)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_LatticeSearch(benchmark::State& state) {
  const auto set = cross(state);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(search_generator(set, seed++));
  state.counters["card"] = static_cast<double>(set.size());
}
BENCHMARK(BM_LatticeSearch)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PlainBss(benchmark::State& state) {
  const auto set = cross(state);
  auto plan = std::make_shared<const SamplePlan>(lattice_points(search_generator(set, 1)));
  const auto rho = density_weights(*plan, set, set, SmoothnessWeight(1.5));
  const double c = static_cast<double>(set.size());
  const auto stage1 = random_subsample(plan, rho, static_cast<std::size_t>(std::ceil(c * std::log(c))), 7);
  const auto rows = frame_rows(stage1, set);
  for (auto _ : state) benchmark::DoNotOptimize(bss_plain_rows(rows, 2.0));
  state.counters["card"] = c;
}
BENCHMARK(BM_PlainBss)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
