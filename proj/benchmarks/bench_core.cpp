#include <benchmark/benchmark.h>

#include "nld/dynamics.hpp"
#include "nld/eigensolve.hpp"
#include "nld/spectral.hpp"

using namespace nld;

namespace {

Discretization gauss(std::size_t n) {
  const auto m = make_prop1_gauss(10.0, n);
  return discretize(m.kernel, m.death_rate, m.default_grid());
}

void BM_Assemble(benchmark::State& state) {
  const auto m = make_prop1_gauss(10.0, static_cast<std::size_t>(state.range(0)));
  const auto grid = m.default_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(discretize(m.kernel, m.death_rate, grid));
  }
}
BENCHMARK(BM_Assemble)->Arg(201)->Arg(401)->Arg(801)->Unit(benchmark::kMillisecond);

void BM_PowerIteration(benchmark::State& state) {
  const auto disc = gauss(static_cast<std::size_t>(state.range(0)));
  const auto aux = disc.auxiliary(0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_radius(aux).radius);
  }
}
BENCHMARK(BM_PowerIteration)->Arg(201)->Arg(401)->Arg(801)->Unit(benchmark::kMillisecond);

void BM_SolvePrincipal(benchmark::State& state) {
  const auto disc = gauss(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_principal(disc).lambda0);
  }
}
BENCHMARK(BM_SolvePrincipal)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  const auto disc = gauss(static_cast<std::size_t>(state.range(0)));
  const auto gen = disc.generator();
  const Vector u0 = Vector::Ones(static_cast<Eigen::Index>(disc.a_values.size()));
  const double dt = 0.25 / row_sum_norm(gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(gen, u0, 5.0, dt).states.size());
  }
}
BENCHMARK(BM_Integrate)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
