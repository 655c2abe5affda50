#include <benchmark/benchmark.h>

#include "jcanyon/berry.hpp"

using namespace jcanyon;

namespace {

struct Case {
  BasisSpec basis;
  SchwingerFrame frame;
  LoopPath path;
  StateVector state;
};

Case make_case(int m, int n, int steps) {
  ModelParams p;
  p.m = m;
  p.n = n;
  p.delta = 0.5;
  const BasisSpec basis = BasisSpec::sector_exact(n, 0, m);
  SchwingerFrame frame(basis);
  return {basis, frame, constant_latitude_loop(1.1, steps, default_revolutions(basis)),
          analytic_eigensystem(p).first.to_state(basis)};
}

void BM_HolonomySerial(benchmark::State& st) {
  const Case c = make_case(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 4096);
  for (auto _ : st) benchmark::DoNotOptimize(holonomy_phase_serial(c.state, c.frame, c.path).gamma);
}

void BM_HolonomyOmp(benchmark::State& st) {
  const Case c = make_case(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 4096);
  for (auto _ : st) benchmark::DoNotOptimize(holonomy_phase(c.state, c.frame, c.path).gamma);
}

}  // namespace

BENCHMARK(BM_HolonomySerial)->Args({1, 0})->Args({3, 2})->Args({3, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HolonomyOmp)->Args({1, 0})->Args({3, 2})->Args({3, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
