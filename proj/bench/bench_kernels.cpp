// Serial reference vs OpenMP for the dense operator sums and the path
// simulation.  Results must agree; the benchmark only times them.

#include <benchmark/benchmark.h>

#include <cmath>

#include "levyop/jump_process.hpp"
#include "levyop/psdo_apply.hpp"
#include "levyop/symbol_calculus.hpp"

using namespace levyop;

namespace {

KernelSpec holder_spec() {
  Coefficient c;
  c.kind = Coefficient::Kind::weierstrass;
  c.a1 = 0.2;
  return KernelSpec::stable_like(1, 1.5, c);
}

struct DenseFixture {
  SymbolField p;
  GridFunction f;
  explicit DenseFixture(int N) {
    const TorusGrid g(1, 1.0, N);
    p = compute_symbol(holder_spec(), g);
    f = GridFunction::sample_real(g, [](const Point& x) { return std::exp(-2.0 * x[0] * x[0]); });
  }
};

const DenseFixture& fixture(int N) {
  static DenseFixture f128(128), f256(256), f512(512);
  return N == 128 ? f128 : N == 256 ? f256 : f512;
}

void BM_xform_parallel(benchmark::State& st) {
  const auto& fx = fixture(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(apply_xform(fx.p, fx.f));
}
void BM_xform_serial(benchmark::State& st) {
  const auto& fx = fixture(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::apply_xform(fx.p, fx.f));
}
void BM_yform_parallel(benchmark::State& st) {
  const auto& fx = fixture(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(apply_yform(fx.p, fx.f));
}
void BM_yform_serial(benchmark::State& st) {
  const auto& fx = fixture(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::apply_yform(fx.p, fx.f));
}

SimRequest sim_request() {
  SimRequest r;
  r.T = 0.5;
  r.checkpoints = {0.25, 0.5};
  r.n_paths = 2000;
  return r;
}

void BM_simulate_parallel(benchmark::State& st) {
  SimScheme s;
  s.epsilon = 0.02;
  for (auto _ : st)
    benchmark::DoNotOptimize(simulate_paths(holder_spec(), InitialLaw::point_mass({0, 0}), s, sim_request()));
}
void BM_simulate_serial(benchmark::State& st) {
  SimScheme s;
  s.epsilon = 0.02;
  for (auto _ : st)
    benchmark::DoNotOptimize(simulate_paths_serial(holder_spec(), InitialLaw::point_mass({0, 0}), s, sim_request()));
}

}  // namespace

BENCHMARK(BM_xform_parallel)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_xform_serial)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_yform_parallel)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_yform_serial)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
