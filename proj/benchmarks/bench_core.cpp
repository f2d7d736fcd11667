#include <benchmark/benchmark.h>

#include "lkdv/analysis.hpp"
#include "lkdv/spectral.hpp"

namespace {

using namespace lkdv;

void BM_transform_roundtrip(benchmark::State& state) {
  const Grid g = make_grid(30.0, state.range(0));
  std::vector<cplx> buf(make_gaussian(g, 0.0, 1.0).values);
  for (auto _ : state) {
    g.forward(buf);
    g.inverse(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_transform_roundtrip)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void BM_apply_H(benchmark::State& state) {
  const Grid g = make_grid(30.0, state.range(0));
  const OperatorTable table(g);
  const WaveField f = make_gaussian(g, 0.0, 1.0, 1.0);
  for (auto _ : state) {
    WaveField out = table.apply(GeneratorTag::H, f);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_apply_H)->RangeMultiplier(2)->Range(256, 4096);

void BM_lawson_step(benchmark::State& state) {
  const Grid g = make_grid(30.0, state.range(0));
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  const double dt = 1e-3;
  for (auto _ : state) {
    state.PauseTiming();
    EvolveConfig cfg{GeneratorTag::H, 64 * dt, dt, Scheme::lawson_rk4, 0, 1.0};
    state.ResumeTiming();
    Trajectory traj = evolve(f, cfg);
    benchmark::DoNotOptimize(traj.norms.data());
  }
  state.counters["steps_per_s"] = benchmark::Counter(
      64.0 * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_lawson_step)->Arg(1024)->Arg(2048);

void BM_matrix_exponential(benchmark::State& state) {
  const Grid g = make_grid(12.0, state.range(0));
  const Eigen::MatrixXcd A = dense_generator(g, GeneratorTag::H);
  for (auto _ : state) {
    Eigen::MatrixXcd E = matrix_exponential(cplx{0.0, -1e-2} * A);
    benchmark::DoNotOptimize(E.data());
  }
}
BENCHMARK(BM_matrix_exponential)->Arg(64)->Arg(128);

void BM_sigma_min_point(benchmark::State& state) {
  const Grid g = make_grid(30.0, state.range(0));
  PseudospectrumReport rep;
  for (auto _ : state) {
    rep = pseudospectrum(ComplexBox{-1.0, 1.0, 0.5, 1.5}, 2, 2, g,
                         GeneratorTag::H);
    benchmark::DoNotOptimize(rep.min_sigma);
  }
}
BENCHMARK(BM_sigma_min_point)->Arg(128)->Arg(256);

void BM_evans_sample(benchmark::State& state) {
  for (auto _ : state) {
    EvansSample s = evans_function({1.0, 1.0});
    benchmark::DoNotOptimize(s.E);
  }
}
BENCHMARK(BM_evans_sample);

}  // namespace

BENCHMARK_MAIN();
