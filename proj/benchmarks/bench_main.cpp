#include <benchmark/benchmark.h>

#include "cuspidal/classify.hpp"
#include "cuspidal/ik.hpp"
#include "cuspidal/singular.hpp"

using namespace cuspidal;

static void BM_SolveIK(benchmark::State& state) {
  const auto m = validate_params(illustrative_params());
  const WorkspacePoint p{2.5, 0.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(solve_ik(m, p));
}
BENCHMARK(BM_SolveIK);

static void BM_ForwardKinematics(benchmark::State& state) {
  const auto m = validate_params(illustrative_params());
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(m, {t, 0.3, -1.1}));
    t += 1e-3;
  }
}
BENCHMARK(BM_ForwardKinematics);

static void BM_TraceSingularCurves(benchmark::State& state) {
  const auto m = validate_params(illustrative_params());
  for (auto _ : state) benchmark::DoNotOptimize(trace_singular_curves(m, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TraceSingularCurves)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_AnalyzeSingularities(benchmark::State& state) {
  const auto m = validate_params(illustrative_params());
  for (auto _ : state) benchmark::DoNotOptimize(analyze_singularities(m, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_AnalyzeSingularities)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_ClassifyClosedForm(benchmark::State& state) {
  const auto m = validate_params(illustrative_params());
  for (auto _ : state) benchmark::DoNotOptimize(classify(m, ClassifyMethod::ClosedForm));
}
BENCHMARK(BM_ClassifyClosedForm);

static void BM_ClassifyBoth(benchmark::State& state) {
  const auto m = validate_params(illustrative_params());
  for (auto _ : state) benchmark::DoNotOptimize(classify(m, ClassifyMethod::Both));
}
BENCHMARK(BM_ClassifyBoth)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
