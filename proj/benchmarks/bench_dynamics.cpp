#include <benchmark/benchmark.h>

#include "pdflow/certification.hpp"
#include "pdflow/cli/config.hpp"

namespace {

using namespace pdflow;

DynamicsSystem lp_system(const char* filter_case) {
  ConvexProblem problem = bundled_problem("lp_example").problem;
  FilterBank bank = cli::expand_case(filter_case, problem);
  return assemble(std::move(problem), std::move(bank));
}

void BM_Rhs(benchmark::State& state, const char* filter_case) {
  const DynamicsSystem system = lp_system(filter_case);
  SolverState s = system.zero_state();
  s.xi.setConstant(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs(system, s));
  }
}
BENCHMARK_CAPTURE(BM_Rhs, case1, "case1");
BENCHMARK_CAPTURE(BM_Rhs, case2, "case2");
BENCHMARK_CAPTURE(BM_Rhs, case3, "case3");

void BM_Integrate(benchmark::State& state, const char* filter_case) {
  const DynamicsSystem system = lp_system(filter_case);
  IntegratorConfig config;
  config.horizon = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(system, system.zero_state(), config));
  }
}
BENCHMARK_CAPTURE(BM_Integrate, case1, "case1")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Integrate, case2, "case2")->Unit(benchmark::kMillisecond);

void BM_Audit(benchmark::State& state) {
  const BundledProblem bundled = bundled_problem("lp_example");
  const DynamicsSystem system = lp_system("case2");
  IntegratorConfig config;
  config.horizon = 10.0;
  const Trajectory base = integrate(system, system.zero_state(), config);
  const ReferencePoint ref(bundled.problem, *bundled.reference);
  for (auto _ : state) {
    Trajectory traj = base;
    attach_storage(traj, system, ref);
    benchmark::DoNotOptimize(passivity_audit(traj, ref));
  }
}
BENCHMARK(BM_Audit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
