#include <benchmark/benchmark.h>

#include "roa/attraction.hpp"
#include "roa/dde_solver.hpp"
#include "roa/models.hpp"
#include "roa/norms.hpp"
#include "roa/orbit.hpp"

namespace {

void BM_IntegrateSwing(benchmark::State& state) {
  const auto model = roa::make_swing(0.05, 0.125, 0.5, 20.0);
  const auto phi = roa::Segment::constant(20.0, {0.3, 0.3});
  for (auto _ : state) {
    auto traj = roa::integrate(model, phi, static_cast<double>(state.range(0)));
    benchmark::DoNotOptimize(traj.t_end());
  }
}
BENCHMARK(BM_IntegrateSwing)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_QuotientNorm(benchmark::State& state) {
  const auto model = roa::make_swing(0.05, 0.125, 0.5, 20.0);
  const auto space = roa::NormSpace::quotient_for(model, static_cast<int>(state.range(0)));
  const auto fam = roa::FamilySpec::for_model(model, roa::Shape::Cosine);
  const std::vector<double> p = {0.2, 0.5};
  const auto seg = roa::instantiate(fam, p, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(roa::norm(space, seg));
}
BENCHMARK(BM_QuotientNorm)->Arg(64)->Arg(128)->Arg(512);

void BM_SwingClassify(benchmark::State& state) {
  const auto model = roa::make_swing(0.05, 0.125, 0.5, 20.0);
  roa::SimulationSettings sim;
  sim.space = roa::NormSpace::quotient_for(model);
  const auto fam = roa::FamilySpec::for_model(model, roa::Shape::Constant);
  const std::vector<double> p = {0.3, 0.3};
  const auto phi = roa::instantiate(fam, p, 20.0);
  for (auto _ : state) {
    auto traj = roa::simulate(model, phi, sim);
    benchmark::DoNotOptimize(roa::classify(traj, sim.space, sim.delta_num));
  }
}
BENCHMARK(BM_SwingClassify)->Unit(benchmark::kMillisecond);

void BM_CollocationSolve(benchmark::State& state) {
  const auto model = roa::make_swing(0.05, 0.125, 0.5, 20.0);
  const auto hopf = roa::hopf_points(model, 20.0).back();
  const auto branch = roa::hopf_branch(model, hopf, 20.0);
  roa::CollocationOptions opts;
  opts.intervals = static_cast<int>(state.range(0));
  const auto guess = roa::remesh(branch.points.back(), opts.intervals, opts.degree);
  for (auto _ : state) {
    auto orbit = roa::solve_periodic(model, 20.0, guess, opts);
    benchmark::DoNotOptimize(orbit.period());
  }
}
BENCHMARK(BM_CollocationSolve)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
