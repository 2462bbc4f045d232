#include <benchmark/benchmark.h>

#include "rr/contact/models.hpp"
#include "rr/curvature/curvature.hpp"
#include "rr/metric/metric_space.hpp"
#include "rr/realization/realization.hpp"

using namespace rr;
using namespace rr::contact;

namespace {

ContactData generic() {
  ModelParams p;
  p.grid = {8, 8, 8};
  p.base_perturbation = {0.4, 0.3, 17};
  return model_manifold("mapping_torus_box", p);
}

void BM_ContactJets(benchmark::State& state) {
  const auto cd = generic();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(contact_jets(cd, {0.1, -0.2, 0.3}, order));
}
BENCHMARK(BM_ContactJets)->Arg(0)->Arg(1)->Arg(2);

void BM_RicciOracle(benchmark::State& state) {
  const auto cd = generic();
  for (auto _ : state) benchmark::DoNotOptimize(curvature::ricci_reeb_oracle(cd, {0.1, -0.2, 0.3}));
}
BENCHMARK(BM_RicciOracle);

void BM_CurvatureReport(benchmark::State& state) {
  const auto cd = generic();
  for (auto _ : state) benchmark::DoNotOptimize(curvature::curvature_report(cd, {0.1, -0.2, 0.3}));
}
BENCHMARK(BM_CurvatureReport);

void BM_Equivalence(benchmark::State& state) {
  const auto cd = generic();
  for (auto _ : state) benchmark::DoNotOptimize(curvature::max_ricci_equivalence(cd, {0.1, -0.2, 0.3}));
}
BENCHMARK(BM_Equivalence);

void BM_JacobiPropagate(benchmark::State& state) {
  const auto cd = generic();
  const Vec3d p{0.1, -0.2, 0.3};
  const Vec3d e = frame_point(cd, p).e;
  for (auto _ : state) benchmark::DoNotOptimize(curvature::alpha_jacobi_propagate(cd, p, e, 1.0, 1000));
}
BENCHMARK(BM_JacobiPropagate)->Unit(benchmark::kMillisecond);

// One flowline integrated at the given number of steps per unit time.
void BM_RealizeFlowline(benchmark::State& state) {
  const auto cd = generic();
  realization::FlowBox box;
  box.x = {-0.4, 0.4};
  box.y = {-0.4, 0.4};
  box.seeds = {1, 1};
  realization::RealizeOptions o;
  o.step = 1.0 / static_cast<double>(state.range(0));
  o.verify = false;
  const auto f = 1.0 + 0.5 * random_smooth_field(9, cd.domain);
  for (auto _ : state) {
    const auto sol = realization::local_realize(cd, f, box, o);
    benchmark::DoNotOptimize(sol.ell(Vec3d{0.0, 0.0, 0.5}));
  }
}
BENCHMARK(BM_RealizeFlowline)->Arg(64)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PathLength(benchmark::State& state) {
  ModelParams p;
  const int n = static_cast<int>(state.range(0));
  p.grid = {n, n, n};
  const auto cd = model_manifold("mapping_torus_box", p);
  const auto q = cd.domain.quadrature();
  const auto a = metric::sample(compatible_metric(cd), q);
  const auto b = metric::sample(
      compatible_metric(with_section_perturbation(cd, chart::ScalarField(0.5), chart::ScalarField(1.0))), q);
  for (auto _ : state) benchmark::DoNotOptimize(metric::path_length_upper(a, b, q, 16));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(q.size()));
}
BENCHMARK(BM_PathLength)->Arg(16)->Arg(48)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
