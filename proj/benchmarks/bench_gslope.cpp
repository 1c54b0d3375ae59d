#include <benchmark/benchmark.h>

#include <gslope/bench.hpp>
#include <gslope/decouple.hpp>
#include <gslope/duality.hpp>
#include <gslope/rng.hpp>
#include <gslope/screening.hpp>
#include <gslope/solver.hpp>
#include <gslope/sorted_l1.hpp>

namespace {

using namespace gslope;

Vector sorted_lambda(Rng& rng, Index m) {
  Vector l(m);
  double acc = 0.05;
  for (Index i = m - 1; i >= 0; --i) {
    l[i] = acc;
    acc += rng.uniform();
  }
  return l;
}

void bm_prox_sorted_l1(benchmark::State& state) {
  const Index m = static_cast<Index>(state.range(0));
  Rng rng(7);
  Vector v(m);
  for (Index i = 0; i < m; ++i) v[i] = 3.0 * rng.normal();
  const Vector l = sorted_lambda(rng, m);
  for (auto _ : state) benchmark::DoNotOptimize(prox_sorted_l1(v, l, 0.7));
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(bm_prox_sorted_l1)->Arg(16)->Arg(256)->Arg(4096);

void bm_prox_group_slope(benchmark::State& state) {
  const Index m = static_cast<Index>(state.range(0));
  const Index size = 4;
  Rng rng(11);
  GroupPartition part;
  part.groups.resize(static_cast<std::size_t>(m));
  for (Index g = 0; g < m; ++g)
    for (Index j = 0; j < size; ++j)
      part.groups[static_cast<std::size_t>(g)].push_back(g * size + j);
  part.weights = Vector::Ones(m);
  const GroupLayout layout = GroupLayout::build(part);
  Vector b(m * size);
  for (Index i = 0; i < b.size(); ++i) b[i] = 2.0 * rng.normal();
  const Vector l = sorted_lambda(rng, m);
  for (auto _ : state)
    benchmark::DoNotOptimize(prox_group_slope(b, layout, l, 0.5));
  state.SetItemsProcessed(state.iterations() * m * size);
}
BENCHMARK(bm_prox_group_slope)->Arg(64)->Arg(1024);

void bm_screen_fixpoint(benchmark::State& state) {
  const Index m = static_cast<Index>(state.range(0));
  Rng rng(13);
  Vector norms(m), inv_w = Vector::Ones(m);
  for (Index i = 0; i < m; ++i) norms[i] = rng.uniform();
  const Vector l = sorted_lambda(rng, m);
  for (auto _ : state)
    benchmark::DoNotOptimize(screen_fixpoint(norms, inv_w, 0.05, l, m));
}
BENCHMARK(bm_screen_fixpoint)->Arg(128)->Arg(2048);

const DecoupledProblem& demo_problem() {
  static const DecoupledProblem dp = [] {
    SyntheticDataset synth = make_synthetic(100, 400, 10, 0.1, 99);
    GroupedDesign design = expand_groups(synth.data, 10, 1234, GroupWeightRule::unit);
    LambdaSequence lambda = oscar_lambdas(design, std::exp(-3.0), 3.0);
    return decouple(GroupedProblem{std::move(design), std::move(lambda)});
  }();
  return dp;
}

void bm_gap_certificate(benchmark::State& state) {
  const DecoupledProblem& dp = demo_problem();
  Rng rng(17);
  Vector b(dp.d());
  for (Index i = 0; i < b.size(); ++i) b[i] = 0.1 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(duality_gap(b, dual_candidate(b, dp), dp));
}
BENCHMARK(bm_gap_certificate);

void bm_decouple(benchmark::State& state) {
  SyntheticDataset synth = make_synthetic(100, 400, 10, 0.1, 99);
  GroupedDesign design = expand_groups(synth.data, 10, 1234, GroupWeightRule::unit);
  LambdaSequence lambda = oscar_lambdas(design, std::exp(-3.0), 3.0);
  const GroupedProblem problem{std::move(design), std::move(lambda)};
  for (auto _ : state) benchmark::DoNotOptimize(decouple(problem));
}
BENCHMARK(bm_decouple);

void bm_apgd_solve(benchmark::State& state) {
  const DecoupledProblem& dp = demo_problem();
  SolverConfig cfg;
  cfg.gap_tol = 1e-4;
  cfg.screening = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(apgd_solve(dp, cfg));
}
BENCHMARK(bm_apgd_solve)->Arg(0)->Arg(1);

void bm_spgd_solve(benchmark::State& state) {
  const DecoupledProblem& dp = demo_problem();
  SolverConfig cfg;
  cfg.gap_tol = 1e-4;
  cfg.seed = 5;
  cfg.screening = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(spgd_solve(dp, cfg));
}
BENCHMARK(bm_spgd_solve)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
