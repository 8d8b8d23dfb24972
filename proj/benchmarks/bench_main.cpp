#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "osim/copulagen.hpp"
#include "osim/distributions.hpp"
#include "osim/models.hpp"
#include "osim/orderings.hpp"
#include "osim/random.hpp"

namespace {

using namespace osim;

copulagen::GeneratorSpec gen_for(int which) {
  switch (which) {
    case 0: return copulagen::builtin_generator("independence", {});
    case 1: return copulagen::builtin_generator("clayton", {2.0});
    case 2: return copulagen::builtin_generator("gumbel", {1.5});
    default: return copulagen::builtin_generator("ex62", {2.0});
  }
}

const char* gen_label(int which) {
  static const char* names[] = {"independence", "clayton", "gumbel", "ex62"};
  return names[which];
}

void BM_SampleW(benchmark::State& state) {
  const auto gen = gen_for(static_cast<int>(state.range(0)));
  const auto route = state.range(1) == 0 ? models::WRoute::Inversion : models::WRoute::CopulaMin;
  RandomStream rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::sample_w(gen, 3.0, rng, route).value);
  }
  state.SetLabel(std::string(gen_label(static_cast<int>(state.range(0)))) +
                 (state.range(1) == 0 ? "/inversion" : "/copula_min"));
}
BENCHMARK(BM_SampleW)->ArgsProduct({{0, 1, 2, 3}, {0, 1}});

void BM_CopulaUniforms(benchmark::State& state) {
  const copulagen::CopulaSampler sampler(gen_for(static_cast<int>(state.range(0))), static_cast<int>(state.range(1)));
  RandomStream rng(11);
  for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
  state.SetLabel(gen_label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CopulaUniforms)->ArgsProduct({{1, 2, 3}, {2, 5}});

void BM_DsosBatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto exp1 = distributions::builtin_distribution("exponential", {1.0});
  const models::DsosModel model(std::vector<distributions::DistributionSpec>(static_cast<std::size_t>(n), exp1),
                                gen_for(2));
  for (auto _ : state) benchmark::DoNotOptimize(models::sample_dsos_batch(model, 10000, 42, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_DsosBatch)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_DgosBatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto base = distributions::builtin_distribution("weibull", {0.5, 1.0});
  std::vector<double> m(static_cast<std::size_t>(n - 1), 0.0);
  const models::DgosModel model(base, models::dgos_params(n, 1.0, m), gen_for(1));
  for (auto _ : state) benchmark::DoNotOptimize(models::sample_dgos_batch(model, 10000, 42, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_DgosBatch)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SumLaw(benchmark::State& state) {
  const auto gen = gen_for(2);
  std::vector<distributions::DistributionSpec> terms;
  for (int i = 0; i < state.range(0); ++i) terms.push_back(distributions::make_w_law(gen, 3.0 - i));
  for (auto _ : state) {
    const auto law = distributions::make_sum_law(terms);
    benchmark::DoNotOptimize(law.cdf(1.0));
  }
}
BENCHMARK(BM_SumLaw)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CheckOrderAnalytic(benchmark::State& state) {
  const auto x = distributions::builtin_distribution("exponential", {2.0});
  const auto y = distributions::builtin_distribution("exponential", {1.0});
  const auto rel = static_cast<orderings::Relation>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(orderings::check_order_uni(x, y, rel));
  state.SetLabel(std::string(orderings::to_string(rel)));
}
BENCHMARK(BM_CheckOrderAnalytic)->DenseRange(0, 4);

void BM_CheckOrderEmpirical(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(3);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = -std::log(rng.uniform()) / 2.0;
    b[i] = -std::log(rng.uniform());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(orderings::check_order_uni(a, b, orderings::Relation::st));
  }
}
BENCHMARK(BM_CheckOrderEmpirical)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
