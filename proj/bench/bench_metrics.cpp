#include <benchmark/benchmark.h>

#include <random>

#include "innoflow/metrics.hpp"

using namespace innoflow;

namespace {

WeightedDigraph random_graph(std::size_t n, double density) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      if (u(rng) < density) w(i, j) = std::floor(u(rng) * 10.0) + 1.0;
  return WeightedDigraph(w);
}

void local(benchmark::State& state, metrics::LocalMetric metric, metrics::Execution exec) {
  const WeightedDigraph g = random_graph(static_cast<std::size_t>(state.range(0)), 0.2);
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::local_scores(g, metric, metrics::Neighborhood::undirected, exec));
}

void BM_AdamicAdarSerial(benchmark::State& s) { local(s, metrics::LocalMetric::adamic_adar, metrics::Execution::serial); }
void BM_AdamicAdarParallel(benchmark::State& s) { local(s, metrics::LocalMetric::adamic_adar, metrics::Execution::parallel); }
void BM_JaccardSerial(benchmark::State& s) { local(s, metrics::LocalMetric::jaccard, metrics::Execution::serial); }
void BM_JaccardParallel(benchmark::State& s) { local(s, metrics::LocalMetric::jaccard, metrics::Execution::parallel); }

void BM_Katz(benchmark::State& state) {
  const WeightedDigraph g = random_graph(static_cast<std::size_t>(state.range(0)), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::katz(g, {0.5}));
}

}  // namespace

BENCHMARK(BM_AdamicAdarSerial)->Arg(98)->Arg(300);
BENCHMARK(BM_AdamicAdarParallel)->Arg(98)->Arg(300);
BENCHMARK(BM_JaccardSerial)->Arg(98)->Arg(300);
BENCHMARK(BM_JaccardParallel)->Arg(98)->Arg(300);
BENCHMARK(BM_Katz)->Arg(98)->Arg(300);

BENCHMARK_MAIN();
