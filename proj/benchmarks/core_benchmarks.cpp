#include <benchmark/benchmark.h>

#include <vector>

#include "cnids/consensus.hpp"
#include "cnids/dataset.hpp"
#include "cnids/rng.hpp"
#include "cnids/simulator.hpp"
#include "cnids/spectral.hpp"
#include "cnids/topology.hpp"

namespace {

std::vector<cnids::LogLikelihoods> random_locals(int n, std::uint64_t seed) {
  cnids::Rng rng(seed);
  std::vector<cnids::LogLikelihoods> locals(static_cast<std::size_t>(n));
  for (auto& ll : locals) {
    ll.normal = rng.uniform(-20.0, 0.0);
    ll.anomalous = rng.uniform(-20.0, 0.0);
  }
  return locals;
}

void BM_ConsensusStep(benchmark::State& state) {
  const auto t = cnids::Topology::torus(static_cast<int>(state.range(0)));
  const cnids::ConsensusEngine engine(cnids::best_constant_weights(t), t);
  auto consensus = cnids::initialize(random_locals(t.size(), 1));
  for (auto _ : state) {
    engine.step(consensus);
    benchmark::DoNotOptimize(consensus.x_anomalous.data());
  }
  state.SetItemsProcessed(state.iterations() * t.size());
}
BENCHMARK(BM_ConsensusStep)->Arg(3)->Arg(7)->Arg(11);

void BM_RunToConvergence(benchmark::State& state) {
  const auto t = cnids::Topology::torus(static_cast<int>(state.range(0)));
  const cnids::ConsensusEngine engine(cnids::best_constant_weights(t), t);
  const auto locals = random_locals(t.size(), 2);
  for (auto _ : state) {
    auto consensus = cnids::initialize(locals);
    const auto result = engine.run_to_convergence(consensus, 1e-3, 100000);
    benchmark::DoNotOptimize(result.rounds_used);
  }
}
BENCHMARK(BM_RunToConvergence)->Arg(3)->Arg(7)->Arg(11);

void BM_LaplacianSpectrum(benchmark::State& state) {
  const auto l = cnids::laplacian(cnids::Topology::torus(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    const auto spectrum = cnids::symmetric_eigenvalues(l);
    benchmark::DoNotOptimize(spectrum.eigenvalues.data());
  }
}
BENCHMARK(BM_LaplacianSpectrum)->Arg(3)->Arg(7)->Arg(11);

void BM_BestConstantWeights(benchmark::State& state) {
  const auto t = cnids::Topology::torus(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto w = cnids::best_constant_weights(t);
    benchmark::DoNotOptimize(w.entries.size());
  }
}
BENCHMARK(BM_BestConstantWeights)->Arg(3)->Arg(11);

void BM_TrainClassifier(benchmark::State& state) {
  const auto corpus = cnids::generate_synthetic(3, static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) {
    const auto model = cnids::NaiveBayesModel::train(corpus.schema, corpus.records);
    benchmark::DoNotOptimize(model.log_prior(cnids::Hypothesis::normal));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainClassifier)->Arg(1000)->Arg(10000);

void BM_LogLikelihood(benchmark::State& state) {
  const auto corpus = cnids::generate_synthetic(4, 2000, 0.5);
  const auto model = cnids::NaiveBayesModel::train(corpus.schema, corpus.records);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto ll = model.log_likelihoods(corpus.records[i++ % corpus.records.size()]);
    benchmark::DoNotOptimize(ll.anomalous);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LogLikelihood);

void BM_SimulationIteration(benchmark::State& state) {
  const auto corpus = cnids::generate_synthetic(5, 2000, 0.5);
  const auto split = cnids::stratified_split(corpus, 0.5, 6);
  const auto t = cnids::Topology::torus(static_cast<int>(state.range(0)));
  cnids::SimulationConfig config;
  config.rounds = 10;
  config.seed = 7;
  config.record_iterations = false;
  for (auto _ : state) {
    const auto report = cnids::run_simulation(t, cnids::WeightScheme::best_constant, split.train,
                                              split.test, config);
    benchmark::DoNotOptimize(report.consensus_hops_total);
  }
  state.SetItemsProcessed(state.iterations() * config.rounds);
}
BENCHMARK(BM_SimulationIteration)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace
