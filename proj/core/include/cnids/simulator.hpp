#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cnids/consensus.hpp"
#include "cnids/dataset.hpp"
#include "cnids/rng.hpp"
#include "cnids/spectral.hpp"
#include "cnids/topology.hpp"

namespace cnids {

struct SimulationConfig {
  double epsilon = 1e-3;                 // consensus stopping threshold
  double tau = 1.0;                      // posterior-ratio alert threshold
  double anomalous_module_ratio = 0.6;   // share of modules fed an anomalous record per iteration
  int rounds = 1000;                     // simulation loop iterations
  StoppingMode mode = StoppingMode::global;
  std::uint64_t seed = 0;
  int max_consensus_rounds = 100000;     // safety valve; hitting it aborts the run
  bool record_iterations = true;         // keep per-iteration rows in the report
  std::ostream* trace_first_iteration = nullptr;  // per-round consensus trace of iteration 1
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  double accuracy() const {
    return static_cast<double>(tp + tn) / static_cast<double>(total());
  }
  void record(bool alert, bool truth_attack);

  bool operator==(const ConfusionCounts&) const = default;
};

struct IterationStats {
  int iteration = 0;  // 1-based
  int rounds_used = 0;
  std::uint64_t consensus_hops = 0;
  std::uint64_t h_ce = 0;
  std::uint64_t h_co = 0;
  bool consensus_alert = false;
  bool hierarchical_alert = false;
  bool truth_attack = false;
  int disagreeing_nodes = 0;  // nodes whose own decision differs from the hierarchical one
};

struct SimulationReport {
  std::string topology_label;
  int n = 0;
  int edges = 0;
  WeightScheme scheme = WeightScheme::metropolis;
  SimulationConfig config;
  int anomalous_modules_per_iteration = 0;
  int central_node = 0;

  ConfusionCounts consensus;
  ConfusionCounts hierarchical;

  double mean_consensus_rounds = 0.0;
  int min_consensus_rounds = 0;
  int max_consensus_rounds = 0;

  std::uint64_t h_ce_per_iteration = 0;
  std::uint64_t h_co_per_iteration = 0;
  std::uint64_t consensus_hops_total = 0;
  std::uint64_t hierarchical_hops_total = 0;
  std::uint64_t distributed_hops_total = 0;

  int iterations_with_disagreement = 0;
  std::uint64_t disagreeing_node_decisions = 0;

  std::vector<IterationStats> iterations;
};

/// Runs the full detection pipeline over `config.rounds` iterations: one
/// shared model is trained, then each iteration assigns exactly
/// round(ratio * n) modules an anomalous test record and the rest a normal
/// one (per-class pools sampled without replacement, reshuffled when
/// exhausted), computes local log-likelihoods, runs consensus to
/// convergence, and scores the consensus decision (node 0) and the
/// hierarchical baseline against the iteration's ground truth (attack iff
/// at least one module received an anomalous record). Decisions of all
/// other nodes are compared against the hierarchical one and disagreements
/// counted, never hidden.
///
/// Deterministic: equal inputs and seed give a bit-identical report.
SimulationReport run_simulation(const Topology& topology, WeightScheme scheme,
                                const LabeledCorpus& train, const LabeledCorpus& test,
                                const SimulationConfig& config);

struct ComparisonSummary {
  double accuracy_delta = 0.0;  // consensus - hierarchical
  int iterations_with_disagreement = 0;
};

ComparisonSummary compare_consensus_vs_hierarchical(const SimulationReport& report);

struct StudyCell {
  std::string label;
  Topology topology;
  std::string group;  // free-form tag carried into the study CSV
};

struct StudyRow {
  std::string group;
  std::string topology_label;
  int n = 0;
  int edges = 0;
  WeightScheme scheme = WeightScheme::metropolis;
  double mean_rounds = 0.0;
  int min_rounds = 0;
  int max_rounds = 0;
  double mean_consensus_hops = 0.0;
  std::uint64_t h_ce = 0;
  std::uint64_t h_co = 0;
  double accuracy_consensus = 0.0;
  double accuracy_hierarchical = 0.0;
  int iterations_with_disagreement = 0;
};

/// Full simulation per (cell, scheme) pair, tabulated. Cells may run in
/// parallel (max_threads <= 0 picks the hardware count); rows always come
/// back in grid order and every cell runs from the same config seed, so the
/// table is identical no matter the thread count.
std::vector<StudyRow> convergence_study(const std::vector<StudyCell>& cells,
                                        const std::vector<WeightScheme>& schemes,
                                        const LabeledCorpus& train, const LabeledCorpus& test,
                                        const SimulationConfig& config, int max_threads = 0);

/// Report serialization: summary JSON with a fixed key order, and flat CSV
/// rows, one per iteration.
std::string report_to_json(const SimulationReport& report);
void report_to_csv(const SimulationReport& report, std::ostream& out);
void study_to_csv(const std::vector<StudyRow>& rows, std::ostream& out);

/// Draws pool entries without replacement, reshuffling once the pool is
/// exhausted. Deterministic per seed.
class PoolSampler {
public:
  PoolSampler(std::vector<int> indices, std::uint64_t seed);

  int next();
  std::size_t pool_size() const { return indices_.size(); }

private:
  std::vector<int> indices_;
  std::size_t pos_ = 0;
  Rng rng_;
};

}  // namespace cnids
