#include "cnids/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include "cnids/detection.hpp"

namespace cnids {

void ConfusionCounts::record(bool alert, bool truth_attack) {
  if (truth_attack) {
    alert ? ++tp : ++fn;
  } else {
    alert ? ++fp : ++tn;
  }
}

PoolSampler::PoolSampler(std::vector<int> indices, std::uint64_t seed)
    : indices_(std::move(indices)), rng_(seed) {
  if (indices_.empty()) throw std::invalid_argument("sampler pool is empty");
  rng_.shuffle(indices_);
}

int PoolSampler::next() {
  if (pos_ == indices_.size()) {
    rng_.shuffle(indices_);
    pos_ = 0;
  }
  return indices_[pos_++];
}

namespace {

void validate_config(const SimulationConfig& config) {
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(config.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (config.anomalous_module_ratio < 0.0 || config.anomalous_module_ratio > 1.0)
    throw std::invalid_argument("anomalous module ratio must be in [0, 1]");
  if (config.rounds < 1) throw std::invalid_argument("simulation needs at least one iteration");
  if (config.max_consensus_rounds < 1)
    throw std::invalid_argument("max consensus rounds must be at least 1");
}

std::string failed_conditions(const ConditionReport& report) {
  std::string failed;
  const auto add = [&failed](const char* name) {
    if (!failed.empty()) failed += ", ";
    failed += name;
  };
  if (!report.sparsity_matches) add("sparsity");
  if (!report.symmetric) add("symmetry");
  if (!report.rows_sum_to_one) add("row sums");
  if (!report.spectral_norm_ok) add("spectral norm");
  return failed;
}

}  // namespace

SimulationReport run_simulation(const Topology& topology, WeightScheme scheme,
                                const LabeledCorpus& train, const LabeledCorpus& test,
                                const SimulationConfig& config) {
  validate_config(config);
  if (!(train.schema == test.schema))
    throw std::invalid_argument("train and test corpora use different schemas");

  const int n = topology.size();
  const NaiveBayesModel model = NaiveBayesModel::train(train.schema, train.records);
  const LogLikelihoods priors = model.log_priors();

  const WeightMatrix weights = make_weights(scheme, topology);
  const ConditionReport conditions = verify_convergence_conditions(weights, topology);
  if (!conditions.all_pass())
    throw std::runtime_error("weight matrix fails convergence conditions (" +
                             failed_conditions(conditions) +
                             "); consensus would not converge on this topology");

  const int central = median_node(topology);
  const std::uint64_t h_ce = hierarchical_cost(topology, central);
  const std::uint64_t h_co = broadcast_cost(topology, central);
  const int k_anomalous =
      static_cast<int>(std::lround(config.anomalous_module_ratio * static_cast<double>(n)));
  const bool truth_attack = k_anomalous >= 1;

  // per-class record pools, drawn without replacement
  std::vector<int> anomalous_pool;
  std::vector<int> normal_pool;
  for (std::size_t i = 0; i < test.records.size(); ++i) {
    (test.records[i].label == Hypothesis::anomalous ? anomalous_pool : normal_pool)
        .push_back(static_cast<int>(i));
  }
  if (k_anomalous > 0 && anomalous_pool.empty())
    throw std::runtime_error("test corpus has no anomalous records but the module ratio is " +
                             std::to_string(config.anomalous_module_ratio));
  if (k_anomalous < n && normal_pool.empty())
    throw std::runtime_error("test corpus has no normal records but the module ratio is " +
                             std::to_string(config.anomalous_module_ratio));

  Rng assign_rng(derive_seed(config.seed, 0));
  std::optional<PoolSampler> anomalous_sampler;
  std::optional<PoolSampler> normal_sampler;
  if (!anomalous_pool.empty())
    anomalous_sampler.emplace(std::move(anomalous_pool), derive_seed(config.seed, 1));
  if (!normal_pool.empty())
    normal_sampler.emplace(std::move(normal_pool), derive_seed(config.seed, 2));

  const ConsensusEngine engine(weights, topology);

  SimulationReport report;
  report.topology_label = to_string(topology.kind());
  report.n = n;
  report.edges = topology.edge_count();
  report.scheme = scheme;
  report.config = config;
  report.config.trace_first_iteration = nullptr;  // not meaningful in the echo
  report.anomalous_modules_per_iteration = k_anomalous;
  report.central_node = central;
  report.h_ce_per_iteration = h_ce;
  report.h_co_per_iteration = h_co;
  if (config.record_iterations) report.iterations.reserve(static_cast<std::size_t>(config.rounds));

  std::vector<int> module_order(static_cast<std::size_t>(n));
  std::iota(module_order.begin(), module_order.end(), 0);
  std::vector<char> gets_anomalous(static_cast<std::size_t>(n), 0);
  std::vector<LogLikelihoods> locals(static_cast<std::size_t>(n));

  std::uint64_t rounds_sum = 0;
  int rounds_min = 0;
  int rounds_max = 0;

  for (int iteration = 1; iteration <= config.rounds; ++iteration) {
    // exactly k modules read an anomalous connection this iteration
    assign_rng.shuffle(module_order);
    std::fill(gets_anomalous.begin(), gets_anomalous.end(), 0);
    for (int i = 0; i < k_anomalous; ++i)
      gets_anomalous[static_cast<std::size_t>(module_order[static_cast<std::size_t>(i)])] = 1;

    for (int node = 0; node < n; ++node) {
      const int record_index = gets_anomalous[static_cast<std::size_t>(node)]
                                   ? anomalous_sampler->next()
                                   : normal_sampler->next();
      locals[static_cast<std::size_t>(node)] =
          model.log_likelihoods(test.records[static_cast<std::size_t>(record_index)]);
    }

    ConsensusState state = initialize(locals);
    std::ostream* trace = iteration == 1 ? config.trace_first_iteration : nullptr;
    const ConvergenceResult consensus_result = engine.run_to_convergence(
        state, config.epsilon, config.max_consensus_rounds, config.mode, trace);
    if (!consensus_result.converged)
      throw std::runtime_error("consensus did not converge within " +
                               std::to_string(config.max_consensus_rounds) +
                               " rounds at iteration " + std::to_string(iteration));

    const std::vector<LogLikelihoods> joints = recover_joint(state);
    const HierarchicalResult hier = hierarchical_aggregate(locals, topology, central);
    const Decision hier_decision = decide(network_posterior(hier.joint, priors), config.tau);

    int disagreeing = 0;
    bool consensus_alert = false;
    for (int node = 0; node < n; ++node) {
      const Decision node_decision =
          decide(network_posterior(joints[static_cast<std::size_t>(node)], priors), config.tau);
      if (node == 0) consensus_alert = node_decision.alert;
      if (node_decision.alert != hier_decision.alert) ++disagreeing;
    }

    report.consensus.record(consensus_alert, truth_attack);
    report.hierarchical.record(hier_decision.alert, truth_attack);
    if (disagreeing > 0) ++report.iterations_with_disagreement;
    report.disagreeing_node_decisions += static_cast<std::uint64_t>(disagreeing);

    report.consensus_hops_total += state.hop_count;
    report.hierarchical_hops_total += h_ce;
    report.distributed_hops_total += h_co;

    rounds_sum += static_cast<std::uint64_t>(consensus_result.rounds_used);
    if (iteration == 1) {
      rounds_min = consensus_result.rounds_used;
      rounds_max = consensus_result.rounds_used;
    } else {
      rounds_min = std::min(rounds_min, consensus_result.rounds_used);
      rounds_max = std::max(rounds_max, consensus_result.rounds_used);
    }

    if (config.record_iterations) {
      report.iterations.push_back({iteration, consensus_result.rounds_used, state.hop_count, h_ce,
                                   h_co, consensus_alert, hier_decision.alert, truth_attack,
                                   disagreeing});
    }
  }

  report.mean_consensus_rounds =
      static_cast<double>(rounds_sum) / static_cast<double>(config.rounds);
  report.min_consensus_rounds = rounds_min;
  report.max_consensus_rounds = rounds_max;
  return report;
}

ComparisonSummary compare_consensus_vs_hierarchical(const SimulationReport& report) {
  return {report.consensus.accuracy() - report.hierarchical.accuracy(),
          report.iterations_with_disagreement};
}

std::vector<StudyRow> convergence_study(const std::vector<StudyCell>& cells,
                                        const std::vector<WeightScheme>& schemes,
                                        const LabeledCorpus& train, const LabeledCorpus& test,
                                        const SimulationConfig& config, int max_threads) {
  if (cells.empty() || schemes.empty())
    throw std::invalid_argument("study grid must name at least one topology and one scheme");

  struct Task {
    const StudyCell* cell;
    WeightScheme scheme;
  };
  std::vector<Task> tasks;
  tasks.reserve(cells.size() * schemes.size());
  for (const auto& cell : cells)
    for (const auto scheme : schemes) tasks.push_back({&cell, scheme});

  std::vector<StudyRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());

  const auto run_task = [&](std::size_t index) {
    const Task& task = tasks[index];
    try {
      SimulationConfig cell_config = config;
      cell_config.record_iterations = false;
      cell_config.trace_first_iteration = nullptr;
      const SimulationReport report =
          run_simulation(task.cell->topology, task.scheme, train, test, cell_config);
      rows[index] = {task.cell->group,
                     task.cell->label,
                     report.n,
                     report.edges,
                     task.scheme,
                     report.mean_consensus_rounds,
                     report.min_consensus_rounds,
                     report.max_consensus_rounds,
                     static_cast<double>(report.consensus_hops_total) /
                         static_cast<double>(config.rounds),
                     report.h_ce_per_iteration,
                     report.h_co_per_iteration,
                     report.consensus.accuracy(),
                     report.hierarchical.accuracy(),
                     report.iterations_with_disagreement};
    } catch (...) {
      errors[index] = std::current_exception();
    }
  };

  int threads = max_threads > 0 ? max_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));

  if (threads == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        while (true) {
          const std::size_t index = next.fetch_add(1);
          if (index >= tasks.size()) return;
          run_task(index);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);
  return rows;
}

}  // namespace cnids
