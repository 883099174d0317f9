// Acceptance suite: one pass/fail line per criterion, exit 0 only if every
// criterion holds. Tolerances and runtime limits are fixed here, not
// configurable.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cnids/consensus.hpp"
#include "cnids/dataset.hpp"
#include "cnids/detection.hpp"
#include "cnids/rng.hpp"
#include "cnids/simulator.hpp"
#include "cnids/spectral.hpp"
#include "cnids/topology.hpp"

namespace fs = std::filesystem;
using cnids::ConsensusEngine;
using cnids::Hypothesis;
using cnids::LabeledCorpus;
using cnids::LogLikelihoods;
using cnids::SimulationConfig;
using cnids::StudyCell;
using cnids::StudyRow;
using cnids::Topology;
using cnids::WeightScheme;

namespace {

constexpr WeightScheme kAllSchemes[] = {WeightScheme::metropolis, WeightScheme::best_constant,
                                        WeightScheme::local_degree, WeightScheme::max_degree};
constexpr WeightScheme kStudySchemes[] = {WeightScheme::best_constant, WeightScheme::local_degree,
                                          WeightScheme::max_degree};

struct Corpora {
  LabeledCorpus train;
  LabeledCorpus test;
};

const Corpora& shared_corpora() {
  static const Corpora corpora = [] {
    const LabeledCorpus corpus = cnids::generate_synthetic(2026, 4000, 0.5);
    auto split = cnids::stratified_split(corpus, 0.5, 2027);
    return Corpora{std::move(split.train), std::move(split.test)};
  }();
  return corpora;
}

// the experiment graph family: rings and tori with 9..121 nodes, the
// Petersen graph, and ten seeded random graphs of Petersen size
std::vector<StudyCell> experiment_cells(const std::string& group) {
  std::vector<StudyCell> cells;
  for (int n : {9, 25, 49, 81, 121})
    cells.push_back({"ring(" + std::to_string(n) + ")", Topology::ring(n), group});
  for (int side : {3, 5, 7, 9, 11})
    cells.push_back(
        {"torus2d(" + std::to_string(side * side) + ")", Topology::torus(side), group});
  cells.push_back({"petersen", Topology::petersen(), group});
  for (int i = 1; i <= 10; ++i)
    cells.push_back({"random#" + std::to_string(i) + "(10,15)",
                     Topology::random(10, 15, static_cast<std::uint64_t>(i)), group});
  return cells;
}

std::string format_two(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// ---- criterion 1: weight-matrix validity ----------------------------------

std::string weight_matrix_validity() {
  const auto cells = experiment_cells("c1");
  int checked = 0;
  for (const auto& cell : cells) {
    for (const auto scheme : kAllSchemes) {
      const auto report = cnids::verify_convergence_conditions(
          cnids::make_weights(scheme, cell.topology), cell.topology);
      if (!report.all_pass() || !(report.norm < 1.0))
        return std::string(cnids::to_string(scheme)) + " on " + cell.label +
               " violates the conditions (norm = " + std::to_string(report.norm) + ")";
      ++checked;
    }
  }
  if (checked != 84) return "expected 84 scheme/topology pairs, checked " + std::to_string(checked);
  return "";
}

// ---- criterion 2: consensus limit equals the arithmetic mean ---------------

Topology case_graph(int index) {
  switch (index % 13) {
    case 0: return Topology::ring(5);
    case 1: return Topology::ring(9);
    case 2: return Topology::ring(15);
    case 3: return Topology::ring(21);
    case 4: return Topology::ring(25);
    case 5: return Topology::torus(3);
    case 6: return Topology::torus(5);
    case 7: return Topology::petersen();
    case 8: return Topology::random(8, 12, 7000 + static_cast<std::uint64_t>(index));
    case 9: return Topology::random(10, 15, 7000 + static_cast<std::uint64_t>(index));
    case 10: return Topology::random(12, 18, 7000 + static_cast<std::uint64_t>(index));
    case 11: return Topology::random(14, 21, 7000 + static_cast<std::uint64_t>(index));
    default: return Topology::random(6, 15, 7000 + static_cast<std::uint64_t>(index));  // K6
  }
}

std::string consensus_limit_oracle() {
  for (int scheme_index = 0; scheme_index < 4; ++scheme_index) {
    const WeightScheme scheme = kAllSchemes[scheme_index];
    for (int c = 0; c < 50; ++c) {
      const Topology t = case_graph(c);
      const ConsensusEngine engine(cnids::make_weights(scheme, t), t);
      cnids::Rng rng(cnids::derive_seed(900, static_cast<std::uint64_t>(scheme_index * 100 + c)));
      std::vector<LogLikelihoods> locals(static_cast<std::size_t>(t.size()));
      for (auto& ll : locals) {
        ll.normal = rng.uniform(-20.0, 0.0);
        ll.anomalous = rng.uniform(-20.0, 0.0);
      }
      double mean_n = 0.0, mean_a = 0.0;
      for (const auto& ll : locals) {
        mean_n += ll.normal;
        mean_a += ll.anomalous;
      }
      mean_n /= static_cast<double>(t.size());
      mean_a /= static_cast<double>(t.size());

      auto state = cnids::initialize(locals);
      const auto result = engine.run_to_convergence(state, 1e-8, 100000);
      if (!result.converged)
        return std::string(cnids::to_string(scheme)) + " case " + std::to_string(c) +
               " did not converge";
      for (int i = 0; i < t.size(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (std::abs(state.x_normal[ui] - mean_n) > 1e-6 ||
            std::abs(state.x_anomalous[ui] - mean_a) > 1e-6)
          return std::string(cnids::to_string(scheme)) + " case " + std::to_string(c) +
                 ": node " + std::to_string(i) + " missed the mean by " +
                 std::to_string(std::max(std::abs(state.x_normal[ui] - mean_n),
                                         std::abs(state.x_anomalous[ui] - mean_a)));
      }
    }
  }
  return "";
}

// ---- criterion 3: joint recovery against the direct sum --------------------

std::string joint_recovery_oracle() {
  const auto& corpora = shared_corpora();
  const auto model = cnids::NaiveBayesModel::train(corpora.train.schema, corpora.train.records);
  const LogLikelihoods priors = model.log_priors();
  const Topology topologies[] = {Topology::petersen(), Topology::torus(3), Topology::ring(9)};

  for (const auto& t : topologies) {
    const int n = t.size();
    const int central = cnids::median_node(t);
    for (const auto scheme : kAllSchemes) {
      const ConsensusEngine engine(cnids::make_weights(scheme, t), t);
      for (int iteration = 0; iteration < 50; ++iteration) {
        std::vector<LogLikelihoods> locals(static_cast<std::size_t>(n));
        for (int node = 0; node < n; ++node) {
          const auto& record =
              corpora.test.records[static_cast<std::size_t>(iteration * n + node) %
                                   corpora.test.records.size()];
          locals[static_cast<std::size_t>(node)] = model.log_likelihoods(record);
        }
        auto state = cnids::initialize(locals);
        if (!engine.run_to_convergence(state, 1e-8, 100000).converged)
          return "consensus did not converge at epsilon 1e-8";

        const auto exact = cnids::hierarchical_aggregate(locals, t, central);
        const auto exact_decision =
            cnids::decide(cnids::network_posterior(exact.joint, priors), 1.0);
        for (const auto& joint : cnids::recover_joint(state)) {
          if (std::abs(joint.normal - exact.joint.normal) > 1e-4 ||
              std::abs(joint.anomalous - exact.joint.anomalous) > 1e-4)
            return "recovered joint off the direct sum by more than 1e-4 on " +
                   std::string(cnids::to_string(t.kind()));
          const auto node_decision =
              cnids::decide(cnids::network_posterior(joint, priors), 1.0);
          if (node_decision.alert != exact_decision.alert)
            return "a node decision disagreed with the exact aggregate";
        }
      }
    }
  }

  // the full pipeline at the same tolerance: zero recorded disagreements
  SimulationConfig config;
  config.epsilon = 1e-8;
  config.rounds = 200;
  config.seed = 31;
  const auto report = cnids::run_simulation(Topology::petersen(), WeightScheme::best_constant,
                                            corpora.train, corpora.test, config);
  if (report.iterations_with_disagreement != 0 || !(report.consensus == report.hierarchical))
    return "pipeline at epsilon 1e-8 still disagreed with the hierarchical baseline";
  return "";
}

// ---- criteria 4-6: convergence-speed orderings -----------------------------

SimulationConfig ordering_config() {
  SimulationConfig config;
  config.epsilon = 1e-3;
  config.rounds = 200;
  config.seed = 4;
  return config;
}

const std::vector<StudyRow>& ring_torus_study() {
  static const std::vector<StudyRow> rows = [] {
    std::vector<StudyCell> cells;
    for (int n : {9, 25, 49})
      cells.push_back({"ring(" + std::to_string(n) + ")", Topology::ring(n), "order"});
    for (int side : {3, 5, 7})
      cells.push_back(
          {"torus2d(" + std::to_string(side * side) + ")", Topology::torus(side), "order"});
    const auto& corpora = shared_corpora();
    return cnids::convergence_study(
        cells, std::vector<WeightScheme>(kStudySchemes, kStudySchemes + 3), corpora.train,
        corpora.test, ordering_config());
  }();
  return rows;
}

double mean_rounds_of(const std::vector<StudyRow>& rows, const std::string& label,
                      WeightScheme scheme) {
  for (const auto& row : rows)
    if (row.topology_label == label && row.scheme == scheme) return row.mean_rounds;
  throw std::runtime_error("study row not found: " + label);
}

std::string best_constant_fastest_on_tori() {
  const auto& rows = ring_torus_study();
  for (int n : {9, 25, 49}) {
    const std::string label = "torus2d(" + std::to_string(n) + ")";
    const double best = mean_rounds_of(rows, label, WeightScheme::best_constant);
    const double local = mean_rounds_of(rows, label, WeightScheme::local_degree);
    const double max = mean_rounds_of(rows, label, WeightScheme::max_degree);
    if (!(best < local && best < max))
      return label + ": best-constant " + format_two(best) + " not below local-degree " +
             format_two(local) + " and max-degree " + format_two(max);
  }
  return "";
}

std::string rings_slower_than_tori() {
  const auto& rows = ring_torus_study();
  for (int n : {9, 25, 49}) {
    const double ring = mean_rounds_of(rows, "ring(" + std::to_string(n) + ")",
                                       WeightScheme::best_constant);
    const double torus = mean_rounds_of(rows, "torus2d(" + std::to_string(n) + ")",
                                        WeightScheme::best_constant);
    if (!(ring > torus))
      return "n=" + std::to_string(n) + ": ring " + format_two(ring) + " not above torus " +
             format_two(torus);
  }
  return "";
}

std::string petersen_beats_random_graphs() {
  std::vector<StudyCell> cells;
  cells.push_back({"petersen", Topology::petersen(), "order"});
  for (int i = 1; i <= 10; ++i)
    cells.push_back({"random#" + std::to_string(i), Topology::random(10, 15, static_cast<std::uint64_t>(i)),
                     "order"});
  const auto& corpora = shared_corpora();
  const auto rows = cnids::convergence_study(cells, {WeightScheme::best_constant}, corpora.train,
                                             corpora.test, ordering_config());
  const double petersen = rows.front().mean_rounds;
  double random_mean = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) random_mean += rows[i].mean_rounds;
  random_mean /= 10.0;
  if (!(petersen < random_mean))
    return "petersen " + format_two(petersen) + " not below the random-graph mean " +
           format_two(random_mean);
  return "";
}

// ---- criterion 7: accuracy parity ------------------------------------------

std::string accuracy_parity() {
  SimulationConfig config;
  config.epsilon = 1e-3;
  config.tau = 1.0;
  config.anomalous_module_ratio = 0.6;
  config.rounds = 1000;
  config.seed = 12;
  const auto& corpora = shared_corpora();
  const auto rows =
      cnids::convergence_study(experiment_cells("parity"),
                               std::vector<WeightScheme>(kStudySchemes, kStudySchemes + 3),
                               corpora.train, corpora.test, config);
  double worst = 0.0;
  for (const auto& row : rows) {
    const double delta = std::abs(row.accuracy_consensus - row.accuracy_hierarchical);
    worst = std::max(worst, delta);
    if (delta > 0.05)
      return row.topology_label + "/" + cnids::to_string(row.scheme) +
             ": |accuracy delta| = " + std::to_string(delta) + " exceeds 0.05";
  }
  return "";
}

// ---- criterion 8: communication-cost model ---------------------------------

std::string communication_cost_model() {
  SimulationConfig config;
  config.epsilon = 1e-3;
  config.rounds = 20;
  config.seed = 21;
  const auto& corpora = shared_corpora();
  const auto report = cnids::run_simulation(Topology::torus(11), WeightScheme::best_constant,
                                            corpora.train, corpora.test, config);

  const auto n = static_cast<std::uint64_t>(report.n);
  const auto two_e = static_cast<std::uint64_t>(2 * report.edges);
  int below_distributed = 0;
  for (const auto& row : report.iterations) {
    if (row.h_co != row.h_ce * (n - 1))
      return "h_co != h_ce * (n-1) at iteration " + std::to_string(row.iteration);
    if (row.consensus_hops != static_cast<std::uint64_t>(row.rounds_used) * two_e)
      return "consensus hops != rounds_used * 2|E| at iteration " + std::to_string(row.iteration);
    if (row.consensus_hops < row.h_co) ++below_distributed;
  }
  if (!(report.consensus_hops_total > report.hierarchical_hops_total))
    return "cumulative consensus cost did not exceed the hierarchical cost on the 121-node torus";

  // both curves, per iteration: consensus vs h_ce vs h_co
  std::printf("        cost curves on torus2d(121): consensus %.0f hops/iter, hierarchical %llu, "
              "distributed %llu (consensus below distributed in %d/20 iterations)\n",
              static_cast<double>(report.consensus_hops_total) / 20.0,
              static_cast<unsigned long long>(report.h_ce_per_iteration),
              static_cast<unsigned long long>(report.h_co_per_iteration), below_distributed);
  return "";
}

// ---- criterion 9: accuracy formula -----------------------------------------

std::string accuracy_formula() {
  const cnids::ConfusionCounts counts{50, 30, 10, 10};
  if (counts.accuracy() != 0.8)
    return "accuracy((50,30,10,10)) = " + std::to_string(counts.accuracy()) + ", expected 0.8";
  return "";
}

// ---- criterion 10: classifier against a brute-force oracle -----------------

std::string classifier_oracle() {
  using cnids::ConnectionRecord;
  const cnids::FeatureSchema schema({{"f0", cnids::FeatureKind::categorical},
                                     {"f1", cnids::FeatureKind::categorical}});
  const auto rec = [](const char* a, const char* b, Hypothesis h) {
    ConnectionRecord r;
    r.values.emplace_back(std::string(a));
    r.values.emplace_back(std::string(b));
    r.label = h;
    return r;
  };
  const std::vector<ConnectionRecord> records{
      rec("a", "x", Hypothesis::anomalous), rec("a", "y", Hypothesis::anomalous),
      rec("b", "x", Hypothesis::anomalous), rec("b", "y", Hypothesis::normal),
      rec("b", "z", Hypothesis::normal),    rec("a", "z", Hypothesis::normal),
      rec("b", "x", Hypothesis::normal)};
  const auto model = cnids::NaiveBayesModel::train(schema, records);

  // counts by hand: anomalous = 3 {f0: a=2, b=1; f1: x=2, y=1, z=0},
  // normal = 4 {f0: a=1, b=3; f1: x=1, y=1, z=2}; alphabets {a,b}, {x,y,z}
  const auto smoothed = [](int count, int class_count, int alphabet) {
    return (static_cast<double>(count) + 1.0) /
           (static_cast<double>(class_count) + static_cast<double>(alphabet));
  };
  struct Case {
    const char* f0;
    const char* f1;
    double p_anomalous;
    double p_normal;
  };
  const Case cases[] = {
      {"a", "x", smoothed(2, 3, 2) * smoothed(2, 3, 3), smoothed(1, 4, 2) * smoothed(1, 4, 3)},
      {"b", "z", smoothed(1, 3, 2) * smoothed(0, 3, 3), smoothed(3, 4, 2) * smoothed(2, 4, 3)},
      {"a", "y", smoothed(2, 3, 2) * smoothed(1, 3, 3), smoothed(1, 4, 2) * smoothed(1, 4, 3)},
      // unseen token draws the reserved pseudo-category mass 1/(N_h + |A| + 1)
      {"a", "unseen", smoothed(2, 3, 2) * (1.0 / (3.0 + 3.0 + 1.0)),
       smoothed(1, 4, 2) * (1.0 / (4.0 + 3.0 + 1.0))}};

  const double prior_a = 3.0 / 7.0;
  const double prior_n = 4.0 / 7.0;
  for (const auto& c : cases) {
    ConnectionRecord probe = rec(c.f0, c.f1, Hypothesis::normal);
    const double ll_a = model.log_likelihood(probe, Hypothesis::anomalous);
    const double ll_n = model.log_likelihood(probe, Hypothesis::normal);
    if (std::abs(ll_a - std::log(c.p_anomalous)) > 1e-12 ||
        std::abs(ll_n - std::log(c.p_normal)) > 1e-12)
      return std::string("log-likelihood mismatch on (") + c.f0 + "," + c.f1 + ")";

    const double joint_a = prior_a * c.p_anomalous;
    const double joint_n = prior_n * c.p_normal;
    const auto posterior = model.local_posterior(probe);
    if (std::abs(posterior.anomalous() - joint_a / (joint_a + joint_n)) > 1e-12)
      return std::string("posterior mismatch on (") + c.f0 + "," + c.f1 + ")";
  }
  return "";
}

// ---- criterion 11: CLI determinism ------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string cli_determinism() {
  const fs::path base = fs::temp_directory_path() / "cnids_acceptance_cli";
  fs::remove_all(base);
  const fs::path out = base / "out";
  fs::create_directories(out);

  // two runs with the exact same flags, first run's artifacts set aside
  const std::string command =
      std::string(CNIDS_CLI_PATH) +
      " simulate --topology petersen --scheme metropolis --epsilon 0.001 --rounds 50"
      " --synthetic --synthetic-records 1000 --seed 7 --out " +
      out.string() + " > " + (base / "run.log").string() + " 2>&1";
  std::string first_json, first_csv, first_manifest;
  for (int run = 0; run < 2; ++run) {
    const int status = std::system(command.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
      return "CLI run failed, see " + (base / "run.log").string();
    if (run == 0) {
      first_json = slurp(out / "report.json");
      first_csv = slurp(out / "report.csv");
      first_manifest = slurp(out / "manifest.json");
    }
  }
  if (slurp(out / "report.json") != first_json)
    return "report.json differs between identical runs";
  if (slurp(out / "report.csv") != first_csv)
    return "report.csv differs between identical runs";

  // manifests match once the timestamp key is dropped
  const auto strip_timestamp = [](std::string text) {
    const auto pos = text.find("\"created_utc\"");
    if (pos != std::string::npos) {
      const auto end = text.find('\n', pos);
      text.erase(pos, end - pos);
    }
    return text;
  };
  if (strip_timestamp(slurp(out / "manifest.json")) != strip_timestamp(first_manifest))
    return "manifests differ beyond the timestamp key";
  return "";
}

// ---- runner -----------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  double time_limit_seconds;  // 0 = no stated limit
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "weight-matrix validity on every scheme/topology pair", 10.0, weight_matrix_validity},
      {2, "consensus limit matches the arithmetic mean", 30.0, consensus_limit_oracle},
      {3, "joint recovery matches the direct sum; decisions match the baseline", 0.0,
       joint_recovery_oracle},
      {4, "best-constant converges fastest on tori", 120.0, best_constant_fastest_on_tori},
      {5, "rings converge slower than tori", 0.0, rings_slower_than_tori},
      {6, "petersen converges faster than random graphs", 0.0, petersen_beats_random_graphs},
      {7, "consensus accuracy stays within 0.05 of hierarchical", 0.0, accuracy_parity},
      {8, "hop-cost model: h_co = h_ce*(n-1), hops = rounds*2|E|, cost ordering", 0.0,
       communication_cost_model},
      {9, "accuracy formula on fixed confusion counts", 0.0, accuracy_formula},
      {10, "classifier log-likelihood and posterior match a brute-force oracle", 0.0,
       classifier_oracle},
      {11, "identical CLI invocations produce byte-identical reports", 0.0, cli_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      failure = criterion.run();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && criterion.time_limit_seconds > 0.0 &&
        seconds > criterion.time_limit_seconds) {
      failure = "runtime " + format_two(seconds) + "s exceeds the " +
                format_two(criterion.time_limit_seconds) + "s limit";
    }
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", failure.empty() ? "PASS" : "FAIL",
                criterion.id, criterion.name, seconds, failure.empty() ? "" : " -- ",
                failure.c_str());
    std::fflush(stdout);
    if (!failure.empty()) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", std::size(criteria));
  return 0;
}
