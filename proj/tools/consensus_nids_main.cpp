// Command line front end: `simulate` runs the full detection pipeline over
// one topology and writes report files, `study` runs preset experiment grids
// into a combined CSV, `validate` checks the convergence conditions of a
// weight matrix. Exit codes: 0 success, 1 runtime or validation failure,
// 2 usage error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cnids/consensus.hpp"
#include "cnids/dataset.hpp"
#include "cnids/detection.hpp"
#include "cnids/rng.hpp"
#include "cnids/simulator.hpp"
#include "cnids/spectral.hpp"
#include "cnids/topology.hpp"
#include "cnids/version.hpp"

namespace fs = std::filesystem;

namespace {

// flag combinations the parser alone cannot reject; mapped to exit code 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[32];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// Run manifest: resolved config and input digests recorded before execution,
// status updated afterwards. The timestamp is confined to one key so report
// payloads stay byte-comparable across runs.
class Manifest {
public:
  Manifest(fs::path out_dir, std::string command)
      : path_(out_dir / "manifest.json") {
    doc_["tool"] = cnids::kToolName;
    doc_["version"] = cnids::kVersion;
    doc_["command"] = std::move(command);
    doc_["created_utc"] = utc_now();
    doc_["status"] = "running";
    doc_["config"] = nlohmann::ordered_json::object();
    doc_["inputs"] = nlohmann::ordered_json::object();
    doc_["outputs"] = nlohmann::ordered_json::array();
  }

  nlohmann::ordered_json& config() { return doc_["config"]; }

  void add_input(const std::string& key, const fs::path& file) {
    doc_["inputs"][key] = {{"path", file.string()}, {"digest", file_digest(file)}};
  }

  void add_output(const fs::path& file) { doc_["outputs"].push_back(file.string()); }

  void write(const std::string& status, const std::string& error = "") {
    doc_["status"] = status;
    if (!error.empty()) doc_["error"] = error;
    std::ofstream out(path_);
    if (!out) throw std::runtime_error("cannot write manifest: " + path_.string());
    out << doc_.dump(2) << '\n';
  }

private:
  fs::path path_;
  nlohmann::ordered_json doc_;
};

struct TopologyOptions {
  std::string kind;
  int n = 10;
  int side = 3;
  int edges = 15;
  std::string file;
  CLI::Option* n_opt = nullptr;
  CLI::Option* side_opt = nullptr;
  CLI::Option* file_opt = nullptr;
};

void add_topology_options(CLI::App* cmd, TopologyOptions& o) {
  cmd->add_option("--topology", o.kind, "Topology: ring|torus|petersen|random|file")
      ->required()
      ->check(CLI::IsMember({"ring", "torus", "petersen", "random", "file"}));
  o.n_opt = cmd->add_option("--n", o.n, "Node count (ring, random)")->check(CLI::Range(1, 1000000));
  o.side_opt = cmd->add_option("--side", o.side, "Torus side length")->check(CLI::Range(1, 1000));
  cmd->add_option("--edges", o.edges, "Edge count (random; default 15)")
      ->check(CLI::Range(1, 1000000));
  o.file_opt = cmd->add_option("--topology-file", o.file, "Edge-list file, one 'i j' per line");
}

cnids::Topology build_topology(const TopologyOptions& o, std::uint64_t seed, std::string& label) {
  if (o.kind == "ring") {
    if (o.n_opt->count() == 0) throw UsageError("--topology ring requires --n");
    label = "ring(" + std::to_string(o.n) + ")";
    return cnids::Topology::ring(o.n);
  }
  if (o.kind == "torus") {
    if (o.side_opt->count() == 0) throw UsageError("--topology torus requires --side");
    label = "torus2d(" + std::to_string(o.side * o.side) + ")";
    return cnids::Topology::torus(o.side);
  }
  if (o.kind == "petersen") {
    label = "petersen";
    return cnids::Topology::petersen();
  }
  if (o.kind == "random") {
    label = "random(" + std::to_string(o.n) + "," + std::to_string(o.edges) + ")";
    return cnids::Topology::random(o.n, o.edges, cnids::derive_seed(seed, 100));
  }
  if (o.file_opt->count() == 0) throw UsageError("--topology file requires --topology-file");
  label = "file:" + o.file;
  return cnids::Topology::load_edge_list(fs::path(o.file));
}

struct CorpusOptions {
  std::string train_csv;
  std::string test_csv;
  std::string label_map;
  bool header = false;
  bool synthetic = false;
  int synthetic_records = 4000;
  double synthetic_fraction = 0.5;
  double train_fraction = 0.5;
};

void add_corpus_options(CLI::App* cmd, CorpusOptions& o) {
  cmd->add_option("--train-csv", o.train_csv, "Training corpus (41-column connection records)");
  cmd->add_option("--test-csv", o.test_csv, "Test corpus");
  cmd->add_option("--label-map", o.label_map,
                  "Label map file ('raw_label -> normal|anomalous|exclude'); default maps the "
                  "DoS attack names");
  cmd->add_flag("--header", o.header, "Corpus CSV files have a header row");
  cmd->add_flag("--synthetic", o.synthetic, "Generate a synthetic corpus instead of reading files");
  cmd->add_option("--synthetic-records", o.synthetic_records, "Synthetic corpus size")
      ->check(CLI::Range(4, 100000000));
  cmd->add_option("--synthetic-fraction", o.synthetic_fraction,
                  "Anomalous share of the synthetic corpus")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--train-fraction", o.train_fraction, "Train share of the synthetic corpus")
      ->check(CLI::Range(0.0, 1.0));
}

struct ResolvedCorpora {
  cnids::LabeledCorpus train;
  cnids::LabeledCorpus test;
};

ResolvedCorpora resolve_corpora(const CorpusOptions& o, std::uint64_t seed, Manifest& manifest) {
  auto& config = manifest.config();
  if (o.synthetic) {
    if (!o.train_csv.empty() || !o.test_csv.empty())
      throw UsageError("--synthetic conflicts with --train-csv/--test-csv");
    config["corpus"] = {{"kind", "synthetic"},
                        {"records", o.synthetic_records},
                        {"anomalous_fraction", o.synthetic_fraction},
                        {"train_fraction", o.train_fraction}};
    const cnids::LabeledCorpus corpus = cnids::generate_synthetic(
        cnids::derive_seed(seed, 200), o.synthetic_records, o.synthetic_fraction);
    auto split = cnids::stratified_split(corpus, o.train_fraction, cnids::derive_seed(seed, 201));
    return {std::move(split.train), std::move(split.test)};
  }
  if (o.train_csv.empty() || o.test_csv.empty())
    throw UsageError("no corpus given: pass --train-csv and --test-csv, or --synthetic");
  config["corpus"] = {{"kind", "file"}, {"train_csv", o.train_csv}, {"test_csv", o.test_csv}};
  manifest.add_input("train_csv", o.train_csv);
  manifest.add_input("test_csv", o.test_csv);
  cnids::LabelMap labels = cnids::LabelMap::ddos_default();
  if (!o.label_map.empty()) {
    manifest.add_input("label_map", o.label_map);
    config["corpus"]["label_map"] = o.label_map;
    labels = cnids::LabelMap::load(fs::path(o.label_map));
  }
  const cnids::FeatureSchema schema = cnids::nslkdd_schema();
  return {cnids::load_nslkdd_csv(fs::path(o.train_csv), schema, labels, o.header),
          cnids::load_nslkdd_csv(fs::path(o.test_csv), schema, labels, o.header)};
}

struct SimOptions {
  double epsilon = 1e-3;
  double tau = 1.0;
  double ratio = 0.6;
  int rounds = 1000;
  std::string mode = "global";
  std::uint64_t seed = 0;
  int max_consensus_rounds = 100000;
};

void add_sim_options(CLI::App* cmd, SimOptions& o) {
  cmd->add_option("--epsilon", o.epsilon, "Consensus stopping threshold (default 0.001)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tau", o.tau, "Posterior-ratio alert threshold (default 1.0)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ratio", o.ratio,
                  "Share of modules fed an anomalous connection per iteration (default 0.6)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--rounds", o.rounds, "Simulation loop iterations (default 1000)")
      ->check(CLI::Range(1, 100000000));
  cmd->add_option("--mode", o.mode, "Consensus stopping mode: global|freeze")
      ->check(CLI::IsMember({"global", "freeze"}));
  cmd->add_option("--seed", o.seed, "Base seed for every random draw");
  cmd->add_option("--max-consensus-rounds", o.max_consensus_rounds,
                  "Abort threshold for a single consensus loop")
      ->check(CLI::Range(1, 1000000000));
}

cnids::SimulationConfig make_config(const SimOptions& o) {
  cnids::SimulationConfig config;
  config.epsilon = o.epsilon;
  config.tau = o.tau;
  config.anomalous_module_ratio = o.ratio;
  config.rounds = o.rounds;
  config.mode = cnids::stopping_mode_from_string(o.mode);
  config.seed = o.seed;
  config.max_consensus_rounds = o.max_consensus_rounds;
  return config;
}

nlohmann::ordered_json config_json(const cnids::SimulationConfig& c) {
  return {{"epsilon", c.epsilon},
          {"tau", c.tau},
          {"anomalous_module_ratio", c.anomalous_module_ratio},
          {"rounds", c.rounds},
          {"mode", cnids::to_string(c.mode)},
          {"seed", c.seed},
          {"max_consensus_rounds", c.max_consensus_rounds}};
}

int thread_cap() {
  const char* env = std::getenv("CONSENSUS_NIDS_THREADS");
  if (!env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1)
    throw UsageError("CONSENSUS_NIDS_THREADS must be a positive integer");
  return static_cast<int>(v);
}

int run_simulate(const TopologyOptions& topo_opts, const CorpusOptions& corpus_opts,
                 const SimOptions& sim_opts, const std::string& scheme_name,
                 const std::string& out_dir, const std::string& trace_file) {
  fs::create_directories(out_dir);
  Manifest manifest(out_dir, "simulate");
  try {
    std::string label;
    const cnids::Topology topology = build_topology(topo_opts, sim_opts.seed, label);
    if (!topo_opts.file.empty()) manifest.add_input("topology_file", topo_opts.file);

    cnids::SimulationConfig config = make_config(sim_opts);
    const ResolvedCorpora corpora = resolve_corpora(corpus_opts, sim_opts.seed, manifest);
    const cnids::WeightScheme scheme = cnids::weight_scheme_from_string(scheme_name);

    manifest.config()["topology"] = label;
    manifest.config()["scheme"] = scheme_name;
    manifest.config().update(config_json(config));
    const fs::path report_json_path = fs::path(out_dir) / "report.json";
    const fs::path report_csv_path = fs::path(out_dir) / "report.csv";
    manifest.add_output(report_json_path);
    manifest.add_output(report_csv_path);
    manifest.write("running");

    std::ofstream trace;
    if (!trace_file.empty()) {
      trace.open(trace_file);
      if (!trace) throw std::runtime_error("cannot write trace file: " + trace_file);
      config.trace_first_iteration = &trace;
    }

    const cnids::SimulationReport report =
        cnids::run_simulation(topology, scheme, corpora.train, corpora.test, config);

    std::ofstream json_out(report_json_path);
    json_out << cnids::report_to_json(report);
    std::ofstream csv_out(report_csv_path);
    cnids::report_to_csv(report, csv_out);
    manifest.write("ok");

    std::printf(
        "%s %s: consensus accuracy %.4f, hierarchical %.4f, mean rounds %.1f; wrote %s\n",
        label.c_str(), cnids::to_string(report.scheme), report.consensus.accuracy(),
        report.hierarchical.accuracy(), report.mean_consensus_rounds,
        report_json_path.string().c_str());
    return 0;
  } catch (const UsageError&) {
    throw;  // usage problems are not run failures; no failed manifest
  } catch (const std::exception& e) {
    manifest.write("failed", e.what());
    throw;
  }
}

struct FigureGrid {
  std::vector<cnids::StudyCell> cells;
  std::vector<cnids::WeightScheme> schemes;
};

FigureGrid make_figure_grid(int figure, std::uint64_t seed, int random_count) {
  using cnids::Topology;
  const std::string group = "fig" + std::to_string(figure);
  const std::vector<int> sides{3, 5, 7, 9, 11};          // tori with 9..121 nodes
  const std::vector<int> ring_sizes{9, 25, 49, 81, 121};

  FigureGrid grid;
  const auto add_tori = [&] {
    for (int side : sides)
      grid.cells.push_back(
          {"torus2d(" + std::to_string(side * side) + ")", Topology::torus(side), group});
  };
  const auto add_rings = [&] {
    for (int n : ring_sizes)
      grid.cells.push_back({"ring(" + std::to_string(n) + ")", Topology::ring(n), group});
  };
  const auto add_petersen_and_randoms = [&] {
    grid.cells.push_back({"petersen", Topology::petersen(), group});
    for (int i = 0; i < random_count; ++i)
      grid.cells.push_back({"random#" + std::to_string(i + 1) + "(10,15)",
                            Topology::random(10, 15, cnids::derive_seed(seed, 1000 + static_cast<std::uint64_t>(i))),
                            group});
  };

  using enum cnids::WeightScheme;
  switch (figure) {
    case 2:
      add_tori();
      grid.schemes = {best_constant, local_degree, max_degree};
      break;
    case 3:
      add_rings();
      add_tori();
      grid.schemes = {best_constant};
      break;
    case 4:
      add_petersen_and_randoms();
      grid.schemes = {best_constant};
      break;
    case 5:
      add_rings();
      add_tori();
      add_petersen_and_randoms();
      grid.schemes = {best_constant, local_degree, max_degree};
      break;
    case 6:
      add_tori();
      grid.schemes = {best_constant};
      break;
    default:
      throw UsageError("--figs accepts 2..6, got " + std::to_string(figure));
  }
  return grid;
}

int run_study(const std::vector<int>& figures, int random_count, const CorpusOptions& corpus_opts,
              const SimOptions& sim_opts, const std::string& out_dir) {
  fs::create_directories(out_dir);
  Manifest manifest(out_dir, "study");
  try {
    const cnids::SimulationConfig config = make_config(sim_opts);
    manifest.config().update(config_json(config));
    manifest.config()["figures"] = figures;
    manifest.config()["random_count"] = random_count;

    CorpusOptions defaulted = corpus_opts;
    if (!defaulted.synthetic && defaulted.train_csv.empty() && defaulted.test_csv.empty())
      defaulted.synthetic = true;  // bare `study --figs N` runs on a synthetic corpus
    const ResolvedCorpora corpora = resolve_corpora(defaulted, sim_opts.seed, manifest);

    const fs::path csv_path = fs::path(out_dir) / "study.csv";
    manifest.add_output(csv_path);
    manifest.write("running");

    std::vector<cnids::StudyRow> all_rows;
    for (int figure : figures) {
      const FigureGrid grid = make_figure_grid(figure, sim_opts.seed, random_count);
      auto rows = cnids::convergence_study(grid.cells, grid.schemes, corpora.train, corpora.test,
                                           config, thread_cap());
      all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }

    std::ofstream csv_out(csv_path);
    cnids::study_to_csv(all_rows, csv_out);
    manifest.write("ok");

    std::printf("study complete: %zu rows written to %s\n", all_rows.size(),
                csv_path.string().c_str());
    return 0;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    manifest.write("failed", e.what());
    throw;
  }
}

int run_validate(const TopologyOptions& topo_opts, const std::string& scheme_name,
                 const std::string& weights_csv, const std::string& export_weights,
                 std::uint64_t seed) {
  if (scheme_name.empty() == weights_csv.empty())
    throw UsageError("pass exactly one of --scheme or --weights-csv");

  std::string label;
  const cnids::Topology topology = build_topology(topo_opts, seed, label);

  cnids::WeightMatrix weights;
  if (!weights_csv.empty()) {
    std::ifstream in(weights_csv);
    if (!in) throw std::runtime_error("cannot open weight matrix file: " + weights_csv);
    weights = {cnids::WeightScheme::custom, cnids::matrix_from_csv(in)};
  } else {
    weights = cnids::make_weights(cnids::weight_scheme_from_string(scheme_name), topology);
  }

  const cnids::ConditionReport report = cnids::verify_convergence_conditions(weights, topology);
  const auto line = [](const char* name, bool ok) {
    std::printf("condition %s: %s\n", name, ok ? "pass" : "FAIL");
  };
  line("1 sparsity matches adjacency", report.sparsity_matches);
  line("2 symmetric", report.symmetric);
  line("3 rows sum to one", report.rows_sum_to_one);
  std::printf("condition 4 spectral norm < 1: %s (norm = %.9f)\n",
              report.spectral_norm_ok ? "pass" : "FAIL", report.norm);
  std::printf("%s on %s (n=%d): %s\n", cnids::to_string(weights.scheme), label.c_str(),
              topology.size(), report.all_pass() ? "all conditions hold" : "conditions violated");

  if (!export_weights.empty()) {
    std::ofstream out(export_weights);
    if (!out) throw std::runtime_error("cannot write weights file: " + export_weights);
    cnids::write_csv(weights.entries, out);
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fully distributed consensus-based network intrusion detection simulator"};
  app.set_version_flag("--version", std::string(cnids::kVersion));
  app.require_subcommand(1);

  int rc = 0;

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write report files");
  TopologyOptions sim_topo;
  CorpusOptions sim_corpus;
  SimOptions sim_opts;
  std::string sim_scheme;
  std::string sim_out = ".";
  std::string sim_trace;
  add_topology_options(simulate, sim_topo);
  simulate->add_option("--scheme", sim_scheme,
                       "Weight scheme: metropolis|best-constant|local-degree|max-degree")
      ->required()
      ->check(CLI::IsMember({"metropolis", "best-constant", "local-degree", "max-degree"}));
  add_sim_options(simulate, sim_opts);
  add_corpus_options(simulate, sim_corpus);
  simulate->add_option("--out", sim_out, "Output directory (default .)");
  simulate->add_option("--trace", sim_trace, "Write a per-round consensus trace of iteration 1");
  simulate->callback(
      [&] { rc = run_simulate(sim_topo, sim_corpus, sim_opts, sim_scheme, sim_out, sim_trace); });

  // study
  auto* study = app.add_subcommand("study", "Run preset experiment grids into one CSV");
  std::vector<int> figures;
  int random_count = 10;
  CorpusOptions study_corpus;
  SimOptions study_opts;
  std::string study_out = ".";
  study->add_option("--figs", figures, "Preset grids to run (2..6)")
      ->required()
      ->check(CLI::Range(2, 6));
  study->add_option("--random-count", random_count, "Number of random graphs in preset 4/5")
      ->check(CLI::Range(1, 1000));
  add_sim_options(study, study_opts);
  add_corpus_options(study, study_corpus);
  study->add_option("--out", study_out, "Output directory (default .)");
  study->callback([&] { rc = run_study(figures, random_count, study_corpus, study_opts, study_out); });

  // validate
  auto* validate = app.add_subcommand("validate", "Check the consensus convergence conditions");
  TopologyOptions val_topo;
  std::string val_scheme;
  std::string val_weights;
  std::string val_export;
  std::uint64_t val_seed = 0;
  add_topology_options(validate, val_topo);
  validate->add_option("--scheme", val_scheme,
                       "Weight scheme: metropolis|best-constant|local-degree|max-degree")
      ->check(CLI::IsMember({"metropolis", "best-constant", "local-degree", "max-degree"}));
  validate->add_option("--weights-csv", val_weights, "Validate a weight matrix read from CSV");
  validate->add_option("--export-weights", val_export, "Write the validated matrix as CSV");
  validate->add_option("--seed", val_seed, "Seed for --topology random");
  validate->callback(
      [&] { rc = run_validate(val_topo, val_scheme, val_weights, val_export, val_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
