#include <ostream>

#include <nlohmann/json.hpp>

#include "cnids/simulator.hpp"
#include "cnids/version.hpp"
#include "text_util.hpp"

namespace cnids {

namespace {

nlohmann::ordered_json confusion_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}, {"accuracy", c.accuracy()}};
}

}  // namespace

std::string report_to_json(const SimulationReport& report) {
  nlohmann::ordered_json doc;
  doc["tool"] = kToolName;
  doc["version"] = kVersion;
  doc["topology"] = {{"kind", report.topology_label},
                     {"n", report.n},
                     {"edges", report.edges},
                     {"central_node", report.central_node}};
  doc["scheme"] = to_string(report.scheme);
  doc["config"] = {{"epsilon", report.config.epsilon},
                   {"tau", report.config.tau},
                   {"anomalous_module_ratio", report.config.anomalous_module_ratio},
                   {"rounds", report.config.rounds},
                   {"mode", to_string(report.config.mode)},
                   {"seed", report.config.seed},
                   {"max_consensus_rounds", report.config.max_consensus_rounds}};
  doc["anomalous_modules_per_iteration"] = report.anomalous_modules_per_iteration;

  auto consensus = confusion_json(report.consensus);
  consensus["rounds_mean"] = report.mean_consensus_rounds;
  consensus["rounds_min"] = report.min_consensus_rounds;
  consensus["rounds_max"] = report.max_consensus_rounds;
  consensus["hops_total"] = report.consensus_hops_total;
  doc["consensus"] = std::move(consensus);

  auto hierarchical = confusion_json(report.hierarchical);
  hierarchical["hops_per_iteration"] = report.h_ce_per_iteration;
  hierarchical["hops_total"] = report.hierarchical_hops_total;
  doc["hierarchical"] = std::move(hierarchical);

  doc["distributed"] = {{"hops_per_iteration", report.h_co_per_iteration},
                        {"hops_total", report.distributed_hops_total}};

  const ComparisonSummary comparison = compare_consensus_vs_hierarchical(report);
  doc["comparison"] = {{"accuracy_delta", comparison.accuracy_delta},
                       {"iterations_with_disagreement", report.iterations_with_disagreement},
                       {"disagreeing_node_decisions", report.disagreeing_node_decisions}};
  return doc.dump(2) + "\n";
}

void report_to_csv(const SimulationReport& report, std::ostream& out) {
  out << "iteration,rounds_used,consensus_hops,h_ce,h_co,consensus_alert,hierarchical_alert,"
         "truth_attack,disagreeing_nodes\n";
  for (const auto& row : report.iterations) {
    out << row.iteration << ',' << row.rounds_used << ',' << row.consensus_hops << ',' << row.h_ce
        << ',' << row.h_co << ',' << (row.consensus_alert ? 1 : 0) << ','
        << (row.hierarchical_alert ? 1 : 0) << ',' << (row.truth_attack ? 1 : 0) << ','
        << row.disagreeing_nodes << '\n';
  }
}

void study_to_csv(const std::vector<StudyRow>& rows, std::ostream& out) {
  out << "group,topology,n,edges,scheme,mean_rounds,min_rounds,max_rounds,mean_consensus_hops,"
         "h_ce,h_co,accuracy_consensus,accuracy_hierarchical,iterations_with_disagreement\n";
  for (const auto& row : rows) {
    out << row.group << ',' << row.topology_label << ',' << row.n << ',' << row.edges << ','
        << to_string(row.scheme) << ',' << detail::format_double(row.mean_rounds) << ','
        << row.min_rounds << ',' << row.max_rounds << ','
        << detail::format_double(row.mean_consensus_hops) << ',' << row.h_ce << ',' << row.h_co
        << ',' << detail::format_double(row.accuracy_consensus) << ','
        << detail::format_double(row.accuracy_hierarchical) << ','
        << row.iterations_with_disagreement << '\n';
  }
}

}  // namespace cnids
