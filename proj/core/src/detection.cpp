#include "cnids/detection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cnids {

Posterior network_posterior(const LogLikelihoods& joint, const LogLikelihoods& log_priors) {
  const double joint_n = log_priors.normal + joint.normal;
  const double joint_a = log_priors.anomalous + joint.anomalous;
  if (!std::isfinite(joint_n) || !std::isfinite(joint_a))
    throw std::invalid_argument("posterior inputs must be finite");
  const double log_z = log_sum_exp(joint_n, joint_a);
  return {joint_n - log_z, joint_a - log_z};
}

Decision decide(const Posterior& posterior, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("decision threshold tau must be positive");
  const double log_ratio = posterior.log_ratio();
  return {log_ratio > std::log(tau), log_ratio, posterior};
}

int median_node(const Topology& t) {
  int best = 0;
  std::uint64_t best_total = std::numeric_limits<std::uint64_t>::max();
  for (int candidate = 0; candidate < t.size(); ++candidate) {
    std::uint64_t total = 0;
    for (int d : t.shortest_path_lengths(candidate)) total += static_cast<std::uint64_t>(d);
    if (total < best_total) {
      best_total = total;
      best = candidate;
    }
  }
  return best;
}

std::uint64_t hierarchical_cost(const Topology& t, int central) {
  std::uint64_t total = 0;
  for (int d : t.shortest_path_lengths(central)) total += static_cast<std::uint64_t>(d);
  return total;
}

std::uint64_t broadcast_cost(const Topology& t, int central) {
  return hierarchical_cost(t, central) * static_cast<std::uint64_t>(t.size() - 1);
}

HierarchicalResult hierarchical_aggregate(const std::vector<LogLikelihoods>& locals,
                                          const Topology& t, int central) {
  if (static_cast<int>(locals.size()) != t.size())
    throw std::invalid_argument("one local likelihood pair per node is required");
  if (central < 0 || central >= t.size())
    throw std::invalid_argument("central node out of range");

  LogLikelihoods joint{0.0, 0.0};
  for (const auto& ll : locals) {
    joint.normal += ll.normal;
    joint.anomalous += ll.anomalous;
  }
  return {joint, hierarchical_cost(t, central)};
}

}  // namespace cnids
