#pragma once

#include <cstdint>
#include <vector>

#include "cnids/hypothesis.hpp"
#include "cnids/topology.hpp"

namespace cnids {

/// Posterior from joint log-likelihoods and log priors: add in log domain,
/// normalize with log-sum-exp. Adding any constant to both joints leaves the
/// result unchanged.
Posterior network_posterior(const LogLikelihoods& joint, const LogLikelihoods& log_priors);

struct Decision {
  bool alert = false;
  double log_posterior_ratio = 0.0;  // log p(h_a|O) - log p(h_n|O)
  Posterior posterior;
};

/// Alert iff p(h_a|O) / p(h_n|O) > tau, evaluated strictly in log domain.
/// tau must be > 0.
Decision decide(const Posterior& posterior, double tau);

/// Node minimizing the total BFS distance to all others; lowest index on
/// ties. Used as the default central aggregator, which gives the
/// hierarchical baseline its best-case cost.
int median_node(const Topology& t);

/// Hop cost of shipping one value from every non-central node to the
/// central node: the sum of shortest-path lengths.
std::uint64_t hierarchical_cost(const Topology& t, int central);

/// Hop cost of distributing every module's value to all other modules:
/// hierarchical_cost * (n - 1).
std::uint64_t broadcast_cost(const Topology& t, int central);

struct HierarchicalResult {
  LogLikelihoods joint;
  std::uint64_t hop_cost = 0;
};

/// Central-aggregator baseline: the exact joint as the plain sum of local
/// log-likelihoods, costed by BFS distance per contributing module.
HierarchicalResult hierarchical_aggregate(const std::vector<LogLikelihoods>& locals,
                                          const Topology& t, int central);

}  // namespace cnids
