#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cnids/hypothesis.hpp"
#include "cnids/spectral.hpp"
#include "cnids/topology.hpp"

namespace cnids {

/// How the averaging loop decides it is done.
///  - global: iterate until every node's residual is below epsilon in the
///    same round. Preserves exact average conservation; the default.
///  - freeze: a node that individually drops below epsilon stops sending and
///    holds its value; neighbors keep using the last value they saw. The
///    loop ends once every node is frozen.
enum class StoppingMode { global, freeze };

const char* to_string(StoppingMode mode);
StoppingMode stopping_mode_from_string(const std::string& name);

/// Per-node state of the averaging protocol: one state variable per
/// hypothesis, the last round's residuals (NaN until the first round has
/// run), freeze flags, and the cumulative message count. A hop is one
/// message over one direct link; a message carries both state variables.
struct ConsensusState {
  std::vector<double> x_normal;
  std::vector<double> x_anomalous;
  std::vector<double> residual_normal;
  std::vector<double> residual_anomalous;
  std::vector<char> frozen;
  int round = 0;
  std::uint64_t hop_count = 0;

  int size() const { return static_cast<int>(x_normal.size()); }

  /// max of the two per-hypothesis residuals for node i.
  double residual(int i) const {
    const double a = residual_anomalous[static_cast<std::size_t>(i)];
    const double n = residual_normal[static_cast<std::size_t>(i)];
    return a > n ? a : n;
  }

  bool all_frozen() const;
};

/// State at round 0 from per-node local log-likelihood pairs. All inputs
/// must be finite.
ConsensusState initialize(const std::vector<LogLikelihoods>& local_log_likelihoods);

struct ConvergenceResult {
  int rounds_used = 0;
  bool converged = false;
};

/// Synchronous engine for the linear iterate
///   x_i(t+1) = x_i(t) + sum_{j in N_i} W_ij (x_j(t) - x_i(t)),
/// applied to both hypotheses at once. Every update reads a frozen snapshot
/// of round-t values (double buffering), so the result is independent of
/// node evaluation order. Each active node spends one hop per incident edge
/// per round.
///
/// The engine owns scratch buffers, so one instance must not be shared
/// across threads; construction is cheap, build one per worker.
class ConsensusEngine {
public:
  ConsensusEngine(const WeightMatrix& w, const Topology& t);

  /// One synchronous round. Frozen nodes send nothing and keep their value;
  /// active nodes use every neighbor's last value.
  void step(ConsensusState& state) const;

  /// Iterates until the stopping mode's criterion is met (strict
  /// residual < epsilon). rounds_used counts executed rounds, including the
  /// final one whose residuals pass the check. Hitting max_rounds reports
  /// converged = false; it never throws.
  /// When trace is given, one CSV row per node per round is appended.
  ConvergenceResult run_to_convergence(ConsensusState& state, double epsilon, int max_rounds,
                                       StoppingMode mode = StoppingMode::global,
                                       std::ostream* trace = nullptr) const;

private:
  int n_ = 0;
  // adjacency compiled into flat arrays with per-edge weights
  std::vector<int> offsets_;
  std::vector<int> neighbors_;
  std::vector<double> weights_;
  mutable std::vector<double> buf_normal_;
  mutable std::vector<double> buf_anomalous_;
};

/// Per-node joint log-likelihood estimates n * x_i(t) for both hypotheses,
/// kept in log domain. Returned per node so cross-node divergence stays
/// inspectable.
std::vector<LogLikelihoods> recover_joint(const ConsensusState& state);

}  // namespace cnids
