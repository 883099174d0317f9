#include "cnids/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "text_util.hpp"

namespace cnids {

const char* to_string(StoppingMode mode) {
  return mode == StoppingMode::global ? "global" : "freeze";
}

StoppingMode stopping_mode_from_string(const std::string& name) {
  if (name == "global") return StoppingMode::global;
  if (name == "freeze") return StoppingMode::freeze;
  throw std::invalid_argument("unknown stopping mode: " + name);
}

bool ConsensusState::all_frozen() const {
  return std::all_of(frozen.begin(), frozen.end(), [](char f) { return f != 0; });
}

ConsensusState initialize(const std::vector<LogLikelihoods>& local_log_likelihoods) {
  if (local_log_likelihoods.empty())
    throw std::invalid_argument("consensus needs at least one node");
  ConsensusState state;
  const std::size_t n = local_log_likelihoods.size();
  state.x_normal.reserve(n);
  state.x_anomalous.reserve(n);
  for (const auto& ll : local_log_likelihoods) {
    if (!std::isfinite(ll.normal) || !std::isfinite(ll.anomalous))
      throw std::invalid_argument("consensus state must be initialized with finite values");
    state.x_normal.push_back(ll.normal);
    state.x_anomalous.push_back(ll.anomalous);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  state.residual_normal.assign(n, nan);
  state.residual_anomalous.assign(n, nan);
  state.frozen.assign(n, 0);
  return state;
}

ConsensusEngine::ConsensusEngine(const WeightMatrix& w, const Topology& t) : n_(t.size()) {
  if (w.entries.size() != n_)
    throw std::invalid_argument("weight matrix size does not match the topology");
  offsets_.reserve(static_cast<std::size_t>(n_) + 1);
  offsets_.push_back(0);
  for (int i = 0; i < n_; ++i) {
    for (int j : t.neighbors(i)) {
      neighbors_.push_back(j);
      weights_.push_back(w.entries(i, j));
    }
    offsets_.push_back(static_cast<int>(neighbors_.size()));
  }
}

void ConsensusEngine::step(ConsensusState& state) const {
  if (state.size() != n_)
    throw std::invalid_argument("consensus state size does not match the engine");

  buf_normal_.resize(static_cast<std::size_t>(n_));
  buf_anomalous_.resize(static_cast<std::size_t>(n_));

  const double* xn = state.x_normal.data();
  const double* xa = state.x_anomalous.data();
  std::uint64_t hops = 0;

  for (int i = 0; i < n_; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    if (state.frozen[ui]) {
      buf_normal_[ui] = xn[i];
      buf_anomalous_[ui] = xa[i];
      continue;
    }
    double acc_n = 0.0;
    double acc_a = 0.0;
    const int begin = offsets_[ui];
    const int end = offsets_[ui + 1];
    for (int k = begin; k < end; ++k) {
      const int j = neighbors_[static_cast<std::size_t>(k)];
      const double w = weights_[static_cast<std::size_t>(k)];
      acc_n += w * (xn[j] - xn[i]);
      acc_a += w * (xa[j] - xa[i]);
    }
    buf_normal_[ui] = xn[i] + acc_n;
    buf_anomalous_[ui] = xa[i] + acc_a;
    hops += static_cast<std::uint64_t>(end - begin);  // one message per incident edge
  }

  for (int i = 0; i < n_; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    state.residual_normal[ui] = std::abs(buf_normal_[ui] - state.x_normal[ui]);
    state.residual_anomalous[ui] = std::abs(buf_anomalous_[ui] - state.x_anomalous[ui]);
  }
  state.x_normal.swap(buf_normal_);
  state.x_anomalous.swap(buf_anomalous_);
  state.round += 1;
  state.hop_count += hops;
}

ConvergenceResult ConsensusEngine::run_to_convergence(ConsensusState& state, double epsilon,
                                                      int max_rounds, StoppingMode mode,
                                                      std::ostream* trace) const {
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");

  if (trace && state.round == 0) *trace << "round,node,x_a,x_n,residual\n";

  for (int r = 1; r <= max_rounds; ++r) {
    step(state);

    if (trace) {
      for (int i = 0; i < n_; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        *trace << state.round << ',' << i << ',' << detail::format_double(state.x_anomalous[ui])
               << ',' << detail::format_double(state.x_normal[ui]) << ','
               << detail::format_double(state.residual(i)) << '\n';
      }
    }

    if (mode == StoppingMode::global) {
      bool all_below = true;
      for (int i = 0; i < n_; ++i) {
        if (!(state.residual(i) < epsilon)) {
          all_below = false;
          break;
        }
      }
      if (all_below) return {r, true};
    } else {
      for (int i = 0; i < n_; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        if (!state.frozen[ui] && state.residual(i) < epsilon) state.frozen[ui] = 1;
      }
      if (state.all_frozen()) return {r, true};
    }
  }
  return {max_rounds, false};
}

std::vector<LogLikelihoods> recover_joint(const ConsensusState& state) {
  const double n = static_cast<double>(state.size());
  std::vector<LogLikelihoods> joint;
  joint.reserve(state.x_normal.size());
  for (std::size_t i = 0; i < state.x_normal.size(); ++i)
    joint.push_back({n * state.x_normal[i], n * state.x_anomalous[i]});
  return joint;
}

}  // namespace cnids
