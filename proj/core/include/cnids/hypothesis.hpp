#pragma once

#include <cmath>

namespace cnids {

/// The two traffic hypotheses every module reasons about.
enum class Hypothesis { normal = 0, anomalous = 1 };

constexpr int hypothesis_index(Hypothesis h) { return static_cast<int>(h); }

inline const char* to_string(Hypothesis h) {
  return h == Hypothesis::normal ? "normal" : "anomalous";
}

/// A log-domain value per hypothesis. Depending on context this carries
/// local likelihoods, priors, or recovered joint likelihoods.
struct LogLikelihoods {
  double normal = 0.0;
  double anomalous = 0.0;

  double get(Hypothesis h) const { return h == Hypothesis::normal ? normal : anomalous; }
  bool operator==(const LogLikelihoods&) const = default;
};

/// Normalized posterior kept in log domain: exp(log_normal) +
/// exp(log_anomalous) == 1. Exponentiation is deferred to reporting so large
/// networks cannot underflow the decision path.
struct Posterior {
  double log_normal = 0.0;
  double log_anomalous = 0.0;

  double normal() const { return std::exp(log_normal); }
  double anomalous() const { return std::exp(log_anomalous); }
  double log_ratio() const { return log_anomalous - log_normal; }
};

inline double log_sum_exp(double a, double b) {
  const double m = a > b ? a : b;
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace cnids
