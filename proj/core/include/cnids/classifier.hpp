#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cnids/hypothesis.hpp"

namespace cnids {

enum class FeatureKind { categorical, numeric };

struct FeatureDescriptor {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;

  bool operator==(const FeatureDescriptor&) const = default;
};

/// Ordered feature layout shared by every record of a corpus. Names must be
/// unique and the list non-empty.
class FeatureSchema {
public:
  explicit FeatureSchema(std::vector<FeatureDescriptor> features);

  std::size_t arity() const { return features_.size(); }
  const FeatureDescriptor& at(std::size_t k) const { return features_[k]; }
  const std::vector<FeatureDescriptor>& features() const { return features_; }

  bool operator==(const FeatureSchema&) const = default;

private:
  std::vector<FeatureDescriptor> features_;
};

/// Category token for categorical features, real value for numeric ones.
using FeatureValue = std::variant<double, std::string>;

/// One labeled traffic observation.
struct ConnectionRecord {
  std::vector<FeatureValue> values;
  Hypothesis label = Hypothesis::normal;

  bool operator==(const ConnectionRecord&) const = default;
};

/// Two-class naive Bayes model. Categorical conditionals are add-one
/// smoothed over the alphabet observed in training, with a reserved
/// pseudo-category for values never seen (so no record can produce a -inf
/// log-likelihood). Numeric conditionals are per-class Gaussians with a
/// population-variance estimator floored at 1e-9.
///
/// Training accumulates per-class values in sorted order, so a model is
/// bit-identical under any permutation of the training records. Trained
/// models are immutable and safe to share across threads.
class NaiveBayesModel {
public:
  static NaiveBayesModel train(const FeatureSchema& schema,
                               const std::vector<ConnectionRecord>& records);

  /// JSON round trip; load(save(m)) reproduces the model exactly.
  void save(std::ostream& out) const;
  static NaiveBayesModel load(std::istream& in);

  const FeatureSchema& schema() const { return schema_; }

  double log_prior(Hypothesis h) const { return log_prior_[hypothesis_index(h)]; }
  LogLikelihoods log_priors() const { return {log_prior_[0], log_prior_[1]}; }

  /// Sum over features of log P(o_k | h); the record must match the schema.
  double log_likelihood(const ConnectionRecord& record, Hypothesis h) const;
  LogLikelihoods log_likelihoods(const ConnectionRecord& record) const;

  /// Single-module posterior from this model's priors, normalized in log
  /// domain. Sanity-check path; the distributed protocol combines joints
  /// through the detection stage instead.
  Posterior local_posterior(const ConnectionRecord& record) const;

  bool operator==(const NaiveBayesModel&) const = default;

private:
  struct CategoricalTable {
    // keyed by category token; values are log P(token | class)
    std::map<std::string, double> log_prob[2];
    double log_unseen[2] = {0.0, 0.0};

    bool operator==(const CategoricalTable&) const = default;
  };
  struct GaussianTable {
    double mean[2] = {0.0, 0.0};
    double variance[2] = {0.0, 0.0};

    bool operator==(const GaussianTable&) const = default;
  };
  using FeatureTable = std::variant<CategoricalTable, GaussianTable>;

  explicit NaiveBayesModel(FeatureSchema schema) : schema_(std::move(schema)) {}

  FeatureSchema schema_;
  double log_prior_[2] = {0.0, 0.0};
  std::uint64_t class_count_[2] = {0, 0};
  std::vector<FeatureTable> tables_;
};

}  // namespace cnids
