#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cnids/classifier.hpp"

namespace cnids {

enum class LabelAction { normal, anomalous, exclude };

const char* to_string(LabelAction action);

/// Maps raw corpus labels (e.g. "neptune", "smurf") onto
/// {normal, anomalous, exclude}. Map files hold one `raw_label -> action`
/// per line, `#` comments and blank lines ignored; a `* -> action` line sets
/// the fallback for labels not listed. Without a fallback, an unknown label
/// is an error.
class LabelMap {
public:
  /// "normal" -> normal, "anomalous" -> anomalous, nothing else.
  static LabelMap identity();

  /// DoS attack names of the KDD taxonomy -> anomalous, "normal" -> normal,
  /// everything else excluded.
  static LabelMap ddos_default();

  static LabelMap parse(std::istream& in);
  static LabelMap load(const std::filesystem::path& path);

  void set(std::string raw_label, LabelAction action);
  void set_fallback(LabelAction action);

  /// Throws listing the label when it is unmapped and no fallback is set.
  LabelAction action_for(const std::string& raw_label) const;
  std::optional<LabelAction> lookup(const std::string& raw_label) const;

private:
  std::map<std::string, LabelAction> entries_;
  std::optional<LabelAction> fallback_;
};

struct SyntheticParams {
  std::uint64_t seed = 0;
  int records = 0;
  double anomalous_fraction = 0.0;
};

struct Provenance {
  enum class Kind { file, synthetic };
  Kind kind = Kind::synthetic;
  std::string path;           // file corpora
  SyntheticParams synthetic;  // synthetic corpora
};

struct LabeledCorpus {
  FeatureSchema schema;
  std::vector<ConnectionRecord> records;
  Provenance provenance;

  std::size_t count(Hypothesis h) const;
};

/// The standard 41-column connection-record layout: protocol_type, service,
/// flag and the login/host indicator columns are categorical, everything
/// else numeric.
FeatureSchema nslkdd_schema();

/// Reads comma-separated rows of m feature columns plus a label column; a
/// trailing difficulty column is tolerated and dropped. No header by
/// default. Rows whose label maps to exclude are skipped. Malformed rows
/// and unmapped labels raise errors naming the offending line.
LabeledCorpus load_nslkdd_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                              const LabelMap& labels, bool has_header = false);

/// Writes the loader's format back out (m feature columns + label, no
/// difficulty column) with round-trip-exact numeric formatting.
void write_csv(const LabeledCorpus& corpus, std::ostream& out);

struct CategoricalFeatureSpec {
  std::string name;
  std::vector<std::string> alphabet;
  std::vector<double> normal_weights;
  std::vector<double> anomalous_weights;
};

struct NumericFeatureSpec {
  std::string name;
  double normal_mean = 0.0;
  double normal_stddev = 1.0;
  double anomalous_mean = 0.0;
  double anomalous_stddev = 1.0;
};

using SyntheticFeatureSpec = std::variant<CategoricalFeatureSpec, NumericFeatureSpec>;

/// Per-class generative families for the synthetic corpus: multinomial draws
/// for categorical features, Gaussians for numeric ones.
struct SyntheticCorpusSpec {
  std::vector<SyntheticFeatureSpec> features;

  /// Desk-scale stand-in for a flood-attack corpus: a handful of traffic
  /// features whose class conditionals are separated well enough that a
  /// single record already beats coin-flip accuracy by a wide margin.
  static SyntheticCorpusSpec nids_default();

  FeatureSchema schema() const;
};

/// Exactly round(anomalous_fraction * n_records) anomalous records, the rest
/// normal, in seeded shuffled order. Deterministic per seed.
LabeledCorpus generate_synthetic(std::uint64_t seed, int n_records, double anomalous_fraction,
                                 const SyntheticCorpusSpec& spec = SyntheticCorpusSpec::nids_default());

struct SplitResult {
  LabeledCorpus train;
  LabeledCorpus test;
};

/// Class-stratified split; each class contributes round(fraction * count)
/// records to the train side. Both sides must end up non-empty.
SplitResult stratified_split(const LabeledCorpus& corpus, double train_fraction,
                             std::uint64_t seed);

}  // namespace cnids
