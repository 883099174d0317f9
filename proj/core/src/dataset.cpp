#include "cnids/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cnids/rng.hpp"
#include "text_util.hpp"

namespace cnids {

const char* to_string(LabelAction action) {
  switch (action) {
    case LabelAction::normal: return "normal";
    case LabelAction::anomalous: return "anomalous";
    case LabelAction::exclude: return "exclude";
  }
  return "exclude";
}

LabelMap LabelMap::identity() {
  LabelMap m;
  m.set("normal", LabelAction::normal);
  m.set("anomalous", LabelAction::anomalous);
  return m;
}

LabelMap LabelMap::ddos_default() {
  LabelMap m;
  m.set("normal", LabelAction::normal);
  m.set("anomalous", LabelAction::anomalous);  // the corpus writer's own label
  // DoS attack names of the KDD taxonomy, including the test-only ones
  for (const char* name : {"back", "land", "neptune", "pod", "smurf", "teardrop", "apache2",
                           "mailbomb", "processtable", "udpstorm", "worm"})
    m.set(name, LabelAction::anomalous);
  m.set_fallback(LabelAction::exclude);
  return m;
}

LabelMap LabelMap::parse(std::istream& in) {
  LabelMap m;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto arrow = trimmed.find("->");
    if (arrow == std::string_view::npos)
      throw std::runtime_error("label map line " + std::to_string(line_no) +
                               ": expected 'raw_label -> action'");
    const std::string raw{detail::trim(trimmed.substr(0, arrow))};
    const std::string action_name{detail::trim(trimmed.substr(arrow + 2))};
    LabelAction action;
    if (action_name == "normal") action = LabelAction::normal;
    else if (action_name == "anomalous") action = LabelAction::anomalous;
    else if (action_name == "exclude") action = LabelAction::exclude;
    else
      throw std::runtime_error("label map line " + std::to_string(line_no) +
                               ": unknown action '" + action_name + "'");
    if (raw.empty())
      throw std::runtime_error("label map line " + std::to_string(line_no) + ": empty label");
    if (raw == "*") m.set_fallback(action);
    else m.set(raw, action);
  }
  return m;
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label map file: " + path.string());
  return parse(in);
}

void LabelMap::set(std::string raw_label, LabelAction action) {
  entries_[std::move(raw_label)] = action;
}

void LabelMap::set_fallback(LabelAction action) { fallback_ = action; }

std::optional<LabelAction> LabelMap::lookup(const std::string& raw_label) const {
  const auto it = entries_.find(raw_label);
  if (it != entries_.end()) return it->second;
  return fallback_;
}

LabelAction LabelMap::action_for(const std::string& raw_label) const {
  const auto action = lookup(raw_label);
  if (!action) throw std::runtime_error("label '" + raw_label + "' is not in the label map");
  return *action;
}

std::size_t LabeledCorpus::count(Hypothesis h) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(),
                    [h](const ConnectionRecord& r) { return r.label == h; }));
}

FeatureSchema nslkdd_schema() {
  const auto cat = FeatureKind::categorical;
  const auto num = FeatureKind::numeric;
  return FeatureSchema({
      {"duration", num},
      {"protocol_type", cat},
      {"service", cat},
      {"flag", cat},
      {"src_bytes", num},
      {"dst_bytes", num},
      {"land", cat},
      {"wrong_fragment", num},
      {"urgent", num},
      {"hot", num},
      {"num_failed_logins", num},
      {"logged_in", cat},
      {"num_compromised", num},
      {"root_shell", num},
      {"su_attempted", num},
      {"num_root", num},
      {"num_file_creations", num},
      {"num_shells", num},
      {"num_access_files", num},
      {"num_outbound_cmds", num},
      {"is_host_login", cat},
      {"is_guest_login", cat},
      {"count", num},
      {"srv_count", num},
      {"serror_rate", num},
      {"srv_serror_rate", num},
      {"rerror_rate", num},
      {"srv_rerror_rate", num},
      {"same_srv_rate", num},
      {"diff_srv_rate", num},
      {"srv_diff_host_rate", num},
      {"dst_host_count", num},
      {"dst_host_srv_count", num},
      {"dst_host_same_srv_rate", num},
      {"dst_host_diff_srv_rate", num},
      {"dst_host_same_src_port_rate", num},
      {"dst_host_srv_diff_host_rate", num},
      {"dst_host_serror_rate", num},
      {"dst_host_srv_serror_rate", num},
      {"dst_host_rerror_rate", num},
      {"dst_host_srv_rerror_rate", num},
  });
}

LabeledCorpus load_nslkdd_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                              const LabelMap& labels, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());

  const std::size_t m = schema.arity();
  LabeledCorpus corpus{schema, {}, Provenance{Provenance::Kind::file, path.string(), {}}};

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != m + 1 && fields.size() != m + 2)
      throw std::runtime_error("row " + std::to_string(line_no) + ": expected " +
                               std::to_string(m + 1) + " or " + std::to_string(m + 2) +
                               " columns, got " + std::to_string(fields.size()));

    const std::string& raw_label = fields[m];
    const auto action = labels.lookup(raw_label);
    if (!action)
      throw std::runtime_error("row " + std::to_string(line_no) + ": label '" + raw_label +
                               "' is not in the label map");
    if (*action == LabelAction::exclude) continue;

    ConnectionRecord record;
    record.label = *action == LabelAction::normal ? Hypothesis::normal : Hypothesis::anomalous;
    record.values.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      if (schema.at(k).kind == FeatureKind::numeric) {
        double v = 0.0;
        if (!detail::parse_double(fields[k], v))
          throw std::runtime_error("row " + std::to_string(line_no) + ": feature '" +
                                   schema.at(k).name + "': invalid numeric value '" + fields[k] +
                                   "'");
        record.values.emplace_back(v);
      } else {
        record.values.emplace_back(fields[k]);
      }
    }
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

void write_csv(const LabeledCorpus& corpus, std::ostream& out) {
  for (const auto& record : corpus.records) {
    for (const auto& value : record.values) {
      if (const auto* d = std::get_if<double>(&value)) out << detail::format_double(*d);
      else out << std::get<std::string>(value);
      out << ',';
    }
    out << to_string(record.label) << '\n';
  }
}

SyntheticCorpusSpec SyntheticCorpusSpec::nids_default() {
  SyntheticCorpusSpec spec;
  spec.features = {
      CategoricalFeatureSpec{"protocol_type",
                             {"tcp", "udp", "icmp"},
                             {0.70, 0.25, 0.05},
                             {0.25, 0.15, 0.60}},
      CategoricalFeatureSpec{"service",
                             {"http", "dns", "smtp", "ftp", "other"},
                             {0.45, 0.20, 0.15, 0.10, 0.10},
                             {0.55, 0.05, 0.02, 0.03, 0.35}},
      CategoricalFeatureSpec{"flag",
                             {"SF", "S0", "REJ", "RSTO"},
                             {0.85, 0.05, 0.07, 0.03},
                             {0.15, 0.60, 0.20, 0.05}},
      NumericFeatureSpec{"duration", 12.0, 8.0, 2.0, 2.0},
      NumericFeatureSpec{"src_bytes", 800.0, 400.0, 120.0, 90.0},
      NumericFeatureSpec{"count", 18.0, 10.0, 310.0, 70.0},
      NumericFeatureSpec{"serror_rate", 0.04, 0.06, 0.82, 0.12},
  };
  return spec;
}

FeatureSchema SyntheticCorpusSpec::schema() const {
  std::vector<FeatureDescriptor> descriptors;
  descriptors.reserve(features.size());
  for (const auto& f : features) {
    if (const auto* cat = std::get_if<CategoricalFeatureSpec>(&f))
      descriptors.push_back({cat->name, FeatureKind::categorical});
    else
      descriptors.push_back({std::get<NumericFeatureSpec>(f).name, FeatureKind::numeric});
  }
  return FeatureSchema(std::move(descriptors));
}

namespace {

void validate_spec(const SyntheticCorpusSpec& spec) {
  if (spec.features.empty())
    throw std::invalid_argument("synthetic spec needs at least one feature");
  for (const auto& f : spec.features) {
    if (const auto* cat = std::get_if<CategoricalFeatureSpec>(&f)) {
      if (cat->alphabet.empty())
        throw std::invalid_argument("feature '" + cat->name + "': empty alphabet");
      if (cat->normal_weights.size() != cat->alphabet.size() ||
          cat->anomalous_weights.size() != cat->alphabet.size())
        throw std::invalid_argument("feature '" + cat->name +
                                    "': weight count does not match the alphabet");
      for (const auto& weights : {cat->normal_weights, cat->anomalous_weights}) {
        double sum = 0.0;
        for (double w : weights) {
          if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("feature '" + cat->name + "': negative weight");
          sum += w;
        }
        if (sum <= 0.0)
          throw std::invalid_argument("feature '" + cat->name + "': weights sum to zero");
      }
    } else {
      const auto& num = std::get<NumericFeatureSpec>(f);
      if (num.normal_stddev <= 0.0 || num.anomalous_stddev <= 0.0)
        throw std::invalid_argument("feature '" + num.name + "': stddev must be positive");
    }
  }
}

std::string draw_category(Rng& rng, const std::vector<std::string>& alphabet,
                          const std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  const double u = rng.uniform01() * sum;
  double acc = 0.0;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    acc += weights[i];
    if (u < acc) return alphabet[i];
  }
  return alphabet.back();
}

}  // namespace

LabeledCorpus generate_synthetic(std::uint64_t seed, int n_records, double anomalous_fraction,
                                 const SyntheticCorpusSpec& spec) {
  if (n_records < 2) throw std::invalid_argument("synthetic corpus needs at least 2 records");
  if (anomalous_fraction < 0.0 || anomalous_fraction > 1.0)
    throw std::invalid_argument("anomalous fraction must be in [0, 1]");
  validate_spec(spec);

  const int n_anomalous =
      static_cast<int>(std::lround(anomalous_fraction * static_cast<double>(n_records)));

  std::vector<Hypothesis> labels(static_cast<std::size_t>(n_records), Hypothesis::normal);
  std::fill_n(labels.begin(), n_anomalous, Hypothesis::anomalous);
  Rng rng(derive_seed(seed, 0x5e1));
  rng.shuffle(labels);

  LabeledCorpus corpus{spec.schema(), {},
                       Provenance{Provenance::Kind::synthetic, {},
                                  SyntheticParams{seed, n_records, anomalous_fraction}}};
  corpus.records.reserve(static_cast<std::size_t>(n_records));
  for (const Hypothesis label : labels) {
    ConnectionRecord record;
    record.label = label;
    record.values.reserve(spec.features.size());
    for (const auto& f : spec.features) {
      if (const auto* cat = std::get_if<CategoricalFeatureSpec>(&f)) {
        const auto& weights =
            label == Hypothesis::normal ? cat->normal_weights : cat->anomalous_weights;
        record.values.emplace_back(draw_category(rng, cat->alphabet, weights));
      } else {
        const auto& num = std::get<NumericFeatureSpec>(f);
        record.values.emplace_back(label == Hypothesis::normal
                                       ? rng.gaussian(num.normal_mean, num.normal_stddev)
                                       : rng.gaussian(num.anomalous_mean, num.anomalous_stddev));
      }
    }
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

SplitResult stratified_split(const LabeledCorpus& corpus, double train_fraction,
                             std::uint64_t seed) {
  if (train_fraction < 0.0 || train_fraction > 1.0)
    throw std::invalid_argument("train fraction must be in [0, 1]");

  std::vector<int> by_class[2];
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    by_class[hypothesis_index(corpus.records[i].label)].push_back(static_cast<int>(i));

  Rng rng(derive_seed(seed, 0x59717));
  std::vector<char> to_train(corpus.records.size(), 0);
  for (auto& indices : by_class) {
    rng.shuffle(indices);
    const auto take = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(indices.size())));
    for (std::size_t i = 0; i < take; ++i) to_train[static_cast<std::size_t>(indices[i])] = 1;
  }

  SplitResult result{{corpus.schema, {}, corpus.provenance},
                     {corpus.schema, {}, corpus.provenance}};
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    auto& side = to_train[i] ? result.train : result.test;
    side.records.push_back(corpus.records[i]);
  }
  if (result.train.records.empty() || result.test.records.empty())
    throw std::invalid_argument("split leaves the " +
                                std::string(result.train.records.empty() ? "train" : "test") +
                                " side empty");
  return result;
}

}  // namespace cnids
