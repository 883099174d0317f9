#include "cnids/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace cnids {

namespace {

constexpr double kVarianceFloor = 1e-9;
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

void check_record(const FeatureSchema& schema, const ConnectionRecord& record) {
  if (record.values.size() != schema.arity())
    throw std::invalid_argument("record has " + std::to_string(record.values.size()) +
                                " values, schema expects " + std::to_string(schema.arity()));
  for (std::size_t k = 0; k < schema.arity(); ++k) {
    const bool is_numeric = std::holds_alternative<double>(record.values[k]);
    if (is_numeric != (schema.at(k).kind == FeatureKind::numeric))
      throw std::invalid_argument("record value for feature '" + schema.at(k).name +
                                  "' does not match its declared kind");
    if (is_numeric && !std::isfinite(std::get<double>(record.values[k])))
      throw std::invalid_argument("non-finite value for feature '" + schema.at(k).name + "'");
  }
}

double gaussian_log_density(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance)) - d * d / (2.0 * variance);
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<FeatureDescriptor> features)
    : features_(std::move(features)) {
  if (features_.empty()) throw std::invalid_argument("schema needs at least one feature");
  std::set<std::string> names;
  for (const auto& f : features_)
    if (!names.insert(f.name).second)
      throw std::invalid_argument("duplicate feature name: " + f.name);
}

NaiveBayesModel NaiveBayesModel::train(const FeatureSchema& schema,
                                       const std::vector<ConnectionRecord>& records) {
  NaiveBayesModel model(schema);

  for (const auto& r : records) {
    check_record(schema, r);
    ++model.class_count_[hypothesis_index(r.label)];
  }
  const std::uint64_t total = model.class_count_[0] + model.class_count_[1];
  if (model.class_count_[0] == 0 || model.class_count_[1] == 0)
    throw std::runtime_error(
        "training set must contain at least one record of each class (normal: " +
        std::to_string(model.class_count_[0]) +
        ", anomalous: " + std::to_string(model.class_count_[1]) + ")");

  model.log_prior_[0] = std::log(static_cast<double>(model.class_count_[0]) / static_cast<double>(total));
  model.log_prior_[1] = std::log(static_cast<double>(model.class_count_[1]) / static_cast<double>(total));

  model.tables_.reserve(schema.arity());
  for (std::size_t k = 0; k < schema.arity(); ++k) {
    if (schema.at(k).kind == FeatureKind::categorical) {
      // alphabet over both classes, integer counts per class
      std::set<std::string> alphabet;
      std::map<std::string, std::uint64_t> counts[2];
      for (const auto& r : records) {
        const auto& token = std::get<std::string>(r.values[k]);
        alphabet.insert(token);
        ++counts[hypothesis_index(r.label)][token];
      }
      CategoricalTable table;
      const double alphabet_size = static_cast<double>(alphabet.size());
      for (int h = 0; h < 2; ++h) {
        const double denom = static_cast<double>(model.class_count_[h]) + alphabet_size;
        for (const auto& token : alphabet) {
          const auto it = counts[h].find(token);
          const double count = it == counts[h].end() ? 0.0 : static_cast<double>(it->second);
          table.log_prob[h][token] = std::log((count + 1.0) / denom);
        }
        // reserve mass for values never observed in training
        table.log_unseen[h] =
            -std::log(static_cast<double>(model.class_count_[h]) + alphabet_size + 1.0);
      }
      model.tables_.emplace_back(std::move(table));
    } else {
      GaussianTable table;
      for (int h = 0; h < 2; ++h) {
        std::vector<double> values;
        values.reserve(records.size());
        for (const auto& r : records)
          if (hypothesis_index(r.label) == h) values.push_back(std::get<double>(r.values[k]));
        // sorted accumulation keeps the model independent of record order
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / static_cast<double>(values.size());
        double sq = 0.0;
        for (double v : values) sq += (v - mean) * (v - mean);
        table.mean[h] = mean;
        table.variance[h] = std::max(sq / static_cast<double>(values.size()), kVarianceFloor);
      }
      model.tables_.emplace_back(table);
    }
  }
  return model;
}

double NaiveBayesModel::log_likelihood(const ConnectionRecord& record, Hypothesis h) const {
  check_record(schema_, record);
  const int hi = hypothesis_index(h);
  double sum = 0.0;
  for (std::size_t k = 0; k < schema_.arity(); ++k) {
    if (const auto* cat = std::get_if<CategoricalTable>(&tables_[k])) {
      const auto& token = std::get<std::string>(record.values[k]);
      const auto it = cat->log_prob[hi].find(token);
      sum += it == cat->log_prob[hi].end() ? cat->log_unseen[hi] : it->second;
    } else {
      const auto& g = std::get<GaussianTable>(tables_[k]);
      sum += gaussian_log_density(std::get<double>(record.values[k]), g.mean[hi], g.variance[hi]);
    }
  }
  return sum;
}

LogLikelihoods NaiveBayesModel::log_likelihoods(const ConnectionRecord& record) const {
  return {log_likelihood(record, Hypothesis::normal), log_likelihood(record, Hypothesis::anomalous)};
}

Posterior NaiveBayesModel::local_posterior(const ConnectionRecord& record) const {
  const LogLikelihoods ll = log_likelihoods(record);
  const double joint_n = log_prior_[0] + ll.normal;
  const double joint_a = log_prior_[1] + ll.anomalous;
  const double log_z = log_sum_exp(joint_n, joint_a);
  return {joint_n - log_z, joint_a - log_z};
}

void NaiveBayesModel::save(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["model"] = "naive-bayes";
  doc["priors"] = {{"normal", log_prior_[0]}, {"anomalous", log_prior_[1]}};
  doc["class_counts"] = {{"normal", class_count_[0]}, {"anomalous", class_count_[1]}};
  auto& features = doc["features"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < schema_.arity(); ++k) {
    nlohmann::ordered_json f;
    f["name"] = schema_.at(k).name;
    if (const auto* cat = std::get_if<CategoricalTable>(&tables_[k])) {
      f["kind"] = "categorical";
      for (int h = 0; h < 2; ++h) {
        nlohmann::ordered_json probs;
        for (const auto& [token, logp] : cat->log_prob[h]) probs[token] = logp;
        f["log_prob"][to_string(static_cast<Hypothesis>(h))] = std::move(probs);
        f["log_unseen"][to_string(static_cast<Hypothesis>(h))] = cat->log_unseen[h];
      }
    } else {
      const auto& g = std::get<GaussianTable>(tables_[k]);
      f["kind"] = "numeric";
      for (int h = 0; h < 2; ++h) {
        f[to_string(static_cast<Hypothesis>(h))] = {{"mean", g.mean[h]},
                                                    {"variance", g.variance[h]}};
      }
    }
    features.push_back(std::move(f));
  }
  out << doc.dump(2) << '\n';
}

NaiveBayesModel NaiveBayesModel::load(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model JSON is malformed: ") + e.what());
  }
  try {
    std::vector<FeatureDescriptor> descriptors;
    for (const auto& f : doc.at("features"))
      descriptors.push_back({f.at("name").get<std::string>(),
                             f.at("kind").get<std::string>() == "categorical"
                                 ? FeatureKind::categorical
                                 : FeatureKind::numeric});
    NaiveBayesModel model{FeatureSchema(std::move(descriptors))};
    model.log_prior_[0] = doc.at("priors").at("normal").get<double>();
    model.log_prior_[1] = doc.at("priors").at("anomalous").get<double>();
    model.class_count_[0] = doc.at("class_counts").at("normal").get<std::uint64_t>();
    model.class_count_[1] = doc.at("class_counts").at("anomalous").get<std::uint64_t>();
    for (const auto& f : doc.at("features")) {
      if (f.at("kind").get<std::string>() == "categorical") {
        CategoricalTable table;
        for (int h = 0; h < 2; ++h) {
          const char* name = to_string(static_cast<Hypothesis>(h));
          for (const auto& [token, logp] : f.at("log_prob").at(name).items())
            table.log_prob[h][token] = logp.get<double>();
          table.log_unseen[h] = f.at("log_unseen").at(name).get<double>();
        }
        model.tables_.emplace_back(std::move(table));
      } else {
        GaussianTable table;
        for (int h = 0; h < 2; ++h) {
          const char* name = to_string(static_cast<Hypothesis>(h));
          table.mean[h] = f.at(name).at("mean").get<double>();
          table.variance[h] = f.at(name).at("variance").get<double>();
        }
        model.tables_.emplace_back(table);
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model JSON is missing fields: ") + e.what());
  }
}

}  // namespace cnids
