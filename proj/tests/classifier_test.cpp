#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cnids/classifier.hpp"
#include "cnids/rng.hpp"

using cnids::ConnectionRecord;
using cnids::FeatureDescriptor;
using cnids::FeatureKind;
using cnids::FeatureSchema;
using cnids::Hypothesis;
using cnids::NaiveBayesModel;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

ConnectionRecord cat_record(std::vector<std::string> tokens, Hypothesis label) {
  ConnectionRecord r;
  for (auto& t : tokens) r.values.emplace_back(std::move(t));
  r.label = label;
  return r;
}

FeatureSchema cat_schema(int m) {
  std::vector<FeatureDescriptor> fs;
  for (int k = 0; k < m; ++k) fs.push_back({"f" + std::to_string(k), FeatureKind::categorical});
  return FeatureSchema(fs);
}

}  // namespace

TEST_CASE("schema validation") {
  CHECK_THROWS_AS(FeatureSchema({}), std::invalid_argument);
  CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::numeric}, {"a", FeatureKind::categorical}}),
                  std::invalid_argument);
}

TEST_CASE("priors are class frequencies") {
  const auto schema = cat_schema(1);
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 6; ++i) records.push_back(cat_record({"x"}, Hypothesis::normal));
  for (int i = 0; i < 4; ++i) records.push_back(cat_record({"x"}, Hypothesis::anomalous));
  const auto model = NaiveBayesModel::train(schema, records);
  CHECK(close(std::exp(model.log_prior(Hypothesis::normal)), 0.6, 1e-12));
  CHECK(close(std::exp(model.log_prior(Hypothesis::anomalous)), 0.4, 1e-12));
  CHECK(close(std::exp(model.log_prior(Hypothesis::normal)) +
                  std::exp(model.log_prior(Hypothesis::anomalous)),
              1.0, 1e-12));
}

TEST_CASE("training requires both classes") {
  const auto schema = cat_schema(1);
  std::vector<ConnectionRecord> records{cat_record({"x"}, Hypothesis::normal)};
  CHECK_THROWS_AS(NaiveBayesModel::train(schema, records), std::runtime_error);
}

TEST_CASE("add-one smoothing") {
  // alphabet {0,1}; 4 anomalous records, all "1" -> P("1"|h_a) = 5/6
  const auto schema = cat_schema(1);
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 4; ++i) records.push_back(cat_record({"1"}, Hypothesis::anomalous));
  records.push_back(cat_record({"0"}, Hypothesis::normal));
  records.push_back(cat_record({"1"}, Hypothesis::normal));
  const auto model = NaiveBayesModel::train(schema, records);
  const auto one = cat_record({"1"}, Hypothesis::anomalous);
  CHECK(close(model.log_likelihood(one, Hypothesis::anomalous), std::log(5.0 / 6.0), 1e-12));
  const auto zero = cat_record({"0"}, Hypothesis::anomalous);
  CHECK(close(model.log_likelihood(zero, Hypothesis::anomalous), std::log(1.0 / 6.0), 1e-12));
}

TEST_CASE("gaussian conditionals use the population variance") {
  const FeatureSchema schema({{"v", FeatureKind::numeric}});
  std::vector<ConnectionRecord> records;
  ConnectionRecord a;
  a.values.emplace_back(1.0);
  a.label = Hypothesis::normal;
  ConnectionRecord b;
  b.values.emplace_back(3.0);
  b.label = Hypothesis::normal;
  ConnectionRecord c;
  c.values.emplace_back(5.0);
  c.label = Hypothesis::anomalous;
  records = {a, b, c};
  const auto model = NaiveBayesModel::train(schema, records);

  // normal class: mean 2, population variance ((1-2)^2 + (3-2)^2)/2 = 1
  ConnectionRecord probe;
  probe.values.emplace_back(2.0);
  probe.label = Hypothesis::normal;
  CHECK(close(model.log_likelihood(probe, Hypothesis::normal), -0.5 * kLog2Pi, 1e-12));

  // single-record class: variance floored, density still finite
  CHECK(std::isfinite(model.log_likelihood(probe, Hypothesis::anomalous)));
}

TEST_CASE("log likelihood products") {
  // one feature with P(o|h_a) = 0.5
  {
    const auto schema = cat_schema(1);
    std::vector<ConnectionRecord> records{
        cat_record({"a"}, Hypothesis::anomalous), cat_record({"b"}, Hypothesis::anomalous),
        cat_record({"a"}, Hypothesis::normal)};
    const auto model = NaiveBayesModel::train(schema, records);
    // (1+1)/(2+2) = 0.5
    CHECK(close(model.log_likelihood(cat_record({"a"}, Hypothesis::normal), Hypothesis::anomalous),
                std::log(0.5), 1e-12));
  }
  // two independent features with P = 0.5 and P = 0.2 -> product 0.1
  {
    const auto schema = cat_schema(2);
    std::vector<ConnectionRecord> records{
        cat_record({"a", "y"}, Hypothesis::anomalous), cat_record({"b", "z"}, Hypothesis::anomalous),
        cat_record({"a", "x"}, Hypothesis::normal), cat_record({"b", "y"}, Hypothesis::normal)};
    const auto model = NaiveBayesModel::train(schema, records);
    // feature 0: (1+1)/(2+2) = 0.5; feature 1: alphabet {x,y,z}, (0+1)/(2+3) = 0.2
    CHECK(close(model.log_likelihood(cat_record({"a", "x"}, Hypothesis::normal),
                                     Hypothesis::anomalous),
                std::log(0.1), 1e-12));
  }
}

TEST_CASE("log likelihood matches a brute-force table oracle") {
  // seeded corpus over 2 categorical + 1 numeric feature
  const FeatureSchema schema({{"c0", FeatureKind::categorical},
                              {"c1", FeatureKind::categorical},
                              {"v", FeatureKind::numeric}});
  const std::vector<std::string> alpha0{"a", "b", "c"};
  const std::vector<std::string> alpha1{"x", "y"};
  cnids::Rng rng(99);
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 60; ++i) {
    ConnectionRecord r;
    r.values.emplace_back(alpha0[rng.uniform_below(3)]);
    r.values.emplace_back(alpha1[rng.uniform_below(2)]);
    r.values.emplace_back(rng.uniform(-5.0, 5.0));
    r.label = rng.uniform01() < 0.4 ? Hypothesis::anomalous : Hypothesis::normal;
    records.push_back(std::move(r));
  }
  const auto model = NaiveBayesModel::train(schema, records);

  // oracle: recompute smoothed tables from raw counts
  const auto oracle = [&](const ConnectionRecord& probe, Hypothesis h) {
    std::size_t class_count = 0;
    for (const auto& r : records)
      if (r.label == h) ++class_count;
    double sum = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      std::set<std::string> alphabet;
      std::size_t count = 0;
      for (const auto& r : records) {
        alphabet.insert(std::get<std::string>(r.values[k]));
        if (r.label == h && std::get<std::string>(r.values[k]) ==
                                std::get<std::string>(probe.values[k]))
          ++count;
      }
      if (alphabet.count(std::get<std::string>(probe.values[k])) != 0) {
        sum += std::log((static_cast<double>(count) + 1.0) /
                        (static_cast<double>(class_count) + static_cast<double>(alphabet.size())));
      } else {
        sum += std::log(1.0 / (static_cast<double>(class_count) +
                               static_cast<double>(alphabet.size()) + 1.0));
      }
    }
    std::vector<double> values;
    for (const auto& r : records)
      if (r.label == h) values.push_back(std::get<double>(r.values[2]));
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = std::max(var / static_cast<double>(values.size()), 1e-9);
    const double x = std::get<double>(probe.values[2]);
    sum += -0.5 * (kLog2Pi + std::log(var)) - (x - mean) * (x - mean) / (2.0 * var);
    return sum;
  };

  for (int trial = 0; trial < 20; ++trial) {
    ConnectionRecord probe;
    probe.values.emplace_back(trial % 5 == 0 ? std::string("unseen-token")
                                             : alpha0[rng.uniform_below(3)]);
    probe.values.emplace_back(alpha1[rng.uniform_below(2)]);
    probe.values.emplace_back(rng.uniform(-6.0, 6.0));
    probe.label = Hypothesis::normal;
    for (const auto h : {Hypothesis::normal, Hypothesis::anomalous}) {
      CHECK(close(model.log_likelihood(probe, h), oracle(probe, h), 1e-12));
    }
  }
}

TEST_CASE("local posterior") {
  // equal priors, P(o|h_a) = 0.8, P(o|h_n) = 0.2 -> P(h_a|o) = 0.8
  const auto schema = cat_schema(1);
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 3; ++i) records.push_back(cat_record({"1"}, Hypothesis::anomalous));
  for (int i = 0; i < 3; ++i) records.push_back(cat_record({"0"}, Hypothesis::normal));
  const auto model = NaiveBayesModel::train(schema, records);
  const auto posterior = model.local_posterior(cat_record({"1"}, Hypothesis::normal));
  CHECK(close(posterior.anomalous(), 0.8, 1e-12));
  CHECK(close(posterior.anomalous() + posterior.normal(), 1.0, 1e-12));

  // uninformative observation: posterior equals the priors
  std::vector<ConnectionRecord> balanced;
  for (int i = 0; i < 6; ++i)
    balanced.push_back(cat_record({i % 2 == 0 ? "0" : "1"}, Hypothesis::normal));
  for (int i = 0; i < 4; ++i)
    balanced.push_back(cat_record({i % 2 == 0 ? "0" : "1"}, Hypothesis::anomalous));
  const auto uninformative = NaiveBayesModel::train(schema, balanced);
  const auto p = uninformative.local_posterior(cat_record({"0"}, Hypothesis::normal));
  CHECK(close(p.normal(), 0.6, 1e-9));
  CHECK(close(p.anomalous(), 0.4, 1e-9));
}

TEST_CASE("log likelihood is additive over feature blocks") {
  cnids::Rng rng(7);
  const auto schema_a = cat_schema(2);
  const FeatureSchema schema_b({{"g0", FeatureKind::categorical}});
  const FeatureSchema schema_ab({{"f0", FeatureKind::categorical},
                                 {"f1", FeatureKind::categorical},
                                 {"g0", FeatureKind::categorical}});
  std::vector<ConnectionRecord> records_a, records_b, records_ab;
  for (int i = 0; i < 40; ++i) {
    const std::string t0 = std::to_string(rng.uniform_below(3));
    const std::string t1 = std::to_string(rng.uniform_below(2));
    const std::string t2 = std::to_string(rng.uniform_below(4));
    const auto label = rng.uniform01() < 0.5 ? Hypothesis::normal : Hypothesis::anomalous;
    records_a.push_back(cat_record({t0, t1}, label));
    records_b.push_back(cat_record({t2}, label));
    records_ab.push_back(cat_record({t0, t1, t2}, label));
  }
  const auto model_a = NaiveBayesModel::train(schema_a, records_a);
  const auto model_b = NaiveBayesModel::train(schema_b, records_b);
  const auto model_ab = NaiveBayesModel::train(schema_ab, records_ab);
  for (int i = 0; i < 40; ++i) {
    for (const auto h : {Hypothesis::normal, Hypothesis::anomalous}) {
      CHECK(close(model_ab.log_likelihood(records_ab[static_cast<std::size_t>(i)], h),
                  model_a.log_likelihood(records_a[static_cast<std::size_t>(i)], h) +
                      model_b.log_likelihood(records_b[static_cast<std::size_t>(i)], h),
                  1e-12));
    }
  }
}

TEST_CASE("training is independent of record order") {
  const FeatureSchema schema({{"c", FeatureKind::categorical}, {"v", FeatureKind::numeric}});
  cnids::Rng rng(31);
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 50; ++i) {
    ConnectionRecord r;
    r.values.emplace_back(std::to_string(rng.uniform_below(4)));
    r.values.emplace_back(rng.gaussian(1.0, 2.0));
    r.label = rng.uniform01() < 0.3 ? Hypothesis::anomalous : Hypothesis::normal;
    records.push_back(std::move(r));
  }
  auto shuffled = records;
  rng.shuffle(shuffled);

  const auto m1 = NaiveBayesModel::train(schema, records);
  const auto m2 = NaiveBayesModel::train(schema, shuffled);
  CHECK(m1 == m2);
  std::ostringstream s1, s2;
  m1.save(s1);
  m2.save(s2);
  CHECK(s1.str() == s2.str());
}

TEST_CASE("categorical-only likelihoods are proper probabilities") {
  cnids::Rng rng(17);
  const auto schema = cat_schema(3);
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 30; ++i) {
    records.push_back(cat_record({std::to_string(rng.uniform_below(3)),
                                  std::to_string(rng.uniform_below(2)),
                                  std::to_string(rng.uniform_below(5))},
                                 rng.uniform01() < 0.5 ? Hypothesis::normal
                                                       : Hypothesis::anomalous));
  }
  const auto model = NaiveBayesModel::train(schema, records);
  for (int i = 0; i < 30; ++i) {
    for (const auto h : {Hypothesis::normal, Hypothesis::anomalous}) {
      const double p = std::exp(model.log_likelihood(records[static_cast<std::size_t>(i)], h));
      CHECK(p > 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("record validation") {
  const FeatureSchema schema({{"c", FeatureKind::categorical}, {"v", FeatureKind::numeric}});
  ConnectionRecord good;
  good.values.emplace_back(std::string("a"));
  good.values.emplace_back(1.0);
  good.label = Hypothesis::normal;
  ConnectionRecord bad_arity = good;
  bad_arity.values.pop_back();
  ConnectionRecord bad_kind;
  bad_kind.values.emplace_back(1.0);
  bad_kind.values.emplace_back(std::string("a"));
  bad_kind.label = Hypothesis::anomalous;
  ConnectionRecord non_finite = good;
  non_finite.values[1] = std::nan("");
  non_finite.label = Hypothesis::anomalous;

  CHECK_THROWS_AS(NaiveBayesModel::train(schema, {good, bad_arity}), std::invalid_argument);
  CHECK_THROWS_AS(NaiveBayesModel::train(schema, {good, bad_kind}), std::invalid_argument);
  CHECK_THROWS_AS(NaiveBayesModel::train(schema, {good, non_finite}), std::invalid_argument);

  ConnectionRecord anomalous = good;
  anomalous.label = Hypothesis::anomalous;
  const auto model = NaiveBayesModel::train(schema, {good, anomalous});
  CHECK_THROWS_AS(model.log_likelihood(bad_arity, Hypothesis::normal), std::invalid_argument);
}

TEST_CASE("model json round trip") {
  const FeatureSchema schema({{"c", FeatureKind::categorical}, {"v", FeatureKind::numeric}});
  cnids::Rng rng(5);
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 25; ++i) {
    ConnectionRecord r;
    r.values.emplace_back(std::string(1, static_cast<char>('a' + rng.uniform_below(3))));
    r.values.emplace_back(rng.gaussian(0.0, 3.0));
    r.label = i % 3 == 0 ? Hypothesis::anomalous : Hypothesis::normal;
    records.push_back(std::move(r));
  }
  const auto model = NaiveBayesModel::train(schema, records);

  std::stringstream buffer;
  model.save(buffer);
  const auto restored = NaiveBayesModel::load(buffer);
  CHECK(restored == model);

  std::ostringstream again;
  restored.save(again);
  std::ostringstream original;
  model.save(original);
  CHECK(again.str() == original.str());

  std::istringstream junk("{\"model\": \"naive-bayes\"}");
  CHECK_THROWS_AS(NaiveBayesModel::load(junk), std::runtime_error);
}
