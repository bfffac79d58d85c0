// Copyright 2026 The attri2vec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>

#include "attri2vec/evalkit.hpp"
#include "attri2vec/synthetic.hpp"
#include "test_support.hpp"

using namespace attri2vec;

namespace {

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [_, c] : counts) h -= c / n * std::log(c / n);
  return h;
}

double nmi_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1;
    cb[b[i]] += 1;
    joint[{a[i], b[i]}] += 1;
  }
  double mi = 0.0;
  for (const auto& [key, c] : joint) mi += c / n * std::log(c * n / (ca[key.first] * cb[key.second]));
  const double ha = entropy(ca, n), hb = entropy(cb, n);
  if (ha + hb == 0.0) return 1.0;
  return mi / (0.5 * (ha + hb));
}

double auc_oracle(const std::vector<double>& s, const std::vector<int>& pos) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!pos[i] || pos[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

double hungarian_oracle(const std::vector<int>& truth, const std::vector<int>& clusters, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += perm[static_cast<std::size_t>(clusters[i])] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

double pairwise_f_oracle(const std::vector<int>& truth, const std::vector<int>& clusters) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      const bool same_c = clusters[i] == clusters[j], same_t = truth[i] == truth[j];
      tp += same_c && same_t;
      fp += same_c && !same_t;
      fn += !same_c && same_t;
    }
  }
  const double p = tp / (tp + fp), r = tp / (tp + fn);
  return 2 * p * r / (p + r);
}

double macro_f1_oracle(const std::vector<int>& truth, const std::vector<int>& pred) {
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(pred.begin(), pred.end());
  double sum = 0.0;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tp += pred[i] == c && truth[i] == c;
      fp += pred[i] == c && truth[i] != c;
      fn += pred[i] != c && truth[i] == c;
    }
    sum += tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
  }
  return sum / static_cast<double>(classes.size());
}

std::vector<int> random_labels(std::size_t n, int k, Rng& rng) {
  std::vector<int> v(n);
  for (int& x : v) x = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
  return v;
}

/// Gaussian blobs around k well-separated centres, labels round-robin.
struct Blobs {
  EmbeddingSet set;
  NodeLabels labels;
};

Blobs blobs(std::size_t n, int k, std::size_t dim, double spread, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  Blobs b{EmbeddingSet(dim), {}};
  for (int c = 0; c < k; ++c) b.labels.class_names.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(k));
    std::vector<double> v(dim);
    for (std::size_t j = 0; j < dim; ++j) v[j] = (j == static_cast<std::size_t>(c) % dim ? 10.0 : 0.0) + noise(rng);
    b.set.add("n" + std::to_string(i), v);
    b.labels.node_ids.push_back("n" + std::to_string(i));
    b.labels.class_ids.push_back(c);
  }
  return b;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("micro and macro F1") {
    const std::vector<int> t{0, 0, 1, 1, 2}, p{0, 1, 1, 1, 0};
    CHECK(micro_f1(t, p) == doctest::Approx(0.6));
    CHECK(macro_f1(t, p) == doctest::Approx(macro_f1_oracle(t, p)));
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_labels(40, 4, rng), b = random_labels(40, 5, rng);
      CHECK(macro_f1(a, b) == doctest::Approx(macro_f1_oracle(a, b)).epsilon(1e-12));
    }
  }

  TEST_CASE("NMI: identity, relabelling, symmetry and oracle") {
    const std::vector<int> a{0, 0, 1, 1, 2, 2}, relabelled{5, 5, 3, 3, 9, 9};
    CHECK(normalized_mutual_information(a, a) == doctest::Approx(1.0));
    CHECK(normalized_mutual_information(a, relabelled) == doctest::Approx(1.0));
    const std::vector<int> constant(6, 0);
    CHECK(normalized_mutual_information(a, constant) == doctest::Approx(0.0));
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_labels(60, 3, rng), y = random_labels(60, 4, rng);
      const double v = normalized_mutual_information(x, y);
      CHECK(v == doctest::Approx(normalized_mutual_information(y, x)).epsilon(1e-12));
      CHECK(v == doctest::Approx(nmi_oracle(x, y)).epsilon(1e-12));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(normalized_mutual_information(x, y, NmiNormalization::kGeometric) >= v - 1e-12);
    }
    CHECK(parse_nmi_normalization("geometric") == NmiNormalization::kGeometric);
  }

  TEST_CASE("Hungarian accuracy and pairwise F against brute force") {
    const std::vector<int> t{0, 0, 1, 1}, c{1, 1, 0, 0};
    CHECK(hungarian_accuracy(t, c) == 1.0);
    CHECK(pairwise_f_value(t, c) == 1.0);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_labels(30, 4, rng), y = random_labels(30, 4, rng);
      CHECK(hungarian_accuracy(x, y) == doctest::Approx(hungarian_oracle(x, y, 4)));
      CHECK(pairwise_f_value(x, y) == doctest::Approx(pairwise_f_oracle(x, y)).epsilon(1e-12));
    }
  }

  TEST_CASE("assignment handles rectangular matrices") {
    const std::vector<double> w{1, 5, 2, 4, 3, 9};
    const auto rows = max_weight_assignment(w, 2, 3);
    CHECK(rows == std::vector<int>{1, 2});
    const auto cols = max_weight_assignment(w, 3, 2);
    CHECK(std::count(cols.begin(), cols.end(), -1) == 1);
  }

  TEST_CASE("AUC: examples, ties, oracle and monotone invariance") {
    const std::vector<int> pos{1, 1, 0, 0};
    CHECK(roc_auc(std::vector<double>{4, 3, 2, 1}, pos) == 1.0);
    CHECK(roc_auc(std::vector<double>{1, 2, 3, 4}, pos) == 0.0);
    CHECK(roc_auc(std::vector<double>{1, 1, 1, 1}, pos) == 0.5);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), ConfigError);
    Rng rng(4);
    std::normal_distribution<double> n(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> s(80);
      std::vector<int> p(80);
      for (std::size_t i = 0; i < s.size(); ++i) {
        p[i] = static_cast<int>(i % 3 == 0);
        s[i] = std::round(4 * (n(rng) + 0.5 * p[i])) / 4;
      }
      const double auc = roc_auc(s, p);
      CHECK(auc == doctest::Approx(auc_oracle(s, p)).epsilon(1e-12));
      std::vector<double> t(s.size());
      std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3 * v) - 7; });
      CHECK(roc_auc(t, p) == doctest::Approx(auc));
    }
    std::vector<double> s(20000);
    std::vector<int> p(20000);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = n(rng);
      p[i] = static_cast<int>(rng() % 2);
    }
    CHECK(std::abs(roc_auc(s, p) - 0.5) < 0.02);
  }

  TEST_CASE("edge operators") {
    const std::vector<double> a{1, -2, 3}, b{3, 2, 3};
    CHECK(edge_features(a, b, EdgeOperator::kAverage) == std::vector<double>{2, 0, 3});
    CHECK(edge_features(a, b, EdgeOperator::kHadamard) == std::vector<double>{3, -4, 9});
    CHECK(edge_features(a, b, EdgeOperator::kWeightedL1) == std::vector<double>{2, 4, 0});
    CHECK(edge_features(a, b, EdgeOperator::kWeightedL2) == std::vector<double>{4, 16, 0});
    CHECK(parse_edge_operator("l2") == EdgeOperator::kWeightedL2);
    CHECK_THROWS_AS(parse_edge_operator("concat"), ConfigError);
    CHECK_THROWS_AS(edge_features(a, std::vector<double>{1}, EdgeOperator::kAverage), ConfigError);
  }
}

TEST_SUITE("models") {
  TEST_CASE("logistic regression satisfies its optimality conditions") {
    Rng rng(5);
    std::normal_distribution<double> n(0, 1);
    FeatureMatrix x(200, 3);
    std::vector<std::uint8_t> y(200);
    for (std::size_t i = 0; i < 200; ++i) {
      for (double& v : x.row(i)) v = n(rng);
      y[i] = x.row(i)[0] + 0.5 * x.row(i)[1] + n(rng) > 0.3;
    }
    LogisticRegression lr(1.0);
    lr.fit(x, y);
    std::vector<double> grad(lr.weights().begin(), lr.weights().end());
    double grad_b = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
      const double sign = y[i] ? 1.0 : -1.0;
      const double m = sign * lr.decision(x.row(i));
      const double coef = -sign / (1.0 + std::exp(m));
      for (std::size_t j = 0; j < 3; ++j) grad[j] += coef * x.row(i)[j];
      grad_b += coef;
    }
    for (double g : grad) CHECK(std::abs(g) < 1e-6);
    CHECK(std::abs(grad_b) < 1e-6);
    CHECK(lr.weights()[0] > lr.weights()[1]);
  }

  TEST_CASE("one-vs-rest classifier separates blobs") {
    const auto b = blobs(150, 3, 4, 0.5, 6);
    FeatureMatrix x(150, 4);
    for (std::size_t i = 0; i < 150; ++i) std::copy(b.set.vector(i).begin(), b.set.vector(i).end(), x.row(i).begin());
    for (bool standardize : {true, false}) {
      LinearClassifier clf(1.0, standardize);
      clf.fit(x, b.labels.class_ids, 3);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < 150; ++i) hits += clf.predict(x.row(i)) == b.labels.class_ids[i];
      CHECK(hits == 150);
    }
  }

  TEST_CASE("k-means recovers separated clusters") {
    const auto b = blobs(90, 3, 3, 0.3, 7);
    FeatureMatrix x(90, 3);
    for (std::size_t i = 0; i < 90; ++i) std::copy(b.set.vector(i).begin(), b.set.vector(i).end(), x.row(i).begin());
    Rng rng(8);
    const auto a = kmeans(x, 3, rng);
    REQUIRE(a);
    CHECK(normalized_mutual_information(*a, b.labels.class_ids) == doctest::Approx(1.0));
  }
}

TEST_SUITE("protocols") {
  TEST_CASE("classification of separable embeddings is perfect") {
    const auto b = blobs(100, 4, 4, 0.3, 9);
    const auto r = classify(b.set, b.labels, ClassifyOptions{0.5, 3, 1, 1.0, true});
    CHECK(r.task == "node_classification");
    CHECK(*r.metric("micro_f1") == 1.0);
    CHECK(*r.metric("macro_f1") == 1.0);
    CHECK(*r.metric("micro_f1_std") == 0.0);
    CHECK(r.seed == 1);
  }

  TEST_CASE("classification is reproducible and validates options") {
    const auto b = blobs(100, 3, 3, 4.0, 10);
    const ClassifyOptions o{0.3, 4, 5, 1.0, true};
    CHECK(classify(b.set, b.labels, o).metrics == classify(b.set, b.labels, o).metrics);
    CHECK_THROWS_AS(classify(b.set, b.labels, ClassifyOptions{1.0, 1, 1, 1.0, true}), ConfigError);
    auto missing = b.labels;
    missing.node_ids[0] = "ghost";
    CHECK_THROWS_AS(classify(b.set, missing), ConfigError);
  }

  TEST_CASE("out-of-sample classification requires matching classes") {
    const auto a = blobs(80, 2, 2, 0.3, 11), b = blobs(40, 2, 2, 0.3, 12);
    const auto r = classify_out_of_sample(a.set, a.labels, b.set, b.labels, ClassifyOptions{0.5, 2, 1, 1.0, true});
    CHECK(*r.metric("micro_f1") == 1.0);
    auto other = b.labels;
    other.class_names = {"x", "y"};
    CHECK_THROWS_AS(classify_out_of_sample(a.set, a.labels, b.set, other), ConfigError);
  }

  TEST_CASE("clustering separable embeddings is perfect") {
    const auto b = blobs(90, 3, 3, 0.3, 13);
    const auto r = cluster(b.set, b.labels, ClusterOptions{0, 5, 1, NmiNormalization::kArithmetic, 300});
    CHECK(r.task == "node_clustering");
    CHECK(*r.metric("accuracy") == doctest::Approx(1.0));
    CHECK(*r.metric("f_value") == doctest::Approx(1.0));
    CHECK(*r.metric("nmi") == doctest::Approx(1.0));
  }

  TEST_CASE("link prediction ranks within-block pairs above cross-block pairs") {
    SbmConfig cfg;
    cfg.p_in = 0.3;
    cfg.p_out = 0.0;
    const auto g = generate_sbm(cfg);
    // Hold out every tenth edge.
    const auto edges = g.edges();
    std::vector<NamedEdge> train, test;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      (k % 10 == 0 ? test : train).emplace_back(g.name(edges[k].first), g.name(edges[k].second));
    }
    GraphBuilder builder(g.feature_dim());
    for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
      const auto x = g.attributes(i);
      std::vector<std::pair<std::uint32_t, double>> row;
      for (std::size_t k = 0; k < x.nnz(); ++k) row.emplace_back(x.indices[k], x.values[k]);
      builder.add_node(g.name(i), row);
    }
    for (const auto& [a, b] : train) builder.add_edge(a, b);
    const auto train_graph = std::move(builder).build();

    EmbeddingSet set(2);
    for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
      const std::vector<double> v{i % 2 == 0 ? 1.0 : -1.0, 0.01 * i};
      set.add(g.name(i), v);
    }
    const auto result = link_predict(train_graph, test, set, EdgeOperator::kWeightedL2);
    CHECK(result.report.task == "link_prediction");
    CHECK(*result.report.metric("auc") > 0.7);
    CHECK(result.test_negatives.size() == test.size());
    CHECK(result.train_negatives.size() == train.size());
    for (const auto& [a, b] : result.test_negatives) {
      CHECK_FALSE(g.has_edge(*train_graph.find(a), *train_graph.find(b)));
    }

    LinkPredictOptions reuse;
    reuse.test_negatives = result.test_negatives;
    const auto again = link_predict(train_graph, test, set, EdgeOperator::kWeightedL2, reuse);
    CHECK(*again.report.metric("auc") == *result.report.metric("auc"));

    CHECK_THROWS_AS(link_predict(train_graph, train, set, EdgeOperator::kWeightedL2), ConfigError);
    reuse.test_negatives = std::vector<NamedEdge>{{"0", "ghost"}};
    CHECK_THROWS_AS(link_predict(train_graph, test, set, EdgeOperator::kWeightedL2, reuse), ConfigError);
  }

  TEST_CASE("hold-out split partitions nodes and collects incident edges") {
    const auto g = generate_sbm(SbmConfig{});
    const auto split = hold_out_nodes(g, 0.2, 3);
    CHECK(split.held_out.size() == 40);
    CHECK(split.in_sample.num_nodes() == 160);
    std::set<std::string> held;
    for (NodeIndex i = 0; i < split.held_out.size(); ++i) held.insert(split.held_out.name(i));
    for (NodeIndex i = 0; i < split.in_sample.num_nodes(); ++i) CHECK_FALSE(held.count(split.in_sample.name(i)));
    std::size_t expected = 0;
    for (const auto& [u, v] : g.edges()) expected += held.count(g.name(u)) || held.count(g.name(v));
    CHECK(split.test_edges.size() == expected);
    for (const auto& [a, b] : split.test_edges) CHECK((held.count(a) || held.count(b)));
    CHECK(split.in_sample.num_edges() + expected == g.num_edges());
    CHECK(split.held_out_labels.node_ids.size() == 40);
    CHECK(split.held_out_labels.class_names == graph_labels(g).class_names);
    CHECK_THROWS_AS(hold_out_nodes(g, 1.0, 3), ConfigError);
  }

  TEST_CASE("report formats") {
    EvalReport r{"classification", {{"micro_f1", 0.5}, {"macro_f1", 0.25}}, "random 50%", 7};
    CHECK(r.metric("macro_f1") == 0.25);
    CHECK_FALSE(r.metric("auc"));
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["task"] == "classification");
    CHECK(j["seed"] == 7);
    CHECK(j["metrics"]["micro_f1"] == 0.5);
    const auto csv = r.to_csv();
    CHECK(csv.find("task,metric,value\n") == 0);
    CHECK(csv.find("classification,macro_f1,0.25") != std::string::npos);
    CHECK(r.to_table().find("micro_f1") != std::string::npos);
  }
}
