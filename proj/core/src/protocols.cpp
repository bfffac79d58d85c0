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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <nlohmann/json.hpp>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "attri2vec/evalkit.hpp"

namespace attri2vec {

namespace {

struct LabeledData {
  FeatureMatrix features;
  std::vector<int> labels;
};

LabeledData gather(const EmbeddingSet& embeddings, const NodeLabels& labels) {
  LabeledData data{FeatureMatrix(labels.node_ids.size(), embeddings.dim()), labels.class_ids};
  for (std::size_t i = 0; i < labels.node_ids.size(); ++i) {
    auto k = embeddings.find(labels.node_ids[i]);
    if (!k) throw ConfigError("labeled node '" + labels.node_ids[i] + "' has no embedding");
    const auto v = embeddings.vector(*k);
    std::copy(v.begin(), v.end(), data.features.row(i).begin());
  }
  return data;
}

FeatureMatrix select_rows(const FeatureMatrix& x, std::span<const std::size_t> rows) {
  FeatureMatrix out(rows.size(), x.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = x.row(rows[i]);
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

std::vector<int> select(std::span<const int> v, std::span<const std::size_t> rows) {
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

/// Random subset of size round(ratio * n) whose labels cover every class
/// occurring in `labels`. Redraws up to 1000 times.
std::vector<std::size_t> draw_training_rows(std::span<const int> labels, double ratio, Rng& rng,
                                            std::vector<std::size_t>* rest) {
  const std::size_t n = labels.size();
  const auto want = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  const std::size_t n_train = std::clamp<std::size_t>(want, 1, n > 1 ? n - 1 : 1);
  std::unordered_set<int> classes(labels.begin(), labels.end());
  std::vector<std::size_t> order(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::unordered_set<int> seen;
    for (std::size_t i = 0; i < n_train; ++i) seen.insert(labels[order[i]]);
    if (seen.size() == classes.size()) {
      if (rest) rest->assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
      order.resize(n_train);
      return order;
    }
  }
  throw ConfigError("could not draw a training split containing every class");
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

void check_classify_options(const ClassifyOptions& options) {
  if (!(options.train_ratio > 0.0 && options.train_ratio < 1.0)) {
    throw ConfigError("training ratio must lie strictly between 0 and 1");
  }
  if (options.repeats < 1) throw ConfigError("repeats must be at least 1");
}

std::uint64_t pair_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace

std::optional<double> EvalReport::metric(std::string_view name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  return std::nullopt;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metrics) j["metrics"][k] = v;
  j["split"] = split;
  j["seed"] = seed;
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::size_t width = 6;
  for (const auto& [k, v] : metrics) width = std::max(width, k.size());
  std::string out = fmt::format("{} ({}, seed {})\n", task, split, seed);
  out += fmt::format("  {:<{}}  {:>8}\n", "metric", width, "value(%)");
  for (const auto& [k, v] : metrics) out += fmt::format("  {:<{}}  {:>8.2f}\n", k, width, 100.0 * v);
  return out;
}

std::string EvalReport::to_csv() const {
  std::string out = "task,metric,value\n";
  for (const auto& [k, v] : metrics) out += fmt::format("{},{},{}\n", task, k, v);
  return out;
}

EvalReport classify(const EmbeddingSet& embeddings, const NodeLabels& labels,
                    const ClassifyOptions& options) {
  check_classify_options(options);
  const auto data = gather(embeddings, labels);
  if (data.labels.size() < 2) throw ConfigError("classification needs at least two labeled nodes");

  std::vector<double> micro, macro;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    Rng rng = derive_rng(options.seed, r, 31);
    std::vector<std::size_t> test_rows;
    const auto train_rows = draw_training_rows(data.labels, options.train_ratio, rng, &test_rows);
    LinearClassifier clf(options.regularization, options.standardize);
    clf.fit(select_rows(data.features, train_rows), select(data.labels, train_rows),
            labels.num_classes());
    const auto truth = select(data.labels, test_rows);
    std::vector<int> predicted(test_rows.size());
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      predicted[i] = clf.predict(data.features.row(test_rows[i]));
    }
    micro.push_back(micro_f1(truth, predicted));
    macro.push_back(macro_f1(truth, predicted));
  }
  return {"node_classification",
          {{"micro_f1", mean(micro)},
           {"macro_f1", mean(macro)},
           {"micro_f1_std", stddev(micro)},
           {"macro_f1_std", stddev(macro)}},
          fmt::format("train_ratio={} repeats={} labeled={}", options.train_ratio, options.repeats,
                      data.labels.size()),
          options.seed};
}

EvalReport classify_out_of_sample(const EmbeddingSet& in_sample, const NodeLabels& in_labels,
                                  const EmbeddingSet& out_of_sample, const NodeLabels& out_labels,
                                  const ClassifyOptions& options) {
  check_classify_options(options);
  if (in_labels.class_names != out_labels.class_names) {
    throw ConfigError("in-sample and out-of-sample labels use different class sets");
  }
  const auto train = gather(in_sample, in_labels);
  const auto test = gather(out_of_sample, out_labels);
  if (test.labels.empty()) throw ConfigError("no labeled out-of-sample nodes");

  std::vector<double> micro, macro;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    Rng rng = derive_rng(options.seed, r, 32);
    const auto rows = draw_training_rows(train.labels, options.train_ratio, rng, nullptr);
    LinearClassifier clf(options.regularization, options.standardize);
    clf.fit(select_rows(train.features, rows), select(train.labels, rows), in_labels.num_classes());
    std::vector<int> predicted(test.labels.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) predicted[i] = clf.predict(test.features.row(i));
    micro.push_back(micro_f1(test.labels, predicted));
    macro.push_back(macro_f1(test.labels, predicted));
  }
  return {"out_of_sample_classification",
          {{"micro_f1", mean(micro)}, {"macro_f1", mean(macro)}},
          fmt::format("train_ratio={} repeats={} in_sample={} out_of_sample={}", options.train_ratio,
                      options.repeats, train.labels.size(), test.labels.size()),
          options.seed};
}

EvalReport cluster(const EmbeddingSet& embeddings, const NodeLabels& labels,
                   const ClusterOptions& options) {
  const std::size_t k = options.k ? options.k : labels.num_classes();
  if (k < 2) throw ConfigError("clustering needs k >= 2");
  if (options.repeats < 1) throw ConfigError("repeats must be at least 1");
  const auto data = gather(embeddings, labels);

  std::vector<double> acc, fval, nmi;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    std::optional<std::vector<int>> assignment;
    for (std::size_t attempt = 0; attempt < 100 && !assignment; ++attempt) {
      Rng rng = derive_rng(options.seed, r, 1000 + attempt);
      assignment = kmeans(data.features, k, rng, options.max_iterations);
    }
    if (!assignment) throw NumericError("k-means kept producing empty clusters");
    acc.push_back(hungarian_accuracy(data.labels, *assignment));
    fval.push_back(pairwise_f_value(data.labels, *assignment));
    nmi.push_back(normalized_mutual_information(*assignment, data.labels, options.nmi));
  }
  return {"node_clustering",
          {{"accuracy", mean(acc)}, {"f_value", mean(fval)}, {"nmi", mean(nmi)}},
          fmt::format("k={} repeats={} nmi={}", k, options.repeats,
                      options.nmi == NmiNormalization::kArithmetic ? "arithmetic" : "geometric"),
          options.seed};
}

LinkPredictionResult link_predict(const AttributedGraph& train_graph,
                                  std::span<const NamedEdge> test_edges,
                                  const EmbeddingSet& embeddings, EdgeOperator op,
                                  const LinkPredictOptions& options) {
  if (options.negative_ratio < 1) throw ConfigError("negative ratio must be at least 1");
  if (train_graph.num_edges() == 0) throw ConfigError("training graph has no edges");
  if (test_edges.empty()) throw ConfigError("no test edges");

  // Universe of nodes: training graph nodes first, then new test endpoints.
  std::vector<std::string> names(train_graph.attribute_table().names());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, names.size());
    if (inserted) names.push_back(name);
    return it->second;
  };
  std::unordered_set<std::uint64_t> train_pairs, all_pairs;
  for (const auto& [a, b] : train_graph.edges()) {
    train_pairs.insert(pair_key(a, b));
    all_pairs.insert(pair_key(a, b));
  }
  std::vector<std::pair<std::size_t, std::size_t>> test_pos;
  for (const auto& [a, b] : test_edges) {
    const auto ia = intern(a), ib = intern(b);
    if (ia == ib) throw ConfigError("test edge is a self-loop: " + a);
    if (train_pairs.contains(pair_key(ia, ib))) {
      throw ConfigError("test edge " + a + " " + b + " also appears in the training graph");
    }
    all_pairs.insert(pair_key(ia, ib));
    test_pos.emplace_back(ia, ib);
  }

  std::vector<std::size_t> row_of(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto k = embeddings.find(names[i]);
    if (!k) throw ConfigError("node '" + names[i] + "' has no embedding");
    row_of[i] = *k;
  }
  auto feature = [&](std::size_t a, std::size_t b) {
    return edge_features(embeddings.vector(row_of[a]), embeddings.vector(row_of[b]), op);
  };
  auto draw_partner = [&](std::size_t anchor, std::size_t range,
                          const std::unordered_set<std::uint64_t>& forbidden, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, range - 1);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const std::size_t k = pick(rng);
      if (k != anchor && !forbidden.contains(pair_key(anchor, k))) return k;
    }
    throw ConfigError("could not sample a non-edge for node '" + names[anchor] + "'");
  };

  LinkPredictionResult result;
  const auto train_edges = train_graph.edges();
  const std::size_t train_rows = train_edges.size() * (1 + options.negative_ratio);
  FeatureMatrix x(train_rows, embeddings.dim());
  std::vector<int> y(train_rows);
  Rng train_rng = derive_rng(options.seed, 0, 41);
  std::size_t row = 0;
  for (const auto& [a, b] : train_edges) {
    const auto pos = feature(a, b);
    std::copy(pos.begin(), pos.end(), x.row(row).begin());
    y[row++] = 1;
    for (std::size_t r = 0; r < options.negative_ratio; ++r) {
      const auto k = draw_partner(a, train_graph.num_nodes(), train_pairs, train_rng);
      const auto neg = feature(a, k);
      std::copy(neg.begin(), neg.end(), x.row(row).begin());
      y[row++] = 0;
      result.train_negatives.emplace_back(names[a], names[k]);
    }
  }
  LinearClassifier clf(options.regularization, options.standardize);
  clf.fit(x, y, 2);

  if (options.test_negatives) {
    result.test_negatives = *options.test_negatives;
  } else {
    Rng test_rng = derive_rng(options.seed, 0, 42);
    for (const auto& [a, b] : test_pos) {
      // Anchor on the endpoint outside the training graph when there is one.
      const std::size_t anchor = a >= train_graph.num_nodes() ? a : (b >= train_graph.num_nodes() ? b : a);
      const auto k = draw_partner(anchor, names.size(), all_pairs, test_rng);
      result.test_negatives.emplace_back(names[anchor], names[k]);
    }
  }

  std::vector<double> scores;
  std::vector<int> truth;
  for (const auto& [a, b] : test_pos) {
    scores.push_back(clf.score(feature(a, b), 1));
    truth.push_back(1);
  }
  for (const auto& [a, b] : result.test_negatives) {
    const auto ka = embeddings.find(a), kb = embeddings.find(b);
    if (!ka || !kb) throw ConfigError("test negative " + a + " " + b + " has no embedding");
    scores.push_back(clf.score(edge_features(embeddings.vector(*ka), embeddings.vector(*kb), op), 1));
    truth.push_back(0);
  }

  result.report = {"link_prediction",
                   {{"auc", roc_auc(scores, truth)}},
                   fmt::format("operator={} train_edges={} test_edges={} negative_ratio={}",
                               to_string(op), train_edges.size(), test_pos.size(),
                               options.negative_ratio),
                   options.seed};
  return result;
}

OutOfSampleSplit hold_out_nodes(const AttributedGraph& graph, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("hold-out fraction must lie in (0, 1)");
  const std::size_t n = graph.num_nodes();
  const auto n_hold = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<NodeIndex> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = derive_rng(seed, 0, 21);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> keep(n, true);
  for (std::size_t i = 0; i < n_hold; ++i) keep[order[i]] = false;

  OutOfSampleSplit split;
  split.in_sample = induced_subgraph(graph, keep);
  split.held_out = AttributeTable(graph.feature_dim());
  if (graph.labels()) split.held_out_labels.class_names = graph.labels()->class_names;
  for (NodeIndex i = 0; i < n; ++i) {
    if (keep[i]) continue;
    const auto row = graph.attributes(i);
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t k = 0; k < row.nnz(); ++k) entries.emplace_back(row.indices[k], row.values[k]);
    split.held_out.add_row(graph.name(i), std::move(entries));
    if (graph.labels() && graph.labels()->class_of[i] >= 0) {
      split.held_out_labels.node_ids.push_back(graph.name(i));
      split.held_out_labels.class_ids.push_back(graph.labels()->class_of[i]);
    }
  }
  for (const auto& [a, b] : graph.edges()) {
    if (!keep[a] || !keep[b]) split.test_edges.emplace_back(graph.name(a), graph.name(b));
  }
  return split;
}

NodeLabels graph_labels(const AttributedGraph& graph) {
  NodeLabels out;
  if (!graph.labels()) return out;
  out.class_names = graph.labels()->class_names;
  for (NodeIndex i = 0; i < graph.num_nodes(); ++i) {
    if (graph.labels()->class_of[i] >= 0) {
      out.node_ids.push_back(graph.name(i));
      out.class_ids.push_back(graph.labels()->class_of[i]);
    }
  }
  return out;
}

}  // namespace attri2vec
