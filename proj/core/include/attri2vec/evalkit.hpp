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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attri2vec/common.hpp"
#include "attri2vec/graph.hpp"
#include "attri2vec/inference.hpp"

namespace attri2vec {

// ---------------------------------------------------------------------------
// Edge features

enum class EdgeOperator { kAverage, kHadamard, kWeightedL1, kWeightedL2 };

std::string_view to_string(EdgeOperator op);
/// Accepts average, hadamard, l1 / weighted-l1, l2 / weighted-l2.
EdgeOperator parse_edge_operator(std::string_view name);

/// Component-wise edge feature of two node embeddings.
std::vector<double> edge_features(std::span<const double> a, std::span<const double> b,
                                  EdgeOperator op);
std::vector<double> edge_features(std::span<const float> a, std::span<const float> b,
                                  EdgeOperator op);

// ---------------------------------------------------------------------------
// Metrics

/// Micro-averaged F1; equals accuracy for single-label multi-class data.
double micro_f1(std::span<const int> truth, std::span<const int> predicted);
/// Unweighted mean of per-class F1 over classes present in truth or predictions.
double macro_f1(std::span<const int> truth, std::span<const int> predicted);

/// Maximum-weight one-to-one matching on a rows x cols weight matrix
/// (row-major). Returns the matched column per row, -1 when unmatched.
std::vector<int> max_weight_assignment(std::span<const double> weights, std::size_t rows,
                                       std::size_t cols);

/// Accuracy under the best one-to-one cluster-to-class mapping.
double hungarian_accuracy(std::span<const int> truth, std::span<const int> clusters);
/// Pairwise F-measure: precision and recall over same-cluster node pairs.
double pairwise_f_value(std::span<const int> truth, std::span<const int> clusters);

enum class NmiNormalization { kArithmetic, kGeometric };
NmiNormalization parse_nmi_normalization(std::string_view name);
double normalized_mutual_information(std::span<const int> a, std::span<const int> b,
                                     NmiNormalization norm = NmiNormalization::kArithmetic);

/// Rank-based ROC AUC (Mann-Whitney U with mid-ranks for ties). Throws
/// ConfigError unless both classes occur.
double roc_auc(std::span<const double> scores, std::span<const int> is_positive);

// ---------------------------------------------------------------------------
// Models

/// Dense row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// Binary L2-regularized logistic regression,
///   min 0.5 |w|^2 + C sum_i log(1 + exp(-y_i (w . x_i + b))),
/// solved by damped Newton iterations. The bias is unregularized.
class LogisticRegression {
 public:
  explicit LogisticRegression(double c = 1.0) : c_(c) {}

  /// `positive[i]` selects y_i = +1.
  void fit(const FeatureMatrix& x, std::span<const std::uint8_t> positive);
  double decision(std::span<const double> features) const;

  std::span<const double> weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }

 private:
  double c_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

/// One-vs-rest multi-class wrapper with optional z-scoring from the
/// training rows.
class LinearClassifier {
 public:
  explicit LinearClassifier(double c = 1.0, bool standardize = true)
      : c_(c), standardize_(standardize) {}

  void fit(const FeatureMatrix& x, std::span<const int> labels, std::size_t num_classes);
  int predict(std::span<const double> features) const;
  /// Decision value of the one-vs-rest model for `cls`.
  double score(std::span<const double> features, std::size_t cls) const;

 private:
  std::vector<double> transform(std::span<const double> features) const;

  double c_;
  bool standardize_;
  std::vector<double> mean_, inv_std_;
  std::vector<LogisticRegression> models_;
};

/// Lloyd's k-means with k-means++ seeding. Returns nullopt when a cluster
/// empties so the caller can reseed.
std::optional<std::vector<int>> kmeans(const FeatureMatrix& points, std::size_t k, Rng& rng,
                                       std::size_t max_iterations = 300);

// ---------------------------------------------------------------------------
// Protocols

struct EvalReport {
  std::string task;
  std::vector<std::pair<std::string, double>> metrics;
  std::string split;
  std::uint64_t seed = 0;

  std::optional<double> metric(std::string_view name) const;
  std::string to_json() const;
  /// Aligned two-column text table.
  std::string to_table() const;
  /// "task,metric,value" rows with a header.
  std::string to_csv() const;
};

struct ClassifyOptions {
  double train_ratio = 0.5;
  std::size_t repeats = 10;
  std::uint64_t seed = 1;
  double regularization = 1.0;
  bool standardize = true;
};

/// Repeated random-split node classification; reports mean Micro-F1 and
/// Macro-F1. Splits missing a class in the training part are redrawn.
EvalReport classify(const EmbeddingSet& embeddings, const NodeLabels& labels,
                    const ClassifyOptions& options = {});

/// Trains on a random train_ratio share of the in-sample labeled nodes and
/// tests on every out-of-sample labeled node, `repeats` times.
EvalReport classify_out_of_sample(const EmbeddingSet& in_sample, const NodeLabels& in_labels,
                                  const EmbeddingSet& out_of_sample, const NodeLabels& out_labels,
                                  const ClassifyOptions& options = {});

struct ClusterOptions {
  /// 0 uses the number of classes.
  std::size_t k = 0;
  std::size_t repeats = 20;
  std::uint64_t seed = 1;
  NmiNormalization nmi = NmiNormalization::kArithmetic;
  std::size_t max_iterations = 300;
};

/// k-means over the labeled nodes; reports mean accuracy, f_value and nmi.
EvalReport cluster(const EmbeddingSet& embeddings, const NodeLabels& labels,
                   const ClusterOptions& options = {});

struct LinkPredictOptions {
  /// Negative pairs sampled per training edge.
  std::size_t negative_ratio = 1;
  std::uint64_t seed = 1;
  double regularization = 1.0;
  bool standardize = true;
  /// Reuse previously sampled test negatives instead of drawing new ones.
  std::optional<std::vector<NamedEdge>> test_negatives;
};

struct LinkPredictionResult {
  EvalReport report;
  std::vector<NamedEdge> train_negatives;
  std::vector<NamedEdge> test_negatives;
};

/// Trains a logistic-regression link classifier on edge features of the
/// training graph's edges and sampled non-edges, then reports AUC on the
/// test edges against one sampled non-edge each. Test negatives avoid every
/// training and test edge; training negatives avoid training edges only.
LinkPredictionResult link_predict(const AttributedGraph& train_graph,
                                  std::span<const NamedEdge> test_edges,
                                  const EmbeddingSet& embeddings, EdgeOperator op,
                                  const LinkPredictOptions& options = {});

/// A graph split into in-sample and held-out nodes.
struct OutOfSampleSplit {
  AttributedGraph in_sample;
  AttributeTable held_out;
  NodeLabels held_out_labels;
  /// Edges of the original graph with at least one held-out endpoint.
  std::vector<NamedEdge> test_edges;
};

/// Holds out round(fraction * |V|) uniformly chosen nodes.
OutOfSampleSplit hold_out_nodes(const AttributedGraph& graph, double fraction, std::uint64_t seed);

/// File labels of a graph's labeled nodes, keyed by external id.
NodeLabels graph_labels(const AttributedGraph& graph);

}  // namespace attri2vec
