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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "attri2vec/evalkit.hpp"

namespace attri2vec {

namespace {

void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw ConfigError("label vectors differ in length");
  if (a == 0) throw ConfigError("metric needs at least one item");
}

/// Relabels values to 0..k-1 in sorted order.
std::vector<int> compact(std::span<const int> labels, std::size_t& k) {
  std::map<int, int> ids;
  for (int v : labels) ids.emplace(v, 0);
  int next = 0;
  for (auto& [v, id] : ids) id = next++;
  k = ids.size();
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  return out;
}

struct Contingency {
  std::size_t rows = 0;  // clusters / partition a
  std::size_t cols = 0;  // classes / partition b
  std::vector<double> counts;
  std::vector<double> row_sums, col_sums;
  double n = 0.0;
};

Contingency contingency(std::span<const int> a, std::span<const int> b) {
  check_same_length(a.size(), b.size());
  Contingency t;
  const auto ca = compact(a, t.rows);
  const auto cb = compact(b, t.cols);
  t.counts.assign(t.rows * t.cols, 0.0);
  t.row_sums.assign(t.rows, 0.0);
  t.col_sums.assign(t.cols, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    t.counts[static_cast<std::size_t>(ca[i]) * t.cols + static_cast<std::size_t>(cb[i])] += 1.0;
    t.row_sums[static_cast<std::size_t>(ca[i])] += 1.0;
    t.col_sums[static_cast<std::size_t>(cb[i])] += 1.0;
  }
  t.n = static_cast<double>(a.size());
  return t;
}

double pairs(double c) { return c * (c - 1.0) / 2.0; }

double entropy(std::span<const double> sums, double n) {
  double h = 0.0;
  for (double s : sums) {
    if (s > 0.0) h -= (s / n) * std::log(s / n);
  }
  return h;
}

}  // namespace

double micro_f1(std::span<const int> truth, std::span<const int> predicted) {
  check_same_length(truth.size(), predicted.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

double macro_f1(std::span<const int> truth, std::span<const int> predicted) {
  check_same_length(truth.size(), predicted.size());
  std::map<int, std::array<double, 3>> stats;  // tp, fp, fn
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      stats[truth[i]][0] += 1.0;
    } else {
      stats[predicted[i]][1] += 1.0;
      stats[truth[i]][2] += 1.0;
    }
  }
  double sum = 0.0;
  for (const auto& [cls, s] : stats) {
    const double denom = 2.0 * s[0] + s[1] + s[2];
    sum += denom > 0.0 ? 2.0 * s[0] / denom : 0.0;
  }
  return sum / static_cast<double>(stats.size());
}

std::vector<int> max_weight_assignment(std::span<const double> weights, std::size_t rows,
                                       std::size_t cols) {
  if (weights.size() != rows * cols) throw ConfigError("assignment matrix has wrong size");
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  double max_w = 0.0;
  for (double w : weights) max_w = std::max(max_w, w);
  // Square min-cost problem; padding cells cost max_w (weight 0).
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < cols) ? max_w - weights[i * cols + j] : max_w;
  };

  // Potentials-based Hungarian algorithm, 1-indexed with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> match(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j];
    if (i >= 1 && i <= rows && j <= cols) match[i - 1] = static_cast<int>(j - 1);
  }
  return match;
}

double hungarian_accuracy(std::span<const int> truth, std::span<const int> clusters) {
  const auto t = contingency(clusters, truth);
  const auto match = max_weight_assignment(t.counts, t.rows, t.cols);
  double matched = 0.0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (match[r] >= 0) matched += t.counts[r * t.cols + static_cast<std::size_t>(match[r])];
  }
  return matched / t.n;
}

double pairwise_f_value(std::span<const int> truth, std::span<const int> clusters) {
  const auto t = contingency(clusters, truth);
  double together = 0.0;
  for (double c : t.counts) together += pairs(c);
  double same_cluster = 0.0, same_class = 0.0;
  for (double s : t.row_sums) same_cluster += pairs(s);
  for (double s : t.col_sums) same_class += pairs(s);
  if (same_cluster == 0.0 && same_class == 0.0) return 1.0;  // both all-singletons
  if (same_cluster == 0.0 || same_class == 0.0 || together == 0.0) return 0.0;
  const double precision = together / same_cluster;
  const double recall = together / same_class;
  return 2.0 * precision * recall / (precision + recall);
}

NmiNormalization parse_nmi_normalization(std::string_view name) {
  if (name == "arithmetic") return NmiNormalization::kArithmetic;
  if (name == "geometric") return NmiNormalization::kGeometric;
  throw ConfigError("unknown NMI normalization '" + std::string(name) + "'");
}

double normalized_mutual_information(std::span<const int> a, std::span<const int> b,
                                     NmiNormalization norm) {
  const auto t = contingency(a, b);
  const double ha = entropy(t.row_sums, t.n);
  const double hb = entropy(t.col_sums, t.n);
  if (ha == 0.0 && hb == 0.0) return 1.0;  // both partitions trivial, hence identical
  double mi = 0.0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c < t.cols; ++c) {
      const double nrc = t.counts[r * t.cols + c];
      if (nrc > 0.0) mi += (nrc / t.n) * std::log(nrc * t.n / (t.row_sums[r] * t.col_sums[c]));
    }
  }
  const double denom = norm == NmiNormalization::kArithmetic ? 0.5 * (ha + hb) : std::sqrt(ha * hb);
  if (denom == 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double roc_auc(std::span<const double> scores, std::span<const int> is_positive) {
  check_same_length(scores.size(), is_positive.size());
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t num_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive[order[k]]) {
        positive_rank_sum += mid_rank;
        ++num_pos;
      }
    }
    i = j;
  }
  const std::size_t num_neg = n - num_pos;
  if (num_pos == 0 || num_neg == 0) throw ConfigError("AUC needs both positive and negative items");
  const double np = static_cast<double>(num_pos);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(num_neg));
}

}  // namespace attri2vec
