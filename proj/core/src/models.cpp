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

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "attri2vec/evalkit.hpp"

namespace attri2vec {

namespace {

template <typename T>
std::vector<double> edge_features_impl(std::span<const T> a, std::span<const T> b, EdgeOperator op) {
  if (a.size() != b.size()) throw ConfigError("edge endpoints have different embedding sizes");
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = a[k], y = b[k];
    switch (op) {
      case EdgeOperator::kAverage:
        out[k] = 0.5 * (x + y);
        break;
      case EdgeOperator::kHadamard:
        out[k] = x * y;
        break;
      case EdgeOperator::kWeightedL1:
        out[k] = std::abs(x - y);
        break;
      case EdgeOperator::kWeightedL2:
        out[k] = (x - y) * (x - y);
        break;
    }
  }
  return out;
}

double log1pexp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double logistic(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

}  // namespace

std::string_view to_string(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::kAverage:
      return "average";
    case EdgeOperator::kHadamard:
      return "hadamard";
    case EdgeOperator::kWeightedL1:
      return "weighted-l1";
    case EdgeOperator::kWeightedL2:
      return "weighted-l2";
  }
  return "unknown";
}

EdgeOperator parse_edge_operator(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "average") return EdgeOperator::kAverage;
  if (s == "hadamard") return EdgeOperator::kHadamard;
  if (s == "l1" || s == "weighted-l1") return EdgeOperator::kWeightedL1;
  if (s == "l2" || s == "weighted-l2") return EdgeOperator::kWeightedL2;
  throw ConfigError("unknown edge operator '" + std::string(name) + "'");
}

std::vector<double> edge_features(std::span<const double> a, std::span<const double> b,
                                  EdgeOperator op) {
  return edge_features_impl(a, b, op);
}

std::vector<double> edge_features(std::span<const float> a, std::span<const float> b,
                                  EdgeOperator op) {
  return edge_features_impl(a, b, op);
}

void LogisticRegression::fit(const FeatureMatrix& x, std::span<const std::uint8_t> positive) {
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  if (positive.size() != x.rows) throw ConfigError("label count does not match feature rows");
  if (x.rows == 0) throw ConfigError("cannot fit a classifier without training rows");
  const auto n = static_cast<Eigen::Index>(x.rows);
  const auto d = static_cast<Eigen::Index>(x.cols);

  // Bias as a trailing constant column.
  Matrix xa(n, d + 1);
  xa.leftCols(d) = Eigen::Map<const Matrix>(x.data.data(), n, d);
  xa.col(d).setOnes();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = positive[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
  Eigen::VectorXd reg = Eigen::VectorXd::Ones(d + 1);
  reg[d] = 1e-10;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  auto objective = [&](const Eigen::VectorXd& t, Eigen::VectorXd& margins) {
    margins = y.cwiseProduct(xa * t);
    double loss = 0.5 * t.cwiseProduct(reg).dot(t);
    for (Eigen::Index i = 0; i < n; ++i) loss += c_ * log1pexp(-margins[i]);
    return loss;
  };

  Eigen::VectorXd margins;
  double loss = objective(theta, margins);
  double first_norm = -1.0;
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd slope(n), curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = logistic(-margins[i]);
      slope[i] = c_ * y[i] * s;
      curvature[i] = c_ * s * (1.0 - s);
    }
    const Eigen::VectorXd grad = reg.cwiseProduct(theta) - xa.transpose() * slope;
    const double grad_norm = grad.norm();
    if (first_norm < 0.0) first_norm = std::max(grad_norm, 1.0);
    if (grad_norm <= 1e-8 * first_norm) break;

    Eigen::MatrixXd hessian = xa.transpose() * curvature.asDiagonal() * xa;
    hessian.diagonal() += reg;
    const Eigen::VectorXd step = hessian.ldlt().solve(-grad);
    const double directional = grad.dot(step);
    if (!(directional < 0.0)) break;

    double t = 1.0;
    Eigen::VectorXd candidate_margins;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const Eigen::VectorXd candidate = theta + t * step;
      const double candidate_loss = objective(candidate, candidate_margins);
      if (candidate_loss <= loss + 1e-4 * t * directional) {
        theta = candidate;
        margins = candidate_margins;
        const double improvement = loss - candidate_loss;
        loss = candidate_loss;
        accepted = improvement > 1e-14 * std::max(1.0, std::abs(loss));
        break;
      }
    }
    if (!accepted) break;
  }

  weights_.assign(theta.data(), theta.data() + d);
  bias_ = theta[d];
}

double LogisticRegression::decision(std::span<const double> features) const {
  double s = bias_;
  for (std::size_t k = 0; k < weights_.size(); ++k) s += weights_[k] * features[k];
  return s;
}

void LinearClassifier::fit(const FeatureMatrix& x, std::span<const int> labels,
                           std::size_t num_classes) {
  if (labels.size() != x.rows) throw ConfigError("label count does not match feature rows");
  mean_.assign(x.cols, 0.0);
  inv_std_.assign(x.cols, 1.0);
  FeatureMatrix scaled = x;
  if (standardize_ && x.rows > 0) {
    for (std::size_t i = 0; i < x.rows; ++i) {
      for (std::size_t c = 0; c < x.cols; ++c) mean_[c] += x.row(i)[c];
    }
    for (double& m : mean_) m /= static_cast<double>(x.rows);
    std::vector<double> var(x.cols, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double dlt = x.row(i)[c] - mean_[c];
        var[c] += dlt * dlt;
      }
    }
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double sd = std::sqrt(var[c] / static_cast<double>(x.rows));
      inv_std_[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
    for (std::size_t i = 0; i < x.rows; ++i) {
      auto r = scaled.row(i);
      for (std::size_t c = 0; c < x.cols; ++c) r[c] = (r[c] - mean_[c]) * inv_std_[c];
    }
  }

  // Two classes need a single model; its negated score serves class 0.
  const std::size_t models = num_classes == 2 ? 1 : num_classes;
  models_.assign(models, LogisticRegression(c_));
  std::vector<std::uint8_t> positive(x.rows);
  for (std::size_t m = 0; m < models; ++m) {
    const int target = num_classes == 2 ? 1 : static_cast<int>(m);
    for (std::size_t i = 0; i < x.rows; ++i) positive[i] = labels[i] == target;
    models_[m].fit(scaled, positive);
  }
}

std::vector<double> LinearClassifier::transform(std::span<const double> features) const {
  std::vector<double> out(features.begin(), features.end());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = (out[c] - mean_[c]) * inv_std_[c];
  return out;
}

double LinearClassifier::score(std::span<const double> features, std::size_t cls) const {
  const auto z = transform(features);
  if (models_.size() == 1) {
    const double s = models_[0].decision(z);
    return cls == 1 ? s : -s;
  }
  return models_[cls].decision(z);
}

int LinearClassifier::predict(std::span<const double> features) const {
  const auto z = transform(features);
  if (models_.size() == 1) return models_[0].decision(z) > 0.0 ? 1 : 0;
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < models_.size(); ++m) {
    const double s = models_[m].decision(z);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(m);
    }
  }
  return best;
}

std::optional<std::vector<int>> kmeans(const FeatureMatrix& points, std::size_t k, Rng& rng,
                                       std::size_t max_iterations) {
  const std::size_t n = points.rows;
  const std::size_t d = points.cols;
  if (k < 2) throw ConfigError("k-means needs k >= 2");
  if (n < k) throw ConfigError("k-means needs at least k points");

  // k-means++ seeding.
  FeatureMatrix centers(k, d);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  {
    const auto p = points.row(first(rng));
    std::copy(p.begin(), p.end(), centers.row(0).begin());
  }
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centers.row(c - 1)));
      total += nearest[i];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target <= 0.0 && nearest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    const auto p = points.row(chosen);
    std::copy(p.begin(), p.end(), centers.row(c).begin());
  }

  std::vector<int> assign(n, -1);
  std::vector<std::size_t> sizes(k);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(points.row(i), centers.row(c));
        if (dist < best_d) {
          best_d = dist;
          best = static_cast<int>(c);
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    std::fill(sizes.begin(), sizes.end(), 0);
    std::fill(centers.data.begin(), centers.data.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(assign[i]);
      ++sizes[c];
      auto center = centers.row(c);
      const auto p = points.row(i);
      for (std::size_t j = 0; j < d; ++j) center[j] += p[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) return std::nullopt;
      for (double& v : centers.row(c)) v /= static_cast<double>(sizes[c]);
    }
    if (!changed) break;
  }
  return assign;
}

}  // namespace attri2vec
