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

#include "attri2vec/sampler.hpp"

#include <cmath>
#include <deque>

namespace attri2vec {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("alias weights must be finite and >= 0");
    sum += w;
  }
  if (n == 0 || sum <= 0.0) throw ConfigError("alias table needs at least one positive weight");

  prob_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::deque<std::uint32_t> small, large;
  for (std::size_t k = 0; k < n; ++k) {
    scaled[k] = weights[k] * static_cast<double>(n) / sum;
    alias_[k] = static_cast<std::uint32_t>(k);
    (scaled[k] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(k));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.front();
    small.pop_front();
    const auto l = large.front();
    prob_[s] = scaled[s];
    alias_[s] = l;
    // Residual of l after donating (1 - scaled[s]) to slot s.
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_front();
      small.push_back(l);
    }
  }
  // Leftovers differ from 1 only by rounding.
  for (auto k : large) prob_[k] = 1.0;
  for (auto k : small) prob_[k] = 1.0;
}

std::vector<double> AliasTable::reconstructed() const {
  const std::size_t n = prob_.size();
  std::vector<double> p(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    p[k] += prob_[k];
    p[alias_[k]] += 1.0 - prob_[k];
  }
  for (double& v : p) v /= static_cast<double>(n);
  return p;
}

PairSampler::PairSampler(const ContextCorpus& corpus)
    : entries_(corpus.entries().begin(), corpus.entries().end()) {
  if (entries_.empty()) throw ConfigError("cannot sample from an empty corpus");
  std::vector<double> weights(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) weights[k] = entries_[k].count;
  table_ = AliasTable(weights);
}

NoiseDistribution::NoiseDistribution(std::span<const std::uint64_t> marginals, double alpha)
    : alpha_(alpha), weights_(marginals.size(), 0.0) {
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("noise exponent must be >= 0");
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    if (marginals[k] == 0) continue;
    weights_[k] = std::pow(static_cast<double>(marginals[k]), alpha);
    ++positive_count_;
  }
  table_ = AliasTable(weights_);
}

void NoiseDistribution::draw_negatives(Rng& rng, NodeIndex forbidden,
                                       std::span<NodeIndex> out) const {
  if (positive_count_ == 1 && forbidden < weights_.size() && weights_[forbidden] > 0.0) {
    throw ConfigError("noise distribution has no node other than the positive context");
  }
  for (auto& slot : out) {
    NodeIndex v;
    do {
      v = draw(rng);
    } while (v == forbidden);
    slot = v;
  }
}

}  // namespace attri2vec
