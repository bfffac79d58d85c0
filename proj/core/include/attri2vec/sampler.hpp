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
#include <span>
#include <utility>
#include <vector>

#include "attri2vec/common.hpp"
#include "attri2vec/walker.hpp"

namespace attri2vec {

/// Walker/Vose alias table: O(n) construction, O(1) draws.
///
/// Construction uses two FIFO worklists (small and large) filled in input
/// order, so the table is a deterministic function of the weights.
class AliasTable {
 public:
  AliasTable() = default;
  /// Throws ConfigError on a negative or non-finite weight, or when every
  /// weight is zero.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const noexcept { return prob_.size(); }
  std::span<const double> prob() const noexcept { return prob_; }
  std::span<const std::uint32_t> alias() const noexcept { return alias_; }

  std::size_t sample(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> slot_dist(0, prob_.size() - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::size_t slot = slot_dist(rng);
    return coin(rng) < prob_[slot] ? slot : alias_[slot];
  }

  /// Probability of each outcome implied by the table.
  std::vector<double> reconstructed() const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Draws (center, context) with probability n(center, context) / total_pairs.
class PairSampler {
 public:
  /// Throws ConfigError on an empty corpus.
  explicit PairSampler(const ContextCorpus& corpus);

  std::pair<NodeIndex, NodeIndex> draw_pair(Rng& rng) const {
    const auto& e = entries_[table_.sample(rng)];
    return {e.center, e.context};
  }

  const AliasTable& table() const noexcept { return table_; }

 private:
  std::vector<ContextCorpus::Entry> entries_;
  AliasTable table_;
};

/// Noise distribution for negative sampling: weight(v) = marginal(v)^alpha,
/// with nodes of zero marginal excluded for every alpha.
class NoiseDistribution {
 public:
  NoiseDistribution(std::span<const std::uint64_t> marginals, double alpha);
  static NoiseDistribution from_corpus(const ContextCorpus& corpus, double alpha) {
    return NoiseDistribution(corpus.context_marginals(), alpha);
  }

  double alpha() const noexcept { return alpha_; }
  std::span<const double> weights() const noexcept { return weights_; }
  const AliasTable& table() const noexcept { return table_; }

  NodeIndex draw(Rng& rng) const { return static_cast<NodeIndex>(table_.sample(rng)); }

  /// Fills `out` with independent draws, rejecting and redrawing any that
  /// equal `forbidden`. Throws ConfigError if `forbidden` is the only node
  /// with positive weight.
  void draw_negatives(Rng& rng, NodeIndex forbidden, std::span<NodeIndex> out) const;

 private:
  double alpha_;
  std::vector<double> weights_;
  std::size_t positive_count_ = 0;
  AliasTable table_;
};

}  // namespace attri2vec
