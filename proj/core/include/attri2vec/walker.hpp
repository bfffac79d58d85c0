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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "attri2vec/common.hpp"
#include "attri2vec/graph.hpp"

namespace attri2vec {

struct WalkConfig {
  std::size_t walk_length = 100;    // l, nodes per walk including the start
  std::size_t walks_per_node = 40;  // gamma
  std::size_t window = 10;          // t
  std::uint64_t seed = 1;

  /// Throws ConfigError unless l >= 2, gamma >= 1 and 1 <= t < l.
  void validate() const;
};

using Walk = std::vector<NodeIndex>;

/// One truncated uniform random walk. Stops early at a node with no
/// neighbors, so an isolated start yields a length-1 walk.
Walk random_walk(const AttributedGraph& g, NodeIndex start, std::size_t length, Rng& rng);

/// Walk number `repeat` from `start`, drawn from the stream (seed, start, repeat).
Walk seeded_walk(const AttributedGraph& g, const WalkConfig& cfg, NodeIndex start,
                 std::size_t repeat);

/// Visits every walk in deterministic order: repeat-major, then by start node.
void for_each_walk(const AttributedGraph& g, const WalkConfig& cfg,
                   const std::function<void(std::span<const NodeIndex>)>& visit);

std::vector<Walk> generate_walks(const AttributedGraph& g, const WalkConfig& cfg);

/// Writes one walk per line as space-separated external ids.
void dump_walks(const AttributedGraph& g, const WalkConfig& cfg, std::ostream& out);

/// Sparse co-occurrence counts n(center, context), flattened and sorted by
/// (center, context).
class ContextCorpus {
 public:
  struct Entry {
    NodeIndex center;
    NodeIndex context;
    std::uint32_t count;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  ContextCorpus() = default;
  /// Sorts and validates entries; every count must be >= 1, every index
  /// < num_nodes, and (center, context) keys must be unique.
  ContextCorpus(std::size_t num_nodes, std::vector<Entry> entries);

  std::size_t num_nodes() const noexcept { return center_marginals_.size(); }
  std::size_t num_pairs() const noexcept { return entries_.size(); }
  std::uint64_t total_pairs() const noexcept { return total_; }
  bool empty() const noexcept { return entries_.empty(); }

  std::span<const Entry> entries() const noexcept { return entries_; }
  /// Sum of n(i, j) over all centers i, per context node j.
  std::span<const std::uint64_t> context_marginals() const noexcept { return context_marginals_; }
  /// Sum of n(i, j) over all contexts j, per center node i.
  std::span<const std::uint64_t> center_marginals() const noexcept { return center_marginals_; }

  /// n(center, context), 0 when absent.
  std::uint32_t count(NodeIndex center, NodeIndex context) const;

  friend bool operator==(const ContextCorpus& a, const ContextCorpus& b) {
    return a.entries_ == b.entries_ && a.center_marginals_.size() == b.center_marginals_.size();
  }

 private:
  std::vector<Entry> entries_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> context_marginals_;
  std::vector<std::uint64_t> center_marginals_;
};

/// Hash-indexed accumulator for window co-occurrences. One per worker;
/// partial tables merge by addition.
class ContextCounter {
 public:
  explicit ContextCounter(std::size_t window) : window_(window) {}

  /// Every position pair (i, j) with 0 < |i - j| <= window adds one to
  /// n(walk[i], walk[j]), including pairs where both positions hold the
  /// same node.
  void add_walk(std::span<const NodeIndex> walk);
  void merge(ContextCounter& other);
  /// Sorts the pending keys and folds them into the counts.
  void flush();

  std::uint64_t total_pairs() const noexcept { return total_; }
  ContextCorpus finalize(std::size_t num_nodes);

 private:
  std::size_t window_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> pending_;
  /// (packed center/context, count), ascending by key.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> counts_;
};

ContextCorpus count_contexts(std::span<const Walk> walks, std::size_t window,
                             std::size_t num_nodes);

/// Streams walks into counts without materializing them. With threads > 1
/// start nodes are partitioned across workers; the result does not depend
/// on the thread count because every walk owns its RNG stream.
ContextCorpus build_corpus(const AttributedGraph& g, const WalkConfig& cfg, std::size_t threads = 1);

/// Binary corpus: consecutive little-endian (u32 center, u32 context, u32 count).
void save_corpus(const ContextCorpus& corpus, const std::filesystem::path& path);
ContextCorpus load_corpus(const std::filesystem::path& path, std::size_t num_nodes);

}  // namespace attri2vec
