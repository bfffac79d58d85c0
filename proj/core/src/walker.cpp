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

#include "attri2vec/walker.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <ostream>
#include <thread>

#include "binary_io.hpp"
#include "text_util.hpp"

namespace attri2vec {

namespace {

std::uint64_t pack(NodeIndex center, NodeIndex context) {
  return (static_cast<std::uint64_t>(center) << 32) | context;
}

}  // namespace

void WalkConfig::validate() const {
  if (walk_length < 2) throw ConfigError("walk length must be at least 2");
  if (walks_per_node < 1) throw ConfigError("walks per node must be at least 1");
  if (window < 1 || window >= walk_length) {
    throw ConfigError("window must satisfy 1 <= window < walk length");
  }
}

Walk random_walk(const AttributedGraph& g, NodeIndex start, std::size_t length, Rng& rng) {
  Walk walk;
  walk.reserve(length);
  walk.push_back(start);
  NodeIndex current = start;
  while (walk.size() < length) {
    const auto adj = g.neighbors(current);
    if (adj.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, adj.size() - 1);
    current = adj[pick(rng)];
    walk.push_back(current);
  }
  return walk;
}

Walk seeded_walk(const AttributedGraph& g, const WalkConfig& cfg, NodeIndex start,
                 std::size_t repeat) {
  Rng rng = derive_rng(cfg.seed, start, repeat);
  return random_walk(g, start, cfg.walk_length, rng);
}

void for_each_walk(const AttributedGraph& g, const WalkConfig& cfg,
                   const std::function<void(std::span<const NodeIndex>)>& visit) {
  cfg.validate();
  for (std::size_t r = 0; r < cfg.walks_per_node; ++r) {
    for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
      const Walk walk = seeded_walk(g, cfg, v, r);
      visit(walk);
    }
  }
}

std::vector<Walk> generate_walks(const AttributedGraph& g, const WalkConfig& cfg) {
  std::vector<Walk> walks;
  walks.reserve(g.num_nodes() * cfg.walks_per_node);
  for_each_walk(g, cfg, [&](std::span<const NodeIndex> w) { walks.emplace_back(w.begin(), w.end()); });
  return walks;
}

void dump_walks(const AttributedGraph& g, const WalkConfig& cfg, std::ostream& out) {
  for_each_walk(g, cfg, [&](std::span<const NodeIndex> w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out << ' ';
      out << g.name(w[i]);
    }
    out << '\n';
  });
}

ContextCorpus::ContextCorpus(std::size_t num_nodes, std::vector<Entry> entries)
    : entries_(std::move(entries)),
      context_marginals_(num_nodes, 0),
      center_marginals_(num_nodes, 0) {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return pack(a.center, a.context) < pack(b.center, b.context);
  });
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.center >= num_nodes || e.context >= num_nodes) {
      throw ConfigError("corpus entry references node outside 0.." + std::to_string(num_nodes - 1));
    }
    if (e.count == 0) throw ConfigError("corpus entry with zero count");
    if (k > 0 && entries_[k - 1].center == e.center && entries_[k - 1].context == e.context) {
      throw ConfigError("duplicate corpus entry");
    }
    total_ += e.count;
    context_marginals_[e.context] += e.count;
    center_marginals_[e.center] += e.count;
  }
}

std::uint32_t ContextCorpus::count(NodeIndex center, NodeIndex context) const {
  const auto key = pack(center, context);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key, [](const Entry& e, std::uint64_t k) {
    return pack(e.center, e.context) < k;
  });
  if (it == entries_.end() || it->center != center || it->context != context) return 0;
  return it->count;
}

void ContextCounter::add_walk(std::span<const NodeIndex> walk) {
  constexpr std::size_t kMinBuffer = std::size_t{1} << 22;
  const std::size_t n = walk.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= window_ ? i - window_ : 0;
    const std::size_t hi = std::min(n - 1, i + window_);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) pending_.push_back(pack(walk[i], walk[j]));
    }
    total_ += hi - lo;
  }
  if (pending_.size() >= std::max(kMinBuffer, counts_.size())) flush();
}

void ContextCounter::flush() {
  if (pending_.empty()) return;
  std::sort(pending_.begin(), pending_.end());
  std::vector<std::pair<std::uint64_t, std::uint32_t>> runs;
  for (std::size_t k = 0; k < pending_.size();) {
    std::size_t end = k;
    while (end < pending_.size() && pending_[end] == pending_[k]) ++end;
    runs.emplace_back(pending_[k], static_cast<std::uint32_t>(end - k));
    k = end;
  }
  pending_.clear();

  std::vector<std::pair<std::uint64_t, std::uint32_t>> merged;
  merged.reserve(counts_.size() + runs.size());
  auto a = counts_.begin(), b = runs.begin();
  while (a != counts_.end() || b != runs.end()) {
    if (b == runs.end() || (a != counts_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == counts_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      merged.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  counts_ = std::move(merged);
}

void ContextCounter::merge(ContextCounter& other) {
  flush();
  other.flush();
  std::vector<std::pair<std::uint64_t, std::uint32_t>> merged;
  merged.reserve(counts_.size() + other.counts_.size());
  std::merge(counts_.begin(), counts_.end(), other.counts_.begin(), other.counts_.end(), std::back_inserter(merged));
  counts_.clear();
  for (const auto& e : merged) {
    if (!counts_.empty() && counts_.back().first == e.first) {
      counts_.back().second += e.second;
    } else {
      counts_.push_back(e);
    }
  }
  total_ += other.total_;
  other.counts_.clear();
  other.total_ = 0;
}

ContextCorpus ContextCounter::finalize(std::size_t num_nodes) {
  flush();
  std::vector<ContextCorpus::Entry> entries;
  entries.reserve(counts_.size());
  for (const auto& [key, count] : counts_) {
    entries.push_back({static_cast<NodeIndex>(key >> 32), static_cast<NodeIndex>(key & 0xffffffffu), count});
  }
  return ContextCorpus(num_nodes, std::move(entries));
}

ContextCorpus count_contexts(std::span<const Walk> walks, std::size_t window,
                             std::size_t num_nodes) {
  if (window < 1) throw ConfigError("window must be at least 1");
  ContextCounter counter(window);
  for (const auto& w : walks) counter.add_walk(w);
  return counter.finalize(num_nodes);
}

ContextCorpus build_corpus(const AttributedGraph& g, const WalkConfig& cfg, std::size_t threads) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<ContextCounter> partial(threads, ContextCounter(cfg.window));

  auto work = [&](std::size_t worker) {
    const std::size_t begin = n * worker / threads;
    const std::size_t end = n * (worker + 1) / threads;
    for (std::size_t r = 0; r < cfg.walks_per_node; ++r) {
      for (std::size_t v = begin; v < end; ++v) {
        partial[worker].add_walk(seeded_walk(g, cfg, static_cast<NodeIndex>(v), r));
      }
    }
    partial[worker].flush();
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (std::size_t t = 1; t < threads; ++t) partial[0].merge(partial[t]);
  return partial[0].finalize(n);
}

void save_corpus(const ContextCorpus& corpus, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  std::array<unsigned char, 12> record{};
  for (const auto& e : corpus.entries()) {
    detail::put_u32(record.data(), e.center);
    detail::put_u32(record.data() + 4, e.context);
    detail::put_u32(record.data() + 8, e.count);
    out.write(reinterpret_cast<const char*>(record.data()), record.size());
  }
  detail::finish_output(out, path);
}

ContextCorpus load_corpus(const std::filesystem::path& path, std::size_t num_nodes) {
  auto in = detail::open_input(path);
  std::vector<ContextCorpus::Entry> entries;
  std::array<unsigned char, 12> record{};
  while (in.read(reinterpret_cast<char*>(record.data()), record.size())) {
    entries.push_back({detail::get_u32(record.data()), detail::get_u32(record.data() + 4),
                       detail::get_u32(record.data() + 8)});
  }
  if (in.gcount() != 0) throw IoError(path.string() + ": truncated corpus record");
  return ContextCorpus(num_nodes, std::move(entries));
}

}  // namespace attri2vec
