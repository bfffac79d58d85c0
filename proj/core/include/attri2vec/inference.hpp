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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "attri2vec/graph.hpp"
#include "attri2vec/mapping.hpp"

namespace attri2vec {

/// Dense float32 vectors keyed by external node id, in insertion order.
class EmbeddingSet {
 public:
  explicit EmbeddingSet(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  /// Throws ConfigError on a duplicate id, wrong length or non-finite value.
  void add(std::string_view id, std::span<const double> vector);
  void add(std::string_view id, std::span<const float> vector);

  const std::string& id(std::size_t k) const { return ids_[k]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const float> vector(std::size_t k) const { return {values_.data() + k * dim_, dim_}; }
  std::optional<std::size_t> find(std::string_view id) const;

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.values_ == b.values_;
  }

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> values_;
};

/// f(x) for every row of `attributes`; never consults a graph.
EmbeddingSet infer(const MappingModel& model, const AttributeTable& attributes);

/// f(x_v) for every node of `graph`, in dense index order.
EmbeddingSet embed_graph(const MappingModel& model, const AttributedGraph& graph);

/// Raw attribute vectors as dense embeddings, for feature baselines.
EmbeddingSet attributes_as_embeddings(const AttributeTable& attributes);

/// word2vec text convention: "count d" header, then "id v1 ... vd" per line.
/// Values are written with enough digits to reload bit-identically.
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet load_embeddings(const std::filesystem::path& path);

}  // namespace attri2vec
