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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attri2vec/common.hpp"

namespace attri2vec {

struct IngestOptions {
  /// Scale every nonzero attribute vector to unit L2 norm.
  bool normalize_l2 = false;
};

/// Sparse attribute rows keyed by external node id, in CSR layout.
///
/// Row order is insertion order and doubles as the dense node index when the
/// table backs an AttributedGraph.
class AttributeTable {
 public:
  AttributeTable() = default;
  explicit AttributeTable(std::size_t feature_dim) : feature_dim_(feature_dim) {}

  /// Appends a row. Entries may be unsorted; duplicate indices, indices
  /// >= feature_dim and non-finite values are rejected with ConfigError.
  NodeIndex add_row(std::string_view name, std::vector<std::pair<std::uint32_t, double>> entries);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t nnz() const noexcept { return indices_.size(); }

  SparseVectorView row(NodeIndex i) const;
  const std::string& name(NodeIndex i) const { return names_[i]; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<NodeIndex> find(std::string_view name) const;

  void normalize_rows_l2();

 private:
  std::size_t feature_dim_ = 0;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
};

/// Parses the sparse attribute format: a `m=<dim>` header, then one
/// `nodeid idx:val ...` line per node with 0-based indices.
AttributeTable read_attributes(std::istream& in, const std::string& source = "<attributes>",
                               const IngestOptions& options = {});
AttributeTable load_attributes(const std::filesystem::path& path, const IngestOptions& options = {});
void write_attributes(const AttributeTable& table, std::ostream& out);

/// Labels as read from a `nodeid<TAB>class` file. Class ids are contiguous
/// from 0 and follow sorted class-name order (numeric for integer names).
struct NodeLabels {
  std::vector<std::string> node_ids;
  std::vector<int> class_ids;
  std::vector<std::string> class_names;

  std::size_t num_classes() const noexcept { return class_names.size(); }
};

NodeLabels read_labels(std::istream& in, const std::string& source = "<labels>");
NodeLabels load_labels(const std::filesystem::path& path);
void write_labels(const NodeLabels& labels, std::ostream& out);

/// Per-node class ids aligned with a graph's dense indices; -1 marks an
/// unlabeled node.
struct LabelSet {
  std::vector<int> class_of;
  std::vector<std::string> class_names;

  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::size_t num_labeled() const;
};

using NamedEdge = std::pair<std::string, std::string>;
using IndexEdge = std::pair<NodeIndex, NodeIndex>;

/// Whitespace-separated node pairs, `#` comments. Order and direction kept.
std::vector<NamedEdge> read_edge_list(std::istream& in, const std::string& source = "<edges>");
std::vector<NamedEdge> load_edge_list(const std::filesystem::path& path);
void write_edge_list(std::span<const NamedEdge> edges, std::ostream& out);

/// Undirected attributed graph G = (V, E, X) with optional labels.
///
/// Immutable once built. Adjacency is symmetric, deduplicated, free of
/// self-loops and sorted ascending per node.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  std::size_t num_nodes() const noexcept { return attributes_.size(); }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }
  std::size_t feature_dim() const noexcept { return attributes_.feature_dim(); }
  std::size_t nnz() const noexcept { return attributes_.nnz(); }

  std::span<const NodeIndex> neighbors(NodeIndex i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(NodeIndex i) const { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(NodeIndex a, NodeIndex b) const;

  SparseVectorView attributes(NodeIndex i) const { return attributes_.row(i); }
  const AttributeTable& attribute_table() const noexcept { return attributes_; }

  const std::string& name(NodeIndex i) const { return attributes_.name(i); }
  std::optional<NodeIndex> find(std::string_view name) const { return attributes_.find(name); }

  const std::optional<LabelSet>& labels() const noexcept { return labels_; }
  /// Aligns file labels with this graph; unknown node ids are a ConfigError.
  void attach_labels(const NodeLabels& labels);

  /// Edges with first < second, ordered lexicographically.
  std::vector<IndexEdge> edges() const;

 private:
  friend class GraphBuilder;

  AttributeTable attributes_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> neighbors_;
  std::optional<LabelSet> labels_;
};

/// Accumulates nodes, attributes and edges, then freezes them into a graph.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t feature_dim) : attributes_(feature_dim) {}
  /// Takes ownership of pre-parsed attribute rows; their order fixes the
  /// first dense indices.
  explicit GraphBuilder(AttributeTable attributes);

  /// Returns the existing index when `name` is already known.
  NodeIndex add_node(std::string_view name,
                     std::vector<std::pair<std::uint32_t, double>> attributes = {});
  /// Self-loops are dropped; duplicates merge at build time.
  void add_edge(NodeIndex a, NodeIndex b);
  void add_edge(std::string_view a, std::string_view b);

  std::size_t num_nodes() const noexcept { return attributes_.size(); }

  AttributedGraph build() &&;

 private:
  AttributeTable attributes_;
  std::vector<IndexEdge> edges_;
};

/// Loads an attributed graph. Dense indices follow the attribute file's row
/// order; nodes that occur only in the edge file are appended in order of
/// first appearance and carry the zero attribute vector.
AttributedGraph load_graph(const std::filesystem::path& edge_path,
                           const std::filesystem::path& attr_path,
                           const std::optional<std::filesystem::path>& label_path = std::nullopt,
                           const IngestOptions& options = {});

/// Writes files that load_graph reads back into an identical graph.
void save_graph(const AttributedGraph& g, const std::filesystem::path& edge_path,
                const std::filesystem::path& attr_path,
                const std::optional<std::filesystem::path>& label_path = std::nullopt);

std::map<std::size_t, std::size_t> degree_histogram(const AttributedGraph& g);

/// JSON object with num_nodes, num_edges, feature_dim, nnz and num_classes.
std::string summary_json(const AttributedGraph& g);

/// Subgraph on the nodes with keep[i] set, preserving relative order,
/// attributes and labels.
AttributedGraph induced_subgraph(const AttributedGraph& g, const std::vector<bool>& keep);

}  // namespace attri2vec
