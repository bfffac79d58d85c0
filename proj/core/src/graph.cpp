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

#include "attri2vec/graph.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <ostream>

#include "text_util.hpp"

namespace attri2vec {

NodeIndex AttributeTable::add_row(std::string_view name,
                                  std::vector<std::pair<std::uint32_t, double>> entries) {
  if (index_.contains(std::string(name))) {
    throw ConfigError("duplicate attribute row for node '" + std::string(name) + "'");
  }
  std::sort(entries.begin(), entries.end());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto [idx, val] = entries[k];
    if (idx >= feature_dim_) {
      throw ConfigError(fmt::format("node '{}': attribute index {} >= declared dimension {}", name,
                                    idx, feature_dim_));
    }
    if (!std::isfinite(val)) {
      throw ConfigError(fmt::format("node '{}': non-finite value at index {}", name, idx));
    }
    if (k > 0 && entries[k - 1].first == idx) {
      throw ConfigError(fmt::format("node '{}': duplicate attribute index {}", name, idx));
    }
  }
  const auto id = static_cast<NodeIndex>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  for (const auto& [idx, val] : entries) {
    indices_.push_back(idx);
    values_.push_back(val);
  }
  offsets_.push_back(indices_.size());
  return id;
}

SparseVectorView AttributeTable::row(NodeIndex i) const {
  const std::size_t begin = offsets_[i];
  const std::size_t len = offsets_[i + 1] - begin;
  return {{indices_.data() + begin, len}, {values_.data() + begin, len}};
}

std::optional<NodeIndex> AttributeTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void AttributeTable::normalize_rows_l2() {
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
    double sq = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sq += values_[k] * values_[k];
    if (sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) values_[k] *= inv;
  }
}

AttributeTable read_attributes(std::istream& in, const std::string& source,
                               const IngestOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<AttributeTable> table;
  std::vector<std::string_view> tokens;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::strip_comment(line);
    if (body.empty()) continue;
    if (!table) {
      if (!body.starts_with("m=")) throw ParseError(source, line_no, "expected header 'm=<dim>'");
      auto dim = detail::parse_number<std::size_t>(body.substr(2));
      if (!dim) throw ParseError(source, line_no, "invalid feature dimension in header");
      table.emplace(*dim);
      continue;
    }
    detail::split_ws(body, tokens);
    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.reserve(tokens.size() - 1);
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto tok = tokens[k];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(source, line_no, "expected idx:val, got '" + std::string(tok) + "'");
      }
      auto idx = detail::parse_number<std::uint32_t>(tok.substr(0, colon));
      auto val = detail::parse_number<double>(tok.substr(colon + 1));
      if (!idx || !val) {
        throw ParseError(source, line_no, "malformed entry '" + std::string(tok) + "'");
      }
      entries.emplace_back(*idx, *val);
    }
    try {
      table->add_row(tokens[0], std::move(entries));
    } catch (const ConfigError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (!table) throw ParseError(source, line_no, "missing header 'm=<dim>'");
  if (options.normalize_l2) table->normalize_rows_l2();
  return std::move(*table);
}

AttributeTable load_attributes(const std::filesystem::path& path, const IngestOptions& options) {
  auto in = detail::open_input(path);
  return read_attributes(in, path.string(), options);
}

void write_attributes(const AttributeTable& table, std::ostream& out) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "m={}\n", table.feature_dim());
  for (NodeIndex i = 0; i < table.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{}", table.name(i));
    const auto row = table.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      fmt::format_to(std::back_inserter(buf), " {}:{}", row.indices[k], row.values[k]);
    }
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

NodeLabels read_labels(std::istream& in, const std::string& source) {
  NodeLabels labels;
  std::unordered_map<std::string, int> class_index;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tokens;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::strip_comment(line);
    if (body.empty()) continue;
    detail::split_ws(body, tokens);
    if (tokens.size() != 2) throw ParseError(source, line_no, "expected 'nodeid<TAB>class'");
    std::string node(tokens[0]);
    if (!seen.emplace(node, line_no).second) {
      throw ParseError(source, line_no, "duplicate label for node '" + node + "'");
    }
    auto [it, inserted] =
        class_index.emplace(std::string(tokens[1]), static_cast<int>(labels.class_names.size()));
    if (inserted) labels.class_names.emplace_back(tokens[1]);
    labels.node_ids.push_back(std::move(node));
    labels.class_ids.push_back(it->second);
  }

  // Renumber classes in sorted name order (numeric when every name is an
  // integer) so the assignment does not depend on line order.
  const bool numeric = std::all_of(labels.class_names.begin(), labels.class_names.end(),
                                   [](const std::string& s) {
                                     return detail::parse_number<long long>(s).has_value();
                                   });
  std::vector<int> order(labels.class_names.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& x = labels.class_names[static_cast<std::size_t>(a)];
    const auto& y = labels.class_names[static_cast<std::size_t>(b)];
    if (numeric) return *detail::parse_number<long long>(x) < *detail::parse_number<long long>(y);
    return x < y;
  });
  std::vector<int> rank(order.size());
  std::vector<std::string> sorted_names(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
    sorted_names[r] = labels.class_names[static_cast<std::size_t>(order[r])];
  }
  for (int& c : labels.class_ids) c = rank[static_cast<std::size_t>(c)];
  labels.class_names = std::move(sorted_names);
  return labels;
}

NodeLabels load_labels(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_labels(in, path.string());
}

std::size_t LabelSet::num_labeled() const {
  return static_cast<std::size_t>(std::count_if(class_of.begin(), class_of.end(),
                                                [](int c) { return c >= 0; }));
}

std::vector<NamedEdge> read_edge_list(std::istream& in, const std::string& source) {
  std::vector<NamedEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tokens;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::strip_comment(line);
    if (body.empty()) continue;
    detail::split_ws(body, tokens);
    if (tokens.size() != 2) throw ParseError(source, line_no, "expected two node ids");
    edges.emplace_back(std::string(tokens[0]), std::string(tokens[1]));
  }
  return edges;
}

std::vector<NamedEdge> load_edge_list(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_edge_list(in, path.string());
}

bool AttributedGraph::has_edge(NodeIndex a, NodeIndex b) const {
  const auto adj = neighbors(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

void AttributedGraph::attach_labels(const NodeLabels& labels) {
  LabelSet set;
  set.class_of.assign(num_nodes(), -1);
  set.class_names = labels.class_names;
  for (std::size_t k = 0; k < labels.node_ids.size(); ++k) {
    auto id = find(labels.node_ids[k]);
    if (!id) throw ConfigError("label for unknown node '" + labels.node_ids[k] + "'");
    set.class_of[*id] = labels.class_ids[k];
  }
  labels_ = std::move(set);
}

std::vector<IndexEdge> AttributedGraph::edges() const {
  std::vector<IndexEdge> out;
  out.reserve(num_edges());
  for (NodeIndex i = 0; i < num_nodes(); ++i) {
    for (NodeIndex j : neighbors(i)) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

GraphBuilder::GraphBuilder(AttributeTable attributes) : attributes_(std::move(attributes)) {}

NodeIndex GraphBuilder::add_node(std::string_view name,
                                 std::vector<std::pair<std::uint32_t, double>> attributes) {
  if (auto id = attributes_.find(name)) return *id;
  return attributes_.add_row(name, std::move(attributes));
}

void GraphBuilder::add_edge(NodeIndex a, NodeIndex b) {
  if (a == b) return;
  edges_.emplace_back(std::min(a, b), std::max(a, b));
}

void GraphBuilder::add_edge(std::string_view a, std::string_view b) {
  const NodeIndex first = add_node(a);
  add_edge(first, add_node(b));
}

AttributedGraph GraphBuilder::build() && {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  const std::size_t n = attributes_.size();
  AttributedGraph g;
  g.offsets_.assign(n + 1, 0);
  for (const auto& [a, b] : edges_) {
    ++g.offsets_[a + 1];
    ++g.offsets_[b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Lists where a node is the larger endpoint fill out of order.
  for (const auto& [a, b] : edges_) {
    g.neighbors_[cursor[a]++] = b;
    g.neighbors_[cursor[b]++] = a;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }
  g.attributes_ = std::move(attributes_);
  edges_.clear();
  return g;
}

AttributedGraph load_graph(const std::filesystem::path& edge_path,
                           const std::filesystem::path& attr_path,
                           const std::optional<std::filesystem::path>& label_path,
                           const IngestOptions& options) {
  GraphBuilder builder(load_attributes(attr_path, options));
  for (const auto& [a, b] : load_edge_list(edge_path)) builder.add_edge(a, b);
  AttributedGraph g = std::move(builder).build();
  if (label_path) g.attach_labels(load_labels(*label_path));
  return g;
}

void save_graph(const AttributedGraph& g, const std::filesystem::path& edge_path,
                const std::filesystem::path& attr_path,
                const std::optional<std::filesystem::path>& label_path) {
  {
    auto out = detail::open_output(attr_path);
    write_attributes(g.attribute_table(), out);
    detail::finish_output(out, attr_path);
  }
  {
    auto out = detail::open_output(edge_path);
    for (const auto& [a, b] : g.edges()) out << g.name(a) << ' ' << g.name(b) << '\n';
    detail::finish_output(out, edge_path);
  }
  if (label_path) {
    if (!g.labels()) throw ConfigError("graph has no labels to save");
    auto out = detail::open_output(*label_path);
    const auto& labels = *g.labels();
    for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
      if (labels.class_of[i] >= 0) {
        out << g.name(i) << '\t' << labels.class_names[static_cast<std::size_t>(labels.class_of[i])]
            << '\n';
      }
    }
    detail::finish_output(out, *label_path);
  }
}

std::map<std::size_t, std::size_t> degree_histogram(const AttributedGraph& g) {
  std::map<std::size_t, std::size_t> hist;
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) ++hist[g.degree(i)];
  return hist;
}

std::string summary_json(const AttributedGraph& g) {
  nlohmann::ordered_json j;
  j["num_nodes"] = g.num_nodes();
  j["num_edges"] = g.num_edges();
  j["feature_dim"] = g.feature_dim();
  j["nnz"] = g.nnz();
  j["num_classes"] = g.labels() ? g.labels()->num_classes() : 0;
  return j.dump();
}

AttributedGraph induced_subgraph(const AttributedGraph& g, const std::vector<bool>& keep) {
  if (keep.size() != g.num_nodes()) throw ConfigError("keep mask size does not match graph");
  AttributeTable table(g.feature_dim());
  std::vector<NodeIndex> remap(g.num_nodes(), 0);
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    if (!keep[i]) continue;
    const auto row = g.attributes(i);
    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.reserve(row.nnz());
    for (std::size_t k = 0; k < row.nnz(); ++k) entries.emplace_back(row.indices[k], row.values[k]);
    remap[i] = table.add_row(g.name(i), std::move(entries));
  }
  GraphBuilder builder(std::move(table));
  for (const auto& [a, b] : g.edges()) {
    if (keep[a] && keep[b]) builder.add_edge(remap[a], remap[b]);
  }
  AttributedGraph sub = std::move(builder).build();
  if (g.labels()) {
    NodeLabels labels;
    labels.class_names = g.labels()->class_names;
    for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
      if (keep[i] && g.labels()->class_of[i] >= 0) {
        labels.node_ids.push_back(g.name(i));
        labels.class_ids.push_back(g.labels()->class_of[i]);
      }
    }
    sub.attach_labels(labels);
  }
  return sub;
}

void write_labels(const NodeLabels& labels, std::ostream& out) {
  for (std::size_t k = 0; k < labels.node_ids.size(); ++k) {
    out << labels.node_ids[k] << '\t'
        << labels.class_names[static_cast<std::size_t>(labels.class_ids[k])] << '\n';
  }
}

void write_edge_list(std::span<const NamedEdge> edges, std::ostream& out) {
  for (const auto& [a, b] : edges) out << a << ' ' << b << '\n';
}

}  // namespace attri2vec
