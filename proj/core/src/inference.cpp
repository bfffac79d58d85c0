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

#include "attri2vec/inference.hpp"

#include <fmt/format.h>

#include <cmath>
#include <iterator>

#include "text_util.hpp"

namespace attri2vec {

void EmbeddingSet::add(std::string_view id, std::span<const double> vector) {
  std::vector<float> narrowed(vector.begin(), vector.end());
  add(id, std::span<const float>(narrowed));
}

void EmbeddingSet::add(std::string_view id, std::span<const float> vector) {
  if (vector.size() != dim_) throw ConfigError("embedding length does not match dimension");
  for (float v : vector) {
    if (!std::isfinite(v)) throw ConfigError("non-finite embedding value for '" + std::string(id) + "'");
  }
  if (!index_.emplace(std::string(id), ids_.size()).second) {
    throw ConfigError("duplicate embedding id '" + std::string(id) + "'");
  }
  ids_.emplace_back(id);
  values_.insert(values_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> EmbeddingSet::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingSet infer(const MappingModel& model, const AttributeTable& attributes) {
  if (attributes.feature_dim() != model.input_dim()) {
    throw ConfigError(fmt::format("attribute dimension {} does not match model input dimension {}",
                                  attributes.feature_dim(), model.input_dim()));
  }
  EmbeddingSet set(model.output_dim());
  std::vector<double> phi(model.output_dim());
  for (NodeIndex i = 0; i < attributes.size(); ++i) {
    model.embed(attributes.row(i), phi);
    set.add(attributes.name(i), std::span<const double>(phi));
  }
  return set;
}

EmbeddingSet embed_graph(const MappingModel& model, const AttributedGraph& graph) {
  return infer(model, graph.attribute_table());
}

EmbeddingSet attributes_as_embeddings(const AttributeTable& attributes) {
  EmbeddingSet set(attributes.feature_dim());
  std::vector<double> dense(attributes.feature_dim());
  for (NodeIndex i = 0; i < attributes.size(); ++i) {
    std::fill(dense.begin(), dense.end(), 0.0);
    const auto row = attributes.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) dense[row.indices[k]] = row.values[k];
    set.add(attributes.name(i), std::span<const double>(dense));
  }
  return set;
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{} {}\n", set.size(), set.dim());
  for (std::size_t k = 0; k < set.size(); ++k) {
    fmt::format_to(std::back_inserter(buf), "{}", set.id(k));
    // fmt's shortest representation round-trips float exactly.
    for (float v : set.vector(k)) fmt::format_to(std::back_inserter(buf), " {}", v);
    buf.push_back('\n');
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  detail::finish_output(out, path);
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  const std::string source = path.string();
  std::string line;
  std::vector<std::string_view> tokens;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing 'count d' header");
  detail::split_ws(line, tokens);
  if (tokens.size() != 2) throw ParseError(source, 1, "expected 'count d' header");
  const auto count = detail::parse_number<std::size_t>(tokens[0]);
  const auto dim = detail::parse_number<std::size_t>(tokens[1]);
  if (!count || !dim) throw ParseError(source, 1, "malformed 'count d' header");

  EmbeddingSet set(*dim);
  std::vector<float> vec(*dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::strip_comment(line).empty()) continue;
    detail::split_ws(line, tokens);
    if (tokens.size() != *dim + 1) {
      throw ParseError(source, line_no, fmt::format("expected id and {} values", *dim));
    }
    for (std::size_t c = 0; c < *dim; ++c) {
      auto v = detail::parse_number<float>(tokens[c + 1]);
      if (!v) throw ParseError(source, line_no, "malformed value '" + std::string(tokens[c + 1]) + "'");
      vec[c] = *v;
    }
    try {
      set.add(tokens[0], std::span<const float>(vec));
    } catch (const ConfigError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (set.size() != *count) {
    throw ParseError(source, line_no,
                     fmt::format("header announces {} vectors but file holds {}", *count, set.size()));
  }
  return set;
}

}  // namespace attri2vec
