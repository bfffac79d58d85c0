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

#include "attri2vec/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace attri2vec {

void SbmConfig::validate() const {
  if (num_nodes < 2) throw ConfigError("SBM needs at least two nodes");
  if (blocks < 1 || blocks > num_nodes) throw ConfigError("SBM block count must lie in [1, nodes]");
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  probability(p_in, "p_in");
  probability(p_out, "p_out");
  probability(p_on, "p_on");
  probability(p_off, "p_off");
  probability(noise_density, "noise density");
  if (feature_dim == 0) throw ConfigError("SBM feature dimension must be positive");
  if (indicative_dims > feature_dim) throw ConfigError("more indicative dimensions than features");
}

AttributedGraph generate_sbm(const SbmConfig& config) {
  config.validate();
  Rng attr_rng = derive_rng(config.seed, 0, 51);
  Rng edge_rng = derive_rng(config.seed, 0, 52);
  std::bernoulli_distribution on(config.p_on), off(config.p_off), noise(config.noise_density);
  std::uniform_real_distribution<double> value(0.0, 1.0);

  GraphBuilder builder(config.feature_dim);
  NodeLabels labels;
  for (std::size_t b = 0; b < config.blocks; ++b) labels.class_names.push_back(std::to_string(b));
  for (std::size_t i = 0; i < config.num_nodes; ++i) {
    const std::size_t block = i % config.blocks;
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t k = 0; k < config.feature_dim; ++k) {
      bool present = false;
      double v = 1.0;
      if (k < config.indicative_dims) {
        present = k % config.blocks == block ? on(attr_rng) : off(attr_rng);
      } else {
        present = noise(attr_rng);
        v = value(attr_rng);
      }
      if (present && v > 0.0) row.emplace_back(static_cast<std::uint32_t>(k), v);
    }
    builder.add_node(std::to_string(i), std::move(row));
    labels.node_ids.push_back(std::to_string(i));
    labels.class_ids.push_back(static_cast<int>(block));
  }
  for (std::size_t i = 0; i < config.num_nodes; ++i) {
    for (std::size_t j = i + 1; j < config.num_nodes; ++j) {
      const double p = i % config.blocks == j % config.blocks ? config.p_in : config.p_out;
      if (std::bernoulli_distribution(p)(edge_rng)) {
        builder.add_edge(static_cast<NodeIndex>(i), static_cast<NodeIndex>(j));
      }
    }
  }
  auto graph = std::move(builder).build();
  graph.attach_labels(labels);
  return graph;
}

AttributedGraph generate_random_graph(std::size_t num_nodes, double avg_degree,
                                      std::size_t feature_dim, std::size_t nnz_per_node,
                                      std::uint64_t seed) {
  if (num_nodes < 2) throw ConfigError("random graph needs at least two nodes");
  if (nnz_per_node > feature_dim) throw ConfigError("more attribute entries than features");
  if (!(avg_degree >= 0.0)) throw ConfigError("average degree must be non-negative");
  Rng rng = derive_rng(seed, 0, 53);
  GraphBuilder builder(feature_dim);
  std::vector<std::uint32_t> dims(feature_dim);
  std::uniform_real_distribution<double> value(0.1, 1.0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    std::iota(dims.begin(), dims.end(), 0u);
    std::vector<std::pair<std::uint32_t, double>> row;
    // Partial Fisher-Yates picks distinct dimensions.
    for (std::size_t k = 0; k < nnz_per_node; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, feature_dim - 1);
      std::swap(dims[k], dims[pick(rng)]);
      row.emplace_back(dims[k], value(rng));
    }
    std::sort(row.begin(), row.end());
    builder.add_node(std::to_string(i), std::move(row));
  }
  const auto num_edges = static_cast<std::size_t>(avg_degree * static_cast<double>(num_nodes) / 2.0);
  std::uniform_int_distribution<NodeIndex> node(0, static_cast<NodeIndex>(num_nodes - 1));
  for (std::size_t e = 0; e < num_edges; ++e) builder.add_edge(node(rng), node(rng));
  return std::move(builder).build();
}

}  // namespace attri2vec
