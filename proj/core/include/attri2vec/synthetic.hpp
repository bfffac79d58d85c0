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

#include "attri2vec/graph.hpp"

namespace attri2vec {

/// Stochastic block model with community-dependent binary attributes.
///
/// Node i lies in block i % blocks. Indicative dimension k belongs to block
/// k % blocks and is set with probability p_on inside that block and p_off
/// elsewhere. The remaining dimensions are noise: each is present with
/// probability noise_density, holding a Uniform(0, 1) value.
struct SbmConfig {
  std::size_t num_nodes = 200;
  std::size_t blocks = 2;
  double p_in = 0.10;
  double p_out = 0.01;
  std::size_t feature_dim = 50;
  std::size_t indicative_dims = 5;
  double p_on = 0.8;
  double p_off = 0.2;
  double noise_density = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Labeled SBM graph; node names are "0".."n-1", labels are block ids.
AttributedGraph generate_sbm(const SbmConfig& config);

/// Erdos-Renyi style graph with about `avg_degree` neighbours per node and
/// exactly `nnz_per_node` uniform attribute entries per node.
AttributedGraph generate_random_graph(std::size_t num_nodes, double avg_degree,
                                      std::size_t feature_dim, std::size_t nnz_per_node,
                                      std::uint64_t seed);

}  // namespace attri2vec
