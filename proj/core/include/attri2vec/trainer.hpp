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
#include <optional>
#include <span>
#include <vector>

#include "attri2vec/common.hpp"
#include "attri2vec/graph.hpp"
#include "attri2vec/mapping.hpp"
#include "attri2vec/walker.hpp"

namespace attri2vec {

struct TrainConfig {
  /// Number of SGD steps; nullopt selects default_iterations(corpus).
  std::optional<std::uint64_t> max_iterations;
  double initial_lr = 0.025;
  double min_lr = 2.5e-6;
  std::size_t negatives = 5;
  /// Exponent applied to context marginals for the noise distribution.
  double noise_exponent = 0.75;
  std::uint64_t seed = 1;
  /// 1 is the deterministic sequential mode; more runs lock-free workers.
  std::size_t threads = 1;
  /// Rescale a step whose full gradient norm exceeds this; 0 disables.
  double gradient_clip = 0.0;
  /// Steps per running-loss window; 0 picks max(1, iterations / 1000).
  std::uint64_t report_interval = 0;
  /// Abort when a window's mean loss exceeds this multiple of the first.
  double divergence_factor = 10.0;

  void validate() const;
};

/// min(1e8, 200 * total_pairs).
std::uint64_t default_iterations(const ContextCorpus& corpus);

struct TrainProgress {
  std::uint64_t iteration;
  double learning_rate;
  double running_loss;
};

using ProgressCallback = std::function<void(const TrainProgress&)>;

/// Full gradient of one partial objective: W^in part as a sparse row update,
/// W^out part as one coefficient per distinct touched column (the column
/// gradient is coefficient * phi).
struct StepGradient {
  SparseRowGradient win;
  std::vector<NodeIndex> out_columns;
  std::vector<double> out_coefficients;
  std::vector<double> phi;
  double loss = 0.0;

  /// Dense d x |V| W^out gradient, column q at [q * d, (q + 1) * d).
  std::vector<double> wout_dense(std::size_t num_nodes) const;
};

/// SGD state over the negative-sampled skip-gram objective with
/// phi(v) = f(x_v).
///
/// W^out starts at zero and is stored column-major (one contiguous d-vector
/// per node), so column q is w^out_q.
class Trainer {
 public:
  Trainer(const AttributedGraph& graph, MappingModel model, TrainConfig config);

  const MappingModel& model() const noexcept { return model_; }
  MappingModel& model() noexcept { return model_; }
  std::span<const double> wout() const noexcept { return wout_; }
  std::span<double> wout() noexcept { return wout_; }
  std::span<const double> wout_column(NodeIndex q) const {
    return {wout_.data() + static_cast<std::size_t>(q) * dim_, dim_};
  }
  const TrainConfig& config() const noexcept { return config_; }
  std::uint64_t iteration() const noexcept { return iteration_; }

  /// max(min_lr, initial_lr * (1 - iter / max_iterations)).
  double learning_rate(std::uint64_t iter, std::uint64_t max_iterations) const;

  /// -log sigma(phi_i . w_j) - sum_k log sigma(-phi_i . w_{N_k}).
  double partial_objective(NodeIndex center, NodeIndex context,
                           std::span<const NodeIndex> negatives) const;

  StepGradient gradient(NodeIndex center, NodeIndex context,
                        std::span<const NodeIndex> negatives) const;

  /// One update with every gradient evaluated at the current parameters;
  /// repeated negatives accumulate on their shared column. Returns the loss
  /// before the update. Throws NumericError on a non-finite gradient.
  double sgd_step(NodeIndex center, NodeIndex context, std::span<const NodeIndex> negatives,
                  double learning_rate);

  /// Runs max_iterations steps on pairs drawn from `corpus`.
  void train(const ContextCorpus& corpus, const ProgressCallback& progress = {});

  std::vector<double> embed(NodeIndex node) const;

 private:
  struct Workspace {
    std::vector<double> z, phi, upstream, dz, scores;
    std::vector<NodeIndex> columns;
    std::vector<double> coefficients;
  };

  Workspace make_workspace() const;
  /// Fills ws.phi, ws.z, ws.scores, ws.columns, ws.coefficients,
  /// ws.upstream and ws.dz. Returns the loss.
  double compute_step(Workspace& ws, NodeIndex center, NodeIndex context,
                      std::span<const NodeIndex> negatives) const;
  double apply_step(Workspace& ws, NodeIndex center, NodeIndex context,
                    std::span<const NodeIndex> negatives, double learning_rate);
  void train_sequential(const ContextCorpus& corpus, std::uint64_t iterations,
                        const ProgressCallback& progress);
  void train_parallel(const ContextCorpus& corpus, std::uint64_t iterations,
                      const ProgressCallback& progress);

  const AttributedGraph* graph_;
  MappingModel model_;
  TrainConfig config_;
  std::size_t dim_;
  std::vector<double> wout_;
  std::uint64_t iteration_ = 0;
  Workspace workspace_;
};

/// Random W^in from `seed`, then Trainer::train. Returns the trained mapping.
MappingModel train(const AttributedGraph& graph, const ContextCorpus& corpus, MappingKind kind,
                   std::size_t dim, const TrainConfig& config,
                   KernelScale scale = KernelScale::kInputDim, const ProgressCallback& progress = {});

/// Initial model for a training run: W^in uniform from the stream (seed, 0, 1).
MappingModel initial_model(MappingKind kind, std::size_t input_dim, std::size_t dim,
                           std::uint64_t seed, KernelScale scale = KernelScale::kInputDim);

/// W^out for warm restarts: "A2VO" magic, u32 version, u64 |V|, u64 d, then
/// the column-major matrix as little-endian float64.
void save_output_weights(const Trainer& trainer, const std::filesystem::path& path);
/// Throws ConfigError when the file's shape differs from the trainer's.
void load_output_weights(Trainer& trainer, const std::filesystem::path& path);

}  // namespace attri2vec
