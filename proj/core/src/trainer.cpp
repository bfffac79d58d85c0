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

#include "attri2vec/trainer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "attri2vec/sampler.hpp"
#include "binary_io.hpp"
#include "text_util.hpp"

namespace attri2vec {

namespace {

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

/// log(1 + exp(t)).
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

/// Tracks windowed mean loss and flags divergence against the first window.
class LossMonitor {
 public:
  LossMonitor(std::uint64_t interval, double factor) : interval_(interval), factor_(factor) {}

  /// Returns the window mean when a window closes.
  std::optional<double> add(double loss, std::uint64_t iteration) {
    sum_ += loss;
    if (++count_ < interval_) return std::nullopt;
    const double mean = sum_ / static_cast<double>(count_);
    sum_ = 0.0;
    count_ = 0;
    if (!baseline_) baseline_ = mean;
    if (!std::isfinite(mean) || mean > factor_ * *baseline_) {
      throw NumericError(fmt::format(
          "training diverged at iteration {}: running loss {:.6g} exceeds {}x the initial {:.6g}; "
          "lower the initial learning rate (e.g. --lr 0.005) or enable --grad-clip",
          iteration, mean, factor_, *baseline_));
    }
    return mean;
  }

 private:
  std::uint64_t interval_;
  double factor_;
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
  std::optional<double> baseline_;
};

}  // namespace

void TrainConfig::validate() const {
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) throw ConfigError("learning rate must be positive");
  if (!(min_lr >= 0.0) || min_lr > initial_lr) {
    throw ConfigError("minimum learning rate must lie in [0, initial learning rate]");
  }
  if (negatives < 1) throw ConfigError("at least one negative sample is required");
  if (!(noise_exponent >= 0.0)) throw ConfigError("noise exponent must be >= 0");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (!(gradient_clip >= 0.0)) throw ConfigError("gradient clip must be >= 0");
  if (!(divergence_factor > 1.0)) throw ConfigError("divergence factor must exceed 1");
}

std::uint64_t default_iterations(const ContextCorpus& corpus) {
  constexpr std::uint64_t kCap = 100'000'000;
  const std::uint64_t scaled = corpus.total_pairs() > kCap / 200 ? kCap : 200 * corpus.total_pairs();
  return std::min(kCap, scaled);
}

std::vector<double> StepGradient::wout_dense(std::size_t num_nodes) const {
  const std::size_t d = phi.size();
  std::vector<double> dense(num_nodes * d, 0.0);
  for (std::size_t k = 0; k < out_columns.size(); ++k) {
    for (std::size_t c = 0; c < d; ++c) dense[out_columns[k] * d + c] += out_coefficients[k] * phi[c];
  }
  return dense;
}

Trainer::Trainer(const AttributedGraph& graph, MappingModel model, TrainConfig config)
    : graph_(&graph),
      model_(std::move(model)),
      config_(std::move(config)),
      dim_(model_.output_dim()),
      wout_(graph.num_nodes() * model_.output_dim(), 0.0) {
  config_.validate();
  if (model_.input_dim() != graph.feature_dim()) {
    throw ConfigError(fmt::format("model input dimension {} does not match graph feature dimension {}",
                                  model_.input_dim(), graph.feature_dim()));
  }
  workspace_ = make_workspace();
}

Trainer::Workspace Trainer::make_workspace() const {
  Workspace ws;
  ws.z.resize(model_.hidden_dim());
  ws.phi.resize(dim_);
  ws.upstream.resize(dim_);
  ws.dz.resize(model_.hidden_dim());
  ws.scores.reserve(config_.negatives + 1);
  ws.columns.reserve(config_.negatives + 1);
  ws.coefficients.reserve(config_.negatives + 1);
  return ws;
}

double Trainer::learning_rate(std::uint64_t iter, std::uint64_t max_iterations) const {
  if (max_iterations == 0) return config_.initial_lr;
  const double frac = static_cast<double>(iter) / static_cast<double>(max_iterations);
  return std::max(config_.min_lr, config_.initial_lr * (1.0 - frac));
}

double Trainer::compute_step(Workspace& ws, NodeIndex center, NodeIndex context,
                             std::span<const NodeIndex> negatives) const {
  const auto x = graph_->attributes(center);
  model_.preactivate(x, ws.z);
  model_.activate(ws.z, ws.phi);

  ws.columns.clear();
  ws.coefficients.clear();
  double loss = 0.0;
  auto accumulate = [&](NodeIndex q, double label) {
    const double s = dot(ws.phi, wout_column(q));
    loss += label > 0.0 ? softplus(-s) : softplus(s);
    const double g = sigmoid(s) - label;
    auto it = std::find(ws.columns.begin(), ws.columns.end(), q);
    if (it == ws.columns.end()) {
      ws.columns.push_back(q);
      ws.coefficients.push_back(g);
    } else {
      ws.coefficients[static_cast<std::size_t>(it - ws.columns.begin())] += g;
    }
  };
  accumulate(context, 1.0);
  for (NodeIndex q : negatives) accumulate(q, 0.0);

  std::fill(ws.upstream.begin(), ws.upstream.end(), 0.0);
  for (std::size_t k = 0; k < ws.columns.size(); ++k) {
    const auto col = wout_column(ws.columns[k]);
    const double g = ws.coefficients[k];
    for (std::size_t c = 0; c < dim_; ++c) ws.upstream[c] += g * col[c];
  }
  model_.backpropagate(ws.z, ws.phi, ws.upstream, ws.dz);
  return loss;
}

double Trainer::partial_objective(NodeIndex center, NodeIndex context,
                                  std::span<const NodeIndex> negatives) const {
  std::vector<double> phi(dim_);
  model_.embed(graph_->attributes(center), phi);
  double loss = softplus(-dot(phi, wout_column(context)));
  for (NodeIndex q : negatives) loss += softplus(dot(phi, wout_column(q)));
  return loss;
}

StepGradient Trainer::gradient(NodeIndex center, NodeIndex context,
                               std::span<const NodeIndex> negatives) const {
  Workspace ws = make_workspace();
  StepGradient grad;
  grad.loss = compute_step(ws, center, context, negatives);
  const auto x = graph_->attributes(center);
  grad.win.rows.assign(x.indices.begin(), x.indices.end());
  grad.win.row_values.assign(x.values.begin(), x.values.end());
  grad.win.dz = ws.dz;
  grad.out_columns = ws.columns;
  grad.out_coefficients = ws.coefficients;
  grad.phi = ws.phi;
  return grad;
}

double Trainer::apply_step(Workspace& ws, NodeIndex center, NodeIndex context,
                           std::span<const NodeIndex> negatives, double learning_rate) {
  const double loss = compute_step(ws, center, context, negatives);
  const auto x = graph_->attributes(center);

  double x_sq = 0.0;
  for (double v : x.values) x_sq += v * v;
  const double dz_sq = squared_norm(ws.dz);
  double coef_sq = 0.0;
  for (double g : ws.coefficients) coef_sq += g * g;
  const double grad_sq = x_sq * dz_sq + coef_sq * squared_norm(ws.phi);
  if (!std::isfinite(loss) || !std::isfinite(grad_sq)) {
    throw NumericError(fmt::format(
        "non-finite gradient at iteration {} (center {}, context {}); lower the initial learning rate",
        iteration_, center, context));
  }

  double step = learning_rate;
  if (config_.gradient_clip > 0.0) {
    const double norm = std::sqrt(grad_sq);
    if (norm > config_.gradient_clip) step *= config_.gradient_clip / norm;
  }

  for (std::size_t k = 0; k < ws.columns.size(); ++k) {
    double* col = wout_.data() + static_cast<std::size_t>(ws.columns[k]) * dim_;
    const double scale = -step * ws.coefficients[k];
    for (std::size_t c = 0; c < dim_; ++c) col[c] += scale * ws.phi[c];
  }
  model_.add_outer(x, ws.dz, -step);
  return loss;
}

double Trainer::sgd_step(NodeIndex center, NodeIndex context, std::span<const NodeIndex> negatives,
                         double learning_rate) {
  const double loss = apply_step(workspace_, center, context, negatives, learning_rate);
  ++iteration_;
  return loss;
}

void Trainer::train(const ContextCorpus& corpus, const ProgressCallback& progress) {
  if (corpus.num_nodes() != graph_->num_nodes()) {
    throw ConfigError("corpus node count does not match the graph");
  }
  const std::uint64_t iterations = config_.max_iterations.value_or(default_iterations(corpus));
  if (iterations == 0) return;
  if (corpus.empty()) throw ConfigError("cannot train on an empty corpus");
  if (config_.threads <= 1) {
    train_sequential(corpus, iterations, progress);
  } else {
    train_parallel(corpus, iterations, progress);
  }
}

void Trainer::train_sequential(const ContextCorpus& corpus, std::uint64_t iterations,
                               const ProgressCallback& progress) {
  const PairSampler pairs(corpus);
  const auto noise = NoiseDistribution::from_corpus(corpus, config_.noise_exponent);
  Rng rng = derive_rng(config_.seed, 0, 2);
  const std::uint64_t interval =
      config_.report_interval ? config_.report_interval : std::max<std::uint64_t>(1, iterations / 1000);
  LossMonitor monitor(interval, config_.divergence_factor);
  std::vector<NodeIndex> negatives(config_.negatives);

  for (std::uint64_t it = 0; it < iterations; ++it) {
    const double lr = learning_rate(it, iterations);
    const auto [center, context] = pairs.draw_pair(rng);
    noise.draw_negatives(rng, context, negatives);
    const double loss = sgd_step(center, context, negatives, lr);
    if (auto mean = monitor.add(loss, it + 1); mean && progress) progress({it + 1, lr, *mean});
  }
}

void Trainer::train_parallel(const ContextCorpus& corpus, std::uint64_t iterations,
                             const ProgressCallback& progress) {
  const PairSampler pairs(corpus);
  const auto noise = NoiseDistribution::from_corpus(corpus, config_.noise_exponent);
  const std::size_t threads = config_.threads;
  const std::uint64_t interval = config_.report_interval
                                     ? config_.report_interval
                                     : std::max<std::uint64_t>(1, iterations / (1000 * threads));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  // Workers share W^in and W^out without locks; each owns its RNG stream
  // and scratch space.
  auto worker = [&](std::size_t id) {
    try {
      Rng rng = derive_rng(config_.seed, id + 1, 2);
      Workspace ws = make_workspace();
      LossMonitor monitor(interval, config_.divergence_factor);
      std::vector<NodeIndex> negatives(config_.negatives);
      while (!stop.load(std::memory_order_relaxed)) {
        const std::uint64_t it = next.fetch_add(1, std::memory_order_relaxed);
        if (it >= iterations) break;
        const double lr = learning_rate(it, iterations);
        const auto [center, context] = pairs.draw_pair(rng);
        noise.draw_negatives(rng, context, negatives);
        const double loss = apply_step(ws, center, context, negatives, lr);
        if (auto mean = monitor.add(loss, it + 1); mean && progress && id == 0) {
          progress({it + 1, lr, *mean});
        }
      }
    } catch (...) {
      stop.store(true);
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }
  iteration_ += std::min(next.load(), iterations);
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> Trainer::embed(NodeIndex node) const {
  return model_.embed(graph_->attributes(node));
}

MappingModel initial_model(MappingKind kind, std::size_t input_dim, std::size_t dim,
                           std::uint64_t seed, KernelScale scale) {
  MappingModel model(kind, input_dim, dim, scale);
  Rng rng = derive_rng(seed, 0, 1);
  model.randomize(rng);
  return model;
}

MappingModel train(const AttributedGraph& graph, const ContextCorpus& corpus, MappingKind kind,
                   std::size_t dim, const TrainConfig& config, KernelScale scale,
                   const ProgressCallback& progress) {
  Trainer trainer(graph, initial_model(kind, graph.feature_dim(), dim, config.seed, scale), config);
  trainer.train(corpus, progress);
  return std::move(trainer.model());
}

namespace {
constexpr std::array<char, 4> kWoutMagic{'A', '2', 'V', 'O'};
constexpr std::uint32_t kWoutVersion = 1;
}  // namespace

void save_output_weights(const Trainer& trainer, const std::filesystem::path& path) {
  const auto w = trainer.wout();
  const std::size_t d = trainer.model().output_dim();
  auto out = detail::open_output(path);
  std::array<unsigned char, 24> header{};
  std::copy(kWoutMagic.begin(), kWoutMagic.end(), header.begin());
  detail::put_u32(header.data() + 4, kWoutVersion);
  detail::put_u64(header.data() + 8, w.size() / d);
  detail::put_u64(header.data() + 16, d);
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  std::vector<unsigned char> body(w.size() * 8);
  for (std::size_t k = 0; k < w.size(); ++k) detail::put_f64(body.data() + 8 * k, w[k]);
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  detail::finish_output(out, path);
}

void load_output_weights(Trainer& trainer, const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::array<unsigned char, 24> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
    throw IoError(path.string() + ": truncated output-weight header");
  }
  if (!std::equal(kWoutMagic.begin(), kWoutMagic.end(), header.begin()) ||
      detail::get_u32(header.data() + 4) != kWoutVersion) {
    throw IoError(path.string() + ": not an output-weight file");
  }
  auto w = trainer.wout();
  const std::size_t d = trainer.model().output_dim();
  const auto nodes = detail::get_u64(header.data() + 8);
  const auto dim = detail::get_u64(header.data() + 16);
  if (dim != d || nodes * d != w.size()) {
    throw ConfigError(fmt::format("{}: output weights are {} x {}, trainer expects {} x {}",
                                  path.string(), nodes, dim, w.size() / d, d));
  }
  std::vector<unsigned char> body(w.size() * 8);
  if (!in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()))) {
    throw IoError(path.string() + ": truncated output weights");
  }
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = detail::get_f64(body.data() + 8 * k);
    if (!std::isfinite(w[k])) throw IoError(path.string() + ": non-finite output weight");
  }
}

}  // namespace attri2vec
