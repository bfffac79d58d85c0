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

#include "attri2vec/mapping.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "text_util.hpp"

namespace attri2vec {

namespace {

constexpr std::array<char, 4> kModelMagic{'A', '2', 'V', 'M'};
constexpr std::uint32_t kModelVersion = 1;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(MappingKind kind) {
  switch (kind) {
    case MappingKind::kLinear:
      return "linear";
    case MappingKind::kReLU:
      return "relu";
    case MappingKind::kKernel:
      return "kernel";
    case MappingKind::kSigmoid:
      return "sigmoid";
  }
  return "unknown";
}

std::string_view to_string(KernelScale scale) {
  return scale == KernelScale::kInputDim ? "input-dim" : "output-dim";
}

MappingKind parse_mapping_kind(std::string_view name) {
  const auto s = lower(name);
  if (s == "linear") return MappingKind::kLinear;
  if (s == "relu") return MappingKind::kReLU;
  if (s == "kernel") return MappingKind::kKernel;
  if (s == "sigmoid") return MappingKind::kSigmoid;
  throw ConfigError("unknown mapping '" + std::string(name) + "'");
}

KernelScale parse_kernel_scale(std::string_view name) {
  const auto s = lower(name);
  if (s == "input-dim") return KernelScale::kInputDim;
  if (s == "output-dim") return KernelScale::kOutputDim;
  throw ConfigError("unknown kernel scale '" + std::string(name) + "'");
}

MappingModel::MappingModel(MappingKind kind, std::size_t input_dim, std::size_t output_dim,
                           KernelScale scale)
    : kind_(kind), scale_(scale), input_dim_(input_dim), output_dim_(output_dim) {
  if (output_dim == 0) throw ConfigError("embedding dimension must be positive");
  if (kind == MappingKind::kKernel) {
    if (output_dim % 2 != 0) throw ConfigError("kernel requires even dimension");
    if (input_dim == 0) throw ConfigError("kernel mapping requires a positive input dimension");
    hidden_dim_ = output_dim / 2;
    const double denom =
        scale == KernelScale::kInputDim ? static_cast<double>(input_dim) : static_cast<double>(hidden_dim_);
    output_scale_ = 1.0 / std::sqrt(denom);
  } else {
    hidden_dim_ = output_dim;
  }
  weights_.assign(input_dim_ * hidden_dim_, 0.0);
}

void MappingModel::randomize(Rng& rng) {
  const double half = 0.5 / static_cast<double>(output_dim_);
  std::uniform_real_distribution<double> dist(-half, half);
  for (double& w : weights_) w = dist(rng);
}

void MappingModel::check_input(SparseVectorView x) const {
  if (!x.indices.empty() && x.indices.back() >= input_dim_) {
    throw ConfigError("attribute index " + std::to_string(x.indices.back()) +
                      " out of range for model input dimension " + std::to_string(input_dim_));
  }
}

void MappingModel::preactivate(SparseVectorView x, std::span<double> z) const {
  std::fill(z.begin(), z.end(), 0.0);
  const std::size_t h = hidden_dim_;
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double v = x.values[k];
    const double* w = weights_.data() + static_cast<std::size_t>(x.indices[k]) * h;
    for (std::size_t c = 0; c < h; ++c) z[c] += v * w[c];
  }
}

void MappingModel::activate(std::span<const double> z, std::span<double> phi) const {
  const std::size_t h = hidden_dim_;
  switch (kind_) {
    case MappingKind::kLinear:
      std::copy(z.begin(), z.end(), phi.begin());
      break;
    case MappingKind::kReLU:
      for (std::size_t c = 0; c < h; ++c) phi[c] = z[c] > 0.0 ? z[c] : 0.0;
      break;
    case MappingKind::kSigmoid:
      for (std::size_t c = 0; c < h; ++c) phi[c] = 1.0 / (1.0 + std::exp(-z[c]));
      break;
    case MappingKind::kKernel:
      for (std::size_t c = 0; c < h; ++c) {
        phi[c] = output_scale_ * std::cos(z[c]);
        phi[c + h] = output_scale_ * std::sin(z[c]);
      }
      break;
  }
}

void MappingModel::embed(SparseVectorView x, std::span<double> phi) const {
  check_input(x);
  std::vector<double> z(hidden_dim_);
  preactivate(x, z);
  activate(z, phi);
}

std::vector<double> MappingModel::embed(SparseVectorView x) const {
  std::vector<double> phi(output_dim_);
  embed(x, phi);
  return phi;
}

void MappingModel::backpropagate(std::span<const double> z, std::span<const double> phi,
                                 std::span<const double> upstream, std::span<double> dz) const {
  const std::size_t h = hidden_dim_;
  switch (kind_) {
    case MappingKind::kLinear:
      std::copy(upstream.begin(), upstream.begin() + static_cast<std::ptrdiff_t>(h), dz.begin());
      break;
    case MappingKind::kReLU:
      for (std::size_t c = 0; c < h; ++c) dz[c] = z[c] > 0.0 ? upstream[c] : 0.0;
      break;
    case MappingKind::kSigmoid:
      for (std::size_t c = 0; c < h; ++c) dz[c] = upstream[c] * phi[c] * (1.0 - phi[c]);
      break;
    case MappingKind::kKernel:
      // d cos(z)/dz = -sin(z), d sin(z)/dz = cos(z); phi already holds the scaled values.
      for (std::size_t c = 0; c < h; ++c) dz[c] = -phi[c + h] * upstream[c] + phi[c] * upstream[c + h];
      break;
  }
}

void MappingModel::add_outer(SparseVectorView x, std::span<const double> dz, double step) {
  const std::size_t h = hidden_dim_;
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double scale = step * x.values[k];
    double* w = weights_.data() + static_cast<std::size_t>(x.indices[k]) * h;
    for (std::size_t c = 0; c < h; ++c) w[c] += scale * dz[c];
  }
}

std::vector<double> SparseRowGradient::to_dense(std::size_t input_dim) const {
  const std::size_t h = dz.size();
  std::vector<double> dense(input_dim * h, 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < h; ++c) dense[rows[k] * h + c] += row_values[k] * dz[c];
  }
  return dense;
}

SparseRowGradient gradient_wrt_win(const MappingModel& model, SparseVectorView x,
                                   std::span<const double> upstream) {
  model.check_input(x);
  if (upstream.size() != model.output_dim()) throw ConfigError("upstream gradient has wrong length");
  std::vector<double> z(model.hidden_dim()), phi(model.output_dim());
  model.preactivate(x, z);
  model.activate(z, phi);
  SparseRowGradient grad;
  grad.dz.resize(model.hidden_dim());
  model.backpropagate(z, phi, upstream, grad.dz);
  grad.rows.assign(x.indices.begin(), x.indices.end());
  grad.row_values.assign(x.values.begin(), x.values.end());
  return grad;
}

void save_model(const MappingModel& model, const std::filesystem::path& path,
                const std::string& sidecar_json) {
  auto out = detail::open_output(path);
  std::array<unsigned char, 32> header{};
  std::copy(kModelMagic.begin(), kModelMagic.end(), header.begin());
  detail::put_u32(header.data() + 4, kModelVersion);
  detail::put_u32(header.data() + 8, static_cast<std::uint32_t>(model.kind()));
  detail::put_u64(header.data() + 12, model.input_dim());
  detail::put_u64(header.data() + 20, model.output_dim());
  detail::put_u32(header.data() + 28, static_cast<std::uint32_t>(model.kernel_scale()));
  out.write(reinterpret_cast<const char*>(header.data()), header.size());

  std::vector<unsigned char> body(model.weights().size() * 4);
  for (std::size_t k = 0; k < model.weights().size(); ++k) {
    detail::put_f32(body.data() + 4 * k, static_cast<float>(model.weights()[k]));
  }
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  detail::finish_output(out, path);

  if (!sidecar_json.empty()) {
    auto sidecar_path = path;
    sidecar_path += ".json";
    auto side = detail::open_output(sidecar_path);
    side << sidecar_json << '\n';
    detail::finish_output(side, sidecar_path);
  }
}

MappingModel load_model(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::array<unsigned char, 32> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
    throw IoError(path.string() + ": truncated model header");
  }
  if (!std::equal(kModelMagic.begin(), kModelMagic.end(), header.begin())) {
    throw IoError(path.string() + ": not a model file");
  }
  if (detail::get_u32(header.data() + 4) != kModelVersion) {
    throw IoError(path.string() + ": unsupported model version");
  }
  const auto kind_raw = detail::get_u32(header.data() + 8);
  const auto scale_raw = detail::get_u32(header.data() + 28);
  if (kind_raw > 3 || scale_raw > 1) throw IoError(path.string() + ": corrupt model header");
  MappingModel model(static_cast<MappingKind>(kind_raw), detail::get_u64(header.data() + 12),
                     detail::get_u64(header.data() + 20), static_cast<KernelScale>(scale_raw));

  std::vector<unsigned char> body(model.weights().size() * 4);
  if (!in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()))) {
    throw IoError(path.string() + ": truncated model weights");
  }
  auto w = model.weights();
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = detail::get_f32(body.data() + 4 * k);
    if (!std::isfinite(w[k])) throw IoError(path.string() + ": non-finite weight");
  }
  return model;
}

}  // namespace attri2vec
