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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attri2vec/common.hpp"

namespace attri2vec {

enum class MappingKind : std::uint32_t { kLinear = 0, kReLU = 1, kKernel = 2, kSigmoid = 3 };

/// Output scale of the kernel mapping: 1/sqrt(m) or 1/sqrt(d/2).
enum class KernelScale : std::uint32_t { kInputDim = 0, kOutputDim = 1 };

std::string_view to_string(MappingKind kind);
std::string_view to_string(KernelScale scale);
/// Accepts linear, relu, kernel, sigmoid (case-insensitive).
MappingKind parse_mapping_kind(std::string_view name);
KernelScale parse_kernel_scale(std::string_view name);

/// The attribute transformation f: R^m -> R^d with weights W^in.
///
/// W^in is stored row-major with one row per attribute feature, so a sparse
/// input touches only the rows it has nonzeros in. Row width is d, or d/2
/// for the kernel mapping whose raw column k feeds both the cosine output k
/// and the sine output k + d/2.
class MappingModel {
 public:
  MappingModel() = default;
  /// Zero weights. Throws ConfigError for d == 0 or an odd kernel dimension.
  MappingModel(MappingKind kind, std::size_t input_dim, std::size_t output_dim,
               KernelScale scale = KernelScale::kInputDim);

  MappingKind kind() const noexcept { return kind_; }
  KernelScale kernel_scale() const noexcept { return scale_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  /// Width of a W^in row: d, or d/2 for the kernel mapping.
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }
  /// Multiplier applied to the kernel outputs; 1 for other kinds.
  double output_scale() const noexcept { return output_scale_; }

  /// I.i.d. uniform on [-0.5/d, 0.5/d].
  void randomize(Rng& rng);

  std::span<double> weights() noexcept { return weights_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> row(std::size_t feature) noexcept {
    return {weights_.data() + feature * hidden_dim_, hidden_dim_};
  }
  std::span<const double> row(std::size_t feature) const noexcept {
    return {weights_.data() + feature * hidden_dim_, hidden_dim_};
  }

  /// z = W^in^T x, length hidden_dim.
  void preactivate(SparseVectorView x, std::span<double> z) const;
  /// phi = f evaluated from the pre-activations, length output_dim.
  void activate(std::span<const double> z, std::span<double> phi) const;

  void embed(SparseVectorView x, std::span<double> phi) const;
  std::vector<double> embed(SparseVectorView x) const;

  /// dz = d(upstream . phi)/dz given z and phi = activate(z). ReLU uses
  /// subgradient 0 at z == 0.
  void backpropagate(std::span<const double> z, std::span<const double> phi,
                     std::span<const double> upstream, std::span<double> dz) const;

  /// W^in[idx, :] += step * value * dz for every nonzero (idx, value) of x.
  void add_outer(SparseVectorView x, std::span<const double> dz, double step);

  /// Throws ConfigError when x has an index >= input_dim.
  void check_input(SparseVectorView x) const;

  friend bool operator==(const MappingModel&, const MappingModel&) = default;

 private:
  MappingKind kind_ = MappingKind::kLinear;
  KernelScale scale_ = KernelScale::kInputDim;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  double output_scale_ = 1.0;
  std::vector<double> weights_;
};

/// Gradient of upstream . f(x) with respect to W^in, restricted to the rows
/// in nnz(x): row k equals values[k] * dz.
struct SparseRowGradient {
  std::vector<std::uint32_t> rows;
  std::vector<double> dz;
  std::vector<double> row_values;

  /// Dense m x hidden_dim matrix, row-major.
  std::vector<double> to_dense(std::size_t input_dim) const;
};

SparseRowGradient gradient_wrt_win(const MappingModel& model, SparseVectorView x,
                                   std::span<const double> upstream);

/// Binary model file: "A2VM" magic, u32 version, u32 kind, u64 m, u64 d,
/// u32 kernel scale, then W^in row-major as little-endian float32.
/// When `sidecar_json` is non-empty it is written to `<path>.json`.
void save_model(const MappingModel& model, const std::filesystem::path& path,
                const std::string& sidecar_json = {});
MappingModel load_model(const std::filesystem::path& path);

}  // namespace attri2vec
