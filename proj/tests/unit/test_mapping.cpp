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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "attri2vec/mapping.hpp"
#include "test_support.hpp"

using namespace attri2vec;

namespace {

constexpr MappingKind kAllKinds[] = {MappingKind::kLinear, MappingKind::kReLU, MappingKind::kKernel,
                                     MappingKind::kSigmoid};

struct SparseX {
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  SparseVectorView view() const { return {idx, val}; }
};

SparseX random_sparse(std::size_t m, std::size_t nnz, Rng& rng, double scale = 1.0) {
  std::vector<std::uint32_t> all(m);
  std::iota(all.begin(), all.end(), 0u);
  std::shuffle(all.begin(), all.end(), rng);
  SparseX x;
  x.idx.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(nnz));
  std::sort(x.idx.begin(), x.idx.end());
  std::uniform_real_distribution<double> u(-scale, scale);
  for (std::size_t k = 0; k < nnz; ++k) x.val.push_back(u(rng));
  return x;
}

void randomize_weights(MappingModel& model, Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& w : model.weights()) w = u(rng);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Direct evaluation of f(x) from the dense formulas, independent of the
/// model's own activate().
std::vector<double> reference_embed(const MappingModel& model, const SparseX& x) {
  const std::size_t h = model.hidden_dim();
  std::vector<double> z(h, 0.0);
  for (std::size_t k = 0; k < x.idx.size(); ++k) {
    for (std::size_t c = 0; c < h; ++c) z[c] += model.row(x.idx[k])[c] * x.val[k];
  }
  std::vector<double> phi(model.output_dim());
  switch (model.kind()) {
    case MappingKind::kLinear:
      phi = z;
      break;
    case MappingKind::kReLU:
      for (std::size_t c = 0; c < h; ++c) phi[c] = std::max(0.0, z[c]);
      break;
    case MappingKind::kSigmoid:
      for (std::size_t c = 0; c < h; ++c) phi[c] = 1.0 / (1.0 + std::exp(-z[c]));
      break;
    case MappingKind::kKernel: {
      const double s = model.kernel_scale() == KernelScale::kInputDim ? 1.0 / std::sqrt(model.input_dim())
                                                                      : 1.0 / std::sqrt(h);
      for (std::size_t c = 0; c < h; ++c) {
        phi[c] = s * std::cos(z[c]);
        phi[c + h] = s * std::sin(z[c]);
      }
      break;
    }
  }
  return phi;
}

}  // namespace

TEST_SUITE("mapping") {
  TEST_CASE("construction and names") {
    CHECK_THROWS_WITH_AS(MappingModel(MappingKind::kKernel, 5, 7), "kernel requires even dimension", ConfigError);
    CHECK_THROWS_AS(MappingModel(MappingKind::kLinear, 5, 0), ConfigError);
    const MappingModel k(MappingKind::kKernel, 5, 8);
    CHECK(k.hidden_dim() == 4);
    CHECK(k.weights().size() == 20);
    CHECK(parse_mapping_kind("ReLU") == MappingKind::kReLU);
    CHECK(parse_mapping_kind("kernel") == MappingKind::kKernel);
    CHECK_THROWS_AS(parse_mapping_kind("tanh"), ConfigError);
    CHECK(parse_kernel_scale("output-dim") == KernelScale::kOutputDim);
    for (auto kind : kAllKinds) CHECK(parse_mapping_kind(to_string(kind)) == kind);
  }

  TEST_CASE("zero input") {
    Rng rng(1);
    const SparseX zero;
    for (auto kind : kAllKinds) {
      MappingModel model(kind, 9, 6);
      model.randomize(rng);
      const auto phi = model.embed(zero.view());
      for (std::size_t c = 0; c < 6; ++c) {
        switch (kind) {
          case MappingKind::kSigmoid:
            CHECK(phi[c] == 0.5);
            break;
          case MappingKind::kKernel:
            CHECK(phi[c] == doctest::Approx(c < 3 ? 1.0 / 3.0 : 0.0));
            break;
          default:
            CHECK(phi[c] == 0.0);
        }
      }
      if (kind == MappingKind::kKernel) CHECK(dot(phi, phi) == doctest::Approx(6.0 / 18.0));
    }
  }

  TEST_CASE("embed agrees with the direct formulas and output ranges") {
    Rng rng(2);
    for (auto kind : kAllKinds) {
      for (auto scale : {KernelScale::kInputDim, KernelScale::kOutputDim}) {
        MappingModel model(kind, 30, 10, scale);
        randomize_weights(model, rng, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
          const auto x = random_sparse(30, 1 + rng() % 10, rng);
          const auto phi = model.embed(x.view());
          const auto ref = reference_embed(model, x);
          for (std::size_t c = 0; c < 10; ++c) CHECK(phi[c] == doctest::Approx(ref[c]).epsilon(1e-14));
          for (double v : phi) {
            if (kind == MappingKind::kSigmoid) CHECK((v > 0.0 && v < 1.0));
            if (kind == MappingKind::kReLU) CHECK(v >= 0.0);
            if (kind == MappingKind::kKernel) CHECK(std::abs(v) <= model.output_scale());
          }
        }
      }
    }
  }

  TEST_CASE("kernel norm identity holds for random sparse inputs") {
    Rng rng(3);
    for (auto scale : {KernelScale::kInputDim, KernelScale::kOutputDim}) {
      MappingModel model(MappingKind::kKernel, 200, 16, scale);
      randomize_weights(model, rng, 3.0);
      const double expected = scale == KernelScale::kInputDim ? 16.0 / (2.0 * 200.0) : 1.0;
      for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_sparse(200, 1 + rng() % 40, rng, 5.0);
        const auto phi = model.embed(x.view());
        CHECK(std::abs(dot(phi, phi) - expected) < 1e-12);
      }
    }
  }

  TEST_CASE("linear mapping with one-hot input returns the weight row") {
    Rng rng(4);
    MappingModel model(MappingKind::kLinear, 12, 5);
    model.randomize(rng);
    for (std::uint32_t i = 0; i < 12; ++i) {
      const SparseX x{{i}, {1.0}};
      const auto phi = model.embed(x.view());
      const auto row = model.row(i);
      CHECK(std::equal(phi.begin(), phi.end(), row.begin(), row.end()));
    }
  }

  TEST_CASE("randomize draws within the initialisation bound") {
    Rng rng(5);
    MappingModel model(MappingKind::kSigmoid, 100, 16);
    model.randomize(rng);
    const double bound = 0.5 / 16;
    double lo = 1.0, hi = -1.0;
    for (double w : model.weights()) {
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    CHECK(lo >= -bound);
    CHECK(hi <= bound);
    CHECK(hi - lo > 1.8 * bound);
  }

  TEST_CASE("out-of-range attribute index is rejected") {
    const MappingModel model(MappingKind::kLinear, 4, 2);
    const SparseX x{{1, 4}, {1.0, 1.0}};
    CHECK_THROWS_AS(model.embed(x.view()), ConfigError);
    const std::vector<double> up(2, 1.0);
    CHECK_THROWS_AS(gradient_wrt_win(model, x.view(), up), ConfigError);
  }
}

TEST_SUITE("mapping gradient") {
  TEST_CASE("linear with upstream e_k puts x in column k") {
    Rng rng(6);
    MappingModel model(MappingKind::kLinear, 10, 8);
    model.randomize(rng);
    const auto x = random_sparse(10, 4, rng);
    std::vector<double> up(8, 0.0);
    up[3] = 1.0;
    const auto dense = gradient_wrt_win(model, x.view(), up).to_dense(10);
    for (std::size_t r = 0; r < 10; ++r) {
      for (std::size_t c = 0; c < 8; ++c) {
        double expected = 0.0;
        if (c == 3) {
          for (std::size_t k = 0; k < x.idx.size(); ++k) {
            if (x.idx[k] == r) expected = x.val[k];
          }
        }
        CHECK(dense[r * 8 + c] == expected);
      }
    }
  }

  TEST_CASE("dead ReLU unit has zero gradient, including at the kink") {
    MappingModel model(MappingKind::kReLU, 3, 3);
    auto w = model.weights();
    // z = (-1, 0, 2) for x = e_0.
    w[0] = -1.0;
    w[1] = 0.0;
    w[2] = 2.0;
    const SparseX x{{0}, {1.0}};
    const std::vector<double> up{1.0, 1.0, 1.0};
    const auto g = gradient_wrt_win(model, x.view(), up);
    CHECK(g.dz == std::vector<double>{0.0, 0.0, 1.0});
  }

  TEST_CASE("sparse support: rows outside nnz(x) are exactly zero") {
    Rng rng(7);
    for (auto kind : kAllKinds) {
      MappingModel model(kind, 20, 8);
      randomize_weights(model, rng, 1.0);
      const auto x = random_sparse(20, 5, rng);
      std::vector<double> up(8);
      for (double& u : up) u = std::uniform_real_distribution<double>(-1, 1)(rng);
      const auto dense = gradient_wrt_win(model, x.view(), up).to_dense(20);
      for (std::uint32_t r = 0; r < 20; ++r) {
        if (std::find(x.idx.begin(), x.idx.end(), r) != x.idx.end()) continue;
        for (std::size_t c = 0; c < model.hidden_dim(); ++c) CHECK(dense[r * model.hidden_dim() + c] == 0.0);
      }
    }
  }

  TEST_CASE("matches central finite differences for every kind") {
    Rng rng(8);
    const double h = 1e-6;
    for (auto kind : kAllKinds) {
      for (auto scale : {KernelScale::kInputDim, KernelScale::kOutputDim}) {
        if (kind != MappingKind::kKernel && scale == KernelScale::kOutputDim) continue;
        int instances = 0;
        while (instances < 20) {
          MappingModel model(kind, 10, 8, scale);
          randomize_weights(model, rng, 1.0);
          const auto x = random_sparse(10, 1 + rng() % 6, rng);
          std::vector<double> z(model.hidden_dim());
          model.preactivate(x.view(), z);
          // Keep ReLU away from its kink, where the derivative is undefined.
          if (kind == MappingKind::kReLU &&
              std::any_of(z.begin(), z.end(), [](double v) { return std::abs(v) < 1e-3; })) {
            continue;
          }
          ++instances;
          std::vector<double> up(8);
          for (double& u : up) u = std::uniform_real_distribution<double>(-1, 1)(rng);
          const auto analytic = gradient_wrt_win(model, x.view(), up).to_dense(10);

          std::vector<double> numeric(analytic.size());
          auto w = model.weights();
          for (std::size_t k = 0; k < w.size(); ++k) {
            const double saved = w[k];
            w[k] = saved + h;
            const double fp = dot(up, model.embed(x.view()));
            w[k] = saved - h;
            const double fm = dot(up, model.embed(x.view()));
            w[k] = saved;
            numeric[k] = (fp - fm) / (2 * h);
          }
          std::vector<double> diff(analytic.size());
          for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = analytic[k] - numeric[k];
          const double rel = norm(diff) / std::max({norm(analytic), norm(numeric), 1e-300});
          CHECK(rel < 1e-5);
        }
      }
    }
  }
}

TEST_SUITE("model file") {
  TEST_CASE("round trip of float-representable weights is exact") {
    attri2vec::testing::TempDir dir;
    Rng rng(9);
    for (auto kind : kAllKinds) {
      MappingModel model(kind, 7, 6, KernelScale::kOutputDim);
      model.randomize(rng);
      for (double& w : model.weights()) w = static_cast<float>(w);
      save_model(model, dir / "m.bin", "{\"note\": 1}");
      CHECK(std::filesystem::file_size(dir / "m.bin") == 32 + 4 * model.weights().size());
      CHECK(attri2vec::testing::read_file(dir / "m.bin.json") == "{\"note\": 1}\n");
      const auto loaded = load_model(dir / "m.bin");
      CHECK(loaded == model);
      save_model(loaded, dir / "n.bin");
      CHECK(attri2vec::testing::read_file(dir / "m.bin") == attri2vec::testing::read_file(dir / "n.bin"));
    }
  }

  TEST_CASE("header layout") {
    attri2vec::testing::TempDir dir;
    const MappingModel model(MappingKind::kKernel, 3, 4);
    save_model(model, dir / "m.bin");
    const auto bytes = attri2vec::testing::read_file(dir / "m.bin");
    CHECK(bytes.substr(0, 4) == "A2VM");
    CHECK(static_cast<unsigned char>(bytes[8]) == 2);
    CHECK(static_cast<unsigned char>(bytes[12]) == 3);
    CHECK(static_cast<unsigned char>(bytes[20]) == 4);
  }

  TEST_CASE("corrupt files are rejected") {
    attri2vec::testing::TempDir dir;
    attri2vec::testing::write_file(dir / "bad.bin", "not a model at all, just some text....");
    CHECK_THROWS_AS(load_model(dir / "bad.bin"), IoError);
    const MappingModel model(MappingKind::kLinear, 3, 4);
    save_model(model, dir / "m.bin");
    std::filesystem::resize_file(dir / "m.bin", 40);
    CHECK_THROWS_AS(load_model(dir / "m.bin"), IoError);
    CHECK_THROWS_AS(load_model(dir / "missing.bin"), IoError);
  }
}
