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

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace attri2vec {

/// Dense node index in 0..|V|-1.
using NodeIndex = std::uint32_t;

/// Engine used by every stochastic component. Each worker owns one.
using Rng = std::mt19937_64;

/// Engine seeded from (seed, stream_a, stream_b); distinct tuples give independent streams.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream_a = 0, std::uint64_t stream_b = 0);

enum class ErrorCategory { kConfig, kIo, kParse, kNumeric };

const char* to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

/// Read-only view of one sparse attribute vector; indices strictly ascending.
struct SparseVectorView {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
};

}  // namespace attri2vec
