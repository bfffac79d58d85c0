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

#include "attri2vec/common.hpp"

namespace attri2vec {

Rng derive_rng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_a), static_cast<std::uint32_t>(stream_a >> 32),
                    static_cast<std::uint32_t>(stream_b), static_cast<std::uint32_t>(stream_b >> 32)};
  return Rng(seq);
}

const char* to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kParse:
      return "parse";
    case ErrorCategory::kNumeric:
      return "numeric";
  }
  return "unknown";
}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(ErrorCategory::kParse, source + ":" + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace attri2vec
