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

#include <iosfwd>
#include <string>
#include <vector>

#include "attri2vec/common.hpp"

namespace attri2vec::cli {

/// Exit statuses. Errors map by category; a replay whose outputs differ from
/// the manifest exits with kReplayMismatch.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kIo = 3,
  kParse = 4,
  kNumeric = 5,
  kReplayMismatch = 6,
};

int exit_code(ErrorCategory category);

/// Runs one invocation. `args` excludes the program name. Reports go to
/// `out`; progress and error messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default for --threads: $ATTRI2VEC_THREADS when set, else 1.
std::size_t default_threads();

}  // namespace attri2vec::cli
