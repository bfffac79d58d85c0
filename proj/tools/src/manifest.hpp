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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace attri2vec::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Run record: argv, resolved configuration, seeds and content hashes of
/// every input and output file.
class Manifest {
 public:
  Manifest(std::string subcommand, std::vector<std::string> argv);

  nlohmann::ordered_json& config() { return json_["config"]; }
  void set_seed(const std::string& name, std::uint64_t seed) { json_["seeds"][name] = seed; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  const std::vector<std::filesystem::path>& outputs() const noexcept { return outputs_; }
  const nlohmann::ordered_json& json() const noexcept { return json_; }

  void write(const std::filesystem::path& path) const;

 private:
  nlohmann::ordered_json json_;
  std::vector<std::filesystem::path> outputs_;
};

nlohmann::ordered_json read_manifest(const std::filesystem::path& path);

}  // namespace attri2vec::cli
