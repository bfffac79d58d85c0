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

#include "manifest.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "attri2vec/common.hpp"

namespace attri2vec::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read error while hashing '" + path.string() + "'");
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

Manifest::Manifest(std::string subcommand, std::vector<std::string> argv) {
  json_["tool"] = "attri2vec";
  json_["format_version"] = 1;
  json_["subcommand"] = std::move(subcommand);
  json_["argv"] = std::move(argv);
  json_["config"] = nlohmann::ordered_json::object();
  json_["seeds"] = nlohmann::ordered_json::object();
  json_["inputs"] = nlohmann::ordered_json::object();
  json_["outputs"] = nlohmann::ordered_json::object();
}

void Manifest::add_input(const std::filesystem::path& path) {
  json_["inputs"][path.string()] = sha256_file(path);
}

void Manifest::add_output(const std::filesystem::path& path) {
  json_["outputs"][path.string()] = sha256_file(path);
  outputs_.push_back(path);
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << json_.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

nlohmann::ordered_json read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  try {
    auto j = nlohmann::ordered_json::parse(in);
    if (!j.contains("argv") || !j["argv"].is_array()) throw ParseError(path.string(), 1, "manifest has no argv");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
}

}  // namespace attri2vec::cli
