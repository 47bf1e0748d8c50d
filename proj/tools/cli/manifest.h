// Copyright 2026 The btrank Authors.
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

// Run manifests: one manifest.json per output directory recording what
// produced it.

#ifndef BTRANK_TOOLS_CLI_MANIFEST_H_
#define BTRANK_TOOLS_CLI_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace btrank::cli {

// Lowercase hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);
// Throws Error(kInvalidInput) when the file cannot be read.
std::string FileSha256(const std::filesystem::path& path);

struct Manifest {
  std::string command;
  // Effective configuration of the run; hashed in canonical (sorted-key,
  // compact) form.
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::string> outputs;
  // Command-specific facts about the run, such as failed methods.
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json ManifestToJson(const Manifest& manifest);
void WriteManifest(const std::filesystem::path& dir, const Manifest& manifest);

}  // namespace btrank::cli

#endif  // BTRANK_TOOLS_CLI_MANIFEST_H_
