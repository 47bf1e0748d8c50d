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

#include "cli/manifest.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "btrank/error.h"

namespace btrank::cli {

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kInvalidInput, "SHA-256 computation failed");
  }
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int k = 0; k < length; ++k) {
    hex << std::setw(2) << static_cast<int>(digest[k]);
  }
  return hex.str();
}

std::string FileSha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kInvalidInput, "cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Sha256Hex(buffer.str());
}

nlohmann::json ManifestToJson(const Manifest& manifest) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& path : manifest.inputs) {
    inputs.push_back({{"path", path.string()}, {"sha256", FileSha256(path)}});
  }
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return {{"command", manifest.command},
          {"config", manifest.config},
          {"config_hash", Sha256Hex(manifest.config.dump())},
          {"seed", manifest.seed},
          {"version", BTRANK_VERSION},
          {"inputs", inputs},
          {"outputs", manifest.outputs},
          {"details", manifest.details},
          {"timestamp", stamp.str()}};
}

void WriteManifest(const std::filesystem::path& dir, const Manifest& manifest) {
  std::ofstream out(dir / "manifest.json");
  if (!out) {
    throw Error(ErrorCode::kInvalidInput,
                "cannot write " + (dir / "manifest.json").string());
  }
  out << ManifestToJson(manifest).dump(2) << '\n';
}

}  // namespace btrank::cli
