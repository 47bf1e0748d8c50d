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

#ifndef BTRANK_ERROR_H_
#define BTRANK_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace btrank {

enum class ErrorCode {
  kInvalidInput,
  kParse,
  kDisconnected,
  kDivergent,
  kNotConverged,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure raised by the library. Numerical failures (disconnected
// comparison graph, divergent or unconverged solvers) carry the player
// indices involved when there are any.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<int> players = {})
      : std::runtime_error(message), code_(code), players_(std::move(players)) {}

  ErrorCode code() const { return code_; }
  const std::vector<int>& players() const { return players_; }

  bool is_numerical() const {
    return code_ == ErrorCode::kDisconnected ||
           code_ == ErrorCode::kDivergent || code_ == ErrorCode::kNotConverged;
  }

 private:
  ErrorCode code_;
  std::vector<int> players_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput:
      return "InvalidInput";
    case ErrorCode::kParse:
      return "Parse";
    case ErrorCode::kDisconnected:
      return "Disconnected";
    case ErrorCode::kDivergent:
      return "Divergent";
    case ErrorCode::kNotConverged:
      return "NotConverged";
  }
  return "Unknown";
}

}  // namespace btrank

#endif  // BTRANK_ERROR_H_
