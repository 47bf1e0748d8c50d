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

// Command-line front end. Exit codes: 0 success, 2 input error, 3 numerical
// failure.

#ifndef BTRANK_TOOLS_CLI_CLI_H_
#define BTRANK_TOOLS_CLI_CLI_H_

#include <string>
#include <vector>

namespace btrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericalFailure = 3;

// Parses `args` (without the program name) and runs the selected command.
int Run(const std::vector<std::string>& args);

}  // namespace btrank::cli

#endif  // BTRANK_TOOLS_CLI_CLI_H_
