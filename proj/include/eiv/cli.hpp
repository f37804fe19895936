// Copyright 2026  EIV Toolkit Authors
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

#ifndef EIV_CLI_HPP
#define EIV_CLI_HPP

#include <string>
#include <vector>

namespace eiv {

/// Exit codes by error category, one per exception class.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;  // also CLI usage errors
inline constexpr int kExitInput = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitFormat = 5;

/// Runs one subcommand (args exclude the program name, e.g.
/// {"train-ubm", "--manifest", ...}).  Never calls exit(); errors are printed
/// to stderr and mapped to the codes above, so tests can call this directly.
int run_command(const std::vector<std::string>& args);

}  // namespace eiv

#endif  // EIV_CLI_HPP
