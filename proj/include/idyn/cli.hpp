// Copyright 2026 The idyn Authors
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

// Command-line front end. Kept in a library so tests can drive it in
// process.

#ifndef IDYN_CLI_HPP_
#define IDYN_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace idyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // divergence, non-finite results
inline constexpr int kExitUsage = 2;    // bad flags, missing or invalid files

inline constexpr const char* kVersion = "0.1.0";

// Parses args (args[0] is the program name) and runs the subcommand.
// Summaries go to out, diagnostics to err. Returns an exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Help text of the top-level command, or of one subcommand path such as
// {"analyze", "cutoff"}.
std::string help_text(const std::vector<std::string>& path = {});

}  // namespace idyn::cli

#endif  // IDYN_CLI_HPP_
