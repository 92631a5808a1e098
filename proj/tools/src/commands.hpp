// Copyright 2026 The privmoment Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVMOMENT_TOOLS_COMMANDS_HPP_
#define PRIVMOMENT_TOOLS_COMMANDS_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace privmoment::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

struct RunEnv {
  /// Value of PRIVMOMENT_SEED, used when --seed is absent.
  std::optional<std::string> env_seed;
  /// Emit the leading timestamp line.
  bool timestamp = true;
};

/// Runs one invocation. `args` excludes the program name. The report goes to
/// --report when given, otherwise to `out`; diagnostics go to `err`.
/// Returns 0 on success, 2 when an estimator returns its failure outcome and
/// 1 on usage or data errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const RunEnv& env);

}  // namespace privmoment::cli

#endif  // PRIVMOMENT_TOOLS_COMMANDS_HPP_
