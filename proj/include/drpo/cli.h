// Copyright 2026 The DRPO Authors.
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

#ifndef DRPO_CLI_H_
#define DRPO_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace drpo::cli {

/// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
enum ExitCode { kOk = 0, kUsage = 1, kDataFailure = 2, kNumericFailure = 3 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Diagnostics and progress go to `log`; `out` receives the
/// report table only.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace drpo::cli

#endif  // DRPO_CLI_H_
