// Copyright 2026 The noonsim Authors
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
#include <iosfwd>
#include <string>
#include <vector>

#include "noonsim/scenario.hpp"

namespace noon {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunContext {
    Scenario scenario;
    std::filesystem::path out_dir = ".";
    int workers = 0;  // 0: hardware concurrency
    std::ostream* out = nullptr;  // human-readable summary, may be null
};

struct RunResult {
    std::vector<std::filesystem::path> files;
    int failed_points = 0;  // grid points that raised NumericError
    std::string first_failure;
};

// Names accepted by run_command, in display order.
const std::vector<std::string>& command_names();

// Runs a named command. Everything is computed before any file is written, so
// configuration errors leave the output directory untouched. Per-point numeric
// failures of grid commands are recorded in the output and counted in the result;
// other errors propagate as ConfigError or NumericError.
RunResult run_command(const std::string& name, const RunContext& ctx);

}  // namespace noon
