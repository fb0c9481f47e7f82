// Copyright 2026 The mcmlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>

#include "mcmlab/json_io.hpp"

namespace mcmlab::cli {

struct RunContext {
    std::string out_dir = ".";
    uint32_t jobs = 1;
    std::optional<uint64_t> seed_override;
    std::string config_dir = ".";  // for resolving relative file references
};

/// Commands return a process exit code; config errors raise
/// std::invalid_argument which the driver maps to exit code 2.
int cmd_simulate(const json& config, const RunContext& ctx);
int cmd_mcmcb(const json& config, const RunContext& ctx);
int cmd_sweep(const json& config, const RunContext& ctx);
int cmd_ptg(const json& config, const RunContext& ctx);
int cmd_lscb(const json& config, const RunContext& ctx);
int cmd_report(const json& config, const RunContext& ctx);

int dispatch(const std::string& command, const std::string& config_path, const RunContext& ctx);

}  // namespace mcmlab::cli
