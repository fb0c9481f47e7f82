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

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "mcmlab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mcmlab: Pauli noise learning for mid-circuit measurements"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    uint32_t jobs = 1;
    uint64_t seed = 0;
    bool have_seed = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--jobs", jobs, "worker threads");
        cmd->add_option_function<uint64_t>(
            "--seed",
            [&](uint64_t s) {
                seed = s;
                have_seed = true;
            },
            "override the config seed");
    };

    for (const char* name : {"simulate", "mcmcb", "sweep", "ptg", "lscb", "report"}) {
        add_common(app.add_subcommand(name));
    }

    CLI11_PARSE(app, argc, argv);

    mcmlab::cli::RunContext ctx;
    if (!out_dir.empty()) {
        ctx.out_dir = out_dir;
    } else if (const char* env = std::getenv("MCMLAB_OUT")) {
        ctx.out_dir = env;
    }
    ctx.jobs = jobs;
    if (have_seed) ctx.seed_override = seed;

    std::string command = app.get_subcommands().front()->get_name();
    try {
        return mcmlab::cli::dispatch(command, config_path, ctx);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
