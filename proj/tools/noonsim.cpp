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

// Command-line front end: noonsim <command> [--config FILE] [--out DIR] [--n-max N] [--workers N]

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "noonsim/commands.hpp"
#include "noonsim/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

const std::map<std::string, std::string> kDescriptions = {
    {"design-n2", "two-photon dark-state condition and GES amplitudes"},
    {"fig9", "four-photon design versus coupling ratio g2/g1"},
    {"sweep-delta2", "cw concurrence and trace distance versus cavity-2 detuning"},
    {"concurrence-map", "cw concurrence over a (kappa, rabi) grid"},
    {"pulse", "Gaussian-pulse preparation of the GES"},
    {"pulse-map", "GES population after the pulse over a (power, duration) grid"},
    {"decay", "pulse followed by free decay, compared with the rate-equation solution"},
    {"coincidence", "windowed coincidence counts and the which-path law"},
    {"rate", "maximum two-photon detection rate"},
    {"check-candidate", "flow-graph candidacy of the configured system"},
    {"convergence", "truncation convergence of the cw concurrence"},
    {"tomography", "tomography matrix of a single cw steady state"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation of quantum-dot NOON-state photon sources"};
    app.set_version_flag("--version", std::string("noonsim ") + noon::kToolVersion);
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    int n_max = -1;
    int workers = 0;
    for (const auto& name : noon::command_names()) {
        const auto d = kDescriptions.find(name);
        auto* sub = app.add_subcommand(name, d == kDescriptions.end() ? "" : d->second);
        sub->add_option("--config", config, "scenario file (INI)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--n-max", n_max, "photon truncation per cavity")->check(CLI::PositiveNumber);
        sub->add_option("--workers", workers, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    }
    auto* run = app.add_subcommand("run", "run the command named by scenario.run");
    run->add_option("--config", config, "scenario file (INI)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--n-max", n_max, "photon truncation per cavity")->check(CLI::PositiveNumber);
    run->add_option("--workers", workers, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        noon::RunContext ctx;
        if (!config.empty()) ctx.scenario = noon::Scenario::from_file(config);
        if (n_max > 0) ctx.scenario.set("numerics.n_max", std::to_string(n_max));
        ctx.out_dir = out_dir;
        ctx.workers = workers;
        ctx.out = &std::cout;
        std::string command = app.get_subcommands().front()->get_name();
        if (command == "run") {
            command = ctx.scenario.run();
            if (command.empty()) throw noon::ConfigError("scenario.run: missing");
        }
        const auto res = noon::run_command(command, ctx);
        for (const auto& f : res.files) std::cerr << "wrote " << f.string() << "\n";
        if (res.failed_points > 0) {
            std::cerr << "error: " << res.failed_points << " grid point(s) failed; first: " << res.first_failure
                      << "\n";
            return kExitNumeric;
        }
        return 0;
    } catch (const noon::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const noon::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
