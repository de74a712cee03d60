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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "noonsim/design.hpp"
#include "noonsim/dynamics.hpp"

namespace noon {

// Scenario file format (INI, one section per block):
//
//   [scenario]  system = n2 | n4 | n4-variant, run = <command>
//   [params]    g2p, j, delta1, delta2, branch, kappa, pump_detuning, rabi, pump_port,
//               g1, g2, ratio, delta_b
//   [grid]      <axis> = min:max:points[:log]
//   [pulse]     power, log_duration, peak_factor, end_factor, samples
//   [decay]     duration, samples
//   [coincidence] window_factors = min:max:points[:log]
//   [rate]      g_ref_ev
//   [numerics]  n_max, photon_cap, rtol, atol, steady_state, n_max_list
//   [output]    prefix
//
// Energies are in units of sqrt(2) g_ref. Unknown keys are rejected.

inline constexpr int kScenarioSchemaVersion = 1;

struct GridAxis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    bool log = false;

    std::vector<double> values() const;
};

// Parses "min:max:points[:log]". Throws ConfigError with the field name on failure.
GridAxis parse_grid_axis(const std::string& name, const std::string& text);

class Scenario {
public:
    Scenario() = default;

    static Scenario from_file(const std::filesystem::path& path);
    static Scenario from_string(const std::string& text, const std::string& origin = "<string>");

    // Sets section.key; the value is validated like file content.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::optional<GridAxis> grid(const std::string& axis) const;
    // Comma-separated integer list.
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    std::string system() const { return get_string("scenario.system", "n2"); }
    Topology topology() const;
    std::string run() const { return get_string("scenario.run", ""); }

    // Two-photon parameters, falling back to base for missing keys. Unless params.delta2
    // is given, delta2 follows the dark-state condition of params.branch (default minus).
    // pump_detuning defaults to delta2.
    ParamsN2 params_n2(const ParamsN2& base) const;
    // Four-photon parameters. Missing tuning keys are filled from solve_ges_n4 at
    // params.ratio; pump_detuning defaults to E_4004 / 4.
    ParamsN4 params_n4() const;

    int n_max(int fallback) const { return get_int("numerics.n_max", fallback); }
    int photon_cap(int fallback = -1) const { return get_int("numerics.photon_cap", fallback); }
    IntegratorOptions integrator() const;
    SteadyStateOptions steady_state() const;

    // Sorted key = value lines; independent of input formatting and order.
    std::string canonical() const;
    // 64-bit FNV-1a of canonical(), as 16 hex digits.
    std::string hash() const;

private:
    boost::property_tree::ptree tree_;
    std::string origin_ = "<defaults>";
};

std::uint64_t fnv1a(const std::string& data);

}  // namespace noon
