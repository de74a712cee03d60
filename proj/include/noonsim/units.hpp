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

#include <cmath>

namespace noon::units {

// Reduced Planck constant in eV s.
inline constexpr double kHbarEvS = 6.582119569e-16;

// Energies are measured in units of sqrt(2) * g_ref, times in 1 / (sqrt(2) * g_ref).
// With this choice the reference two-photon coupling is 1 / sqrt(2).
inline const double kReferenceCoupling = 1.0 / std::sqrt(2.0);

// Energy unit in eV for a reference coupling given in eV.
inline double energy_unit_ev(double g_ref_ev) { return std::sqrt(2.0) * g_ref_ev; }

// Converts a rate in internal units to s^-1.
inline double rate_to_hz(double rate, double g_ref_ev) {
    return rate * energy_unit_ev(g_ref_ev) / kHbarEvS;
}

// Converts an internal time to seconds.
inline double time_to_seconds(double t, double g_ref_ev) {
    return t * kHbarEvS / energy_unit_ev(g_ref_ev);
}

}  // namespace noon::units
