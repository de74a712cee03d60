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

#include "noonsim/design.hpp"
#include "noonsim/model.hpp"

namespace noon {

// Second-order (Schrieffer-Wolff) coupling xi = <GES| H_eff^(2) |G,00> of the weak pump.
struct SwElement {
    double xi = 0.0;
    double prefactor = 0.0;   // -sin(phi_s) Omega^2 for port 1, +sin(phi_s) Omega^2 for port 2
    double path_plus = 0.0;   // contribution through |1P,+>, without the prefactor
    double path_minus = 0.0;  // contribution through |1P,->, without the prefactor
    int pump_port = 2;
};

// Uses p.rabi, p.pump_detuning and the GES of branch s. Throws ConfigError when a
// one-photon level is resonant with the pump.
SwElement sw_matrix_element(const ParamsN2& p, Branch s, int pump_port);

// Steady-state GES population 4 xi^2 / Gamma^2 for weak pumping.
double analytic_cw_population(double xi, double gamma_2002);
// Two-photon detection rate 8 kappa^2 window sin^2(phi_s) xi^2 / Gamma^2.
double analytic_cw_rate(double xi, const ParamsN2& p, Branch s, double window);

}  // namespace noon
