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

namespace noon {

// Rates of the cascaded decay |GES> -> |1P,+/-> -> |G,00>.
struct DecayParams {
    double gamma_2002 = 0.0;  // GES decay rate, kappa * eta
    double gamma_1p = 0.0;    // one-photon decay rate, kappa
    double eta = 0.0;         // 2 sin^2(phi_s)

    // Throws ConfigError for kappa <= 0.
    static DecayParams from_mixing_angle(double phi_s, double kappa);
};

struct DecayPopulations {
    double p_2002 = 0.0;
    double p_1p_plus = 0.0;
    double p_1p_minus = 0.0;
    double p_g00 = 0.0;
    double one_photon() const { return p_1p_plus + p_1p_minus; }
};

// Closed-form populations after preparing the GES at t = 0. The degenerate case
// gamma_2002 == gamma_1p is handled by its limit.
DecayPopulations decay_populations(const DecayParams& p, double t);

struct PeakInfo {
    double time = 0.0;
    double value = 0.0;
};

// Maximum of the total one-photon population: time ln(eta) / (kappa (eta - 1)),
// value exp(ln(eta) / (1 - eta)).
PeakInfo one_photon_peak(const DecayParams& p);

}  // namespace noon
