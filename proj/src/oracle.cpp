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

#include "noonsim/oracle.hpp"

#include <cmath>

#include "noonsim/errors.hpp"

namespace noon {

DecayParams DecayParams::from_mixing_angle(double phi_s, double kappa) {
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive for the decay oracle");
    if (!std::isfinite(phi_s)) throw ConfigError("mixing angle is not finite");
    DecayParams p;
    const double s = std::sin(phi_s);
    p.eta = 2.0 * s * s;
    p.gamma_1p = kappa;
    p.gamma_2002 = kappa * p.eta;
    return p;
}

DecayPopulations decay_populations(const DecayParams& p, double t) {
    if (t < 0.0) throw ConfigError("decay time must be non-negative");
    if (!(p.gamma_1p > 0.0) || p.gamma_2002 < 0.0) throw ConfigError("invalid decay rates");
    const double g = p.gamma_2002;
    const double k = p.gamma_1p;
    DecayPopulations out;
    out.p_2002 = std::exp(-g * t);
    double one;
    if (std::abs(g - k) <= 1e-9 * k) {
        one = g * t * std::exp(-g * t);
    } else {
        // exp(-k t) - exp(-g t) written to avoid cancellation for g close to k.
        one = g / (g - k) * std::exp(-k * t) * (-std::expm1(-(g - k) * t));
    }
    out.p_1p_plus = 0.5 * one;
    out.p_1p_minus = 0.5 * one;
    out.p_g00 = 1.0 - out.p_2002 - one;
    return out;
}

PeakInfo one_photon_peak(const DecayParams& p) {
    if (!(p.gamma_1p > 0.0) || !(p.eta > 0.0)) throw ConfigError("invalid decay rates");
    PeakInfo out;
    const double eta = p.eta;
    if (std::abs(eta - 1.0) <= 1e-9) {
        out.time = 1.0 / p.gamma_1p;
        out.value = std::exp(-1.0);
        return out;
    }
    out.time = std::log(eta) / (p.gamma_1p * (eta - 1.0));
    out.value = std::exp(std::log(eta) / (1.0 - eta));
    return out;
}

}  // namespace noon
