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

#include "noonsim/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "noonsim/errors.hpp"

namespace noon {

SwElement sw_matrix_element(const ParamsN2& p, Branch s, int pump_port) {
    p.validate();
    if (pump_port != 1 && pump_port != 2) throw ConfigError("pump port must be 1 or 2");
    const double e_s = ges_energy_n2(p.delta1, p.g2p, s);
    const double phi_s = std::atan(e_s / p.g2p);
    const auto one = one_photon_eigensystem(p);
    const double dp = one.e_plus - p.pump_detuning;
    const double dm = one.e_minus - p.pump_detuning;
    const double scale = std::max({1.0, std::abs(one.e_plus), std::abs(one.e_minus)});
    if (std::abs(dp) < 1e-12 * scale || std::abs(dm) < 1e-12 * scale)
        throw ConfigError("pump is resonant with a one-photon level; second-order coupling diverges");
    const double c2 = std::pow(std::cos(one.phi), 2);
    const double s2 = std::pow(std::sin(one.phi), 2);
    const double om2 = p.rabi * p.rabi;

    SwElement out;
    out.pump_port = pump_port;
    if (pump_port == 2) {
        out.prefactor = std::sin(phi_s) * om2;
        out.path_plus = s2 / dp;
        out.path_minus = c2 / dm;
    } else {
        out.prefactor = -std::sin(phi_s) * om2;
        out.path_plus = c2 / dp;
        out.path_minus = s2 / dm;
    }
    out.xi = out.prefactor * (out.path_plus + out.path_minus);
    return out;
}

double analytic_cw_population(double xi, double gamma_2002) {
    if (!(gamma_2002 > 0.0)) throw ConfigError("decay rate must be positive");
    return 4.0 * xi * xi / (gamma_2002 * gamma_2002);
}

double analytic_cw_rate(double xi, const ParamsN2& p, Branch s, double window) {
    if (!(window >= 0.0)) throw ConfigError("window must be non-negative");
    if (!(p.kappa > 0.0)) throw ConfigError("kappa must be positive");
    const double e_s = ges_energy_n2(p.delta1, p.g2p, s);
    const double sn = std::sin(std::atan(e_s / p.g2p));
    const double gamma = 2.0 * p.kappa * sn * sn;
    return 2.0 * p.kappa * p.kappa * window * sn * sn * analytic_cw_population(xi, gamma);
}

}  // namespace noon
