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

#include "noonsim/model.hpp"

#include <cmath>
#include <string>

#include "noonsim/errors.hpp"

namespace noon {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ConfigError(std::string("parameter ") + name + " is not finite");
}

void require_port(int port) {
    if (port != 1 && port != 2)
        throw ConfigError("pump port " + std::to_string(port) + " must be 1 or 2");
}

void require_topology(const SpacePtr& space, Topology t) {
    if (space->model().topology != t)
        throw ConfigError("Hamiltonian for " + to_string(t) + " requested on a " +
                          to_string(space->model().topology) + " space");
}

// Photon part: sum_j delta_j n_j + j (a1^dag a2 + h.c.).
Eigen::MatrixXcd photon_part(const SpacePtr& space, double d1, double d2, double j) {
    const auto a1 = annihilator(space, 1).m;
    const auto a2 = annihilator(space, 2).m;
    Eigen::MatrixXcd h = d1 * a1.adjoint() * a1 + d2 * a2.adjoint() * a2;
    Eigen::MatrixXcd hop = a1.adjoint() * a2;
    h += j * (hop + hop.adjoint());
    return h;
}

// g (a_c^2 |hi><lo| + h.c.).
Eigen::MatrixXcd pair_emission(const SpacePtr& space, QdState lo, QdState hi, int cavity, double g) {
    const auto a = annihilator(space, cavity).m;
    Eigen::MatrixXcd t = (a * a) * qd_transition(space, lo, hi).m;
    return g * (t + t.adjoint());
}

Eigen::MatrixXcd n4_common(const ParamsN4& p, const SpacePtr& space, int qd2_cavity) {
    Eigen::MatrixXcd h = photon_part(space, p.delta1, p.delta2, p.j);
    h += p.delta_b * (qd_projector(space, QdState::B1).m - qd_projector(space, QdState::B2).m);
    h += pair_emission(space, QdState::G, QdState::B1, 1, p.g1);
    h += pair_emission(space, QdState::B2, QdState::Q, 1, p.g1);
    h += pair_emission(space, QdState::G, QdState::B2, qd2_cavity, p.g2);
    h += pair_emission(space, QdState::B1, QdState::Q, qd2_cavity, p.g2);
    return h;
}

}  // namespace

void ParamsN2::validate() const {
    for (auto [v, n] : {std::pair{g2p, "g2p"}, {j, "j"}, {delta1, "delta1"}, {delta2, "delta2"},
                        {kappa, "kappa"}, {pump_detuning, "pump_detuning"}, {rabi, "rabi"}})
        require_finite(v, n);
    if (kappa < 0.0) throw ConfigError("kappa must be non-negative");
    require_port(pump_port);
}

void ParamsN4::validate() const {
    for (auto [v, n] : {std::pair{g1, "g1"}, {g2, "g2"}, {j, "j"}, {delta1, "delta1"},
                        {delta2, "delta2"}, {delta_b, "delta_b"}, {kappa, "kappa"},
                        {pump_detuning, "pump_detuning"}, {rabi, "rabi"}})
        require_finite(v, n);
    if (kappa < 0.0) throw ConfigError("kappa must be non-negative");
    require_port(pump_port);
}

double effective_coupling(const MicroscopicParams& p) {
    if (!(p.chi > 0.0)) throw ConfigError("biexciton binding energy chi must be positive");
    return 2.0 * p.g * p.g / p.chi;
}

bool beyond_two_photon_regime(const MicroscopicParams& p) {
    if (!(p.chi > 0.0)) throw ConfigError("biexciton binding energy chi must be positive");
    return std::abs(p.g) > p.chi / 4.0;
}

OperatorMatrix hamiltonian_n2(const ParamsN2& p, const SpacePtr& space) {
    p.validate();
    require_topology(space, Topology::TwoPhoton);
    Eigen::MatrixXcd h = photon_part(space, p.delta1, p.delta2, p.j);
    h += pair_emission(space, QdState::G, QdState::B, 1, p.g2p);
    return {space, h};
}

OperatorMatrix hamiltonian_n4(const ParamsN4& p, const SpacePtr& space) {
    p.validate();
    require_topology(space, Topology::FourPhoton);
    return {space, n4_common(p, space, 2)};
}

OperatorMatrix hamiltonian_n4_variant(const ParamsN4& p, const SpacePtr& space) {
    p.validate();
    require_topology(space, Topology::FourPhotonVariant);
    return {space, n4_common(p, space, 1)};
}

OperatorMatrix hamiltonian(const ParamsN4& p, const SpacePtr& space) {
    if (space->model().topology == Topology::FourPhotonVariant) return hamiltonian_n4_variant(p, space);
    return hamiltonian_n4(p, space);
}

OperatorMatrix rotating_frame(const OperatorMatrix& h, double pump_detuning) {
    return {h.space, h.m - pump_detuning * total_excitation_operator(h.space).m};
}

OperatorMatrix pump_term(double rabi, int port, const SpacePtr& space) {
    require_port(port);
    require_finite(rabi, "rabi");
    const auto a = annihilator(space, port).m;
    return {space, rabi * (a + a.adjoint())};
}

OperatorMatrix pump_term(const ParamsN2& p, const SpacePtr& space) {
    return pump_term(p.rabi, p.pump_port, space);
}

OperatorMatrix pump_term(const ParamsN4& p, const SpacePtr& space) {
    return pump_term(p.rabi, p.pump_port, space);
}

}  // namespace noon
