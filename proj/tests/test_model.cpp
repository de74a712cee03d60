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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "noonsim/errors.hpp"
#include "noonsim/model.hpp"

using namespace noon;

namespace {

double hermiticity_error(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double commutator_with_excitation(const OperatorMatrix& h) {
    const auto n = total_excitation_operator(h.space).m;
    return (n * h.m - h.m * n).cwiseAbs().maxCoeff();
}

ParamsN4 sample_n4() {
    ParamsN4 p;
    p.j = 1.3;
    p.delta1 = -0.4;
    p.delta2 = 0.9;
    p.delta_b = 1.7;
    p.g1 = 0.6;
    p.g2 = 1.1;
    return p;
}

}  // namespace

TEST_CASE("effective Hamiltonians are Hermitian and conserve total excitation") {
    ParamsN2 p2;
    p2.j = 1.7;
    p2.delta1 = 0.3;
    p2.delta2 = -0.8;
    const auto h2 = hamiltonian_n2(p2, build_space({Topology::TwoPhoton}, 5));
    CHECK(hermiticity_error(h2.m) < 1e-14);
    CHECK(commutator_with_excitation(h2) < 1e-13);

    const auto p4 = sample_n4();
    for (auto t : {Topology::FourPhoton, Topology::FourPhotonVariant}) {
        const auto h = hamiltonian(p4, build_space({t}, 5));
        CHECK(hermiticity_error(h.m) < 1e-14);
        CHECK(commutator_with_excitation(h) < 1e-13);
    }
}

TEST_CASE("two-photon Hamiltonian matrix elements") {
    ParamsN2 p;
    p.j = 2.0;
    p.delta1 = 1.0;
    p.delta2 = -0.2;
    const auto s = build_space({Topology::TwoPhoton}, 3);
    const auto h = hamiltonian_n2(p, s).m;
    auto el = [&](BasisLabel a, BasisLabel b) { return h(s->index_of(a), s->index_of(b)); };
    CHECK(std::abs(el({QdState::B, 0, 0}, {QdState::G, 2, 0}) - std::sqrt(2.0) * p.g2p) < 1e-14);
    CHECK(std::abs(el({QdState::B, 0, 0}, {QdState::G, 0, 2})) < 1e-14);
    CHECK(std::abs(el({QdState::G, 1, 0}, {QdState::G, 0, 1}) - p.j) < 1e-14);
    CHECK(std::abs(el({QdState::G, 2, 1}, {QdState::G, 2, 1}) - (2 * p.delta1 + p.delta2)) < 1e-14);
    CHECK(std::abs(el({QdState::B, 0, 0}, {QdState::B, 0, 0})) < 1e-14);
}

TEST_CASE("four-photon topologies differ in the emission cavity of the second QD") {
    const auto p = sample_n4();
    const auto s4 = build_space({Topology::FourPhoton}, 4);
    const auto sv = build_space({Topology::FourPhotonVariant}, 4);
    const auto h4 = hamiltonian_n4(p, s4).m;
    const auto hv = hamiltonian_n4_variant(p, sv).m;
    auto el = [](const Eigen::MatrixXcd& h, const SpacePtr& s, BasisLabel a, BasisLabel b) {
        return h(s->index_of(a), s->index_of(b));
    };
    const double r2 = std::sqrt(2.0);
    CHECK(std::abs(el(h4, s4, {QdState::B2, 0, 0}, {QdState::G, 0, 2}) - r2 * p.g2) < 1e-14);
    CHECK(std::abs(el(hv, sv, {QdState::B2, 0, 0}, {QdState::G, 0, 2})) < 1e-14);
    CHECK(std::abs(el(hv, sv, {QdState::B2, 0, 0}, {QdState::G, 2, 0}) - r2 * p.g2) < 1e-14);
    CHECK(std::abs(el(h4, s4, {QdState::B1, 0, 0}, {QdState::G, 2, 0}) - r2 * p.g1) < 1e-14);
    CHECK(std::abs(el(h4, s4, {QdState::B1, 0, 0}, {QdState::B1, 0, 0}) - p.delta_b) < 1e-14);
    CHECK(std::abs(el(h4, s4, {QdState::B2, 0, 0}, {QdState::B2, 0, 0}) + p.delta_b) < 1e-14);
    CHECK_THROWS_AS(hamiltonian_n4(p, sv), ConfigError);
    CHECK_THROWS_AS(hamiltonian_n2(ParamsN2{}, s4), ConfigError);
}

TEST_CASE("parameter validation") {
    ParamsN2 p;
    p.kappa = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.kappa = 0.1;
    p.pump_port = 3;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.pump_port = 1;
    p.j = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(p.validate(), ConfigError);
    ParamsN4 q;
    q.delta_b = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("microscopic two-photon coupling") {
    CHECK(effective_coupling({0.1, 0.5}) == doctest::Approx(2 * 0.01 / 0.5));
    CHECK_THROWS_AS(effective_coupling({0.1, 0.0}), ConfigError);
    CHECK_FALSE(beyond_two_photon_regime({0.1, 1.0}));
    CHECK(beyond_two_photon_regime({0.3, 1.0}));
}

TEST_CASE("pump term and rotating frame") {
    const auto s = build_space({Topology::TwoPhoton}, 3);
    const auto v = pump_term(0.2, 2, s).m;
    CHECK(hermiticity_error(v) < 1e-15);
    const auto a2 = annihilator(s, 2).m;
    CHECK((v - 0.2 * (a2 + a2.adjoint())).norm() < 1e-14);
    CHECK_THROWS_AS(pump_term(0.2, 0, s), ConfigError);

    const auto h = hamiltonian_n2(ParamsN2{}, s);
    const auto r = rotating_frame(h, 0.3);
    CHECK((h.m - r.m - 0.3 * total_excitation_operator(s).m).norm() < 1e-14);
}
