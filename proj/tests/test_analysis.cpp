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
#include <complex>
#include <vector>

#include "noonsim/analysis.hpp"
#include "noonsim/errors.hpp"
#include "noonsim/units.hpp"

using namespace noon;

namespace {

using cplx = std::complex<double>;

DensityMatrix pure_state(const SpacePtr& s, const std::vector<std::pair<BasisLabel, cplx>>& amps) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(s->dim());
    for (const auto& [l, a] : amps) psi(s->index_of(l)) = a;
    psi.normalize();
    return DensityMatrix::pure(s, psi);
}

ParamsN2 on_condition(double j, double delta1, double kappa) {
    ParamsN2 p;
    p.j = j;
    p.delta1 = delta1;
    p.delta2 = condition_delta2(delta1, p.g2p, Branch::Minus);
    p.pump_detuning = p.delta2;
    p.kappa = kappa;
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("tomography of an ideal two-photon NOON state") {
    const auto s = build_space({Topology::TwoPhoton}, 2);
    const auto rho = pure_state(s, {{{QdState::G, 2, 0}, 1.0}, {{QdState::G, 0, 2}, 1.0}});
    const auto t = tomography(rho, 2);
    CHECK(std::abs(t.m(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(t.m(2, 2) - 0.5) < 1e-14);
    CHECK(std::abs(t.m(0, 2) - 0.5) < 1e-14);
    CHECK(std::abs(t.m(1, 1)) < 1e-14);
    CHECK(concurrence(t) == doctest::Approx(1.0));
    const auto pm = trace_distance(t);
    CHECK(pm.trace_distance < 1e-7);
    CHECK(pm.hilbert_schmidt < 1e-12);
    CHECK(std::abs(std::remainder(pm.theta_opt, 2 * M_PI)) < 1e-6);
}

TEST_CASE("trace-distance search recovers the relative phase") {
    const auto s = build_space({Topology::TwoPhoton}, 2);
    const double theta = 1.1;
    const auto rho =
        pure_state(s, {{{QdState::G, 2, 0}, 1.0}, {{QdState::G, 0, 2}, std::exp(cplx(0.0, -theta))}});
    const auto pm = trace_distance(tomography(rho, 2));
    CHECK(pm.trace_distance < 1e-6);
    // The moment matrix is the transpose of the photon density matrix in the
    // (|20>, |11>, |02>) basis, so the fitted phase is the conjugate one.
    CHECK(pm.theta_opt == doctest::Approx(2 * M_PI - theta).epsilon(1e-6));
}

TEST_CASE("a single Fock component has no coherence and trace distance sqrt(2)") {
    const auto s = build_space({Topology::TwoPhoton}, 2);
    const auto t = tomography(pure_state(s, {{{QdState::G, 2, 0}, 1.0}}), 2);
    CHECK(std::abs(t.m(0, 0) - 1.0) < 1e-14);
    CHECK(concurrence(t) == doctest::Approx(0.0));
    CHECK(trace_distance(t).trace_distance == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("the |11> component lands in the centre of the matrix") {
    const auto s = build_space({Topology::TwoPhoton}, 2);
    const auto t = tomography(pure_state(s, {{{QdState::G, 1, 1}, 1.0}}), 2);
    CHECK(std::abs(t.m(1, 1) - 1.0) < 1e-14);
}

TEST_CASE("four-photon tomography and the two concurrence normalizations") {
    const auto s = build_space({Topology::FourPhoton}, 4);
    const auto t = tomography(pure_state(s, {{{QdState::G, 4, 0}, 1.0}, {{QdState::G, 0, 4}, -1.0}}), 4);
    CHECK(t.m.rows() == 5);
    CHECK(std::abs(t.m.trace() - 1.0) < 1e-14);
    CHECK(concurrence(t) == doctest::Approx(0.5));
    CHECK(noon_coherence(t) == doctest::Approx(1.0));
    CHECK_THROWS_AS(trace_distance(t), ConfigError);
}

TEST_CASE("tomography needs an N-photon component and enough truncation") {
    const auto s = build_space({Topology::TwoPhoton}, 2);
    CHECK_THROWS_AS(tomography(DensityMatrix::ground(s), 2), NumericError);
    CHECK_THROWS_AS(tomography(DensityMatrix::ground(s), 3), ConfigError);
}

TEST_CASE("detection rate bound") {
    ParamsN2 p;
    p.j = 5.0;
    p.delta1 = 5.0;
    p.delta2 = -0.05;
    p.kappa = 0.1;
    // Independent evaluation of kappa Gamma_2002 / dE_1.
    const double e = p.delta1 - std::sqrt(p.delta1 * p.delta1 + 2 * p.g2p * p.g2p);
    const double s = std::sin(std::atan(e / p.g2p));
    const double gamma = 2.0 * p.kappa * s * s;
    const double half = 0.5 * (p.delta1 - p.delta2);
    const double de1 = 2.0 * std::sqrt(p.j * p.j + half * half);
    CHECK(detection_rate(p) == doctest::Approx(p.kappa * gamma / de1));
    const double g_ref = 50e-6;
    const double hz = detection_rate_hz(p, g_ref);
    CHECK(hz == doctest::Approx(p.kappa * gamma / de1 * std::sqrt(2.0) * g_ref / units::kHbarEvS));
    CHECK(std::abs(hz * 1e-6 - 3.7) <= 0.1);
    CHECK_THROWS_AS(detection_rate_hz(p, 0.0), ConfigError);
}

TEST_CASE("rate scaling with NOON number") {
    CHECK(rate_scaling_n(2, 0.1, 5.0) == doctest::Approx(0.1 * 0.02));
    CHECK(rate_scaling_n(4, 0.1, 5.0) == doctest::Approx(0.1 * std::pow(0.02, 3)));
    CHECK_THROWS_AS(rate_scaling_n(1, 0.1, 5.0), ConfigError);
}

TEST_CASE("which-path law for the closed-form counts") {
    const auto p = on_condition(5.0, 5.0, 0.1);
    const double de1 = one_photon_eigensystem(p).delta_e1;
    const double c_small = concurrence(tomography_from_counts(coincidence_counts_analytic(p, 0.01 / de1)));
    const double c_large = concurrence(tomography_from_counts(coincidence_counts_analytic(p, 10.0 / de1)));
    CHECK(c_small >= 0.99);
    CHECK(c_large < 0.5);
    // Counts grow with the window and the diagonal counts are balanced.
    const auto a = coincidence_counts_analytic(p, 1.0 / de1), b = coincidence_counts_analytic(p, 2.0 / de1);
    CHECK(b.n11 > a.n11);
    CHECK(a.n11 == doctest::Approx(a.n22));
}

TEST_CASE("regression counts approach the closed form as the loss decreases") {
    // The closed form neglects O(kappa / dE_1) corrections; their relative size should
    // halve when kappa halves and stay below 1e-3 at kappa = 0.005.
    const auto dev = [](double kappa) {
        const auto p = on_condition(2.0, 1.0, kappa);
        const double de1 = one_photon_eigensystem(p).delta_e1;
        const auto sol = solve_ges_n2(p, Branch::Minus);
        const auto space = build_space({Topology::TwoPhoton}, 2);
        const auto rho0 = DensityMatrix::pure(space, ges_vector_n2(sol, space));
        const auto r = coincidence_counts_regression(p, rho0, 1.0 / de1);
        const auto a = coincidence_counts_analytic(p, 1.0 / de1);
        return std::max({rel(r.n11, a.n11), rel(r.n22, a.n22), rel(r.n12, a.n12),
                         std::abs(r.n1122 - a.n1122) / std::abs(a.n1122)});
    };
    const double d1 = dev(0.01), d2 = dev(0.005);
    CHECK(d2 < 1e-3);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("batched windows reproduce single-window counts") {
    const auto p = on_condition(5.0, 5.0, 0.1);
    const double de1 = one_photon_eigensystem(p).delta_e1;
    const auto sol = solve_ges_n2(p, Branch::Minus);
    const auto space = build_space({Topology::TwoPhoton}, 2);
    const auto rho0 = DensityMatrix::pure(space, ges_vector_n2(sol, space));
    const std::vector<double> windows = {3.0 / de1, 0.3 / de1};
    const auto batch = coincidence_counts_regression(p, rho0, windows);
    REQUIRE(batch.size() == 2);
    for (size_t k = 0; k < windows.size(); ++k) {
        const auto one = coincidence_counts_regression(p, rho0, windows[k]);
        CHECK(batch[k].window == doctest::Approx(windows[k]));
        CHECK(batch[k].n11 == doctest::Approx(one.n11).epsilon(1e-8));
        CHECK(std::abs(batch[k].n1122 - one.n1122) < 1e-8 * std::abs(one.n1122));
    }
}

TEST_CASE("weak cw steady state at the design point is a nearly pure NOON state") {
    auto p = on_condition(2.0, 1.0, 0.1);
    p.rabi = 0.05;
    p.pump_port = 2;
    const auto t = tomography(steady_state(open_system(p, 3)), 2);
    CHECK(concurrence(t) == doctest::Approx(0.995).epsilon(0.005));
    CHECK(std::abs(t.m.trace() - 1.0) < 1e-12);
    CHECK((t.m - t.m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}
