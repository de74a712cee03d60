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
#include <random>

#include "noonsim/analysis.hpp"
#include "noonsim/errors.hpp"
#include "noonsim/perturbation.hpp"

using namespace noon;

namespace {

ParamsN2 at_condition(double j, double delta1, Branch s, double kappa, double rabi) {
    ParamsN2 p;
    p.j = j;
    p.delta1 = delta1;
    p.delta2 = condition_delta2(delta1, p.g2p, s);
    p.pump_detuning = p.delta2;
    p.kappa = kappa;
    p.rabi = rabi;
    return p;
}

double gamma_2002(const ParamsN2& p, Branch s) {
    const double sn = std::sin(solve_ges_n2(p, s).mixing_angle);
    return 2.0 * p.kappa * sn * sn;
}

double qme_ges_population(const ParamsN2& p, Branch s, int port) {
    ParamsN2 q = p;
    q.pump_port = port;
    const auto sys = open_system(q, 3);
    return steady_state(sys).population(ges_vector_n2(solve_ges_n2(q, s), sys.space));
}

double two_photon_intensity(const ParamsN2& p) {
    const auto rho = steady_state(open_system(p, 3));
    double out = 0.0;
    for (int c = 1; c <= 2; ++c) {
        const Eigen::MatrixXcd a = annihilator(rho.space, c).m;
        const Eigen::MatrixXcd aa = a * a;
        out += (aa * rho.m * aa.adjoint()).trace().real();
    }
    return out;
}

}  // namespace

TEST_CASE("selection rule: pumping cavity 1 cancels exactly on the condition manifold") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> j(0.3, 6.0), d1(-4.0, 6.0);
    for (int k = 0; k < 50; ++k)
        for (auto s : {Branch::Plus, Branch::Minus}) {
            const auto p = at_condition(j(rng), d1(rng), s, 0.1, 0.03);
            const auto e1 = sw_matrix_element(p, s, 1);
            const auto e2 = sw_matrix_element(p, s, 2);
            CHECK(std::abs(e1.xi) <= 1e-12 * p.rabi * p.rabi / p.g2p);
            CHECK(std::abs(e2.xi) > 1e-8 * p.rabi * p.rabi);
        }
}

TEST_CASE("path terms: swapping the port exchanges cos^2 and sin^2 and flips the sign") {
    const auto p = at_condition(2.0, 1.0, Branch::Minus, 0.1, 0.05);
    const auto one = one_photon_eigensystem(p);
    const double c2 = std::cos(one.phi) * std::cos(one.phi), s2 = std::sin(one.phi) * std::sin(one.phi);
    const auto e1 = sw_matrix_element(p, Branch::Minus, 1);
    const auto e2 = sw_matrix_element(p, Branch::Minus, 2);
    CHECK(e1.prefactor == doctest::Approx(-e2.prefactor));
    CHECK(e1.path_plus / c2 == doctest::Approx(e2.path_plus / s2));
    CHECK(e1.path_minus / s2 == doctest::Approx(e2.path_minus / c2));
    CHECK(e2.xi == doctest::Approx(e2.prefactor * (e2.path_plus + e2.path_minus)));
    const double sin_phi_s = std::sin(solve_ges_n2(p, Branch::Minus).mixing_angle);
    CHECK(e2.prefactor == doctest::Approx(sin_phi_s * p.rabi * p.rabi));
}

TEST_CASE("xi scales as Omega^2 and the rate as Omega^4") {
    auto p = at_condition(2.0, 1.0, Branch::Minus, 0.1, 0.02);
    const auto a = sw_matrix_element(p, Branch::Minus, 2);
    const double ra = analytic_cw_rate(a.xi, p, Branch::Minus, 0.5);
    p.rabi *= 2.0;
    const auto b = sw_matrix_element(p, Branch::Minus, 2);
    const double rb = analytic_cw_rate(b.xi, p, Branch::Minus, 0.5);
    CHECK(b.xi == doctest::Approx(4.0 * a.xi));
    CHECK(rb == doctest::Approx(16.0 * ra));
    CHECK(analytic_cw_rate(0.0, p, Branch::Minus, 0.5) == 0.0);
}

TEST_CASE("closed-form population and rate") {
    CHECK(analytic_cw_population(0.0, 0.1) == 0.0);
    CHECK(analytic_cw_population(0.01, 0.1) == doctest::Approx(4e-4 / 0.01));
    CHECK_THROWS_AS(analytic_cw_population(0.01, 0.0), ConfigError);
    const auto p = at_condition(2.0, 1.0, Branch::Minus, 0.1, 0.02);
    const double xi = 1e-4, w = 0.3;
    const double sn = std::sin(solve_ges_n2(p, Branch::Minus).mixing_angle);
    const double g = gamma_2002(p, Branch::Minus);
    CHECK(analytic_cw_rate(xi, p, Branch::Minus, w) ==
          doctest::Approx(8.0 * p.kappa * p.kappa * w * sn * sn * xi * xi / (g * g)));
    CHECK_THROWS_AS(sw_matrix_element(p, Branch::Minus, 3), ConfigError);
}

TEST_CASE("a pump resonant with a one-photon level is rejected") {
    auto p = at_condition(2.0, 1.0, Branch::Minus, 0.1, 0.02);
    p.pump_detuning = one_photon_eigensystem(p).e_plus;
    CHECK_THROWS_AS(sw_matrix_element(p, Branch::Minus, 2), ConfigError);
}

TEST_CASE("weak-drive GES population agrees with the master equation") {
    const auto p = at_condition(2.0, 1.0, Branch::Minus, 0.1, 0.05);
    const double analytic =
        analytic_cw_population(sw_matrix_element(p, Branch::Minus, 2).xi, gamma_2002(p, Branch::Minus));
    const double qme = qme_ges_population(p, Branch::Minus, 2);
    CHECK(analytic == doctest::Approx(qme).epsilon(0.1));
}

TEST_CASE("master-equation population follows the Omega^4 law") {
    std::vector<double> x, y;
    for (double rabi : {0.01, 0.02, 0.04}) {
        const auto p = at_condition(2.0, 1.0, Branch::Minus, 0.1, rabi);
        x.push_back(std::log(rabi * rabi));
        y.push_back(std::log(qme_ges_population(p, Branch::Minus, 2)));
    }
    const double slope = (y[2] - y[0]) / (x[2] - x[0]);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("master-equation selection rule at weak drive") {
    const auto p = at_condition(2.0, 1.0, Branch::Minus, 0.1, 0.01);
    CHECK(qme_ges_population(p, Branch::Minus, 1) / qme_ges_population(p, Branch::Minus, 2) < 1e-3);
}

TEST_CASE("branch contrast of the two-photon intensity") {
    // Two-photon intensity at the two dark-state conditions; the closed-form rate
    // should reproduce the contrast within a factor 1.5.
    double analytic[2], numeric[2];
    int k = 0;
    for (auto s : {Branch::Minus, Branch::Plus}) {
        auto p = at_condition(2.0, 1.0, s, 0.1, 0.05);
        p.pump_port = 2;
        analytic[k] = analytic_cw_rate(sw_matrix_element(p, s, 2).xi, p, s, 1.0);
        numeric[k] = two_photon_intensity(p);
        ++k;
    }
    const double ratio = (analytic[0] / analytic[1]) / (numeric[0] / numeric[1]);
    CHECK(ratio > 1.0 / 1.5);
    CHECK(ratio < 1.5);
}
