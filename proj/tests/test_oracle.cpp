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
#include <vector>

#include "noonsim/design.hpp"
#include "noonsim/dynamics.hpp"
#include "noonsim/errors.hpp"
#include "noonsim/oracle.hpp"

using namespace noon;

namespace {

DecayParams with_eta(double eta, double kappa) {
    return DecayParams::from_mixing_angle(std::asin(std::sqrt(eta / 2.0)), kappa);
}

}  // namespace

TEST_CASE("rates from the mixing angle") {
    const auto p = DecayParams::from_mixing_angle(0.3, 0.1);
    CHECK(p.eta == doctest::Approx(2.0 * std::sin(0.3) * std::sin(0.3)));
    CHECK(p.gamma_2002 == doctest::Approx(0.1 * p.eta));
    CHECK(p.gamma_1p == doctest::Approx(0.1));
    CHECK_THROWS_AS(DecayParams::from_mixing_angle(0.3, 0.0), ConfigError);
}

TEST_CASE("populations sum to one and start in the GES") {
    for (double eta : {0.04, 0.3, 1.0, 1.5}) {
        const auto p = with_eta(eta, 0.2);
        const auto z = decay_populations(p, 0.0);
        CHECK(z.p_2002 == doctest::Approx(1.0));
        CHECK(z.one_photon() == doctest::Approx(0.0));
        for (double t : {0.1, 1.0, 7.0, 50.0, 400.0}) {
            const auto x = decay_populations(p, t);
            CHECK(x.p_2002 + x.one_photon() + x.p_g00 == doctest::Approx(1.0));
            CHECK(x.p_2002 == doctest::Approx(std::exp(-p.gamma_2002 * t)));
            CHECK(x.p_1p_plus >= 0.0);
            CHECK(x.p_1p_minus >= 0.0);
        }
    }
    CHECK_THROWS_AS(decay_populations(with_eta(0.3, 0.2), -1.0), ConfigError);
}

TEST_CASE("GES population decreases and ground population increases monotonically") {
    const auto p = with_eta(0.1, 0.1);
    double last_ges = 2.0, last_g = -1.0;
    for (int k = 0; k <= 200; ++k) {
        const auto x = decay_populations(p, 2.0 * k);
        CHECK(x.p_2002 <= last_ges);
        CHECK(x.p_g00 >= last_g);
        last_ges = x.p_2002;
        last_g = x.p_g00;
    }
}

TEST_CASE("one-photon populations solve the cascade rate equations") {
    const auto p = with_eta(0.3, 0.2);
    // Central differences of dP1/dt = Gamma_2002 P_2002 - kappa P1.
    const double h = 1e-4;
    for (double t : {0.5, 3.0, 20.0}) {
        const double d = (decay_populations(p, t + h).one_photon() - decay_populations(p, t - h).one_photon()) / (2 * h);
        const auto x = decay_populations(p, t);
        CHECK(d == doctest::Approx(p.gamma_2002 * x.p_2002 - p.gamma_1p * x.one_photon()).epsilon(1e-6));
    }
}

TEST_CASE("the degenerate limit is continuous") {
    const double t = 3.7;
    const auto at = decay_populations(with_eta(1.0, 0.2), t);
    const auto near = decay_populations(with_eta(1.0 + 1e-6, 0.2), t);
    CHECK(at.one_photon() == doctest::Approx(near.one_photon()).epsilon(1e-5));
    CHECK(at.p_g00 == doctest::Approx(near.p_g00).epsilon(1e-5));
}

TEST_CASE("one-photon peak closed form") {
    const auto p = with_eta(0.1, 1.0);
    const auto peak = one_photon_peak(p);
    CHECK(peak.value == doctest::Approx(0.0774).epsilon(1e-3 / 0.0774));
    CHECK(peak.time == doctest::Approx(std::log(0.1) / (1.0 * (0.1 - 1.0))));
    // Numeric maximization on a fine grid.
    double best = 0.0, best_t = 0.0;
    for (int k = 0; k <= 200000; ++k) {
        const double t = 1e-4 * k;
        const double v = decay_populations(p, t).one_photon();
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    CHECK(best == doctest::Approx(peak.value).epsilon(1e-8));
    CHECK(best_t == doctest::Approx(peak.time).epsilon(1e-3));
}

TEST_CASE("master equation from the GES follows the cascade") {
    ParamsN2 p;
    p.j = 2.0;
    p.delta1 = 1.0;
    p.delta2 = condition_delta2(p.delta1, p.g2p, Branch::Minus);
    p.pump_detuning = p.delta2;
    p.kappa = 0.02;
    const auto sol = solve_ges_n2(p, Branch::Minus);
    const auto sys = open_system(p, 2);
    PopulationProbes probes;
    probes.ges = ges_vector_n2(sol, sys.space);
    const auto one = one_photon_eigensystem(p);
    probes.one_photon = {one_photon_vector(one, Branch::Plus, sys.space),
                         one_photon_vector(one, Branch::Minus, sys.space)};
    const auto dp = DecayParams::from_mixing_angle(sol.mixing_angle, p.kappa);
    std::vector<double> times;
    for (int k = 0; k <= 60; ++k) times.push_back(k * 5.0 / dp.gamma_2002 / 60.0);
    const auto tr = propagate(sys, DensityMatrix::pure(sys.space, probes.ges), times, constant_drive(0.0), probes);
    double worst = 0.0;
    for (const auto& s : tr.samples) {
        const auto a = decay_populations(dp, s.t);
        worst = std::max({worst, std::abs(s.p_ges - a.p_2002), std::abs(s.one_photon() - a.one_photon()),
                          std::abs(s.p_g00 - a.p_g00)});
    }
    CHECK(worst < 0.01);
}
