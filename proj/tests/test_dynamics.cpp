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
#include <random>
#include <vector>

#include "noonsim/design.hpp"
#include "noonsim/dynamics.hpp"
#include "noonsim/errors.hpp"

using namespace noon;

namespace {

ParamsN2 cw(double kappa, double rabi) {
    ParamsN2 p;
    p.j = 2.0;
    p.delta1 = 1.0;
    p.delta2 = condition_delta2(p.delta1, p.g2p, Branch::Minus);
    p.pump_detuning = p.delta2;
    p.kappa = kappa;
    p.rabi = rabi;
    p.pump_port = 2;
    return p;
}

Eigen::MatrixXcd random_matrix(int d, std::mt19937& rng) {
    std::normal_distribution<double> n;
    Eigen::MatrixXcd m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = {n(rng), n(rng)};
    return m;
}

// Dense Lindblad generator written out directly.
Eigen::MatrixXcd reference_lindblad(const OpenSystem& sys, double omega, const Eigen::MatrixXcd& x) {
    const Eigen::MatrixXcd h = sys.hamiltonian + omega * sys.drive;
    const std::complex<double> i(0.0, 1.0);
    Eigen::MatrixXcd out = -i * (h * x - x * h);
    for (int c = 1; c <= 2; ++c) {
        const Eigen::MatrixXcd a = annihilator(sys.space, c).m;
        const Eigen::MatrixXcd n = a.adjoint() * a;
        out += sys.kappa * (a * x * a.adjoint() - 0.5 * (n * x + x * n));
    }
    return out;
}

}  // namespace

TEST_CASE("sparse Liouvillian matches the dense generator") {
    std::mt19937 rng(3);
    const auto sys = open_system(cw(0.3, 0.2), 3);
    const Liouvillian l(sys);
    const int d = l.dim();
    const Eigen::MatrixXcd x = random_matrix(d, rng);
    for (double omega : {0.0, 0.2, -0.7}) {
        const Eigen::MatrixXcd ref = reference_lindblad(sys, omega, x);
        CHECK((l.apply(x, omega) - ref).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXcd rho = x * x.adjoint();
        Eigen::MatrixXcd out(d, d);
        l.apply_hermitian(rho, omega, out);
        CHECK((out - reference_lindblad(sys, omega, rho)).cwiseAbs().maxCoeff() < 1e-11);
    }
    const OperatorMatrix htot{sys.space, sys.hamiltonian + sys.rabi * sys.drive};
    CHECK((liouvillian_apply(htot, sys.kappa, x) - reference_lindblad(sys, sys.rabi, x)).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("the generator is trace-annihilating and maps Hermitian to Hermitian") {
    std::mt19937 rng(5);
    ParamsN4 p;
    p.kappa = 0.2;
    p.rabi = 0.1;
    const auto sys = open_system(p, 4);
    const Liouvillian l(sys);
    const Eigen::MatrixXcd x = random_matrix(l.dim(), rng);
    const Eigen::MatrixXcd rho = x * x.adjoint();
    const Eigen::MatrixXcd out = l.apply(rho, 0.3);
    CHECK(std::abs(out.trace()) < 1e-10);
    CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("a single photon decays at rate kappa regardless of hopping") {
    ParamsN2 p = cw(0.4, 0.0);
    const auto sys = open_system(p, 2);
    Eigen::VectorXcd psi = basis_vector(sys.space, {QdState::G, 1, 0});
    const auto rho0 = DensityMatrix::pure(sys.space, psi);
    PopulationProbes probes;
    probes.ges = psi;
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(0.5 * k);
    const auto tr = propagate(sys, rho0, times, constant_drive(0.0), probes);
    for (const auto& s : tr.samples) {
        CHECK(s.trace == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(1.0 - s.p_g00 == doctest::Approx(std::exp(-p.kappa * s.t)).epsilon(1e-7));
    }
}

TEST_CASE("driven propagation preserves trace, Hermiticity and positivity") {
    const auto sys = open_system(cw(0.1, 0.4), 4);
    PopulationProbes probes;
    probes.ges = ges_vector_n2(solve_ges_n2(cw(0.1, 0.4), Branch::Minus), sys.space);
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(2.0 * k);
    const auto tr = propagate(sys, DensityMatrix::ground(sys.space), times, gaussian_pulse(3.0, 4.0, 10.0), probes);
    for (const auto& s : tr.samples) CHECK(std::abs(s.trace - 1.0) < 1e-9);
    const auto& rho = tr.final_state;
    CHECK((rho.m - rho.m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(rho.min_eigenvalue() > -1e-9);
    CHECK_NOTHROW(rho.check_physical(1e-8));
}

TEST_CASE("invalid time grids and states are rejected") {
    const auto sys = open_system(cw(0.1, 0.0), 2);
    PopulationProbes probes;
    probes.ges = Eigen::VectorXcd::Zero(sys.space->dim());
    const auto rho = DensityMatrix::ground(sys.space);
    CHECK_THROWS_AS(propagate(sys, rho, {}, constant_drive(0.0), probes), ConfigError);
    CHECK_THROWS_AS(propagate(sys, rho, {0.0, 1.0, 1.0}, constant_drive(0.0), probes), ConfigError);
    const auto other = DensityMatrix::ground(build_space({Topology::TwoPhoton}, 3));
    CHECK_THROWS_AS(propagate(sys, other, {0.0, 1.0}, constant_drive(0.0), probes), ConfigError);
    DensityMatrix bad = rho;
    bad.m(0, 0) = 2.0;
    CHECK_THROWS_AS(bad.check_physical(1e-8), NumericError);
}

TEST_CASE("gaussian pulse shape") {
    const auto d = gaussian_pulse(45.0, std::pow(10.0, 0.95), 20.0);
    CHECK(d(20.0) == doctest::Approx(std::sqrt(45.0 / std::pow(10.0, 0.95))));
    CHECK(d(20.0 + std::pow(10.0, 0.95)) == doctest::Approx(d(20.0) * std::exp(-1.0)));
    CHECK_THROWS_AS(gaussian_pulse(1.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(gaussian_pulse(-1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("steady-state methods agree on a small system") {
    const auto sys = open_system(cw(0.3, 0.15), 3);
    SteadyStateOptions krylov, direct, prop;
    direct.method = SteadyStateMethod::Direct;
    prop.method = SteadyStateMethod::Propagation;
    prop.propagation_time = 400.0;
    prop.tolerance = 1e-8;
    SteadyStateInfo info;
    const auto a = steady_state(sys, krylov, &info);
    CHECK(info.residual <= 1e-10);
    const auto b = steady_state(sys, direct);
    const auto c = steady_state(sys, prop);
    CHECK((a.m - b.m).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a.m - c.m).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(a.trace() == doctest::Approx(1.0));
    CHECK(a.min_eigenvalue() > -1e-10);
    CHECK((Liouvillian(sys).apply(a.m, sys.rabi)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("steady state of the undriven system is the vacuum") {
    const auto sys = open_system(cw(0.2, 0.0), 2);
    const auto rho = steady_state(sys);
    CHECK(rho.m(0, 0).real() == doctest::Approx(1.0));
    CHECK(rho.sector_population(0) == doctest::Approx(1.0));
}

TEST_CASE("steady state requires loss") {
    const auto sys = open_system(cw(0.0, 0.1), 2);
    CHECK_THROWS_AS(steady_state(sys), ConfigError);
}

TEST_CASE("steady-state method names round-trip") {
    for (auto m : {SteadyStateMethod::Krylov, SteadyStateMethod::Direct, SteadyStateMethod::Propagation})
        CHECK(steady_state_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(steady_state_method_from_string("newton"), ConfigError);
}

TEST_CASE("truncation convergence of a weak-drive observable") {
    const auto rep = convergence_check(
        [](int n) {
            const auto rho = steady_state(open_system(cw(0.1, 0.05), n));
            return rho.sector_population(2);
        },
        {2, 3, 4}, 1e-6);
    CHECK(rep.converged);
    CHECK(rep.values.size() == 3);
    const auto fake = convergence_check([](int n) { return 1.0 / n; }, {2, 3}, 1e-3);
    CHECK_FALSE(fake.converged);
    CHECK_THROWS_AS(convergence_check([](int) { return 0.0; }, {2}), ConfigError);
}

TEST_CASE("photon cap reduces the space but not the weak-drive physics") {
    const auto full = steady_state(open_system(cw(0.1, 0.05), 4));
    const auto capped = steady_state(open_system(cw(0.1, 0.05), 4, 4));
    CHECK(capped.space->dim() < full.space->dim());
    CHECK(capped.sector_population(2) == doctest::Approx(full.sector_population(2)).epsilon(1e-4));
}
