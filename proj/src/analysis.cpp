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

#include "noonsim/analysis.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>

#include "noonsim/errors.hpp"
#include "noonsim/units.hpp"

namespace noon {

using cplx = std::complex<double>;

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& a, int k) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    for (int i = 0; i < k; ++i) out = out * a;
    return out;
}

}  // namespace

TomographyMatrix tomography(const DensityMatrix& rho, int n) {
    if (n < 1) throw ConfigError("photon number must be positive");
    if (!rho.space) throw ConfigError("density matrix has no space");
    if (rho.space->n_max() < n)
        throw ConfigError("truncation n_max = " + std::to_string(rho.space->n_max()) +
                          " cannot represent " + std::to_string(n) + " photons per mode");
    const auto a1 = annihilator(rho.space, 1).m;
    const auto a2 = annihilator(rho.space, 2).m;
    // k[m] = a2^(N-m) a1^m, so that the moment is Tr(k[m'] rho k[m]^dag).
    std::vector<Eigen::MatrixXcd> k(static_cast<size_t>(n + 1)), krho(static_cast<size_t>(n + 1));
    for (int m = 0; m <= n; ++m) {
        k[static_cast<size_t>(m)] = matrix_power(a2, n - m) * matrix_power(a1, m);
        krho[static_cast<size_t>(m)] = k[static_cast<size_t>(m)] * rho.m;
    }
    TomographyMatrix t;
    t.n = n;
    t.m.resize(n + 1, n + 1);
    for (int r = 0; r <= n; ++r) {
        for (int c = 0; c <= n; ++c) {
            const int m = n - r, mp = n - c;
            const cplx moment =
                (k[static_cast<size_t>(m)].conjugate().cwiseProduct(krho[static_cast<size_t>(mp)])).sum();
            t.m(r, c) = moment / std::sqrt(factorial(m) * factorial(n - m) * factorial(mp) * factorial(n - mp));
        }
    }
    const double tr = t.m.trace().real();
    if (!(tr > 1e-300))
        throw NumericError("state has no " + std::to_string(n) + "-photon component to reconstruct", tr);
    t.m /= tr;
    return t;
}

double noon_coherence(const TomographyMatrix& t) {
    if (t.m.rows() != t.n + 1 || t.m.cols() != t.n + 1) throw ConfigError("malformed tomography matrix");
    return 2.0 * std::abs(t.m(0, t.n));
}

double concurrence(const TomographyMatrix& t) {
    const double c = noon_coherence(t);
    return t.n == 2 ? c : 0.5 * c;
}

PurityMeasures trace_distance(const TomographyMatrix& t) {
    if (t.n != 2 || t.m.rows() != 3) throw ConfigError("trace distance is defined for two-photon states only");
    const Eigen::MatrixXcd target = 0.5 * (t.m + t.m.adjoint());
    auto reference = [](double theta) {
        Eigen::Vector3cd psi(1.0, 0.0, std::polar(1.0, -theta));
        psi /= std::sqrt(2.0);
        return Eigen::Matrix3cd(psi * psi.adjoint());
    };
    auto distance = [&](double theta) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(reference(theta) - target, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    };
    const double two_pi = 2.0 * std::numbers::pi;
    const int grid = 720;
    const double step = two_pi / grid;
    int best = 0;
    double best_d = distance(0.0);
    for (int i = 1; i < grid; ++i) {
        const double d = distance(i * step);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    const auto res = boost::math::tools::brent_find_minima(distance, (best - 1) * step, (best + 1) * step, 50);
    PurityMeasures out;
    out.concurrence = concurrence(t);
    out.theta_opt = res.second <= best_d ? res.first : best * step;
    out.trace_distance = std::min(res.second, best_d);
    out.theta_opt = std::fmod(std::fmod(out.theta_opt, two_pi) + two_pi, two_pi);
    const Eigen::Matrix3cd diff = reference(out.theta_opt) - target;
    out.hilbert_schmidt = 0.5 * (diff * diff).trace().real();
    return out;
}

// ---- rates ----

double detection_rate(const ParamsN2& p) {
    p.validate();
    if (!(p.kappa > 0.0)) throw ConfigError("detection rate requires kappa > 0");
    const Branch s = nearest_branch(p);
    const double e = ges_energy_n2(p.delta1, p.g2p, s);
    const double phi_s = std::atan(e / p.g2p);
    const double gamma = 2.0 * p.kappa * std::sin(phi_s) * std::sin(phi_s);
    const auto one = one_photon_eigensystem(p);
    return p.kappa * gamma / one.delta_e1;
}

double detection_rate_hz(const ParamsN2& p, double g_ref_ev) {
    if (!(g_ref_ev > 0.0)) throw ConfigError("reference coupling must be positive");
    return units::rate_to_hz(detection_rate(p), g_ref_ev);
}

double rate_scaling_n(int n, double kappa, double j) {
    if (n < 2) throw ConfigError("NOON number must be at least 2");
    if (!(kappa > 0.0) || j == 0.0) throw ConfigError("rate scaling needs kappa > 0 and j != 0");
    return kappa * std::pow(kappa / std::abs(j), n - 1);
}

}  // namespace noon
