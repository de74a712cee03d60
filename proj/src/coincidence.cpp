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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "noonsim/analysis.hpp"
#include "noonsim/errors.hpp"

namespace noon {

using cplx = std::complex<double>;

namespace {

double multi_photon_population(const DensityMatrix& rho) {
    double p = 0.0;
    for (int k = 2; k <= rho.space->max_excitation(); ++k) p += rho.sector_population(k);
    return p;
}

}  // namespace

std::vector<CoincidenceRecord> coincidence_counts_regression(const ParamsN2& p, const DensityMatrix& rho0,
                                                             const std::vector<double>& windows,
                                                             const CoincidenceOptions& opt) {
    for (double w : windows)
        if (!(w > 0.0)) throw ConfigError("coincidence window must be positive");
    if (!(p.kappa > 0.0)) throw ConfigError("coincidence counts require kappa > 0");
    if (!rho0.space || rho0.space->model().topology != Topology::TwoPhoton)
        throw ConfigError("coincidence counts need a two-photon state");
    ParamsN2 q = p;
    q.rabi = 0.0;
    const OpenSystem sys = open_system(q, rho0.space->n_max(), rho0.space->photon_cap());
    const Liouvillian l(sys);
    const int d = l.dim();

    std::vector<CoincidenceRecord> out(windows.size());
    for (size_t i = 0; i < windows.size(); ++i) out[i].window = windows[i];
    const double p0 = multi_photon_population(rho0);
    if (!(p0 > 0.0)) return out;

    // X = integral of rho(t) over emission times, in chunks until the envelope is negligible.
    IntegratorOptions io = opt.integrator;
    io.hermitian = true;
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, d);
    DensityMatrix rho = rho0;
    const double chunk = 10.0 / p.kappa;
    double t = 0.0;
    for (int i = 0; i < 100000; ++i) {
        Eigen::MatrixXcd part;
        rho.m = evolve(l, rho.m, t, t + chunk, constant_drive(0.0), io, &part);
        x += part;
        t += chunk;
        if (multi_photon_population(rho) <= opt.envelope_cutoff * p0) break;
    }
    for (auto& r : out) r.cutoff = t;

    std::vector<size_t> order(windows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return windows[a] < windows[b]; });

    const auto a1 = annihilator(sys.space, 1).m;
    const auto a2 = annihilator(sys.space, 2).m;
    const Eigen::MatrixXcd* a[3] = {nullptr, &a1, &a2};
    const double k2 = p.kappa * p.kappa;
    // z[k1][l1](w) = integral over [0, w] of exp(L tau)[a_l1 X a_k1^dag], accumulated over sorted windows.
    // G(k1, k2, l2, l1) = kappa^2 Tr(a_k2^dag a_l2 z[k1][l1]).
    std::vector<std::array<std::array<Eigen::MatrixXcd, 3>, 3>> z(windows.size());
    io.hermitian = false;
    for (int k1 = 1; k1 <= 2; ++k1) {
        for (int l1 = 1; l1 <= 2; ++l1) {
            Eigen::MatrixXcd y = (*a[l1]) * x * a[k1]->adjoint();
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
            double tau = 0.0;
            for (size_t i : order) {
                if (windows[i] > tau) {
                    Eigen::MatrixXcd part;
                    y = evolve(l, y, tau, windows[i], constant_drive(0.0), io, &part);
                    acc += part;
                    tau = windows[i];
                }
                z[i][static_cast<size_t>(k1)][static_cast<size_t>(l1)] = acc;
            }
        }
    }
    for (size_t i = 0; i < windows.size(); ++i) {
        auto g = [&](int k1, int kk2, int l2, int l1) {
            return k2 * (a[kk2]->adjoint() * (*a[l2]) * z[i][static_cast<size_t>(k1)][static_cast<size_t>(l1)])
                            .trace();
        };
        CoincidenceRecord& rec = out[i];
        rec.n11 = 2.0 * g(1, 1, 1, 1).real();
        rec.n22 = 2.0 * g(2, 2, 2, 2).real();
        rec.n12 = (g(1, 2, 2, 1) + g(2, 1, 1, 2)).real();
        rec.n1122 = 2.0 * g(1, 1, 2, 2);
        rec.n11_12 = g(1, 1, 2, 1) + g(1, 1, 1, 2);
        rec.n12_22 = g(1, 2, 2, 2) + g(2, 1, 2, 2);
    }
    return out;
}

CoincidenceRecord coincidence_counts_regression(const ParamsN2& p, const DensityMatrix& rho0, double window,
                                                const CoincidenceOptions& opt) {
    return coincidence_counts_regression(p, rho0, std::vector<double>{window}, opt).front();
}

CoincidenceRecord coincidence_counts_analytic(const ParamsN2& p, double window) {
    if (!(window > 0.0)) throw ConfigError("coincidence window must be positive");
    if (!(p.kappa > 0.0)) throw ConfigError("coincidence counts require kappa > 0");
    const Branch s = nearest_branch(p);
    solve_ges_n2(p, s);  // throws unless the dark-state condition holds
    const auto one = one_photon_eigensystem(p);
    const double k = p.kappa;
    const double w = one.delta_e1;
    const double c2 = std::pow(std::cos(one.phi), 2);
    const double s2 = std::pow(std::sin(one.phi), 2);
    const double i0 = -std::expm1(-k * window) / k;
    auto osc = [&](double sign) {
        const cplx z(-k, sign * w);
        return (std::exp(z * window) - 1.0) / z;
    };
    const cplx ip = osc(1.0), im = osc(-1.0);
    const double ic = ip.real();

    CoincidenceRecord rec;
    rec.window = window;
    rec.cutoff = std::numeric_limits<double>::infinity();
    rec.n11 = k * ((c2 * c2 + s2 * s2) * i0 + 2.0 * s2 * c2 * ic);
    rec.n22 = rec.n11;
    rec.n12 = 2.0 * k * s2 * c2 * (i0 - ic);
    // Phase convention of <a1^dag a1^dag a2 a2>: the cos^4 path carries exp(+i dE1 tau).
    rec.n1122 = -k * (2.0 * s2 * c2 * i0 + c2 * c2 * ip + s2 * s2 * im);
    return rec;
}

TomographyMatrix tomography_from_counts(const CoincidenceRecord& c) {
    TomographyMatrix t;
    t.n = 2;
    t.m.resize(3, 3);
    const double r2 = std::sqrt(2.0);
    t.m(0, 0) = c.n11 / 2.0;
    t.m(1, 1) = c.n12;
    t.m(2, 2) = c.n22 / 2.0;
    t.m(0, 1) = c.n11_12 / r2;
    t.m(0, 2) = c.n1122 / 2.0;
    t.m(1, 2) = c.n12_22 / r2;
    t.m(1, 0) = std::conj(t.m(0, 1));
    t.m(2, 0) = std::conj(t.m(0, 2));
    t.m(2, 1) = std::conj(t.m(1, 2));
    const double tr = t.m.trace().real();
    if (!(tr > 0.0)) throw NumericError("coincidence counts are empty", tr);
    t.m /= tr;
    return t;
}

}  // namespace noon
