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

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "noonsim/dynamics.hpp"
#include "noonsim/errors.hpp"

namespace noon {

using cplx = std::complex<double>;

std::string to_string(SteadyStateMethod m) {
    switch (m) {
        case SteadyStateMethod::Krylov: return "krylov";
        case SteadyStateMethod::Direct: return "direct";
        case SteadyStateMethod::Propagation: return "propagation";
    }
    return "?";
}

SteadyStateMethod steady_state_method_from_string(const std::string& s) {
    if (s == "krylov") return SteadyStateMethod::Krylov;
    if (s == "direct") return SteadyStateMethod::Direct;
    if (s == "propagation") return SteadyStateMethod::Propagation;
    throw ConfigError("unknown steady-state method '" + s + "'");
}

namespace {

const cplx kI(0.0, 1.0);

// Exact inverse of the undriven Liouvillian on the traceless subspace.
// The undriven generator is block lower-triangular in (ket, bra) excitation sectors:
// the jump term feeds block (k, b) from block (k + 1, b + 1) only. Each diagonal block
// is a Sylvester equation solved in the eigenbasis of the non-Hermitian Hamiltonian.
class UndrivenInverse {
public:
    UndrivenInverse(const OpenSystem& sys) : kappa_(sys.kappa), space_(sys.space) {
        const int d = space_->dim();
        Eigen::MatrixXcd nsum = Eigen::MatrixXcd::Zero(d, d);
        std::vector<Eigen::MatrixXcd> a;
        for (int c = 1; c <= 2; ++c) {
            a.push_back(annihilator(space_, c).m);
            nsum += a.back().adjoint() * a.back();
        }
        const Eigen::MatrixXcd hnh = sys.hamiltonian - kI * (0.5 * sys.kappa) * nsum;
        nsec_ = space_->max_excitation() + 1;
        for (int k = 0; k < nsec_; ++k) {
            const auto& s = space_->sector(k);
            Sector sec;
            sec.idx = s;
            if (!s.empty()) {
                Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sub_block(hnh, s, s));
                if (es.info() != Eigen::Success) throw NumericError("sector eigensolver failed", 0.0);
                sec.lambda = es.eigenvalues();
                sec.v = es.eigenvectors();
                sec.vinv = sec.v.inverse();
                sec.vinv_adj = sec.vinv.adjoint();
            }
            if (k + 1 < nsec_) {
                for (const auto& aj : a) sec.down.push_back(sub_block(aj, s, space_->sector(k + 1)));
            }
            sectors_.push_back(std::move(sec));
        }
        vacuum_ = space_->index_of({QdState::G, 0, 0});
    }

    Eigen::MatrixXcd apply(const Eigen::Ref<const Eigen::MatrixXcd>& y) const {
        const int d = space_->dim();
        std::vector<std::vector<Eigen::MatrixXcd>> blk(static_cast<size_t>(nsec_),
                                                       std::vector<Eigen::MatrixXcd>(static_cast<size_t>(nsec_)));
        for (int tot = 2 * nsec_ - 2; tot >= 0; --tot) {
            for (int k = std::max(0, tot - nsec_ + 1); k <= std::min(tot, nsec_ - 1); ++k) {
                const int b = tot - k;
                const auto& sk = sectors_[static_cast<size_t>(k)];
                const auto& sb = sectors_[static_cast<size_t>(b)];
                if (sk.idx.empty() || sb.idx.empty()) continue;
                Eigen::MatrixXcd r = sub_block(y, sk.idx, sb.idx);
                if (k + 1 < nsec_ && b + 1 < nsec_) {
                    const auto& up = blk[static_cast<size_t>(k + 1)][static_cast<size_t>(b + 1)];
                    if (up.size() > 0)
                        for (size_t j = 0; j < sk.down.size(); ++j)
                            r.noalias() -= kappa_ * (sk.down[j] * up * sb.down[j].adjoint());
                }
                Eigen::MatrixXcd z = sk.vinv * r * sb.vinv_adj;
                for (Eigen::Index m = 0; m < z.rows(); ++m) {
                    for (Eigen::Index n = 0; n < z.cols(); ++n) {
                        const cplx den = -kI * (sk.lambda(m) - std::conj(sb.lambda(n)));
                        z(m, n) = std::abs(den) > 0.0 ? z(m, n) / den : cplx(0.0, 0.0);
                    }
                }
                blk[static_cast<size_t>(k)][static_cast<size_t>(b)] = sk.v * z * sb.v.adjoint();
            }
        }
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, d);
        for (int k = 0; k < nsec_; ++k) {
            for (int b = 0; b < nsec_; ++b) {
                const auto& m = blk[static_cast<size_t>(k)][static_cast<size_t>(b)];
                if (m.size() == 0) continue;
                const auto& rk = sectors_[static_cast<size_t>(k)].idx;
                const auto& rb = sectors_[static_cast<size_t>(b)].idx;
                for (size_t r = 0; r < rk.size(); ++r)
                    for (size_t c = 0; c < rb.size(); ++c)
                        x(rk[r], rb[c]) = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
        // The vacuum block is free; fix it by requiring zero trace.
        x(vacuum_, vacuum_) -= x.trace();
        return x;
    }

private:
    struct Sector {
        std::vector<int> idx;
        Eigen::VectorXcd lambda;
        Eigen::MatrixXcd v, vinv, vinv_adj;
        std::vector<Eigen::MatrixXcd> down;  // a_j restricted to (k, k + 1)
    };
    double kappa_;
    SpacePtr space_;
    int nsec_ = 0;
    int vacuum_ = 0;
    std::vector<Sector> sectors_;
};

// Restarted GMRES for A x = b with a matrix-free operator.
template <class Op>
Eigen::VectorXcd gmres(const Op& apply, const Eigen::VectorXcd& b, double rtol, int restart, int max_iter,
                       int& iterations, double& rel_residual) {
    const Eigen::Index n = b.size();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    const double bnorm = b.norm();
    iterations = 0;
    rel_residual = 0.0;
    if (bnorm == 0.0) return x;
    Eigen::VectorXcd r = b;
    double beta = bnorm;
    const int m = std::max(1, restart);
    std::vector<Eigen::VectorXcd> v(static_cast<size_t>(m + 1));
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd cs(m), sn(m), g(m + 1);
    while (iterations < max_iter) {
        v[0] = r / beta;
        g.setZero();
        g(0) = beta;
        h.setZero();
        int j = 0;
        for (; j < m && iterations < max_iter; ++j) {
            ++iterations;
            Eigen::VectorXcd w = apply(v[static_cast<size_t>(j)]);
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const cplx hij = v[static_cast<size_t>(i)].dot(w);
                    h(i, j) += hij;
                    w -= hij * v[static_cast<size_t>(i)];
                }
            }
            h(j + 1, j) = w.norm();
            if (std::abs(h(j + 1, j)) > 0.0) v[static_cast<size_t>(j + 1)] = w / h(j + 1, j);
            for (int i = 0; i < j; ++i) {
                const cplx t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
                h(i + 1, j) = -std::conj(sn(i)) * h(i, j) + cs(i) * h(i + 1, j);
                h(i, j) = t;
            }
            const cplx a = h(j, j), c = h(j + 1, j);
            const double t = std::sqrt(std::norm(a) + std::norm(c));
            if (t == 0.0) {
                cs(j) = 1.0;
                sn(j) = 0.0;
            } else if (std::abs(a) == 0.0) {
                cs(j) = 0.0;
                sn(j) = std::conj(c) / std::abs(c);
            } else {
                cs(j) = std::abs(a) / t;
                sn(j) = (a / std::abs(a)) * std::conj(c) / t;
            }
            h(j, j) = cs(j) * a + sn(j) * c;
            h(j + 1, j) = 0.0;
            g(j + 1) = -std::conj(sn(j)) * g(j);
            g(j) = cs(j) * g(j);
            if (std::abs(g(j + 1)) <= rtol * bnorm) {
                ++j;
                break;
            }
        }
        const Eigen::VectorXcd y =
            h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
        for (int i = 0; i < j; ++i) x += y(i) * v[static_cast<size_t>(i)];
        r = b - apply(x);
        beta = r.norm();
        rel_residual = beta / bnorm;
        if (rel_residual <= rtol) break;
    }
    return x;
}

DensityMatrix solve_krylov(const OpenSystem& sys, const Liouvillian& l, const SteadyStateOptions& opt,
                           SteadyStateInfo& info) {
    const int d = sys.space->dim();
    const UndrivenInverse pre(sys);
    DensityMatrix vac = DensityMatrix::ground(sys.space);
    const Eigen::MatrixXcd lv = l.apply(vac.m, sys.rabi);
    Eigen::VectorXcd b = -Eigen::Map<const Eigen::VectorXcd>(lv.data(), static_cast<Eigen::Index>(d) * d);
    Eigen::MatrixXcd out(d, d);
    auto op = [&](const Eigen::VectorXcd& y) {
        const Eigen::MatrixXcd x = pre.apply(Eigen::Map<const Eigen::MatrixXcd>(y.data(), d, d));
        l.apply(x, sys.rabi, out);
        return Eigen::VectorXcd(Eigen::Map<const Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(d) * d));
    };
    double rel = 0.0;
    const Eigen::VectorXcd y = gmres(op, b, opt.krylov_rtol, opt.restart, opt.max_iterations, info.iterations, rel);
    DensityMatrix rho{sys.space, vac.m + pre.apply(Eigen::Map<const Eigen::MatrixXcd>(y.data(), d, d))};
    return rho;
}

DensityMatrix solve_direct(const OpenSystem& sys, SteadyStateInfo& info) {
    const int d = sys.space->dim();
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    Eigen::MatrixXcd nsum = Eigen::MatrixXcd::Zero(d, d);
    SparseC eye(d, d);
    eye.setIdentity();
    SparseC lsup(n, n);
    for (int c = 1; c <= 2; ++c) {
        const auto a = annihilator(sys.space, c).m;
        nsum += a.adjoint() * a;
        const SparseC as = a.sparseView();
        const SparseC ac = SparseC(a.conjugate().sparseView());
        lsup += sys.kappa * SparseC(Eigen::kroneckerProduct(ac, as));
    }
    const Eigen::MatrixXcd hnh = sys.hamiltonian + sys.rabi * sys.drive - kI * (0.5 * sys.kappa) * nsum;
    const SparseC hs = hnh.sparseView();
    const SparseC hc = SparseC(hnh.conjugate().sparseView());
    lsup += -kI * (SparseC(Eigen::kroneckerProduct(eye, hs)) - SparseC(Eigen::kroneckerProduct(hc, eye)));

    // Replace the equation of the vacuum population by the trace condition.
    const Eigen::Index row = static_cast<Eigen::Index>(sys.space->index_of({QdState::G, 0, 0})) * (d + 1);
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int k = 0; k < lsup.outerSize(); ++k)
        for (SparseC::InnerIterator it(lsup, k); it; ++it)
            if (it.row() != row) trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < d; ++i) trip.emplace_back(static_cast<int>(row), i * (d + 1), cplx(1.0, 0.0));
    SparseC a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericError("sparse LU factorization of the Liouvillian failed", 0.0);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(row) = 1.0;
    const Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw NumericError("sparse LU solve failed", 0.0);
    info.iterations = 1;
    return {sys.space, Eigen::Map<const Eigen::MatrixXcd>(x.data(), d, d)};
}

DensityMatrix solve_propagation(const OpenSystem& sys, const Liouvillian& l, const SteadyStateOptions& opt,
                                SteadyStateInfo& info) {
    DensityMatrix rho = DensityMatrix::ground(sys.space);
    const double chunk = 20.0 / sys.kappa;
    double t = 0.0;
    IntegratorOptions io;
    io.rtol = 1e-11;
    io.atol = 1e-14;
    while (t < opt.propagation_time) {
        rho.m = evolve(l, rho.m, t, t + chunk, constant_drive(sys.rabi), io);
        t += chunk;
        ++info.iterations;
        if (l.apply(rho.m, sys.rabi).cwiseAbs().maxCoeff() <= opt.tolerance) break;
    }
    return rho;
}

}  // namespace

DensityMatrix steady_state(const OpenSystem& sys, const SteadyStateOptions& opt, SteadyStateInfo* info) {
    if (!(sys.kappa > 0.0)) throw ConfigError("steady state requires kappa > 0");
    const Liouvillian l(sys);
    SteadyStateInfo local;
    DensityMatrix rho;
    switch (opt.method) {
        case SteadyStateMethod::Krylov: rho = solve_krylov(sys, l, opt, local); break;
        case SteadyStateMethod::Direct: rho = solve_direct(sys, local); break;
        case SteadyStateMethod::Propagation: rho = solve_propagation(sys, l, opt, local); break;
    }
    rho.m = 0.5 * (rho.m + rho.m.adjoint());
    rho.m /= rho.m.trace();
    local.residual = l.apply(rho.m, sys.rabi).cwiseAbs().maxCoeff();
    if (opt.method == SteadyStateMethod::Krylov && !(local.residual <= opt.tolerance) &&
        l.dim() <= kDirectFallbackDim) {
        // Strong drive can stall GMRES; small spaces are cheap to factorize.
        rho = solve_direct(sys, local);
        rho.m = 0.5 * (rho.m + rho.m.adjoint());
        rho.m /= rho.m.trace();
        local.residual = l.apply(rho.m, sys.rabi).cwiseAbs().maxCoeff();
        local.direct_fallback = true;
    }
    if (info) *info = local;
    if (!(local.residual <= opt.tolerance)) {
        std::ostringstream os;
        os << to_string(opt.method) << " steady-state solve did not converge: max |L(rho)| = " << local.residual;
        throw NumericError(os.str(), local.residual);
    }
    return rho;
}

}  // namespace noon
