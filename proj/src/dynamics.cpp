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

#include "noonsim/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "noonsim/errors.hpp"

namespace noon {

namespace odeint = boost::numeric::odeint;
using cplx = std::complex<double>;
// Complex matrices are integrated as interleaved real vectors.
using StateVec = Eigen::VectorXd;

namespace {

const cplx kI(0.0, 1.0);

}  // namespace

OpenSystem open_system(const ParamsN2& p, int n_max, int photon_cap) {
    p.validate();
    auto space = build_space({Topology::TwoPhoton}, n_max, photon_cap);
    OpenSystem s;
    s.space = space;
    s.hamiltonian = rotating_frame(hamiltonian_n2(p, space), p.pump_detuning).m;
    s.drive = pump_term(1.0, p.pump_port, space).m;
    s.rabi = p.rabi;
    s.kappa = p.kappa;
    return s;
}

OpenSystem open_system(const ParamsN4& p, int n_max, Topology topology, int photon_cap) {
    p.validate();
    if (topology == Topology::TwoPhoton) throw ConfigError("four-photon parameters need an n4 topology");
    auto space = build_space({topology}, n_max, photon_cap);
    OpenSystem s;
    s.space = space;
    s.hamiltonian = rotating_frame(hamiltonian(p, space), p.pump_detuning).m;
    s.drive = pump_term(1.0, p.pump_port, space).m;
    s.rabi = p.rabi;
    s.kappa = p.kappa;
    return s;
}

// ---- DensityMatrix ----

DensityMatrix DensityMatrix::ground(const SpacePtr& space) {
    return pure(space, basis_vector(space, {QdState::G, 0, 0}));
}

DensityMatrix DensityMatrix::pure(const SpacePtr& space, const Eigen::VectorXcd& psi) {
    if (psi.size() != space->dim()) throw ConfigError("state vector has the wrong dimension");
    const double n = psi.norm();
    if (!(n > 0.0)) throw ConfigError("state vector is zero");
    const Eigen::VectorXcd v = psi / n;
    return {space, v * v.adjoint()};
}

double DensityMatrix::population(const Eigen::VectorXcd& psi) const {
    return (psi.adjoint() * m * psi)(0, 0).real();
}

double DensityMatrix::sector_population(int k) const {
    double p = 0.0;
    for (int i : space->sector(k)) p += m(i, i).real();
    return p;
}

double DensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::check_physical(double tol) const {
    const double tr_err = std::abs(m.trace() - cplx(1.0, 0.0));
    if (tr_err > tol) throw NumericError("density matrix trace deviates from 1", tr_err);
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) throw NumericError("density matrix is not Hermitian", herm);
    const double lmin = min_eigenvalue();
    if (lmin < -tol) throw NumericError("density matrix has a negative eigenvalue", -lmin);
}

// ---- Liouvillian ----

Eigen::MatrixXcd liouvillian_apply(const OperatorMatrix& h_total, double kappa, const Eigen::MatrixXcd& rho) {
    if (kappa < 0.0) throw ConfigError("kappa must be non-negative");
    if (rho.rows() != h_total.m.rows() || rho.cols() != h_total.m.cols())
        throw ConfigError("density matrix and Hamiltonian dimensions differ");
    Eigen::MatrixXcd out = -kI * (h_total.m * rho - rho * h_total.m);
    for (int c = 1; c <= 2; ++c) {
        const auto a = annihilator(h_total.space, c).m;
        const Eigen::MatrixXcd n = a.adjoint() * a;
        out += kappa * (a * rho * a.adjoint() - 0.5 * (n * rho + rho * n));
    }
    return out;
}

namespace {

std::vector<Liouvillian::Entry> entries(const Eigen::MatrixXcd& m) {
    std::vector<Liouvillian::Entry> out;
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r)
            if (m(r, c) != cplx(0.0, 0.0)) out.push_back({r, c, m(r, c)});
    return out;
}

// out (+)= x * A for A given as a coordinate list.
void right_multiply(const Eigen::Ref<const Eigen::MatrixXcd>& x, const std::vector<Liouvillian::Entry>& a,
                    cplx scale, Eigen::MatrixXcd& out, bool accumulate) {
    if (!accumulate) out.setZero();
    for (const auto& e : a) out.col(e.col) += (scale * e.value) * x.col(e.row);
}

}  // namespace

Liouvillian::Liouvillian(const OpenSystem& sys) : dim_(sys.space->dim()), kappa_(sys.kappa) {
    if (sys.kappa < 0.0) throw ConfigError("kappa must be non-negative");
    Eigen::MatrixXcd nsum = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int c = 1; c <= 2; ++c) {
        const auto a = annihilator(sys.space, c).m;
        nsum += a.adjoint() * a;
        jumps_adj_.push_back(entries(a.adjoint()));
    }
    const Eigen::MatrixXcd hnh = sys.hamiltonian - kI * (0.5 * sys.kappa) * nsum;
    hnh_adj_ = entries(hnh.adjoint());
    drive_ = entries(sys.drive);
    t1_.resize(dim_, dim_);
    t2_.resize(dim_, dim_);
    t3_.resize(dim_, dim_);
}

void Liouvillian::apply(const Eigen::Ref<const Eigen::MatrixXcd>& x, double omega, Eigen::MatrixXcd& out) const {
    // x H^dag and (x^dag H^dag)^dag = H x, with H the non-Hermitian Hamiltonian plus drive.
    right_multiply(x, hnh_adj_, 1.0, t1_, false);
    if (omega != 0.0) right_multiply(x, drive_, omega, t1_, true);
    t3_ = x.adjoint();
    right_multiply(t3_, hnh_adj_, 1.0, t2_, false);
    if (omega != 0.0) right_multiply(t3_, drive_, omega, t2_, true);
    out.noalias() = kI * t1_;
    out.noalias() -= kI * t2_.adjoint();
    if (kappa_ != 0.0) {
        for (const auto& ja : jumps_adj_) {
            right_multiply(x, ja, 1.0, t1_, false);  // x a^dag
            t3_ = t1_.adjoint();                     // a x^dag
            right_multiply(t3_, ja, 1.0, t2_, false);  // a x^dag a^dag = (a x a^dag)^dag
            out.noalias() += kappa_ * t2_.adjoint();
        }
    }
}

void Liouvillian::apply_hermitian(const Eigen::Ref<const Eigen::MatrixXcd>& rho, double omega,
                                  Eigen::MatrixXcd& out) const {
    // U = i rho H^dag; L = U + U^dag + kappa sum a rho a^dag.
    right_multiply(rho, hnh_adj_, kI, t1_, false);
    if (omega != 0.0) right_multiply(rho, drive_, kI * omega, t1_, true);
    out = t1_ + t1_.adjoint();
    if (kappa_ != 0.0) {
        for (const auto& ja : jumps_adj_) {
            right_multiply(rho, ja, 1.0, t1_, false);  // rho a^dag
            t3_ = t1_.adjoint();                       // a rho
            right_multiply(t3_, ja, kappa_, out, true);
        }
    }
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& x, double omega) const {
    Eigen::MatrixXcd out(dim_, dim_);
    apply(x, omega, out);
    return out;
}

// ---- propagation ----

DriveShape constant_drive(double rabi) {
    return [rabi](double) { return rabi; };
}

DriveShape gaussian_pulse(double power, double width, double t_peak) {
    if (!(width > 0.0)) throw ConfigError("pulse width must be positive");
    if (power < 0.0) throw ConfigError("pulse power must be non-negative");
    const double peak = std::sqrt(power / width);
    return [=](double t) {
        const double x = (t - t_peak) / width;
        return peak * std::exp(-x * x);
    };
}

PopulationSample measure(const DensityMatrix& rho, const PopulationProbes& probes, double t) {
    PopulationSample s;
    s.t = t;
    s.trace = rho.trace();
    s.p_ges = probes.ges.size() ? rho.population(probes.ges) : 0.0;
    if (probes.one_photon.size() >= 1) s.p_1p_plus = rho.population(probes.one_photon[0]);
    if (probes.one_photon.size() >= 2) s.p_1p_minus = rho.population(probes.one_photon[1]);
    s.p_g00 = rho.m(rho.space->index_of({QdState::G, 0, 0}), rho.space->index_of({QdState::G, 0, 0})).real();
    s.p_2r = rho.sector_population(probes.noon_number) - s.p_ges;
    for (int k = probes.noon_number + 1; k <= rho.space->max_excitation(); ++k) s.p_m += rho.sector_population(k);
    return s;
}

namespace {

// Embedded Runge-Kutta 4(5) pair with adaptive steps.
using Stepper = odeint::runge_kutta_cash_karp54<StateVec, double, StateVec, double, odeint::vector_space_algebra>;

auto make_stepper(const IntegratorOptions& opt) {
    // A zero max_step leaves the step size unbounded.
    return odeint::make_controlled(opt.atol, opt.rtol, opt.max_step, Stepper());
}

Eigen::Map<const Eigen::MatrixXcd> as_matrix(const StateVec& y, int d, Eigen::Index offset = 0) {
    return {reinterpret_cast<const cplx*>(y.data()) + offset, d, d};
}

Eigen::Map<Eigen::MatrixXcd> as_matrix(StateVec& y, int d, Eigen::Index offset = 0) {
    return {reinterpret_cast<cplx*>(y.data()) + offset, d, d};
}

void symmetrize(Eigen::Map<Eigen::MatrixXcd> y) {
    const Eigen::Index d = y.rows();
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < c; ++r) {
            const cplx v = 0.5 * (y(r, c) + std::conj(y(c, r)));
            y(r, c) = v;
            y(c, r) = std::conj(v);
        }
        y(c, c) = y(c, c).real();
    }
}

// Adaptive integration through the given times, calling observe(x, t) at each of them.
// With hermitian set, the leading d x d block is re-symmetrized after every accepted
// step so that roundoff in its anti-Hermitian part cannot grow.
template <typename System, typename Observer>
void integrate_through(const IntegratorOptions& opt, System rhs, StateVec& x, const std::vector<double>& times,
                       double dt, int d, Observer observe) {
    auto stepper = make_stepper(opt);
    double t = times.front();
    observe(x, t);
    for (size_t k = 1; k < times.size(); ++k) {
        const double target = times[k];
        int rejected = 0;
        while (t < target) {
            const double wanted = dt;
            const bool clipped = target - t < dt;
            if (clipped) dt = target - t;
            if (stepper.try_step(rhs, x, t, dt) == odeint::success) {
                rejected = 0;
                if (opt.hermitian) symmetrize(as_matrix(x, d));
                if (clipped) {
                    t = target;
                    dt = std::max(dt, wanted);
                }
            } else if (++rejected > 500) {
                throw NumericError("step size collapsed at t = " + std::to_string(t), dt);
            }
        }
        observe(x, target);
    }
}

}  // namespace

PopulationTrace propagate(const OpenSystem& sys, const DensityMatrix& rho0, const std::vector<double>& times,
                          const DriveShape& drive, const PopulationProbes& probes,
                          const IntegratorOptions& opt) {
    if (times.empty()) throw ConfigError("time grid is empty");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ConfigError("time grid must be strictly increasing");
    if (rho0.space->dim() != sys.space->dim()) throw ConfigError("initial state lives in a different space");
    const Liouvillian l(sys);
    const int d = l.dim();
    StateVec x(2 * static_cast<Eigen::Index>(d) * d);
    as_matrix(x, d) = rho0.m;
    Eigen::MatrixXcd out(d, d);
    auto rhs = [&](const StateVec& y, StateVec& dy, double t) {
        if (opt.hermitian)
            l.apply_hermitian(as_matrix(y, d), drive(t), out);
        else
            l.apply(as_matrix(y, d), drive(t), out);
        as_matrix(dy, d) = out;
    };
    PopulationTrace trace;
    trace.final_state.space = sys.space;
    auto observer = [&](const StateVec& y, double t) {
        DensityMatrix r{sys.space, as_matrix(y, d)};
        if (opt.check_physical) r.check_physical(opt.physical_tol);
        trace.samples.push_back(measure(r, probes, t));
        trace.final_state = r;
    };
    const double dt0 = times.size() > 1 ? std::min(1e-3, times[1] - times[0]) : 1e-3;
    try {
        integrate_through(opt, rhs, x, times, dt0, d, observer);
    } catch (const NumericError&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericError(std::string("master-equation integration failed: ") + e.what(), 0.0);
    }
    return trace;
}

Eigen::MatrixXcd evolve(const Liouvillian& l, const Eigen::MatrixXcd& x0, double t0, double t1,
                        const DriveShape& drive, const IntegratorOptions& opt, Eigen::MatrixXcd* integral) {
    const int d = l.dim();
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    const bool aug = integral != nullptr;
    if (t1 <= t0) {
        if (aug) integral->setZero(d, d);
        return x0;
    }
    StateVec x = StateVec::Zero(2 * (aug ? 2 * n : n));
    as_matrix(x, d) = x0;
    Eigen::MatrixXcd out(d, d);
    auto rhs = [&](const StateVec& y, StateVec& dy, double t) {
        if (opt.hermitian)
            l.apply_hermitian(as_matrix(y, d), drive(t), out);
        else
            l.apply(as_matrix(y, d), drive(t), out);
        as_matrix(dy, d) = out;
        if (aug) as_matrix(dy, d, n) = as_matrix(y, d);
    };
    try {
        integrate_through(opt, rhs, x, {t0, t1}, std::min(1e-3, t1 - t0), d, [](const StateVec&, double) {});
    } catch (const std::exception& e) {
        throw NumericError(std::string("operator evolution failed: ") + e.what(), 0.0);
    }
    if (aug) *integral = as_matrix(x, d, n);
    return as_matrix(x, d);
}

// ---- convergence ----

ConvergenceReport convergence_check(const std::function<double(int)>& quantity,
                                    const std::vector<int>& n_max_list, double tol) {
    if (n_max_list.size() < 2) throw ConfigError("convergence check needs at least two truncations");
    ConvergenceReport rep;
    rep.tolerance = tol;
    rep.n_max = n_max_list;
    for (int n : n_max_list) rep.values.push_back(quantity(n));
    const size_t k = rep.values.size();
    rep.converged = std::abs(rep.values[k - 1] - rep.values[k - 2]) <= tol;
    return rep;
}

}  // namespace noon
