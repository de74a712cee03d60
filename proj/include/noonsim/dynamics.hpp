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

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "noonsim/hilbert.hpp"
#include "noonsim/model.hpp"

namespace noon {

using SparseC = Eigen::SparseMatrix<std::complex<double>>;

// Driven, damped system in the frame rotating at the pump frequency.
struct OpenSystem {
    SpacePtr space;
    Eigen::MatrixXcd hamiltonian;  // H - omega_p N_tot, without the pump
    Eigen::MatrixXcd drive;        // a_k + a_k^dagger (unit amplitude)
    double rabi = 0.0;             // cw drive amplitude
    double kappa = 0.0;            // loss rate of each cavity
};

OpenSystem open_system(const ParamsN2& p, int n_max, int photon_cap = -1);
OpenSystem open_system(const ParamsN4& p, int n_max, Topology topology = Topology::FourPhoton,
                       int photon_cap = -1);

struct DensityMatrix {
    SpacePtr space;
    Eigen::MatrixXcd m;

    static DensityMatrix ground(const SpacePtr& space);
    static DensityMatrix pure(const SpacePtr& space, const Eigen::VectorXcd& psi);

    double trace() const { return m.trace().real(); }
    double population(const Eigen::VectorXcd& psi) const;
    // Population of all states with the given total excitation.
    double sector_population(int k) const;
    double min_eigenvalue() const;
    // Throws NumericError if trace, Hermiticity or positivity are off by more than tol.
    void check_physical(double tol) const;
};

// L(rho) = -i[H, rho] + kappa sum_j (a_j rho a_j^dag - {a_j^dag a_j, rho} / 2).
Eigen::MatrixXcd liouvillian_apply(const OperatorMatrix& h_total, double kappa, const Eigen::MatrixXcd& rho);

// Lindblad generator with a drive of adjustable amplitude. Operators are stored as
// coordinate lists; every product is evaluated as dense-times-sparse column updates.
class Liouvillian {
public:
    explicit Liouvillian(const OpenSystem& sys);

    int dim() const { return dim_; }
    double kappa() const { return kappa_; }
    // out = L(x) with the drive amplitude set to omega; x need not be Hermitian.
    void apply(const Eigen::Ref<const Eigen::MatrixXcd>& x, double omega, Eigen::MatrixXcd& out) const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x, double omega) const;
    // Same as apply for Hermitian rho, using L(rho)^dagger = L(rho).
    void apply_hermitian(const Eigen::Ref<const Eigen::MatrixXcd>& rho, double omega, Eigen::MatrixXcd& out) const;

    struct Entry {
        int row;
        int col;
        std::complex<double> value;
    };

private:
    int dim_;
    double kappa_;
    std::vector<Entry> hnh_adj_;  // (H - i kappa/2 sum_j a_j^dag a_j)^dagger
    std::vector<Entry> drive_;
    std::vector<std::vector<Entry>> jumps_adj_;
    mutable Eigen::MatrixXcd t1_, t2_, t3_;
};

// ---- time propagation ----

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = 0.0;  // 0: unlimited
    bool hermitian = true;  // states stay Hermitian (density matrices)
    bool check_physical = true;
    double physical_tol = 1e-7;
};

// Time-dependent drive amplitude.
using DriveShape = std::function<double(double)>;
DriveShape constant_drive(double rabi);
// omega(t) = sqrt(power / width) exp(-((t - t_peak) / width)^2).
DriveShape gaussian_pulse(double power, double width, double t_peak);

// Projectors used to summarize a trajectory.
struct PopulationProbes {
    int noon_number = 2;
    Eigen::VectorXcd ges;                   // target eigenstate
    std::vector<Eigen::VectorXcd> one_photon;  // optional: |1P,+>, |1P,->
};

struct PopulationSample {
    double t = 0.0;
    double p_ges = 0.0;
    double p_1p_plus = 0.0;
    double p_1p_minus = 0.0;
    double p_g00 = 0.0;
    double p_2r = 0.0;  // rest of the N-excitation sector
    double p_m = 0.0;   // sectors above N
    double trace = 0.0;
    double one_photon() const { return p_1p_plus + p_1p_minus; }
};

struct PopulationTrace {
    std::vector<PopulationSample> samples;
    DensityMatrix final_state;
};

PopulationSample measure(const DensityMatrix& rho, const PopulationProbes& probes, double t);

// Integrates the master equation from times.front() and records populations at each time.
PopulationTrace propagate(const OpenSystem& sys, const DensityMatrix& rho0, const std::vector<double>& times,
                          const DriveShape& drive, const PopulationProbes& probes,
                          const IntegratorOptions& opt = {});

// Evolves an arbitrary (not necessarily Hermitian) operator under L with drive omega
// from t0 to t1. If integral is non-null it receives the time integral of the state.
Eigen::MatrixXcd evolve(const Liouvillian& l, const Eigen::MatrixXcd& x0, double t0, double t1,
                        const DriveShape& drive, const IntegratorOptions& opt = {},
                        Eigen::MatrixXcd* integral = nullptr);

// ---- steady state ----

enum class SteadyStateMethod {
    Krylov,       // preconditioned GMRES on the Liouvillian
    Direct,       // sparse LU of the vectorized Liouvillian with a trace row
    Propagation,  // long-time integration
};

std::string to_string(SteadyStateMethod m);
SteadyStateMethod steady_state_method_from_string(const std::string& s);

struct SteadyStateOptions {
    SteadyStateMethod method = SteadyStateMethod::Krylov;
    double tolerance = 1e-10;      // bound on max |L(rho)|
    double krylov_rtol = 1e-14;    // relative GMRES residual
    int restart = 150;
    int max_iterations = 3000;
    double propagation_time = 1e5;
};

struct SteadyStateInfo {
    double residual = 0.0;
    int iterations = 0;
    bool direct_fallback = false;  // Krylov stalled and the direct solver was used
};

// Hilbert-space dimension up to which a stalled Krylov solve falls back to sparse LU.
inline constexpr int kDirectFallbackDim = 100;

// Unique steady state of the cw-driven system. Requires kappa > 0. A Krylov solve that
// misses the tolerance is retried with the direct method when dim <= kDirectFallbackDim.
DensityMatrix steady_state(const OpenSystem& sys, const SteadyStateOptions& opt = {},
                           SteadyStateInfo* info = nullptr);

// ---- truncation convergence ----

struct ConvergenceReport {
    std::vector<int> n_max;
    std::vector<double> values;
    double tolerance = 1e-4;
    bool converged = false;  // last two values agree within tolerance
};

ConvergenceReport convergence_check(const std::function<double(int)>& quantity,
                                    const std::vector<int>& n_max_list, double tol = 1e-4);

}  // namespace noon
