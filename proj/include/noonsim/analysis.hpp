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

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "noonsim/design.hpp"
#include "noonsim/dynamics.hpp"

namespace noon {

// Normalized N-photon density matrix reconstructed from normally ordered moments.
// Row/column r corresponds to |N - r, r>: index 0 is |N0>, index N is |0N>.
struct TomographyMatrix {
    int n = 2;
    Eigen::MatrixXcd m;
};

// Element (r, c) is <(a1^dag)^m (a2^dag)^(N-m) a2^(N-m') a1^m'> / sqrt(m!(N-m)! m'!(N-m')!)
// with m = N - r, m' = N - c, normalized to unit trace.
// Throws NumericError when the state has no N-photon component.
TomographyMatrix tomography(const DensityMatrix& rho, int n);

// Concurrence from the corner element: 2 |T(0, 2)| for N = 2, |T(0, N)| for N >= 3.
// The N >= 3 form is bounded by 1/2 for a unit-trace matrix.
double concurrence(const TomographyMatrix& t);
// 2 |T(0, N)| for any N; 1 for an ideal NOON state.
double noon_coherence(const TomographyMatrix& t);

struct PurityMeasures {
    double concurrence = 0.0;
    double trace_distance = 0.0;  // min over theta of Tr|rho_theta - T|
    double theta_opt = 0.0;       // in [0, 2 pi)
    double hilbert_schmidt = 0.0; // (1/2) Tr[(rho_theta - T)^2] at theta_opt
};

// Two-photon only. rho_theta = |psi><psi|, psi = (|20> + exp(-i theta)|02>) / sqrt(2).
PurityMeasures trace_distance(const TomographyMatrix& t);

// ---- coincidence counts ----

// Window-integrated two-photon coincidence counts. n_ab_cd denotes the count with
// creation-side cavities (a, b) and annihilation-side cavities (c, d).
struct CoincidenceRecord {
    double window = 0.0;        // coincidence window Delta T_w
    double cutoff = 0.0;        // upper limit of the emission-time integral
    double n11 = 0.0;           // <a1^dag a1^dag a1 a1>
    double n22 = 0.0;
    double n12 = 0.0;           // <a1^dag a2^dag a2 a1>
    std::complex<double> n1122; // <a1^dag a1^dag a2 a2>
    std::complex<double> n11_12;  // <a1^dag a1^dag a2 a1>, symmetrized over orderings
    std::complex<double> n12_22;  // <a1^dag a2^dag a2 a2>, symmetrized over orderings
};

struct CoincidenceOptions {
    double envelope_cutoff = 1e-6;  // stop once the >=2-photon population falls below this
    int n_max = 2;
    IntegratorOptions integrator;
};

// Counts from the quantum regression theorem under the undriven Liouvillian,
// starting from rho0 (two-photon system).
CoincidenceRecord coincidence_counts_regression(const ParamsN2& p, const DensityMatrix& rho0, double window,
                                                const CoincidenceOptions& opt = {});
// Several windows sharing one emission-time integral; results follow the input order.
std::vector<CoincidenceRecord> coincidence_counts_regression(const ParamsN2& p, const DensityMatrix& rho0,
                                                             const std::vector<double>& windows,
                                                             const CoincidenceOptions& opt = {});

// Closed-form counts for the GES decay. Requires p to satisfy a dark-state condition.
CoincidenceRecord coincidence_counts_analytic(const ParamsN2& p, double window);

// Tomography matrix assembled from coincidence counts.
TomographyMatrix tomography_from_counts(const CoincidenceRecord& c);

// ---- rates ----

// Maximum two-photon detection rate kappa Gamma_2002 / Delta E_1 in internal units.
double detection_rate(const ParamsN2& p);
// Same, converted to Hz for a reference coupling in eV.
double detection_rate_hz(const ParamsN2& p, double g_ref_ev);
// Rate scaling kappa (kappa / j)^(N - 1) for NOON number N.
double rate_scaling_n(int n, double kappa, double j);

}  // namespace noon
