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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noonsim/hilbert.hpp"
#include "noonsim/model.hpp"

namespace noon {

enum class Branch : int { Plus = 1, Minus = -1 };

inline double sign_of(Branch s) { return s == Branch::Plus ? 1.0 : -1.0; }
std::string to_string(Branch s);
Branch branch_from_string(const std::string& s);

// ---- two-photon system ----

// GES energy E_s = delta1 + s sqrt(delta1^2 + 2 g2p^2).
double ges_energy_n2(double delta1, double g2p, Branch s);
// Detuning of cavity 2 that makes |G,11> dark: delta2 = E_s / 2.
double condition_delta2(double delta1, double g2p, Branch s);
// Branch whose condition lies closest to p.delta2.
Branch nearest_branch(const ParamsN2& p);

struct DesignSolutionN2 {
    Branch branch = Branch::Minus;
    double delta2 = 0.0;
    double energy = 0.0;
    double mixing_angle = 0.0;  // phi_s = arctan(E_s / g2p)
    // Amplitudes on |B,00>, |G,20>, |G,11>, |G,02>.
    std::array<double, 4> amplitudes{};
    // Residual of the numerical cross-check against the Hamiltonian.
    double eigen_residual = 0.0;
};

// Validates p against the condition (tolerance 1e-9), then returns the analytic GES,
// cross-checked against diagonalization of the two-excitation block.
DesignSolutionN2 solve_ges_n2(const ParamsN2& p, Branch s);
// Convenience: sets delta2 from the condition and solves.
DesignSolutionN2 design_n2(double delta1, double g2p, Branch s);
// GES as a vector of the given space.
Eigen::VectorXcd ges_vector_n2(const DesignSolutionN2& sol, const SpacePtr& space);

struct OnePhotonEigensystem {
    double phi = 0.0;  // tan(phi) = sqrt(1 + (delta/j)^2) - delta/j, delta = (delta1 - delta2) / 2
    double e_plus = 0.0;
    double e_minus = 0.0;
    double delta_e1 = 0.0;  // e_plus - e_minus
    double residual = 0.0;  // agreement with numerical diagonalization
};

// One-photon eigenstates |1P,+> = cos(phi)|10> + sin(phi)|01>,
// |1P,-> = -sin(phi)|10> + cos(phi)|01>. Throws ConfigError for j = 0.
OnePhotonEigensystem one_photon_eigensystem(const ParamsN2& p);
Eigen::VectorXcd one_photon_vector(const OnePhotonEigensystem& e, Branch s, const SpacePtr& space);

// ---- four-photon system ----

struct TuningN4 {
    double j = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta_b = 0.0;
};

// Reference design at g2 / g1 = 2, used to seed continuation.
inline constexpr TuningN4 kReferenceTuningN4{1.61, -0.78, 1.90, 2.68};
inline constexpr double kReferenceRatioN4 = 2.0;

struct GesCandidateN4 {
    double energy = 0.0;
    // Amplitudes on the twelve N_tot = 4 states, keyed by label.
    std::map<BasisLabel, double> amplitudes;
    double unwanted_weight = 0.0;  // |A_G31|^2 + |A_G22|^2 + |A_G13|^2
    std::array<double, 4> residuals{};
};

// Eigenvector of the four-excitation block with the least weight on |G,31>, |G,22>, |G,13>,
// sign fixed by A_Q00 >= 0. Couplings g1 = 1/sqrt(2), g2 = ratio * g1.
GesCandidateN4 evaluate_ges_n4(const TuningN4& t, double ratio, Topology topology = Topology::FourPhoton);
// Residuals of the three amplitude equations and |A40| - |A04|.
std::array<double, 4> requirement_residuals_n4(const TuningN4& t, double ratio);

// Closed-form E_4004 from both QD branches:
// (6 d1 + dB)/2 + sqrt((d1 - dB/2)^2 + 12 g1^2 - 4 j^2) and
// (6 d2 - dB)/2 - sqrt((d2 + dB/2)^2 + 12 g2^2 - 4 j^2). NaN when a root is imaginary.
std::array<double, 2> ges_energy_closed_form_n4(const TuningN4& t, double g1, double g2);

enum class DesignStatus { Converged, NoSolution, NotConverged };
std::string to_string(DesignStatus s);

struct DesignSolutionN4 {
    double ratio = 0.0;
    TuningN4 tuning;
    double energy = 0.0;
    double residual = 0.0;  // max |residual|
    std::map<BasisLabel, double> amplitudes;
};

struct DesignResultN4 {
    DesignStatus status = DesignStatus::NotConverged;
    std::optional<DesignSolutionN4> solution;
    TuningN4 best;
    double best_residual = 0.0;
    std::string message;
};

struct DesignOptionsN4 {
    double tolerance = 1e-9;
    int max_newton_iterations = 100;
    double continuation_step = 0.05;
};

// Damped Newton on the four residuals. Without a seed, continues in ratio from the
// reference design. A root is accepted only if both closed-form energies agree with it.
DesignResultN4 solve_ges_n4(double ratio, std::optional<TuningN4> seed = std::nullopt,
                            const DesignOptionsN4& opt = {});

// Smallest ratio (to within tol) in [lo, hi] for which a design exists, by bisection.
double existence_threshold_n4(double lo, double hi, double tol = 1e-4);

struct Fig9Row {
    double ratio = 0.0;
    DesignStatus status = DesignStatus::NotConverged;
    TuningN4 tuning;
    double energy = 0.0;
    double residual = 0.0;
};

// Optimal tuning over a ratio grid, following the solution branch by continuation.
std::vector<Fig9Row> ratio_sweep_n4(double ratio_min, double ratio_max, double step);

// ---- interference flow graph ----

struct FlowGraph {
    std::vector<BasisLabel> unwanted;          // |G,n,N-n>, 0 < n < N
    std::vector<BasisLabel> support;           // states the GES may populate
    std::vector<std::pair<BasisLabel, BasisLabel>> edges;  // support -> unwanted
    std::map<BasisLabel, int> incoming;        // incoming path count per unwanted state
    bool candidate = false;                    // every count differs from 1
    std::optional<BasisLabel> blocking;        // first state with exactly one path
};

// Unwanted states of the N-photon problem present in the space.
std::vector<BasisLabel> unwanted_states(const SpacePtr& space, int n);
// All N_tot = N states except the unwanted ones.
std::vector<BasisLabel> default_ges_support(const SpacePtr& space, int n);
// Counts couplings |h_{u s}| > tol from support states into each unwanted state.
// Throws ConfigError if h does not conserve total excitation.
FlowGraph flow_graph(const OperatorMatrix& h, const std::vector<BasisLabel>& ges_support, int n,
                     double tol = 1e-12);

}  // namespace noon
