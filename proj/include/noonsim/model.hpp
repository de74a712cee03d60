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

#include "noonsim/hilbert.hpp"

namespace noon {

// Two-photon system: one QD in cavity 1, cavities coupled by tunneling j.
// Energies relative to the two-photon resonance, in units of sqrt(2) g_ref.
struct ParamsN2 {
    double g2p = 0.70710678118654752;  // effective two-photon coupling
    double j = 1.0;
    double delta1 = 1.0;
    double delta2 = 0.0;
    double kappa = 0.1;
    double pump_detuning = 0.0;  // pump frequency relative to the reference, per photon
    double rabi = 0.0;           // cw pump amplitude
    int pump_port = 2;           // cavity driven by the pump

    // Throws ConfigError on non-finite values, negative loss or a bad port.
    void validate() const;
};

// Four-photon system: two QDs, couplings g1 (QD1) and g2 (QD2).
struct ParamsN4 {
    double g1 = 0.70710678118654752;
    double g2 = 1.41421356237309505;
    double j = 1.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta_b = 0.0;  // bound-biexciton offset: +delta_b for B1, -delta_b for B2
    double kappa = 0.01;
    double pump_detuning = 0.0;
    double rabi = 0.0;
    int pump_port = 1;

    void validate() const;
};

// Microscopic QD parameters: one-photon coupling g and biexciton binding energy chi.
struct MicroscopicParams {
    double g = 0.0;
    double chi = 1.0;
};

// Effective two-photon coupling 2 g^2 / chi. Throws ConfigError if chi <= 0.
double effective_coupling(const MicroscopicParams& p);
// True when g exceeds chi / 4, where adiabatic elimination is no longer reliable.
bool beyond_two_photon_regime(const MicroscopicParams& p);

// Effective Hamiltonians (not in a rotating frame).
OperatorMatrix hamiltonian_n2(const ParamsN2& p, const SpacePtr& space);
OperatorMatrix hamiltonian_n4(const ParamsN4& p, const SpacePtr& space);
// Both QDs emit into cavity 1.
OperatorMatrix hamiltonian_n4_variant(const ParamsN4& p, const SpacePtr& space);
// Dispatches on the space topology.
OperatorMatrix hamiltonian(const ParamsN4& p, const SpacePtr& space);

// H - omega_p * N_tot.
OperatorMatrix rotating_frame(const OperatorMatrix& h, double pump_detuning);
// rabi * (a_k + a_k^dagger).
OperatorMatrix pump_term(double rabi, int port, const SpacePtr& space);
OperatorMatrix pump_term(const ParamsN2& p, const SpacePtr& space);
OperatorMatrix pump_term(const ParamsN4& p, const SpacePtr& space);

}  // namespace noon
