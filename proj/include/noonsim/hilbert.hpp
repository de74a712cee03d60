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

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace noon {

// Quantum-dot configurations. The two-photon system uses {G, B};
// the four-photon system uses {G, B1, B2, Q}.
enum class QdState : int { G = 0, B = 1, B1 = 2, B2 = 3, Q = 4 };

enum class Topology {
    TwoPhoton,          // one QD, two-photon emission into cavity 1
    FourPhoton,         // two QDs, QD1 emits into cavity 1, QD2 into cavity 2
    FourPhotonVariant,  // two QDs, both emit into cavity 1
};

// Excitation number carried by a QD configuration.
int excitation_weight(QdState q);
std::string to_string(QdState q);
QdState qd_state_from_string(const std::string& s);
std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

struct BasisLabel {
    QdState qd = QdState::G;
    int n1 = 0;
    int n2 = 0;
    auto operator<=>(const BasisLabel&) const = default;
};

int total_excitation(const BasisLabel& l);
// Formats as |G,20>.
std::string to_string(const BasisLabel& l);

// Structural description of a coupled QD-cavity system.
struct SystemModel {
    Topology topology = Topology::TwoPhoton;

    int qd_count() const;
    int cavity_count() const { return 2; }
    // Number of photons of the targeted NOON state.
    int noon_number() const;
    std::vector<QdState> qd_states() const;
    bool has_qd_state(QdState q) const;
    // Cavity into which a given QD emits photon pairs (QD index 1 or 2).
    int emission_cavity(int qd_index) const;
};

// Truncated product space of QD configurations and two Fock ladders, n_j <= n_max.
// An optional photon cap additionally keeps only n1 + n2 <= photon_cap.
// Basis ordering is lexicographic in (qd, n1, n2).
class HilbertSpace {
public:
    HilbertSpace(SystemModel model, int n_max, int photon_cap = -1);

    const SystemModel& model() const { return model_; }
    int n_max() const { return n_max_; }
    // -1 when no cap is applied.
    int photon_cap() const { return photon_cap_; }
    int dim() const { return static_cast<int>(labels_.size()); }
    const BasisLabel& label(int i) const { return labels_.at(static_cast<size_t>(i)); }
    const std::vector<BasisLabel>& labels() const { return labels_; }
    std::optional<int> find(const BasisLabel& l) const;
    // Throws ConfigError when the label is not part of the space.
    int index_of(const BasisLabel& l) const;
    // Indices with total excitation equal to k, in basis order.
    const std::vector<int>& sector(int k) const;
    int max_excitation() const { return static_cast<int>(sectors_.size()) - 1; }
    // Total excitation of every basis state.
    const std::vector<int>& excitations() const { return excitation_; }

private:
    SystemModel model_;
    int n_max_;
    int photon_cap_;
    std::vector<BasisLabel> labels_;
    std::map<BasisLabel, int> index_;
    std::vector<int> excitation_;
    std::vector<std::vector<int>> sectors_;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

// Throws ConfigError when n_max (or the photon cap) is below the NOON photon number.
SpacePtr build_space(const SystemModel& model, int n_max, int photon_cap = -1);

// Dense operator bound to the space it acts on.
struct OperatorMatrix {
    SpacePtr space;
    Eigen::MatrixXcd m;

    OperatorMatrix adjoint() const { return {space, m.adjoint()}; }
};

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(std::complex<double> s, const OperatorMatrix& a);

OperatorMatrix identity(const SpacePtr& space);
// Photon annihilation operator of cavity 1 or 2.
OperatorMatrix annihilator(const SpacePtr& space, int cavity);
// |to><from| on the QD factor, identity on the photons.
OperatorMatrix qd_transition(const SpacePtr& space, QdState from, QdState to);
// Projector onto a QD configuration.
OperatorMatrix qd_projector(const SpacePtr& space, QdState q);
// Total excitation operator: photons plus QD excitation weight.
OperatorMatrix total_excitation_operator(const SpacePtr& space);
// Basis vector of a label.
Eigen::VectorXcd basis_vector(const SpacePtr& space, const BasisLabel& l);

// Sub-block of a matrix on the given row and column index sets.
Eigen::MatrixXcd sub_block(const Eigen::MatrixXcd& m, const std::vector<int>& rows,
                           const std::vector<int>& cols);

}  // namespace noon
