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

#include "noonsim/hilbert.hpp"

#include <cmath>

#include "noonsim/errors.hpp"

namespace noon {

int excitation_weight(QdState q) {
    switch (q) {
        case QdState::G: return 0;
        case QdState::B:
        case QdState::B1:
        case QdState::B2: return 2;
        case QdState::Q: return 4;
    }
    throw ConfigError("unknown QD state");
}

std::string to_string(QdState q) {
    switch (q) {
        case QdState::G: return "G";
        case QdState::B: return "B";
        case QdState::B1: return "B1";
        case QdState::B2: return "B2";
        case QdState::Q: return "Q";
    }
    return "?";
}

QdState qd_state_from_string(const std::string& s) {
    if (s == "G") return QdState::G;
    if (s == "B") return QdState::B;
    if (s == "B1") return QdState::B1;
    if (s == "B2") return QdState::B2;
    if (s == "Q") return QdState::Q;
    throw ConfigError("unknown QD state '" + s + "'");
}

std::string to_string(Topology t) {
    switch (t) {
        case Topology::TwoPhoton: return "n2";
        case Topology::FourPhoton: return "n4";
        case Topology::FourPhotonVariant: return "n4-variant";
    }
    return "?";
}

Topology topology_from_string(const std::string& s) {
    if (s == "n2") return Topology::TwoPhoton;
    if (s == "n4") return Topology::FourPhoton;
    if (s == "n4-variant") return Topology::FourPhotonVariant;
    throw ConfigError("unknown system '" + s + "' (expected n2, n4 or n4-variant)");
}

int total_excitation(const BasisLabel& l) { return excitation_weight(l.qd) + l.n1 + l.n2; }

std::string to_string(const BasisLabel& l) {
    return "|" + to_string(l.qd) + "," + std::to_string(l.n1) + std::to_string(l.n2) + ">";
}

int SystemModel::qd_count() const { return topology == Topology::TwoPhoton ? 1 : 2; }

int SystemModel::noon_number() const { return topology == Topology::TwoPhoton ? 2 : 4; }

std::vector<QdState> SystemModel::qd_states() const {
    if (topology == Topology::TwoPhoton) return {QdState::G, QdState::B};
    return {QdState::G, QdState::B1, QdState::B2, QdState::Q};
}

bool SystemModel::has_qd_state(QdState q) const {
    for (auto s : qd_states())
        if (s == q) return true;
    return false;
}

int SystemModel::emission_cavity(int qd_index) const {
    if (qd_index < 1 || qd_index > qd_count())
        throw ConfigError("QD index " + std::to_string(qd_index) + " out of range");
    if (topology == Topology::FourPhoton) return qd_index;
    return 1;
}

HilbertSpace::HilbertSpace(SystemModel model, int n_max, int photon_cap)
    : model_(model), n_max_(n_max), photon_cap_(photon_cap) {
    for (auto q : model_.qd_states()) {
        for (int n1 = 0; n1 <= n_max; ++n1) {
            for (int n2 = 0; n2 <= n_max; ++n2) {
                if (photon_cap >= 0 && n1 + n2 > photon_cap) continue;
                BasisLabel l{q, n1, n2};
                index_[l] = static_cast<int>(labels_.size());
                labels_.push_back(l);
                excitation_.push_back(total_excitation(l));
            }
        }
    }
    int kmax = 0;
    for (int e : excitation_) kmax = std::max(kmax, e);
    sectors_.assign(static_cast<size_t>(kmax + 1), {});
    for (int i = 0; i < dim(); ++i) sectors_[static_cast<size_t>(excitation_[i])].push_back(i);
}

std::optional<int> HilbertSpace::find(const BasisLabel& l) const {
    auto it = index_.find(l);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int HilbertSpace::index_of(const BasisLabel& l) const {
    auto i = find(l);
    if (!i) throw ConfigError("state " + to_string(l) + " is not in the truncated space");
    return *i;
}

const std::vector<int>& HilbertSpace::sector(int k) const {
    static const std::vector<int> empty;
    if (k < 0 || k > max_excitation()) return empty;
    return sectors_[static_cast<size_t>(k)];
}

SpacePtr build_space(const SystemModel& model, int n_max, int photon_cap) {
    const int n = model.noon_number();
    if (n_max < n)
        throw ConfigError("n_max = " + std::to_string(n_max) + " is below the minimum " +
                          std::to_string(n) + " required for the N=" + std::to_string(n) +
                          " target");
    if (n_max > 40) throw ConfigError("n_max = " + std::to_string(n_max) + " is unreasonably large");
    if (photon_cap >= 0 && photon_cap < n)
        throw ConfigError("photon cap " + std::to_string(photon_cap) + " is below the NOON photon number " +
                          std::to_string(n));
    return std::make_shared<const HilbertSpace>(model, n_max, photon_cap);
}

namespace {

void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.space != b.space && (a.space == nullptr || b.space == nullptr ||
                               a.space->dim() != b.space->dim()))
        throw ConfigError("operators act on different spaces");
}

}  // namespace

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b);
    return {a.space, a.m + b.m};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b);
    return {a.space, a.m - b.m};
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b);
    return {a.space, a.m * b.m};
}

OperatorMatrix operator*(std::complex<double> s, const OperatorMatrix& a) { return {a.space, s * a.m}; }

OperatorMatrix identity(const SpacePtr& space) {
    return {space, Eigen::MatrixXcd::Identity(space->dim(), space->dim())};
}

OperatorMatrix annihilator(const SpacePtr& space, int cavity) {
    if (cavity != 1 && cavity != 2)
        throw ConfigError("cavity index " + std::to_string(cavity) + " must be 1 or 2");
    const int d = space->dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        BasisLabel l = space->label(i);
        int& n = cavity == 1 ? l.n1 : l.n2;
        if (n == 0) continue;
        const double amp = std::sqrt(static_cast<double>(n));
        --n;
        m(space->index_of(l), i) = amp;
    }
    return {space, m};
}

OperatorMatrix qd_transition(const SpacePtr& space, QdState from, QdState to) {
    const auto& model = space->model();
    if (!model.has_qd_state(from) || !model.has_qd_state(to))
        throw ConfigError("QD state " + to_string(model.has_qd_state(from) ? to : from) +
                          " does not exist for system " + to_string(model.topology));
    const int d = space->dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const auto& l = space->label(i);
        if (l.qd != from) continue;
        m(space->index_of({to, l.n1, l.n2}), i) = 1.0;
    }
    return {space, m};
}

OperatorMatrix qd_projector(const SpacePtr& space, QdState q) { return qd_transition(space, q, q); }

OperatorMatrix total_excitation_operator(const SpacePtr& space) {
    const int d = space->dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) m(i, i) = space->excitations()[static_cast<size_t>(i)];
    return {space, m};
}

Eigen::VectorXcd basis_vector(const SpacePtr& space, const BasisLabel& l) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space->dim());
    v(space->index_of(l)) = 1.0;
    return v;
}

Eigen::MatrixXcd sub_block(const Eigen::MatrixXcd& m, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < cols.size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(rows[r], cols[c]);
    return out;
}

}  // namespace noon
