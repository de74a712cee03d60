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

#include "noonsim/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "noonsim/errors.hpp"

namespace noon {

std::string to_string(Branch s) { return s == Branch::Plus ? "+" : "-"; }

Branch branch_from_string(const std::string& s) {
    if (s == "+" || s == "plus") return Branch::Plus;
    if (s == "-" || s == "minus") return Branch::Minus;
    throw ConfigError("branch must be '+' or '-', got '" + s + "'");
}

std::string to_string(DesignStatus s) {
    switch (s) {
        case DesignStatus::Converged: return "converged";
        case DesignStatus::NoSolution: return "no-solution";
        case DesignStatus::NotConverged: return "not-converged";
    }
    return "?";
}

// ---- two-photon system ----

double ges_energy_n2(double delta1, double g2p, Branch s) {
    return delta1 + sign_of(s) * std::sqrt(delta1 * delta1 + 2.0 * g2p * g2p);
}

double condition_delta2(double delta1, double g2p, Branch s) { return 0.5 * ges_energy_n2(delta1, g2p, s); }

Branch nearest_branch(const ParamsN2& p) {
    const double dp = std::abs(p.delta2 - condition_delta2(p.delta1, p.g2p, Branch::Plus));
    const double dm = std::abs(p.delta2 - condition_delta2(p.delta1, p.g2p, Branch::Minus));
    return dp < dm ? Branch::Plus : Branch::Minus;
}

DesignSolutionN2 solve_ges_n2(const ParamsN2& p, Branch s) {
    p.validate();
    if (p.g2p == 0.0) throw ConfigError("two-photon coupling g2p must be non-zero");
    const double target = condition_delta2(p.delta1, p.g2p, s);
    const double violation = std::abs(p.delta2 - target);
    if (violation > 1e-9) {
        std::ostringstream os;
        os << "delta2 = " << p.delta2 << " violates the dark-state condition for branch "
           << to_string(s) << " (expected " << target << ", off by " << violation << ")";
        throw ConditionViolation(os.str(), violation);
    }
    DesignSolutionN2 sol;
    sol.branch = s;
    sol.delta2 = p.delta2;
    sol.energy = ges_energy_n2(p.delta1, p.g2p, s);
    sol.mixing_angle = std::atan(sol.energy / p.g2p);
    const double c = std::cos(sol.mixing_angle);
    const double sn = std::sin(sol.mixing_angle);
    sol.amplitudes = {c, sn / std::sqrt(2.0), 0.0, -sn / std::sqrt(2.0)};

    auto space = build_space({Topology::TwoPhoton}, 2);
    ParamsN2 q = p;
    q.rabi = 0.0;
    const auto h = hamiltonian_n2(q, space).m;
    const Eigen::VectorXcd v = ges_vector_n2(sol, space);
    sol.eigen_residual = (h * v - sol.energy * v).norm();
    const double scale = std::max({1.0, std::abs(p.delta1), std::abs(p.j), std::abs(p.g2p)});
    if (sol.eigen_residual > 1e-10 * scale)
        throw NumericError("analytic GES is not an eigenvector of the Hamiltonian", sol.eigen_residual);
    return sol;
}

DesignSolutionN2 design_n2(double delta1, double g2p, Branch s) {
    ParamsN2 p;
    p.delta1 = delta1;
    p.g2p = g2p;
    p.delta2 = condition_delta2(delta1, g2p, s);
    return solve_ges_n2(p, s);
}

Eigen::VectorXcd ges_vector_n2(const DesignSolutionN2& sol, const SpacePtr& space) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space->dim());
    v(space->index_of({QdState::B, 0, 0})) = sol.amplitudes[0];
    v(space->index_of({QdState::G, 2, 0})) = sol.amplitudes[1];
    v(space->index_of({QdState::G, 1, 1})) = sol.amplitudes[2];
    v(space->index_of({QdState::G, 0, 2})) = sol.amplitudes[3];
    return v;
}

OnePhotonEigensystem one_photon_eigensystem(const ParamsN2& p) {
    p.validate();
    if (p.j == 0.0) throw ConfigError("tunneling j must be non-zero for the one-photon eigenbasis");
    OnePhotonEigensystem e;
    const double delta = 0.5 * (p.delta1 - p.delta2);
    const double r = std::sqrt(delta * delta + p.j * p.j);
    e.e_plus = 0.5 * (p.delta1 + p.delta2) + r;
    e.e_minus = 0.5 * (p.delta1 + p.delta2) - r;
    e.delta_e1 = 2.0 * r;
    e.phi = std::atan((r - delta) / p.j);

    Eigen::Matrix2d h;
    h << p.delta1, p.j, p.j, p.delta2;
    const Eigen::Vector2d vp(std::cos(e.phi), std::sin(e.phi));
    const Eigen::Vector2d vm(-std::sin(e.phi), std::cos(e.phi));
    e.residual = std::max((h * vp - e.e_plus * vp).norm(), (h * vm - e.e_minus * vm).norm());
    if (e.residual > 1e-10 * std::max({1.0, std::abs(p.j), std::abs(p.delta1), std::abs(p.delta2)}))
        throw NumericError("one-photon eigenvectors failed the numerical cross-check", e.residual);
    return e;
}

Eigen::VectorXcd one_photon_vector(const OnePhotonEigensystem& e, Branch s, const SpacePtr& space) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space->dim());
    const int i10 = space->index_of({QdState::G, 1, 0});
    const int i01 = space->index_of({QdState::G, 0, 1});
    if (s == Branch::Plus) {
        v(i10) = std::cos(e.phi);
        v(i01) = std::sin(e.phi);
    } else {
        v(i10) = -std::sin(e.phi);
        v(i01) = std::cos(e.phi);
    }
    return v;
}

// ---- four-photon system ----

namespace {

ParamsN4 params_from(const TuningN4& t, double ratio) {
    ParamsN4 p;
    p.g1 = 1.0 / std::sqrt(2.0);
    p.g2 = ratio * p.g1;
    p.j = t.j;
    p.delta1 = t.delta1;
    p.delta2 = t.delta2;
    p.delta_b = t.delta_b;
    return p;
}

Eigen::Vector4d as_vec(const TuningN4& t) { return {t.j, t.delta1, t.delta2, t.delta_b}; }
TuningN4 as_tuning(const Eigen::Vector4d& x) { return {x(0), x(1), x(2), x(3)}; }

double max_abs(const std::array<double, 4>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

struct NewtonResult {
    TuningN4 tuning;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

NewtonResult newton_n4(const TuningN4& seed, double ratio, const DesignOptionsN4& opt) {
    auto f = [&](const Eigen::Vector4d& x) {
        const auto r = requirement_residuals_n4(as_tuning(x), ratio);
        return Eigen::Vector4d(r[0], r[1], r[2], r[3]);
    };
    Eigen::Vector4d x = as_vec(seed);
    Eigen::Vector4d fx = f(x);
    for (int it = 0; it < opt.max_newton_iterations; ++it) {
        if (fx.cwiseAbs().maxCoeff() < 1e-13) break;
        Eigen::Matrix4d jac;
        for (int k = 0; k < 4; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
            Eigen::Vector4d xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            jac.col(k) = (f(xp) - f(xm)) / (2.0 * h);
        }
        const Eigen::Vector4d step = jac.colPivHouseholderQr().solve(-fx);
        if (!step.allFinite()) break;
        double lambda = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            const Eigen::Vector4d xn = x + lambda * step;
            const Eigen::Vector4d fn = f(xn);
            if (fn.allFinite() && fn.norm() < fx.norm()) {
                x = xn;
                fx = fn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    NewtonResult res;
    res.tuning = as_tuning(x);
    res.residual = fx.cwiseAbs().maxCoeff();
    res.converged = res.residual <= opt.tolerance;
    return res;
}

// Four-excitation block of H split into its linear parameter pieces
// (j, delta1, delta2, delta_b, g1, g2).
struct SectorCache {
    SpacePtr space;
    std::array<Eigen::MatrixXd, 6> parts;
};

SectorCache make_sector_cache(Topology topology) {
    SectorCache c;
    c.space = build_space({topology}, 4);
    const auto& sec = c.space->sector(4);
    const int n = static_cast<int>(sec.size());
    for (int k = 0; k < 6; ++k) {
        ParamsN4 p;
        p.g1 = p.g2 = p.j = p.delta1 = p.delta2 = p.delta_b = 0.0;
        double* fields[] = {&p.j, &p.delta1, &p.delta2, &p.delta_b, &p.g1, &p.g2};
        *fields[k] = 1.0;
        const Eigen::MatrixXd h = hamiltonian(p, c.space).m.real();
        c.parts[k].resize(n, n);
        for (int r = 0; r < n; ++r)
            for (int col = 0; col < n; ++col) c.parts[k](r, col) = h(sec[r], sec[col]);
    }
    return c;
}

const SectorCache& sector_cache(Topology topology) {
    static const SectorCache four = make_sector_cache(Topology::FourPhoton);
    static const SectorCache variant = make_sector_cache(Topology::FourPhotonVariant);
    return topology == Topology::FourPhoton ? four : variant;
}

// Accepts a root only when both closed-form branches reproduce its energy.
std::optional<std::string> reject_reason(const GesCandidateN4& c, const TuningN4& t, double ratio) {
    const auto p = params_from(t, ratio);
    const auto e = ges_energy_closed_form_n4(t, p.g1, p.g2);
    const double tol = 1e-7 * std::max(1.0, std::abs(c.energy));
    if (!std::isfinite(e[0]) || !std::isfinite(e[1]))
        return "closed-form energy is complex at this ratio";
    if (std::abs(e[0] - c.energy) > tol || std::abs(e[1] - c.energy) > tol) {
        std::ostringstream os;
        os << "root lies on the conjugate branch (closed forms " << e[0] << ", " << e[1]
           << " vs eigenvalue " << c.energy << ")";
        return os.str();
    }
    const double a40 = c.amplitudes.at({QdState::G, 4, 0});
    const double a04 = c.amplitudes.at({QdState::G, 0, 4});
    if (!(a40 * a04 < 0.0)) return "corner amplitudes do not have opposite signs";
    return std::nullopt;
}

}  // namespace

GesCandidateN4 evaluate_ges_n4(const TuningN4& t, double ratio, Topology topology) {
    if (topology == Topology::TwoPhoton) throw ConfigError("four-photon design needs an n4 topology");
    const auto& cache = topology == Topology::FourPhoton ? sector_cache(Topology::FourPhoton)
                                                         : sector_cache(Topology::FourPhotonVariant);
    const SpacePtr& space = cache.space;
    const auto p = params_from(t, ratio);
    const auto& sec = space->sector(4);
    const int n = static_cast<int>(sec.size());
    const Eigen::MatrixXd block = p.j * cache.parts[0] + p.delta1 * cache.parts[1] + p.delta2 * cache.parts[2] +
                                  p.delta_b * cache.parts[3] + p.g1 * cache.parts[4] + p.g2 * cache.parts[5];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on the four-excitation block", 0.0);

    std::vector<int> unwanted;
    for (int r = 0; r < n; ++r) {
        const auto& l = space->label(sec[r]);
        if (l.qd == QdState::G && l.n1 > 0 && l.n2 > 0) unwanted.push_back(r);
    }
    auto weight = [&](const Eigen::VectorXd& v) {
        double w = 0.0;
        for (int u : unwanted) w += v(u) * v(u);
        return w;
    };
    int best = 0;
    double best_w = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        const double w = weight(es.eigenvectors().col(k));
        if (w < best_w) {
            best_w = w;
            best = k;
        }
    }
    const double energy = es.eigenvalues()(best);
    std::vector<int> degenerate;
    for (int k = 0; k < n; ++k)
        if (std::abs(es.eigenvalues()(k) - energy) < 1e-8) degenerate.push_back(k);
    Eigen::VectorXd v = es.eigenvectors().col(best);
    if (degenerate.size() > 1) {
        // Least unwanted weight inside the degenerate subspace.
        const int m = static_cast<int>(degenerate.size());
        Eigen::MatrixXd basis(n, m);
        for (int k = 0; k < m; ++k) basis.col(k) = es.eigenvectors().col(degenerate[k]);
        Eigen::MatrixXd w(static_cast<Eigen::Index>(unwanted.size()), m);
        for (size_t r = 0; r < unwanted.size(); ++r) w.row(static_cast<Eigen::Index>(r)) = basis.row(unwanted[r]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(w.transpose() * w);
        v = basis * small.eigenvectors().col(0);
        v.normalize();
    }
    const int iq = [&] {
        for (int r = 0; r < n; ++r)
            if (space->label(sec[r]).qd == QdState::Q) return r;
        return 0;
    }();
    if (v(iq) < 0.0) v = -v;

    GesCandidateN4 c;
    c.energy = energy;
    c.unwanted_weight = weight(v);
    for (int r = 0; r < n; ++r) c.amplitudes[space->label(sec[r])] = v(r);
    auto a = [&](QdState q, int n1, int n2) { return c.amplitudes.at({q, n1, n2}); };
    const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
    if (topology == Topology::FourPhoton) {
        c.residuals[0] = 2.0 * t.j * a(QdState::G, 0, 4) + s6 * p.g2 * a(QdState::B2, 1, 1);
        c.residuals[1] = s2 * p.g2 * a(QdState::B2, 2, 0) + s2 * p.g1 * a(QdState::B1, 0, 2);
        c.residuals[2] = s6 * p.g1 * a(QdState::B1, 1, 1) + 2.0 * t.j * a(QdState::G, 4, 0);
    } else {
        c.residuals[0] = a(QdState::G, 1, 3);
        c.residuals[1] = a(QdState::G, 2, 2);
        c.residuals[2] = a(QdState::G, 3, 1);
    }
    c.residuals[3] = std::abs(a(QdState::G, 4, 0)) - std::abs(a(QdState::G, 0, 4));
    return c;
}

std::array<double, 4> requirement_residuals_n4(const TuningN4& t, double ratio) {
    return evaluate_ges_n4(t, ratio, Topology::FourPhoton).residuals;
}

std::array<double, 2> ges_energy_closed_form_n4(const TuningN4& t, double g1, double g2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double arg1 = std::pow(t.delta1 - t.delta_b / 2.0, 2) + 12.0 * g1 * g1 - 4.0 * t.j * t.j;
    const double arg2 = std::pow(t.delta2 + t.delta_b / 2.0, 2) + 12.0 * g2 * g2 - 4.0 * t.j * t.j;
    const double e1 = arg1 < 0.0 ? nan : (6.0 * t.delta1 + t.delta_b) / 2.0 + std::sqrt(arg1);
    const double e2 = arg2 < 0.0 ? nan : (6.0 * t.delta2 - t.delta_b) / 2.0 - std::sqrt(arg2);
    return {e1, e2};
}

DesignResultN4 solve_ges_n4(double ratio, std::optional<TuningN4> seed, const DesignOptionsN4& opt) {
    if (!std::isfinite(ratio) || ratio < 1.0)
        throw ConfigError("coupling ratio g2/g1 must be >= 1, got " + std::to_string(ratio));
    if (!(opt.continuation_step > 0.0)) throw ConfigError("continuation step must be positive");

    NewtonResult root;
    if (seed) {
        root = newton_n4(*seed, ratio, opt);
    } else {
        root = newton_n4(kReferenceTuningN4, kReferenceRatioN4, opt);
        double r = kReferenceRatioN4;
        double h = opt.continuation_step;
        while (root.converged && r != ratio) {
            const double dir = ratio > r ? 1.0 : -1.0;
            const double next = std::abs(ratio - r) <= h ? ratio : r + dir * h;
            auto trial = newton_n4(root.tuning, next, opt);
            if (trial.converged) {
                root = trial;
                r = next;
                h = std::min(opt.continuation_step, 2.0 * h);
            } else {
                h *= 0.5;
                if (h < 1e-5) {
                    root = trial;
                    root.converged = false;
                    break;
                }
            }
        }
    }

    DesignResultN4 res;
    res.best = root.tuning;
    res.best_residual = root.residual;
    if (!root.converged) {
        res.status = DesignStatus::NotConverged;
        std::ostringstream os;
        os << "Newton iteration stalled with residual " << root.residual;
        res.message = os.str();
        return res;
    }
    const auto cand = evaluate_ges_n4(root.tuning, ratio);
    if (auto why = reject_reason(cand, root.tuning, ratio)) {
        res.status = DesignStatus::NoSolution;
        res.message = *why;
        return res;
    }
    DesignSolutionN4 sol;
    sol.ratio = ratio;
    sol.tuning = root.tuning;
    sol.energy = cand.energy;
    sol.residual = max_abs(cand.residuals);
    sol.amplitudes = cand.amplitudes;
    res.status = DesignStatus::Converged;
    res.solution = sol;
    res.message = "ok";
    return res;
}

double existence_threshold_n4(double lo, double hi, double tol) {
    auto exists = [](double r) { return solve_ges_n4(r).status == DesignStatus::Converged; };
    if (exists(lo)) throw ConfigError("a design already exists at the lower bracket");
    if (!exists(hi)) throw ConfigError("no design exists at the upper bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (exists(mid) ? hi : lo) = mid;
    }
    return hi;
}

std::vector<Fig9Row> ratio_sweep_n4(double ratio_min, double ratio_max, double step) {
    if (!(step > 0.0) || ratio_max < ratio_min) throw ConfigError("invalid ratio grid");
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((ratio_max - ratio_min) / step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) grid.push_back(ratio_min + i * step);
    std::vector<Fig9Row> rows(grid.size());

    auto record = [&](size_t i, const DesignResultN4& r) {
        rows[i].ratio = grid[i];
        rows[i].status = r.status;
        rows[i].tuning = r.solution ? r.solution->tuning : r.best;
        rows[i].energy = r.solution ? r.solution->energy : std::numeric_limits<double>::quiet_NaN();
        rows[i].residual = r.solution ? r.solution->residual : r.best_residual;
    };
    // Walk outward from the reference ratio so each point seeds the next.
    size_t start = 0;
    while (start + 1 < grid.size() && grid[start] < kReferenceRatioN4 - 1e-12) ++start;
    std::optional<TuningN4> seed;
    for (size_t i = start; i < grid.size(); ++i) {
        const auto r = seed ? solve_ges_n4(grid[i], seed) : solve_ges_n4(grid[i]);
        record(i, r);
        seed = r.status == DesignStatus::NotConverged ? std::nullopt : std::optional(r.best);
    }
    seed.reset();
    for (size_t i = start; i-- > 0;) {
        const auto r = seed ? solve_ges_n4(grid[i], seed) : solve_ges_n4(grid[i]);
        record(i, r);
        seed = r.status == DesignStatus::NotConverged ? std::nullopt : std::optional(r.best);
    }
    return rows;
}

// ---- flow graph ----

std::vector<BasisLabel> unwanted_states(const SpacePtr& space, int n) {
    std::vector<BasisLabel> out;
    for (int k = 1; k < n; ++k) {
        BasisLabel l{QdState::G, k, n - k};
        if (space->find(l)) out.push_back(l);
    }
    return out;
}

std::vector<BasisLabel> default_ges_support(const SpacePtr& space, int n) {
    const auto unwanted = unwanted_states(space, n);
    std::vector<BasisLabel> out;
    for (int i : space->sector(n)) {
        const auto& l = space->label(i);
        if (std::find(unwanted.begin(), unwanted.end(), l) == unwanted.end()) out.push_back(l);
    }
    return out;
}

FlowGraph flow_graph(const OperatorMatrix& h, const std::vector<BasisLabel>& ges_support, int n, double tol) {
    const auto& space = h.space;
    if (!space) throw ConfigError("operator has no space");
    const auto& exc = space->excitations();
    for (int r = 0; r < space->dim(); ++r)
        for (int c = 0; c < space->dim(); ++c)
            if (std::abs(h.m(r, c)) > tol && exc[static_cast<size_t>(r)] != exc[static_cast<size_t>(c)])
                throw ConfigError("Hamiltonian does not conserve the total excitation number");

    FlowGraph g;
    g.unwanted = unwanted_states(space, n);
    g.support = ges_support;
    for (const auto& s : g.support) {
        if (std::find(g.unwanted.begin(), g.unwanted.end(), s) != g.unwanted.end())
            throw ConfigError("GES support contains the unwanted state " + to_string(s));
        space->index_of(s);
    }
    for (const auto& u : g.unwanted) {
        const int iu = space->index_of(u);
        int count = 0;
        for (const auto& s : g.support) {
            if (std::abs(h.m(iu, space->index_of(s))) > tol) {
                g.edges.emplace_back(s, u);
                ++count;
            }
        }
        g.incoming[u] = count;
    }
    g.candidate = true;
    for (const auto& u : g.unwanted) {
        if (g.incoming[u] == 1) {
            g.candidate = false;
            if (!g.blocking) g.blocking = u;
        }
    }
    return g;
}

}  // namespace noon
