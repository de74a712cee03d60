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

#include "noonsim/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include <json.hpp>

#include "noonsim/analysis.hpp"
#include "noonsim/errors.hpp"
#include "noonsim/oracle.hpp"
#include "noonsim/perturbation.hpp"
#include "noonsim/units.hpp"

namespace noon {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

using Cell = std::variant<double, int, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(const std::vector<Cell>& cells) {
        if (cells.size() != columns.size()) throw std::logic_error("row width does not match header");
        std::vector<std::string> row;
        for (const auto& c : cells) {
            if (const auto* d = std::get_if<double>(&c))
                row.push_back(fmt(*d));
            else if (const auto* i = std::get_if<int>(&c))
                row.push_back(std::to_string(*i));
            else
                row.push_back(std::get<std::string>(c));
        }
        rows.push_back(std::move(row));
    }
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Everything a command produces, written only after the command has finished.
struct Output {
    Output(const RunContext& c, std::string cmd) : ctx(c), command(std::move(cmd)) {}

    const RunContext& ctx;
    std::string command;
    json truncation = json::object();
    std::vector<std::pair<std::string, std::string>> files;  // relative name, content
    int failed = 0;
    std::string first_failure;
    std::ostringstream summary;

    std::string name(const std::string& suffix) const {
        return ctx.scenario.get_string("output.prefix", "") + command + suffix;
    }

    void csv(const Table& t, const std::string& suffix = "") {
        std::ostringstream os;
        os << "# noonsim " << kToolVersion << " command=" << command << "\n";
        os << "# scenario_hash=" << ctx.scenario.hash() << "\n";
        os << "# truncation=" << truncation.dump() << "\n";
        const IntegratorOptions io = ctx.scenario.integrator();
        const SteadyStateOptions so = ctx.scenario.steady_state();
        os << "# rtol=" << fmt(io.rtol) << " atol=" << fmt(io.atol) << " steady_state=" << to_string(so.method)
           << " steady_tolerance=" << fmt(so.tolerance) << "\n";
        for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << "\n";
        for (const auto& r : t.rows) {
            for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "\n";
        }
        files.emplace_back(name(suffix + ".csv"), os.str());
    }

    void report(json j) {
        json doc = json::object();
        doc["tool"] = "noonsim";
        doc["version"] = kToolVersion;
        doc["command"] = command;
        doc["scenario_hash"] = ctx.scenario.hash();
        doc["truncation"] = truncation;
        doc["result"] = std::move(j);
        files.emplace_back(name(".json"), doc.dump(2) + "\n");
    }

    void fail(const std::string& what) {
        if (failed++ == 0) first_failure = what;
    }
};

// Work items are claimed from a shared counter; results keep their index.
template <class R>
struct Outcome {
    std::optional<R> value;
    std::string error;
};

template <class R, class F>
std::vector<Outcome<R>> parallel_map(int n, int workers, F f) {
    std::vector<Outcome<R>> out(static_cast<size_t>(n));
    std::atomic<int> next{0};
    std::exception_ptr fatal;
    std::mutex m;
    auto work = [&]() {
        for (int i = next++; i < n; i = next++) {
            try {
                out[static_cast<size_t>(i)].value = f(i);
            } catch (const NumericError& e) {
                out[static_cast<size_t>(i)].error = e.what();
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!fatal) fatal = std::current_exception();
                next = n;
            }
        }
    };
    int w = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    w = std::min(w, n);
    if (w <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < w; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);
    return out;
}

json params_json(const ParamsN2& p) {
    return {{"g2p", p.g2p},     {"j", p.j},         {"delta1", p.delta1},
            {"delta2", p.delta2}, {"kappa", p.kappa}, {"pump_detuning", p.pump_detuning},
            {"rabi", p.rabi},   {"pump_port", p.pump_port}};
}

json params_json(const ParamsN4& p) {
    return {{"g1", p.g1},         {"g2", p.g2},       {"j", p.j},
            {"delta1", p.delta1}, {"delta2", p.delta2}, {"delta_b", p.delta_b},
            {"kappa", p.kappa},   {"pump_detuning", p.pump_detuning}, {"rabi", p.rabi},
            {"pump_port", p.pump_port}};
}

json matrix_json(const Eigen::MatrixXcd& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rr = json::array(), ii = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ii.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
    }
    return {{"real", re}, {"imag", im}};
}

// Reference parameter sets of the two-photon source.
ParamsN2 weak_cw_defaults() {
    ParamsN2 p;
    p.j = 2.0;
    p.delta1 = 1.0;
    p.kappa = 0.1;
    p.rabi = 0.05;
    p.pump_port = 2;
    return p;
}

ParamsN2 pulse_defaults() {
    ParamsN2 p;
    p.j = 5.0;
    p.delta1 = 5.0;
    p.kappa = 0.1;
    p.rabi = 0.0;
    p.pump_port = 2;
    return p;
}

void require_system(const Scenario& s, std::initializer_list<const char*> allowed, const std::string& command) {
    const std::string sys = s.system();
    for (const char* a : allowed)
        if (sys == a) return;
    throw ConfigError("scenario.system: '" + sys + "' is not supported by " + command);
}

double two_photon_intensity(const DensityMatrix& rho) {
    double out = 0.0;
    for (int c = 1; c <= 2; ++c) {
        const Eigen::MatrixXcd a = annihilator(rho.space, c).m;
        const Eigen::MatrixXcd aa = a * a;
        out += (aa * rho.m * aa.adjoint()).trace().real();
    }
    return out;
}

// ---- design-n2 ----

void cmd_design_n2(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n2"}, o.command);
    const ParamsN2 base = s.params_n2(weak_cw_defaults());
    std::vector<double> d1 = {base.delta1};
    if (auto g = s.grid("delta1")) d1 = g->values();
    Table t{{"delta1", "branch", "delta2", "energy", "phi_s", "a_b00", "a_g20", "a_g11", "a_g02", "eigen_residual"}, {}};
    json rows = json::array();
    for (double x : d1) {
        for (Branch b : {Branch::Minus, Branch::Plus}) {
            const auto sol = design_n2(x, base.g2p, b);
            t.add({x, to_string(b), sol.delta2, sol.energy, sol.mixing_angle, sol.amplitudes[0], sol.amplitudes[1],
                   sol.amplitudes[2], sol.amplitudes[3], sol.eigen_residual});
            rows.push_back({{"delta1", x}, {"branch", to_string(b)}, {"delta2", sol.delta2}, {"energy", sol.energy},
                            {"phi_s", sol.mixing_angle}});
            o.summary << "delta1=" << fmt(x) << " branch=" << to_string(b) << " delta2=" << fmt(sol.delta2)
                      << " E=" << fmt(sol.energy) << "\n";
        }
    }
    o.csv(t);
    o.report({{"g2p", base.g2p}, {"designs", rows}});
}

// ---- fig9 ----

void cmd_fig9(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n4"}, o.command);
    const GridAxis g = s.grid("ratio").value_or(parse_grid_axis("grid.ratio", "1.5:4:51"));
    if (g.log) throw ConfigError("grid.ratio: log spacing is not supported");
    const double step = g.points > 1 ? (g.max - g.min) / (g.points - 1) : 1.0;
    const auto rows = ratio_sweep_n4(g.min, g.max, step);
    Table t{{"ratio", "status", "j", "delta1", "delta2", "delta_b", "energy", "residual"}, {}};
    for (const auto& r : rows) {
        const bool ok = r.status == DesignStatus::Converged;
        t.add({r.ratio, to_string(r.status), ok ? r.tuning.j : kNaN, ok ? r.tuning.delta1 : kNaN,
               ok ? r.tuning.delta2 : kNaN, ok ? r.tuning.delta_b : kNaN, ok ? r.energy : kNaN,
               ok ? r.residual : kNaN});
    }
    const auto ref = solve_ges_n4(kReferenceRatioN4);
    json jr = json::object();
    if (ref.solution) {
        const auto& tt = ref.solution->tuning;
        jr = {{"ratio", kReferenceRatioN4}, {"j", tt.j},           {"delta1", tt.delta1},
              {"delta2", tt.delta2},        {"delta_b", tt.delta_b}, {"energy", ref.solution->energy},
              {"residual", ref.solution->residual}};
        o.summary << "g2/g1=2: J=" << fmt(tt.j) << " delta1=" << fmt(tt.delta1) << " delta2=" << fmt(tt.delta2)
                  << " delta_b=" << fmt(tt.delta_b) << "\n";
    }
    const double threshold = existence_threshold_n4(1.0, kReferenceRatioN4);
    o.summary << "existence threshold g2/g1 = " << fmt(threshold) << "\n";
    o.csv(t);
    o.report({{"reference", jr}, {"existence_threshold", threshold}, {"rows", static_cast<int>(rows.size())}});
}

// ---- sweep-delta2 ----

struct CwPoint {
    double concurrence = kNaN;
    double trace_distance = kNaN;
    double theta = kNaN;
    double hilbert_schmidt = kNaN;
    double noon_coherence = kNaN;
    double intensity = kNaN;
};

CwPoint cw_point_n2(const ParamsN2& p, int n_max, int cap, const SteadyStateOptions& so) {
    const auto rho = steady_state(open_system(p, n_max, cap), so);
    const auto t = tomography(rho, 2);
    const auto pm = trace_distance(t);
    return {pm.concurrence, pm.trace_distance, pm.theta_opt, pm.hilbert_schmidt, noon_coherence(t),
            two_photon_intensity(rho)};
}

CwPoint cw_point_n4(const ParamsN4& p, Topology topo, int n_max, int cap, const SteadyStateOptions& so) {
    const auto rho = steady_state(open_system(p, n_max, topo, cap), so);
    const auto t = tomography(rho, 4);
    CwPoint c;
    c.concurrence = concurrence(t);
    c.noon_coherence = noon_coherence(t);
    return c;
}

void cmd_sweep_delta2(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n2"}, o.command);
    const ParamsN2 base = s.params_n2(weak_cw_defaults());
    const GridAxis g = s.grid("delta2").value_or(parse_grid_axis("grid.delta2", "-1:2:601"));
    const std::vector<double> xs = g.values();
    const int n_max = s.n_max(3), cap = s.photon_cap();
    o.truncation = {{"n_max", n_max}, {"photon_cap", cap}};
    const auto so = s.steady_state();
    auto res = parallel_map<CwPoint>(static_cast<int>(xs.size()), o.ctx.workers, [&](int i) {
        ParamsN2 p = base;
        p.delta2 = xs[static_cast<size_t>(i)];
        p.pump_detuning = p.delta2;
        return cw_point_n2(p, n_max, cap, so);
    });
    double imax = 0.0;
    for (const auto& r : res)
        if (r.value) imax = std::max(imax, r.value->intensity);
    Table t{{"delta2", "concurrence", "trace_distance", "theta_opt", "hilbert_schmidt", "intensity",
             "intensity_norm", "status"},
            {}};
    json peaks = json::array();
    for (size_t i = 0; i < xs.size(); ++i) {
        const auto& r = res[i];
        if (!r.value) {
            o.fail(r.error);
            t.add({xs[i], kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, std::string("numeric-error")});
            continue;
        }
        const CwPoint& c = *r.value;
        t.add({xs[i], c.concurrence, c.trace_distance, c.theta, c.hilbert_schmidt, c.intensity,
               imax > 0.0 ? c.intensity / imax : kNaN, std::string("ok")});
        auto conc = [&](size_t k) { return res[k].value ? res[k].value->concurrence : -1.0; };
        const bool left = i == 0 || conc(i - 1) <= c.concurrence;
        const bool right = i + 1 == xs.size() || conc(i + 1) <= c.concurrence;
        if (left && right && c.concurrence > 0.99) peaks.push_back({{"delta2", xs[i]}, {"concurrence", c.concurrence}});
    }
    json roots = json::array();
    for (Branch b : {Branch::Minus, Branch::Plus}) roots.push_back(condition_delta2(base.delta1, base.g2p, b));
    o.summary << "concurrence peaks above 0.99: " << peaks.dump() << "\nexpected roots: " << roots.dump() << "\n";
    o.csv(t);
    o.report({{"params", params_json(base)}, {"points", static_cast<int>(xs.size())}, {"peaks", peaks},
              {"condition_roots", roots}});
}

// ---- concurrence-map ----

void cmd_concurrence_map(Output& o) {
    const Scenario& s = o.ctx.scenario;
    const Topology topo = s.topology();
    const bool two = topo == Topology::TwoPhoton;
    if (topo == Topology::FourPhotonVariant) throw ConfigError("scenario.system: concurrence-map needs n2 or n4");
    const GridAxis gk =
        s.grid("kappa").value_or(parse_grid_axis("grid.kappa", two ? "0.01:10:21:log" : "0.001:0.1:9:log"));
    const GridAxis gr =
        s.grid("rabi").value_or(parse_grid_axis("grid.rabi", two ? "0.01:1:21:log" : "0.01:0.1:7:log"));
    const auto ks = gk.values(), rs = gr.values();
    const int n_max = s.n_max(two ? 3 : 5), cap = s.photon_cap();
    o.truncation = {{"n_max", n_max}, {"photon_cap", cap}};
    const auto so = s.steady_state();
    const int n = static_cast<int>(ks.size() * rs.size());
    json params;
    std::vector<Outcome<CwPoint>> res;
    if (two) {
        const ParamsN2 base = s.params_n2(weak_cw_defaults());
        params = params_json(base);
        res = parallel_map<CwPoint>(n, o.ctx.workers, [&](int i) {
            ParamsN2 p = base;
            p.kappa = ks[static_cast<size_t>(i) / rs.size()];
            p.rabi = rs[static_cast<size_t>(i) % rs.size()];
            return cw_point_n2(p, n_max, cap, so);
        });
    } else {
        const ParamsN4 base = s.params_n4();
        params = params_json(base);
        res = parallel_map<CwPoint>(n, o.ctx.workers, [&](int i) {
            ParamsN4 p = base;
            p.kappa = ks[static_cast<size_t>(i) / rs.size()];
            p.rabi = rs[static_cast<size_t>(i) % rs.size()];
            return cw_point_n4(p, topo, n_max, cap, so);
        });
    }
    Table t{{"kappa", "rabi", "concurrence", "noon_coherence", "trace_distance", "status"}, {}};
    int above = 0;
    for (int i = 0; i < n; ++i) {
        const double k = ks[static_cast<size_t>(i) / rs.size()], r = rs[static_cast<size_t>(i) % rs.size()];
        const auto& out = res[static_cast<size_t>(i)];
        if (!out.value) {
            o.fail(out.error);
            t.add({k, r, kNaN, kNaN, kNaN, std::string("numeric-error")});
            continue;
        }
        if (out.value->concurrence > 0.9) ++above;
        t.add({k, r, out.value->concurrence, out.value->noon_coherence, out.value->trace_distance, std::string("ok")});
    }
    o.summary << above << " of " << n << " points have concurrence > 0.9\n";
    o.csv(t);
    o.report({{"system", s.system()}, {"params", params}, {"points", n}, {"above_0_9", above},
              {"failed", o.failed}});
}

// ---- pulse ----

struct PulseSetup {
    OpenSystem sys;
    PopulationProbes probes;
    DesignSolutionN2 ges;
    double width = 0.0;
    double t_peak = 0.0;
    double t_end = 0.0;
    double power = 0.0;
    DriveShape drive;
};

PulseSetup make_pulse(const ParamsN2& p, double power, double log_duration, double peak_factor,
                      double end_factor, int n_max, int cap) {
    if (!(power >= 0.0)) throw ConfigError("pulse.power must be non-negative");
    if (!(peak_factor > 0.0) || !(end_factor > peak_factor))
        throw ConfigError("pulse: need 0 < peak_factor < end_factor");
    PulseSetup s;
    s.ges = solve_ges_n2(p, nearest_branch(p));
    s.sys = open_system(p, n_max, cap);
    s.probes.noon_number = 2;
    s.probes.ges = ges_vector_n2(s.ges, s.sys.space);
    const auto one = one_photon_eigensystem(p);
    s.probes.one_photon = {one_photon_vector(one, Branch::Plus, s.sys.space),
                           one_photon_vector(one, Branch::Minus, s.sys.space)};
    s.width = std::pow(10.0, log_duration);
    s.t_peak = peak_factor * s.width;
    s.t_end = end_factor * s.width;
    s.power = power;
    s.drive = gaussian_pulse(power, s.width, s.t_peak);
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

void add_trace_rows(Table& t, const PopulationTrace& tr, const DriveShape& drive) {
    for (const auto& x : tr.samples)
        t.add({x.t, drive(x.t), x.p_ges, x.p_1p_plus, x.p_1p_minus, x.one_photon(), x.p_g00, x.p_2r, x.p_m, x.trace});
}

const std::vector<std::string> kTraceColumns = {"t",          "rabi",      "p_ges", "p_1p_plus", "p_1p_minus",
                                                "p_1photon", "p_g00", "p_2r",  "p_m",       "trace"};

void cmd_pulse(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n2"}, o.command);
    const ParamsN2 p = s.params_n2(pulse_defaults());
    const int n_max = s.n_max(5), cap = s.photon_cap();
    o.truncation = {{"n_max", n_max}, {"photon_cap", cap}};
    const auto ps = make_pulse(p, s.get_double("pulse.power", 45.0), s.get_double("pulse.log_duration", 0.95),
                               s.get_double("pulse.peak_factor", 3.0), s.get_double("pulse.end_factor", 5.0), n_max,
                               cap);
    const int samples = s.get_int("pulse.samples", 201);
    if (samples < 2) throw ConfigError("pulse.samples must be at least 2");
    const auto tr = propagate(ps.sys, DensityMatrix::ground(ps.sys.space), linspace(0.0, ps.t_end, samples), ps.drive,
                              ps.probes, s.integrator());
    Table t{kTraceColumns, {}};
    add_trace_rows(t, tr, ps.drive);
    const auto& last = tr.samples.back();
    o.summary << "P_ges(t_end) = " << fmt(last.p_ges) << ", P_2R + P_M = " << fmt(last.p_2r + last.p_m) << "\n";
    o.csv(t);
    o.report({{"params", params_json(p)},
              {"power", ps.power},
              {"duration", ps.width},
              {"t_peak", ps.t_peak},
              {"t_end", ps.t_end},
              {"p_ges_end", last.p_ges},
              {"p_2r_plus_p_m_end", last.p_2r + last.p_m},
              {"p_1photon_end", last.one_photon()},
              {"p_g00_end", last.p_g00}});
}

struct MapPoint {
    double p_ges = 0.0, p_2r = 0.0, p_m = 0.0;
};

void cmd_pulse_map(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n2"}, o.command);
    const ParamsN2 p = s.params_n2(pulse_defaults());
    const GridAxis gp = s.grid("power").value_or(parse_grid_axis("grid.power", "10:290:15"));
    const GridAxis gd = s.grid("log_duration").value_or(parse_grid_axis("grid.log_duration", "0.6:1.3:15"));
    const auto powers = gp.values(), durs = gd.values();
    const int n_max = s.n_max(5), cap = s.photon_cap(6);
    o.truncation = {{"n_max", n_max}, {"photon_cap", cap}};
    const double peak = s.get_double("pulse.peak_factor", 3.0), end = s.get_double("pulse.end_factor", 5.0);
    const auto io = s.integrator();
    const int n = static_cast<int>(powers.size() * durs.size());
    auto res = parallel_map<MapPoint>(n, o.ctx.workers, [&](int i) {
        const double pw = powers[static_cast<size_t>(i) % powers.size()];
        const double ld = durs[static_cast<size_t>(i) / powers.size()];
        const auto ps = make_pulse(p, pw, ld, peak, end, n_max, cap);
        const auto tr = propagate(ps.sys, DensityMatrix::ground(ps.sys.space), {0.0, ps.t_end}, ps.drive,
                                  ps.probes, io);
        const auto& x = tr.samples.back();
        return MapPoint{x.p_ges, x.p_2r, x.p_m};
    });
    Table t{{"power", "log_duration", "duration", "p_ges", "p_2r", "p_m", "status"}, {}};
    double best = -1.0, best_p = kNaN, best_d = kNaN;
    for (int i = 0; i < n; ++i) {
        const double pw = powers[static_cast<size_t>(i) % powers.size()];
        const double ld = durs[static_cast<size_t>(i) / powers.size()];
        const auto& r = res[static_cast<size_t>(i)];
        if (!r.value) {
            o.fail(r.error);
            t.add({pw, ld, std::pow(10.0, ld), kNaN, kNaN, kNaN, std::string("numeric-error")});
            continue;
        }
        t.add({pw, ld, std::pow(10.0, ld), r.value->p_ges, r.value->p_2r, r.value->p_m, std::string("ok")});
        if (r.value->p_ges > best) {
            best = r.value->p_ges;
            best_p = pw;
            best_d = ld;
        }
    }
    o.summary << "best P_ges = " << fmt(best) << " at power " << fmt(best_p) << ", log10 duration " << fmt(best_d)
              << "\n";
    o.csv(t);
    o.report({{"params", params_json(p)}, {"points", n}, {"best_p_ges", number(best)}, {"best_power", number(best_p)},
              {"best_log_duration", number(best_d)}});
}

// ---- decay ----

void cmd_decay(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n2"}, o.command);
    const ParamsN2 p = s.params_n2(pulse_defaults());
    const int n_max = s.n_max(5), cap = s.photon_cap();
    o.truncation = {{"n_max", n_max}, {"photon_cap", cap}};
    const auto ps = make_pulse(p, s.get_double("pulse.power", 45.0), s.get_double("pulse.log_duration", 0.95),
                               s.get_double("pulse.peak_factor", 3.0), s.get_double("pulse.end_factor", 5.0), n_max,
                               cap);
    const auto dp = DecayParams::from_mixing_angle(ps.ges.mixing_angle, p.kappa);
    const double duration = s.get_double("decay.duration", 8.0 / dp.gamma_2002);
    const int samples = s.get_int("decay.samples", 400);
    if (!(duration > 0.0) || samples < 2) throw ConfigError("decay: need duration > 0 and samples >= 2");
    // Pulse region sampled finely, then the free decay; time origin of the oracle at t_peak.
    std::vector<double> times = linspace(0.0, ps.t_end, 60);
    const auto tail = linspace(ps.t_end, ps.t_peak + duration, samples);
    times.insert(times.end(), tail.begin() + 1, tail.end());
    const auto tr = propagate(ps.sys, DensityMatrix::ground(ps.sys.space), times, ps.drive, ps.probes,
                              s.integrator());
    Table t{{"t", "t_rel", "p_ges", "p_1photon", "p_g00", "p_2r", "p_m", "oracle_p_ges", "oracle_p_1photon",
             "oracle_p_g00"},
            {}};
    const double compare_from = ps.t_end - ps.t_peak;
    double max_dev = 0.0, p1_max = 0.0, p1_max_t = 0.0;
    for (const auto& x : tr.samples) {
        const double rel = x.t - ps.t_peak;
        if (rel >= 0.0) {
            const auto a = decay_populations(dp, rel);
            t.add({x.t, rel, x.p_ges, x.one_photon(), x.p_g00, x.p_2r, x.p_m, a.p_2002, a.one_photon(), a.p_g00});
            if (rel >= compare_from - 1e-9) {
                max_dev = std::max({max_dev, std::abs(x.p_ges - a.p_2002), std::abs(x.one_photon() - a.one_photon()),
                                    std::abs(x.p_g00 - a.p_g00)});
                if (x.one_photon() > p1_max) {
                    p1_max = x.one_photon();
                    p1_max_t = rel;
                }
            }
        } else {
            t.add({x.t, rel, x.p_ges, x.one_photon(), x.p_g00, x.p_2r, x.p_m, kNaN, kNaN, kNaN});
        }
    }
    const auto peak = one_photon_peak(dp);
    o.summary << "eta = " << fmt(dp.eta) << ", oracle one-photon peak " << fmt(peak.value) << " at t = "
              << fmt(peak.time) << ", max |QME - oracle| = " << fmt(max_dev) << "\n";
    o.csv(t);
    o.report({{"params", params_json(p)},
              {"eta", dp.eta},
              {"gamma_2002", dp.gamma_2002},
              {"gamma_1p", dp.gamma_1p},
              {"oracle_peak_time", peak.time},
              {"oracle_peak_value", peak.value},
              {"qme_peak_time", p1_max_t},
              {"qme_peak_value", p1_max},
              {"compare_from_t_rel", compare_from},
              {"max_abs_deviation", max_dev}});
}

// ---- coincidence ----

void cmd_coincidence(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n2"}, o.command);
    const ParamsN2 p = s.params_n2(pulse_defaults());
    const int n_max = s.n_max(2), cap = s.photon_cap();
    o.truncation = {{"n_max", n_max}, {"photon_cap", cap}};
    const auto one = one_photon_eigensystem(p);
    const GridAxis g = parse_grid_axis("coincidence.window_factors",
                                       s.get_string("coincidence.window_factors", "0.01:10:7:log"));
    const auto factors = g.values();
    std::vector<double> windows;
    for (double f : factors) windows.push_back(f / one.delta_e1);
    const auto sol = solve_ges_n2(p, nearest_branch(p));
    const SpacePtr space = build_space(SystemModel{Topology::TwoPhoton}, n_max, cap);
    const auto rho0 = DensityMatrix::pure(space, ges_vector_n2(sol, space));
    CoincidenceOptions co;
    co.integrator = s.integrator();
    const auto recs = coincidence_counts_regression(p, rho0, windows, co);
    Table t{{"window",      "window_de1",  "n11",        "n22",        "n12",        "n1122_re",   "n1122_im",
             "n11_12_re",   "n11_12_im",   "n12_22_re",  "n12_22_im",  "concurrence", "analytic_n11", "analytic_n22",
             "analytic_n12", "analytic_n1122_re", "analytic_n1122_im", "max_rel_dev", "cutoff"},
            {}};
    json rows = json::array();
    for (size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        const auto a = coincidence_counts_analytic(p, windows[i]);
        const double dev = std::max({std::abs(r.n11 / a.n11 - 1.0), std::abs(r.n22 / a.n22 - 1.0),
                                     std::abs(r.n12 / a.n12 - 1.0), std::abs(r.n1122 - a.n1122) / std::abs(a.n1122)});
        const double c = concurrence(tomography_from_counts(r));
        t.add({windows[i], factors[i], r.n11, r.n22, r.n12, r.n1122.real(), r.n1122.imag(), r.n11_12.real(),
               r.n11_12.imag(), r.n12_22.real(), r.n12_22.imag(), c, a.n11, a.n22, a.n12, a.n1122.real(),
               a.n1122.imag(), dev, r.cutoff});
        rows.push_back({{"window_de1", factors[i]},
                        {"concurrence", c},
                        {"counts", {{"n11", r.n11}, {"n22", r.n22}, {"n12", r.n12},
                                    {"n1122", {r.n1122.real(), r.n1122.imag()}}}},
                        {"max_rel_dev", dev}});
        o.summary << "window*dE1=" << fmt(factors[i]) << " concurrence=" << fmt(c) << " max_rel_dev=" << fmt(dev)
                  << "\n";
    }
    o.csv(t);
    o.report({{"params", params_json(p)}, {"delta_e1", one.delta_e1}, {"windows", rows}});
}

// ---- rate ----

void cmd_rate(Output& o) {
    const Scenario& s = o.ctx.scenario;
    require_system(s, {"n2"}, o.command);
    ParamsN2 base = pulse_defaults();
    const ParamsN2 p = s.params_n2(base);
    const double g_ref = s.get_double("rate.g_ref_ev", 50e-6);
    const auto one = one_photon_eigensystem(p);
    const Branch b = nearest_branch(p);
    const double e = ges_energy_n2(p.delta1, p.g2p, b);
    const double sn = std::sin(std::atan(e / p.g2p));
    const double gamma = 2.0 * p.kappa * sn * sn;
    const double rate = detection_rate(p);
    const double hz = detection_rate_hz(p, g_ref);
    Table t{{"kappa", "j", "delta1", "delta2", "g_ref_ev", "gamma_2002", "delta_e1", "rate", "rate_hz", "rate_mhz",
             "scaling_n2", "scaling_n4"},
            {}};
    t.add({p.kappa, p.j, p.delta1, p.delta2, g_ref, gamma, one.delta_e1, rate, hz, hz * 1e-6,
           rate_scaling_n(2, p.kappa, p.j), rate_scaling_n(4, p.kappa, p.j)});
    o.summary << "maximum two-photon detection rate: " << fmt(hz * 1e-6) << " MHz\n";
    o.csv(t);
    o.report({{"params", params_json(p)},
              {"g_ref_ev", g_ref},
              {"gamma_2002", gamma},
              {"delta_e1", one.delta_e1},
              {"rate_bound_mhz", hz * 1e-6},
              {"scaling_n2_order_of_magnitude", rate_scaling_n(2, p.kappa, p.j)},
              {"scaling_n4_order_of_magnitude", rate_scaling_n(4, p.kappa, p.j)}});
}

// ---- check-candidate ----

void cmd_check_candidate(Output& o) {
    const Scenario& s = o.ctx.scenario;
    const Topology topo = s.topology();
    const SystemModel model{topo};
    const int n = model.noon_number();
    const SpacePtr space = build_space(model, n);
    const OperatorMatrix h =
        topo == Topology::TwoPhoton ? hamiltonian_n2(s.params_n2(weak_cw_defaults()), space) : [&] {
            ParamsN4 p;
            const TuningN4 t = kReferenceTuningN4;
            p.j = s.get_double("params.j", t.j);
            p.delta1 = s.get_double("params.delta1", t.delta1);
            p.delta2 = s.get_double("params.delta2", t.delta2);
            p.delta_b = s.get_double("params.delta_b", t.delta_b);
            p.g1 = s.get_double("params.g1", p.g1);
            p.g2 = s.get_double("params.g2", s.get_double("params.ratio", 2.0) * p.g1);
            return hamiltonian(p, space);
        }();
    const auto fg = flow_graph(h, default_ges_support(space, n), n);
    Table t{{"state", "incoming_paths"}, {}};
    json counts = json::object();
    for (const auto& u : fg.unwanted) {
        t.add({to_string(u), fg.incoming.at(u)});
        counts[to_string(u)] = fg.incoming.at(u);
    }
    json edges = json::array();
    for (const auto& [from, to] : fg.edges) edges.push_back({to_string(from), to_string(to)});
    std::string line = std::string("candidate: ") + (fg.candidate ? "true" : "false");
    if (fg.blocking)
        line += ", blocking state " + to_string(*fg.blocking) + " (" + std::to_string(fg.incoming.at(*fg.blocking)) +
                " incoming path)";
    o.summary << line << "\n";
    o.truncation = {{"n_max", n}};
    o.csv(t);
    o.report({{"system", s.system()},
              {"candidate", fg.candidate},
              {"blocking", fg.blocking ? json(to_string(*fg.blocking)) : json(nullptr)},
              {"incoming", counts},
              {"edges", edges},
              {"message", line}});
}

// ---- convergence ----

void cmd_convergence(Output& o) {
    const Scenario& s = o.ctx.scenario;
    const Topology topo = s.topology();
    if (topo == Topology::FourPhotonVariant) throw ConfigError("scenario.system: convergence needs n2 or n4");
    const bool two = topo == Topology::TwoPhoton;
    const auto list = s.get_int_list("numerics.n_max_list", two ? std::vector<int>{2, 3, 4, 5}
                                                                : std::vector<int>{5, 6, 7});
    const double tol = s.get_double("numerics.tolerance", 1e-4);
    const int cap = s.photon_cap();
    const auto so = s.steady_state();
    json params;
    std::function<double(int)> q;
    if (two) {
        const ParamsN2 p = s.params_n2(weak_cw_defaults());
        params = params_json(p);
        q = [p, cap, so](int n) { return cw_point_n2(p, n, cap, so).concurrence; };
    } else {
        const ParamsN4 p = s.params_n4();
        params = params_json(p);
        q = [p, topo, cap, so](int n) { return cw_point_n4(p, topo, n, cap, so).concurrence; };
    }
    const auto rep = convergence_check(q, list, tol);
    Table t{{"n_max", "concurrence", "delta"}, {}};
    for (size_t i = 0; i < rep.values.size(); ++i)
        t.add({rep.n_max[i], rep.values[i], i ? std::abs(rep.values[i] - rep.values[i - 1]) : kNaN});
    o.truncation = {{"n_max_list", list}, {"photon_cap", cap}};
    o.summary << "converged: " << (rep.converged ? "true" : "false") << " (tolerance " << fmt(tol) << ")\n";
    o.csv(t);
    o.report({{"system", s.system()}, {"params", params}, {"tolerance", tol}, {"converged", rep.converged},
              {"values", rep.values}});
}

// ---- tomography ----

void cmd_tomography(Output& o) {
    const Scenario& s = o.ctx.scenario;
    const Topology topo = s.topology();
    if (topo == Topology::FourPhotonVariant) throw ConfigError("scenario.system: tomography needs n2 or n4");
    const bool two = topo == Topology::TwoPhoton;
    const int n_max = s.n_max(two ? 3 : 7), cap = s.photon_cap();
    o.truncation = {{"n_max", n_max}, {"photon_cap", cap}};
    SteadyStateInfo info;
    json res;
    TomographyMatrix tm;
    if (two) {
        const ParamsN2 p = s.params_n2(weak_cw_defaults());
        const auto rho = steady_state(open_system(p, n_max, cap), s.steady_state(), &info);
        tm = tomography(rho, 2);
        const auto pm = trace_distance(tm);
        res["params"] = params_json(p);
        res["concurrence"] = pm.concurrence;
        res["trace_distance"] = pm.trace_distance;
        res["theta_opt"] = pm.theta_opt;
        res["hilbert_schmidt"] = pm.hilbert_schmidt;
        const double g_ref = s.get_double("rate.g_ref_ev", 50e-6);
        res["rate_bound_mhz"] = p.kappa > 0.0 && p.j != 0.0 ? json(detection_rate_hz(p, g_ref) * 1e-6) : json(nullptr);
        res["counts"] = {{"n11", two_photon_intensity(rho)}};
        o.summary << "C = " << fmt(pm.concurrence) << ", D = " << fmt(pm.trace_distance) << ", theta = "
                  << fmt(pm.theta_opt) << "\n";
    } else {
        const ParamsN4 p = s.params_n4();
        const auto rho = steady_state(open_system(p, n_max, topo, cap), s.steady_state(), &info);
        tm = tomography(rho, 4);
        res["params"] = params_json(p);
        res["concurrence"] = concurrence(tm);
        res["noon_coherence"] = noon_coherence(tm);
        o.summary << "C = " << fmt(concurrence(tm)) << ", 2|corner| = " << fmt(noon_coherence(tm)) << "\n";
    }
    res["tomography"] = matrix_json(tm.m);
    res["steady_state_residual"] = info.residual;
    Table t{{"row", "col", "re", "im"}, {}};
    for (Eigen::Index r = 0; r < tm.m.rows(); ++r)
        for (Eigen::Index c = 0; c < tm.m.cols(); ++c)
            t.add({static_cast<int>(r), static_cast<int>(c), tm.m(r, c).real(), tm.m(r, c).imag()});
    o.csv(t);
    o.report(res);
}

using Handler = void (*)(Output&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> h = {
        {"design-n2", cmd_design_n2},
        {"fig9", cmd_fig9},
        {"sweep-delta2", cmd_sweep_delta2},
        {"concurrence-map", cmd_concurrence_map},
        {"pulse", cmd_pulse},
        {"pulse-map", cmd_pulse_map},
        {"decay", cmd_decay},
        {"coincidence", cmd_coincidence},
        {"rate", cmd_rate},
        {"check-candidate", cmd_check_candidate},
        {"convergence", cmd_convergence},
        {"tomography", cmd_tomography},
    };
    return h;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, h] : handlers()) v.push_back(n);
        return v;
    }();
    return names;
}

RunResult run_command(const std::string& name, const RunContext& ctx) {
    const auto& hs = handlers();
    const auto it = std::find_if(hs.begin(), hs.end(), [&](const auto& p) { return p.first == name; });
    if (it == hs.end()) throw ConfigError("unknown command '" + name + "'");
    const std::string declared = ctx.scenario.run();
    if (!declared.empty() && declared != name)
        throw ConfigError("scenario.run: scenario is for '" + declared + "', not '" + name + "'");

    const auto start = std::chrono::steady_clock::now();
    Output o{ctx, name};
    it->second(o);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json meta = {{"tool", "noonsim"},
                 {"version", kToolVersion},
                 {"command", name},
                 {"scenario_hash", ctx.scenario.hash()},
                 {"scenario", ctx.scenario.canonical()},
                 {"truncation", o.truncation},
                 {"rtol", ctx.scenario.integrator().rtol},
                 {"atol", ctx.scenario.integrator().atol},
                 {"steady_state", to_string(ctx.scenario.steady_state().method)},
                 {"steady_tolerance", ctx.scenario.steady_state().tolerance},
                 {"workers", ctx.workers},
                 {"failed_points", o.failed},
                 {"created_utc", utc_now()},
                 {"runtime_s", runtime}};
    o.files.emplace_back(o.name(".meta.json"), meta.dump(2) + "\n");

    std::filesystem::create_directories(ctx.out_dir);
    RunResult result;
    for (const auto& [file, content] : o.files) {
        const auto path = ctx.out_dir / file;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + path.string() + "'");
        f << content;
        result.files.push_back(path);
    }
    result.failed_points = o.failed;
    result.first_failure = o.first_failure;
    if (ctx.out) *ctx.out << o.summary.str();
    return result;
}

}  // namespace noon
