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

#include "noonsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "noonsim/errors.hpp"
#include "noonsim/units.hpp"

namespace noon {

namespace {

enum class Kind { Double, Int, Grid, IntList, Text };

struct KeySpec {
    Kind kind;
    std::vector<std::string> choices;  // allowed values for Text, empty = free
};

const std::map<std::string, KeySpec>& schema() {
    static const std::map<std::string, KeySpec> s = {
        {"scenario.system", {Kind::Text, {"n2", "n4", "n4-variant"}}},
        {"scenario.run",
         {Kind::Text,
          {"design-n2", "fig9", "sweep-delta2", "concurrence-map", "pulse", "pulse-map", "decay", "coincidence",
           "rate", "check-candidate", "convergence", "tomography"}}},
        {"scenario.version", {Kind::Int, {}}},
        {"params.g2p", {Kind::Double, {}}},
        {"params.j", {Kind::Double, {}}},
        {"params.delta1", {Kind::Double, {}}},
        {"params.delta2", {Kind::Double, {}}},
        {"params.branch", {Kind::Text, {"plus", "minus"}}},
        {"params.kappa", {Kind::Double, {}}},
        {"params.pump_detuning", {Kind::Double, {}}},
        {"params.rabi", {Kind::Double, {}}},
        {"params.pump_port", {Kind::Int, {}}},
        {"params.g1", {Kind::Double, {}}},
        {"params.g2", {Kind::Double, {}}},
        {"params.ratio", {Kind::Double, {}}},
        {"params.delta_b", {Kind::Double, {}}},
        {"grid.delta1", {Kind::Grid, {}}},
        {"grid.delta2", {Kind::Grid, {}}},
        {"grid.kappa", {Kind::Grid, {}}},
        {"grid.rabi", {Kind::Grid, {}}},
        {"grid.power", {Kind::Grid, {}}},
        {"grid.log_duration", {Kind::Grid, {}}},
        {"grid.ratio", {Kind::Grid, {}}},
        {"pulse.power", {Kind::Double, {}}},
        {"pulse.log_duration", {Kind::Double, {}}},
        {"pulse.peak_factor", {Kind::Double, {}}},
        {"pulse.end_factor", {Kind::Double, {}}},
        {"pulse.samples", {Kind::Int, {}}},
        {"decay.duration", {Kind::Double, {}}},
        {"decay.samples", {Kind::Int, {}}},
        {"coincidence.window_factors", {Kind::Grid, {}}},
        {"rate.g_ref_ev", {Kind::Double, {}}},
        {"numerics.n_max", {Kind::Int, {}}},
        {"numerics.photon_cap", {Kind::Int, {}}},
        {"numerics.rtol", {Kind::Double, {}}},
        {"numerics.atol", {Kind::Double, {}}},
        {"numerics.tolerance", {Kind::Double, {}}},
        {"numerics.steady_state", {Kind::Text, {"krylov", "direct", "propagation"}}},
        {"numerics.n_max_list", {Kind::IntList, {}}},
        {"output.prefix", {Kind::Text, {}}},
    };
    return s;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = boost::algorithm::trim_copy(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + text + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    const std::string t = boost::algorithm::trim_copy(text);
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::is_any_of(","));
    std::vector<int> out;
    for (const auto& p : parts) out.push_back(parse_int(key, p));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

void validate(const std::string& key, const std::string& value) {
    const auto it = schema().find(key);
    if (it == schema().end()) throw ConfigError(key + ": unknown key");
    const KeySpec& spec = it->second;
    switch (spec.kind) {
        case Kind::Double: parse_double(key, value); break;
        case Kind::Int: parse_int(key, value); break;
        case Kind::Grid: parse_grid_axis(key, value); break;
        case Kind::IntList: parse_int_list(key, value); break;
        case Kind::Text:
            if (!spec.choices.empty() &&
                std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
                std::string allowed;
                for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
                throw ConfigError(key + ": '" + value + "' is not one of {" + allowed + "}");
            }
            break;
    }
}

}  // namespace

std::vector<double> GridAxis::values() const {
    std::vector<double> v(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        v[static_cast<size_t>(i)] = log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
                                        : min + f * (max - min);
    }
    if (points > 1) v.back() = max;
    return v;
}

GridAxis parse_grid_axis(const std::string& name, const std::string& text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::is_any_of(":"));
    if (parts.size() != 3 && parts.size() != 4)
        throw ConfigError(name + ": expected min:max:points[:log], got '" + text + "'");
    GridAxis g;
    g.name = name;
    g.min = parse_double(name, parts[0]);
    g.max = parse_double(name, parts[1]);
    g.points = parse_int(name, parts[2]);
    if (parts.size() == 4) {
        const std::string mode = boost::algorithm::trim_copy(parts[3]);
        if (mode == "log")
            g.log = true;
        else if (mode != "lin")
            throw ConfigError(name + ": spacing must be 'lin' or 'log', got '" + mode + "'");
    }
    if (g.points < 1) throw ConfigError(name + ": grid is empty (points = " + std::to_string(g.points) + ")");
    if (g.max < g.min) throw ConfigError(name + ": max is below min");
    if (g.log && !(g.min > 0.0)) throw ConfigError(name + ": log spacing needs min > 0");
    return g;
}

Scenario Scenario::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str(), path.string());
}

Scenario Scenario::from_string(const std::string& text, const std::string& origin) {
    boost::property_tree::ptree raw;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, raw);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    Scenario s;
    s.origin_ = origin;
    for (const auto& [section, body] : raw) {
        if (!body.data().empty()) throw ConfigError(origin + ": key '" + section + "' must be inside a section");
        for (const auto& [key, value] : body) s.set(section + "." + key, value.data());
    }
    const int version = s.get_int("scenario.version", kScenarioSchemaVersion);
    if (version != kScenarioSchemaVersion)
        throw ConfigError("scenario.version: unsupported schema version " + std::to_string(version));
    return s;
}

void Scenario::set(const std::string& key, const std::string& value) {
    const std::string v = boost::algorithm::trim_copy(value);
    validate(key, v);
    tree_.put(boost::property_tree::ptree::path_type(key, '.'), v);
}

bool Scenario::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

std::string Scenario::get_string(const std::string& key, const std::string& fallback) const {
    return tree_.get<std::string>(key, fallback);
}

double Scenario::get_double(const std::string& key, double fallback) const {
    const auto v = tree_.get_optional<std::string>(key);
    return v ? parse_double(key, *v) : fallback;
}

int Scenario::get_int(const std::string& key, int fallback) const {
    const auto v = tree_.get_optional<std::string>(key);
    return v ? parse_int(key, *v) : fallback;
}

std::optional<GridAxis> Scenario::grid(const std::string& axis) const {
    const auto v = tree_.get_optional<std::string>("grid." + axis);
    if (!v) return std::nullopt;
    return parse_grid_axis("grid." + axis, *v);
}

std::vector<int> Scenario::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
    const auto v = tree_.get_optional<std::string>(key);
    return v ? parse_int_list(key, *v) : fallback;
}

Topology Scenario::topology() const { return topology_from_string(system()); }

ParamsN2 Scenario::params_n2(const ParamsN2& base) const {
    ParamsN2 p = base;
    p.g2p = get_double("params.g2p", p.g2p);
    p.j = get_double("params.j", p.j);
    p.delta1 = get_double("params.delta1", p.delta1);
    p.kappa = get_double("params.kappa", p.kappa);
    p.rabi = get_double("params.rabi", p.rabi);
    p.pump_port = get_int("params.pump_port", p.pump_port);
    if (has("params.branch") && has("params.delta2"))
        throw ConfigError("params.branch and params.delta2 are mutually exclusive");
    if (has("params.delta2")) {
        p.delta2 = get_double("params.delta2", 0.0);
    } else {
        const Branch s = branch_from_string(get_string("params.branch", "minus"));
        p.delta2 = condition_delta2(p.delta1, p.g2p, s);
    }
    p.pump_detuning = get_double("params.pump_detuning", p.delta2);
    p.validate();
    return p;
}

ParamsN4 Scenario::params_n4() const {
    ParamsN4 p;
    p.g1 = get_double("params.g1", p.g1);
    if (has("params.ratio") && has("params.g2")) throw ConfigError("params.ratio and params.g2 are mutually exclusive");
    const double ratio = has("params.g2") ? get_double("params.g2", 0.0) / p.g1 : get_double("params.ratio", 2.0);
    p.g2 = ratio * p.g1;
    p.kappa = get_double("params.kappa", 0.01);
    p.rabi = get_double("params.rabi", 0.04);
    p.pump_port = get_int("params.pump_port", 1);

    const bool explicit_tuning =
        has("params.j") && has("params.delta1") && has("params.delta2") && has("params.delta_b");
    TuningN4 t;
    if (explicit_tuning) {
        t = {get_double("params.j", 0.0), get_double("params.delta1", 0.0), get_double("params.delta2", 0.0),
             get_double("params.delta_b", 0.0)};
    } else {
        if (has("params.j") || has("params.delta1") || has("params.delta2") || has("params.delta_b"))
            throw ConfigError("params: give all of j, delta1, delta2, delta_b or none of them");
        if (std::abs(p.g1 - units::kReferenceCoupling) > 1e-12)
            throw ConfigError("params.g1: automatic tuning assumes g1 = 1/sqrt(2) (energies in sqrt(2) g1)");
        const auto r = solve_ges_n4(ratio);
        if (r.status != DesignStatus::Converged)
            throw ConfigError("params.ratio: no four-photon design at g2/g1 = " + std::to_string(ratio) + " (" +
                              r.message + ")");
        t = r.solution->tuning;
    }
    p.j = t.j;
    p.delta1 = t.delta1;
    p.delta2 = t.delta2;
    p.delta_b = t.delta_b;
    if (has("params.pump_detuning")) {
        p.pump_detuning = get_double("params.pump_detuning", 0.0);
    } else {
        p.pump_detuning = evaluate_ges_n4(t, ratio, topology() == Topology::FourPhotonVariant
                                                        ? Topology::FourPhotonVariant
                                                        : Topology::FourPhoton)
                              .energy /
                          4.0;
    }
    p.validate();
    return p;
}

IntegratorOptions Scenario::integrator() const {
    IntegratorOptions o;
    o.rtol = get_double("numerics.rtol", o.rtol);
    o.atol = get_double("numerics.atol", o.atol);
    if (!(o.rtol > 0.0) || !(o.atol > 0.0)) throw ConfigError("numerics.rtol/atol must be positive");
    return o;
}

SteadyStateOptions Scenario::steady_state() const {
    SteadyStateOptions o;
    o.method = steady_state_method_from_string(get_string("numerics.steady_state", "krylov"));
    o.tolerance = get_double("numerics.tolerance", o.tolerance);
    return o;
}

std::string Scenario::canonical() const {
    std::map<std::string, std::string> flat;
    for (const auto& [section, body] : tree_)
        for (const auto& [key, value] : body) flat[section + "." + key] = value.data();
    std::string out = "schema=" + std::to_string(kScenarioSchemaVersion) + "\n";
    for (const auto& [k, v] : flat) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string Scenario::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

}  // namespace noon
