// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace surfflow {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what)
{
    std::ostringstream msg;
    msg << origin << ":" << line << ": " << what;
    throw ConfigError(msg.str());
}

double parse_double(const std::string& s)
{
    double x = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
    return x;
}

long long parse_integer(const std::string& s)
{
    long long x = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
    return x;
}

/// "1/128" or a plain number.
double parse_ratio(const std::string& s)
{
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_double(s);
    const double den = parse_double(trim(s.substr(slash + 1)));
    if (den == 0.0) throw ConfigError("zero denominator in '" + s + "'");
    return parse_double(trim(s.substr(0, slash))) / den;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    if (s.empty()) return out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_double(trim(item)));
    return out;
}

void check_range(double x, double lo, double hi, const std::string& key)
{
    if (!(x >= lo && x <= hi)) {
        std::ostringstream msg;
        msg << key << " = " << x << " outside [" << lo << ", " << hi << "]";
        throw ConfigError(msg.str());
    }
}

MeshSource parse_mesh(const std::string& s)
{
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("mesh must be flat_torus:N, icosphere:L or file:PATH");
    const std::string kind = s.substr(0, colon), arg = s.substr(colon + 1);
    MeshSource m;
    if (kind == "flat_torus") {
        m.kind = MeshKind::flat_torus;
        m.parameter = static_cast<int>(parse_integer(arg));
        if (m.parameter < 4 || m.parameter > 1024 || (m.parameter & (m.parameter - 1)) != 0)
            throw ConfigError("flat_torus size must be a power of two in [4, 1024]");
    } else if (kind == "icosphere") {
        m.kind = MeshKind::icosphere;
        m.parameter = static_cast<int>(parse_integer(arg));
        if (m.parameter < 0 || m.parameter > 7) throw ConfigError("icosphere level must be in [0, 7]");
    } else if (kind == "file") {
        m.kind = MeshKind::file;
        m.parameter = 0;
        if (arg.empty()) throw ConfigError("empty mesh path");
        m.path = arg;
    } else {
        throw ConfigError("unknown mesh kind '" + kind + "'");
    }
    return m;
}

FieldKind parse_field(const std::string& s)
{
    if (s == "zero") return FieldKind::zero;
    if (s == "shear") return FieldKind::shear;
    if (s == "rotation") return FieldKind::rotation;
    if (s == "synthetic") return FieldKind::synthetic;
    throw ConfigError("field must be zero, shear, rotation or synthetic");
}

const char* field_name(FieldKind f)
{
    switch (f) {
    case FieldKind::zero: return "zero";
    case FieldKind::shear: return "shear";
    case FieldKind::rotation: return "rotation";
    case FieldKind::synthetic: return "synthetic";
    }
    return "?";
}

std::string format_double(double x)
{
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string format_list(const std::vector<double>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"mesh", [](RunConfig& c, const std::string& v) { c.mesh = parse_mesh(v); }},
        {"modes",
         [](RunConfig& c, const std::string& v) {
             c.modes = static_cast<int>(parse_integer(v));
             check_range(c.modes, 2, 2000, "modes");
         }},
        {"T",
         [](RunConfig& c, const std::string& v) {
             c.T = parse_ratio(v);
             check_range(c.T, 0.0, 100.0, "T");
         }},
        {"dt",
         [](RunConfig& c, const std::string& v) {
             c.dt = parse_ratio(v);
             check_range(c.dt, 1e-4, 0.5, "dt");
         }},
        {"interpolation",
         [](RunConfig& c, const std::string& v) {
             if (v == "cubic")
                 c.interpolation = Interpolation::cubic;
             else if (v == "linear")
                 c.interpolation = Interpolation::linear;
             else
                 throw ConfigError("interpolation must be cubic or linear");
         }},
        {"snapshot_every",
         [](RunConfig& c, const std::string& v) {
             c.snapshot_every = static_cast<int>(parse_integer(v));
             check_range(c.snapshot_every, 0, 1000000, "snapshot_every");
         }},
        {"field", [](RunConfig& c, const std::string& v) { c.field = parse_field(v); }},
        {"amplitude",
         [](RunConfig& c, const std::string& v) {
             c.amplitude = parse_double(v);
             check_range(c.amplitude, -100.0, 100.0, "amplitude");
         }},
        {"smoothness",
         [](RunConfig& c, const std::string& v) {
             c.smoothness = parse_double(v);
             check_range(c.smoothness, 0.0, 10.0, "smoothness");
         }},
        {"class", [](RunConfig& c, const std::string& v) { c.cohomology = parse_list(v); }},
        {"N",
         [](RunConfig& c, const std::string& v) {
             c.N = static_cast<int>(parse_integer(v));
             check_range(c.N, 1, 32, "N");
         }},
        {"Q",
         [](RunConfig& c, const std::string& v) {
             c.Q = static_cast<int>(parse_integer(v));
             check_range(c.Q, 8, 1024, "Q");
         }},
        {"epsilon",
         [](RunConfig& c, const std::string& v) {
             c.epsilon = parse_double(v);
             check_range(c.epsilon, 1e-4, 1e-2, "epsilon");
         }},
        {"tau_rank",
         [](RunConfig& c, const std::string& v) {
             c.tau_rank = parse_list(v);
             if (c.tau_rank.empty()) throw ConfigError("tau_rank needs at least one threshold");
             for (double t : c.tau_rank) check_range(t, 1e-12, 1.0, "tau_rank");
         }},
        {"dexp_modes",
         [](RunConfig& c, const std::string& v) {
             c.dexp_modes = static_cast<int>(parse_integer(v));
             check_range(c.dexp_modes, 1, 2000, "dexp_modes");
         }},
        {"samples",
         [](RunConfig& c, const std::string& v) {
             c.samples = static_cast<int>(parse_integer(v));
             check_range(c.samples, 1, 10000000, "samples");
         }},
        {"probe_time",
         [](RunConfig& c, const std::string& v) {
             c.probe_time = parse_ratio(v);
             check_range(c.probe_time, 0.0, 10.0, "probe_time");
         }},
        {"out",
         [](RunConfig& c, const std::string& v) {
             if (v.empty()) throw ConfigError("empty output directory");
             c.out = v;
         }},
        {"seed",
         [](RunConfig& c, const std::string& v) {
             const long long s = parse_integer(v);
             if (s < 0) throw ConfigError("seed must be nonnegative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
    };
    return table;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string content = trim(raw.substr(0, raw.find('#')));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) fail(origin, line, "expected key = value");
        const std::string key = trim(content.substr(0, eq)), value = trim(content.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail(origin, line, "unknown key '" + key + "'");
        if (!seen.insert(key).second) fail(origin, line, "repeated key '" + key + "'");
        try {
            it->second(config, value);
        } catch (const ConfigError& e) {
            fail(origin, line, e.what());
        }
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

std::string to_string(const MeshSource& mesh)
{
    switch (mesh.kind) {
    case MeshKind::flat_torus: return "flat_torus:" + std::to_string(mesh.parameter);
    case MeshKind::icosphere: return "icosphere:" + std::to_string(mesh.parameter);
    case MeshKind::file: return "file:" + mesh.path.string();
    }
    return "?";
}

std::string format_config(const RunConfig& c)
{
    std::ostringstream out;
    out << "mesh = " << to_string(c.mesh) << "\n";
    out << "modes = " << c.modes << "\n";
    out << "T = " << format_double(c.T) << "\n";
    out << "dt = " << format_double(c.dt) << "\n";
    out << "interpolation = " << (c.interpolation == Interpolation::cubic ? "cubic" : "linear") << "\n";
    out << "snapshot_every = " << c.snapshot_every << "\n";
    out << "field = " << field_name(c.field) << "\n";
    out << "amplitude = " << format_double(c.amplitude) << "\n";
    out << "smoothness = " << format_double(c.smoothness) << "\n";
    out << "class = " << format_list(c.cohomology) << "\n";
    out << "N = " << c.N << "\n";
    out << "Q = " << c.Q << "\n";
    out << "epsilon = " << format_double(c.epsilon) << "\n";
    out << "tau_rank = " << format_list(c.tau_rank) << "\n";
    out << "dexp_modes = " << c.dexp_modes << "\n";
    out << "samples = " << c.samples << "\n";
    out << "probe_time = " << format_double(c.probe_time) << "\n";
    out << "out = " << c.out.string() << "\n";
    if (c.seed) out << "seed = " << *c.seed << "\n";
    return out.str();
}

TriangleMesh generate_mesh(const MeshSource& mesh)
{
    switch (mesh.kind) {
    case MeshKind::flat_torus: return make_flat_torus(mesh.parameter);
    case MeshKind::icosphere: return make_icosphere(mesh.parameter);
    case MeshKind::file: return load_mesh(mesh.path);
    }
    throw ConfigError("unknown mesh kind");
}

} // namespace surfflow
