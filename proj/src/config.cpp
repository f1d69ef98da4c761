#include "fraclap/config.hpp"

#include "fraclap/csv_io.hpp"
#include "fraclap/expr.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fraclap {

BoundaryCondition parse_boundary_condition(std::string_view s) {
    if (s == "clamped") return BoundaryCondition::Clamped;
    if (s == "simply_supported") return BoundaryCondition::SimplySupported;
    throw ConfigError("unknown boundary condition '" + std::string(s) + "' (clamped | simply_supported)");
}

Convention parse_convention(std::string_view s) {
    if (s == "caputo") return Convention::Caputo;
    if (s == "riemann_liouville") return Convention::RiemannLiouville;
    throw ConfigError("unknown convention '" + std::string(s) + "' (caputo | riemann_liouville)");
}

ContourKind parse_contour_kind(std::string_view s) {
    if (s == "hyperbolic") return ContourKind::Hyperbolic;
    if (s == "parabolic") return ContourKind::Parabolic;
    throw ConfigError("unknown contour '" + std::string(s) + "' (hyperbolic | parabolic)");
}

TimeKind parse_time_kind(std::string_view s) {
    if (s == "zero") return TimeKind::Zero;
    if (s == "sin") return TimeKind::Sin;
    if (s == "cos") return TimeKind::Cos;
    throw ConfigError("unknown forcing kind '" + std::string(s) + "' (zero | sin | cos)");
}

std::string to_string(TimeKind k) {
    switch (k) {
        case TimeKind::Zero: return "zero";
        case TimeKind::Sin: return "sin";
        case TimeKind::Cos: return "cos";
    }
    return "zero";
}

std::string to_string(TimeSpacing s) { return s == TimeSpacing::Linear ? "linear" : "log"; }

namespace {

TimeSpacing parse_spacing(std::string_view s) {
    if (s == "linear") return TimeSpacing::Linear;
    if (s == "log") return TimeSpacing::Log;
    throw ConfigError("unknown spacing '" + std::string(s) + "' (linear | log)");
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("expected a number, got '" + v + "'");
    return out;
}

int to_int(const std::string& v) {
    int out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
    return out;
}

std::string expr_value(const std::string& v) {
    (void)parse_expr(v);
    return v;
}

using Setter = std::function<void(ProblemConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> s{
        {"a", [](ProblemConfig& c, const std::string& v) { c.a = expr_value(v); }},
        {"b", [](ProblemConfig& c, const std::string& v) { c.b = expr_value(v); }},
        {"rho", [](ProblemConfig& c, const std::string& v) { c.rho = expr_value(v); }},
        {"nu", [](ProblemConfig& c, const std::string& v) { c.nu = to_double(v); }},
        {"convention", [](ProblemConfig& c, const std::string& v) { c.convention = parse_convention(v); }},
        {"bc_left", [](ProblemConfig& c, const std::string& v) { c.bc_left = parse_boundary_condition(v); }},
        {"bc_right", [](ProblemConfig& c, const std::string& v) { c.bc_right = parse_boundary_condition(v); }},
        {"y0", [](ProblemConfig& c, const std::string& v) { c.y0 = expr_value(v); }},
        {"y1", [](ProblemConfig& c, const std::string& v) { c.y1 = expr_value(v); }},
        {"forcing.profile", [](ProblemConfig& c, const std::string& v) { c.forcing.profile = expr_value(v); }},
        {"forcing.kind", [](ProblemConfig& c, const std::string& v) { c.forcing.kind = parse_time_kind(v); }},
        {"forcing.omega", [](ProblemConfig& c, const std::string& v) { c.forcing.omega = to_double(v); }},
        {"forcing.amplitude", [](ProblemConfig& c, const std::string& v) { c.forcing.amplitude = to_double(v); }},
        {"window.t0", [](ProblemConfig& c, const std::string& v) { c.t0 = to_double(v); }},
        {"window.t1", [](ProblemConfig& c, const std::string& v) { c.t1 = to_double(v); }},
        {"window.times", [](ProblemConfig& c, const std::string& v) { c.times = to_int(v); }},
        {"window.spacing", [](ProblemConfig& c, const std::string& v) { c.spacing = parse_spacing(v); }},
        {"solver.target_accuracy", [](ProblemConfig& c, const std::string& v) { c.target_accuracy = to_double(v); }},
        {"solver.contour", [](ProblemConfig& c, const std::string& v) { c.contour = parse_contour_kind(v); }},
        {"solver.N", [](ProblemConfig& c, const std::string& v) { c.N = to_int(v); }},
        {"solver.N_max", [](ProblemConfig& c, const std::string& v) { c.N_max = to_int(v); }},
        {"solver.beta", [](ProblemConfig& c, const std::string& v) { c.beta = to_double(v); }},
        {"output.x_points", [](ProblemConfig& c, const std::string& v) { c.x_points = to_int(v); }},
        {"output.solution", [](ProblemConfig& c, const std::string& v) { c.solution_file = v; }},
        {"output.energy", [](ProblemConfig& c, const std::string& v) { c.energy_file = v; }},
    };
    return s;
}

void validate(const ProblemConfig& c) {
    if (!(c.nu > 0.0 && c.nu < 2.0)) throw ConfigError("nu must lie in (0,2)");
    if (!(c.t0 > 0.0 && c.t1 >= c.t0 && std::isfinite(c.t1))) throw ConfigError("window requires 0 < t0 <= t1");
    if (c.times < 1) throw ConfigError("window.times must be positive");
    if (!(c.target_accuracy > 0.0)) throw ConfigError("target_accuracy must be positive");
    if (c.N < 0 || c.N_max < 1) throw ConfigError("solver.N must be >= 0 and solver.N_max >= 1");
    if (!(c.beta > 0.0)) throw ConfigError("solver.beta must be positive");
    if (c.x_points < 2) throw ConfigError("output.x_points must be at least 2");
    if (!(c.forcing.omega >= 0.0)) throw ConfigError("forcing.omega must be nonnegative");
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

ProblemConfig parse_config(std::string_view text) {
    ProblemConfig c;
    std::string section;
    std::map<std::string, bool> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto fail = [&](const std::string& msg) { throw ConfigError("line " + std::to_string(line_no) + ": " + msg); };
        // Strip a comment that is not inside a quoted string.
        bool quoted = false;
        std::size_t cut = raw.size();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '"') quoted = !quoted;
            if (raw[i] == '#' && !quoted) {
                cut = i;
                break;
            }
        }
        const std::string line = trim(std::string_view(raw).substr(0, cut));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "forcing" && section != "window" && section != "solver" && section != "output")
                fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') fail("unterminated string");
            value = value.substr(1, value.size() - 2);
        }
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end()) fail("unknown key '" + full + "'");
        if (seen[full]) fail("repeated key '" + full + "'");
        seen[full] = true;
        try {
            it->second(c, value);
        } catch (const ExprError& e) {
            fail(full + ": " + e.what());
        } catch (const ConfigError& e) {
            fail(full + ": " + e.what());
        }
    }
    validate(c);
    return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const ProblemConfig& c) {
    std::ostringstream o;
    o << "a = " << quote(c.a) << "\n"
      << "b = " << quote(c.b) << "\n"
      << "rho = " << quote(c.rho) << "\n"
      << "nu = " << format_double(c.nu) << "\n"
      << "convention = " << to_string(c.convention) << "\n"
      << "bc_left = " << to_string(c.bc_left) << "\n"
      << "bc_right = " << to_string(c.bc_right) << "\n"
      << "y0 = " << quote(c.y0) << "\n"
      << "y1 = " << quote(c.y1) << "\n"
      << "\n[forcing]\n"
      << "profile = " << quote(c.forcing.profile) << "\n"
      << "kind = " << to_string(c.forcing.kind) << "\n"
      << "omega = " << format_double(c.forcing.omega) << "\n"
      << "amplitude = " << format_double(c.forcing.amplitude) << "\n"
      << "\n[window]\n"
      << "t0 = " << format_double(c.t0) << "\n"
      << "t1 = " << format_double(c.t1) << "\n"
      << "times = " << c.times << "\n"
      << "spacing = " << to_string(c.spacing) << "\n"
      << "\n[solver]\n"
      << "target_accuracy = " << format_double(c.target_accuracy) << "\n"
      << "contour = " << to_string(c.contour) << "\n"
      << "N = " << c.N << "\n"
      << "N_max = " << c.N_max << "\n"
      << "beta = " << format_double(c.beta) << "\n"
      << "\n[output]\n"
      << "x_points = " << c.x_points << "\n"
      << "solution = " << quote(c.solution_file) << "\n"
      << "energy = " << quote(c.energy_file) << "\n";
    return o.str();
}

ChebSeries series_from_expr(std::string_view src) {
    const ExprPtr e = parse_expr(src);
    return ChebSeries::from_real_function([&](double x) { return evaluate(*e, x); });
}

double sampled_min(std::string_view src) {
    const ExprPtr e = parse_expr(src);
    double m = INFINITY;
    for (int k = 0; k <= 1000; ++k) {
        const double v = evaluate(*e, -1.0 + 2.0 * k / 1000.0);
        if (std::isnan(v)) return NAN;
        m = std::min(m, v);
    }
    return m;
}

Problem build_problem(const ProblemConfig& c) {
    validate(c);
    for (const auto& [name, src] : {std::pair{"a", &c.a}, std::pair{"b", &c.b}, std::pair{"rho", &c.rho}}) {
        const double m = sampled_min(*src);
        if (!(m > 0.0))
            throw ConfigError(std::string("coefficient ") + name + " = " + *src + " is not strictly positive on [-1,1]");
    }
    BeamPencil pencil(series_from_expr(c.a), series_from_expr(c.b), series_from_expr(c.rho), c.nu, c.bc_left,
                      c.bc_right, c.convention);
    InitialData init;
    init.y0 = series_from_expr(c.y0);
    init.y1 = series_from_expr(c.y1);
    Forcing f;
    f.profile = series_from_expr(c.forcing.profile);
    f.kind = c.forcing.kind;
    f.omega = c.forcing.omega;
    f.amplitude = c.forcing.amplitude;
    return {std::move(pencil), std::move(init), std::move(f)};
}

std::vector<double> output_times(const ProblemConfig& c) {
    std::vector<double> t;
    if (c.times == 1) return {c.t0};
    for (int k = 0; k < c.times; ++k) {
        const double s = static_cast<double>(k) / (c.times - 1);
        t.push_back(c.spacing == TimeSpacing::Linear ? c.t0 + (c.t1 - c.t0) * s : c.t0 * std::pow(c.t1 / c.t0, s));
    }
    t.back() = c.t1;
    return t;
}

}  // namespace fraclap
