#pragma once

#include "fraclap/contour.hpp"
#include "fraclap/pencil.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fraclap {

/// Malformed configuration text, with the 1-based line number when known.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TimeSpacing { Linear, Log };

struct ForcingConfig {
    std::string profile = "0";
    TimeKind kind = TimeKind::Zero;
    double omega = 0.0;
    double amplitude = 1.0;
};

/// Problem description read from a TOML-like file. Coefficients and initial data are
/// expressions in x; the output grid, windows and solver controls are plain values.
struct ProblemConfig {
    std::string a = "1";
    std::string b = "1";
    std::string rho = "1";
    double nu = 0.5;
    Convention convention = Convention::Caputo;
    BoundaryCondition bc_left = BoundaryCondition::SimplySupported;
    BoundaryCondition bc_right = BoundaryCondition::SimplySupported;
    std::string y0 = "0";
    std::string y1 = "0";
    ForcingConfig forcing;
    double t0 = 1.0;
    double t1 = 10.0;
    int times = 20;
    TimeSpacing spacing = TimeSpacing::Linear;
    double target_accuracy = 1e-8;
    ContourKind contour = ContourKind::Hyperbolic;
    int N = 0;  // 0 selects N adaptively
    int N_max = 1024;
    double beta = 2.0;
    int x_points = 41;
    std::string solution_file = "solution.csv";
    std::string energy_file = "energy.csv";
};

/// Parses the key/value format:
///   key = value            (value: number, bare word or "quoted string")
///   [forcing] / [window] / [solver] / [output]   sections
///   # comment
/// Unknown or repeated keys are errors.
[[nodiscard]] ProblemConfig parse_config(std::string_view text);
[[nodiscard]] ProblemConfig load_config(const std::filesystem::path& path);

/// Canonical text listing every field; parse_config(to_text(c)) reproduces c exactly.
[[nodiscard]] std::string to_text(const ProblemConfig& c);

[[nodiscard]] BoundaryCondition parse_boundary_condition(std::string_view s);
[[nodiscard]] Convention parse_convention(std::string_view s);
[[nodiscard]] ContourKind parse_contour_kind(std::string_view s);
[[nodiscard]] TimeKind parse_time_kind(std::string_view s);
[[nodiscard]] std::string to_string(TimeKind k);
[[nodiscard]] std::string to_string(TimeSpacing s);

/// Chebyshev interpolant of an expression in x.
[[nodiscard]] ChebSeries series_from_expr(std::string_view src);

/// Minimum of an expression over 1001 equispaced samples of [-1, 1].
[[nodiscard]] double sampled_min(std::string_view src);

struct Problem {
    BeamPencil pencil;
    InitialData init;
    Forcing forcing;
};

/// Builds the pencil and data. Throws ConfigError when a, b or rho is not
/// strictly positive on the sample grid or a field is out of range.
[[nodiscard]] Problem build_problem(const ProblemConfig& c);

/// Output times: c.times points from t0 to t1 with the configured spacing.
[[nodiscard]] std::vector<double> output_times(const ProblemConfig& c);

}  // namespace fraclap
