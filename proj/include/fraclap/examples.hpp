#pragma once

#include "fraclap/config.hpp"
#include "fraclap/csv_io.hpp"
#include "fraclap/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fraclap {

/// Outcome of a CLI-level run: whether every certificate was met, the files written
/// and human-readable summary lines.
struct RunReport {
    bool certified = true;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> summary;
};

/// Certificate status of one window.
struct WindowCertificate {
    double quadrature = 0.0;  // adaptive self-estimate, or the a priori bound for fixed N
    double node_error = 0.0;  // LaplaceSolve::node_error_bound
    bool met = false;
};

/// Solution of a configured problem on all its windows.
struct ProblemRun {
    ProblemConfig config;
    std::vector<LaplaceSolve> windows;
    std::vector<WindowCertificate> certificates;
    TimeSolution solution;
    [[nodiscard]] bool certified() const;
};

[[nodiscard]] SolverOptions solver_options(const ProblemConfig& c);
[[nodiscard]] WindowCertificate window_certificate(const LaplaceSolve& ls, bool adaptive);

/// Builds, solves on geometric windows, evaluates at the output times and computes the energy.
[[nodiscard]] ProblemRun run_problem(const ProblemConfig& c);

/// Solution and energy tables with the full metadata block.
[[nodiscard]] CsvTable solution_table(const ProblemRun& run);
[[nodiscard]] CsvTable energy_table(const ProblemRun& run);

/// Metadata lines for a config: every resolved field plus the content hash of its canonical text.
void add_config_metadata(CsvTable& t, const ProblemConfig& c);

/// run_problem followed by writing solution and energy CSVs into out_dir.
[[nodiscard]] RunReport solve_config(const ProblemConfig& c, const std::filesystem::path& out_dir);

// ============================================================================
// Built-in examples
// ============================================================================

struct ExampleOverrides {
    std::optional<double> nu;
    std::optional<double> omega;
    std::optional<double> accuracy;
    std::optional<ContourKind> contour;
    std::optional<int> N;
    std::optional<double> t0;
    std::optional<double> t1;
};

/// Constant-coefficient beam under the forcing sin(pi(x-1)) sin(omega t), simply supported.
[[nodiscard]] ProblemConfig example1_config(double omega, double nu = 0.64);
/// Same beam released from sin^2(2 pi x)(1+x)(1-x)^2 without forcing.
[[nodiscard]] ProblemConfig example1_free_config(double nu);
/// Clamped beam with variable damping; damping expression replaceable for the undamped check.
[[nodiscard]] ProblemConfig example2_config(double nu, const std::string& damping = "1.01+tanh(10*x)");
/// Variable-coefficient problem of the quadrature convergence study.
[[nodiscard]] ProblemConfig convergence_config(double nu = 0.8);

/// Closed-form steady response of the example1 beam at (x, t).
[[nodiscard]] double example1_closed_form(double omega, double nu, double x, double t);
/// Undamped example2 solution (1+x)^2 (1-x)^2 cos(pi t).
[[nodiscard]] double example2_undamped(double x, double t);

[[nodiscard]] const std::vector<std::string>& example_names();

/// Runs example1, example1_free, example2, example3 or convergence and writes its CSVs into out_dir.
[[nodiscard]] RunReport run_example(std::string_view name, const ExampleOverrides& ov,
                                    const std::filesystem::path& out_dir);

/// Max over times of the L2 self-error of fixed-N solves against a reference solve.
struct ConvergenceRow {
    int N = 0;
    double error = 0.0;
};
[[nodiscard]] std::vector<ConvergenceRow> convergence_study(const ProblemConfig& c, ContourKind kind,
                                                            const std::vector<int>& Ns, int N_ref);

// ============================================================================
// Region curves and contours
// ============================================================================

/// r*(theta, eps) samples for eps in {0, 1, 5, 10} at `count` angles: columns eps, theta, r, re, im.
[[nodiscard]] CsvTable region_curves_table(double nu, double M, std::size_t count = 2000);

/// Nodes and weights j = -N..N: columns j, re_z, im_z, re_w, im_w.
[[nodiscard]] CsvTable contour_table(const Contour& c);

}  // namespace fraclap
