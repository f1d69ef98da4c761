#pragma once

#include "fraclap/contour.hpp"
#include "fraclap/pencil.hpp"
#include "fraclap/resolvent_bounds.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclap {

/// Raised when a node cannot be solved within the truncation limit or lies outside the certified region.
class NodeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    ContourKind contour = ContourKind::Hyperbolic;
    double beta = 2.0;
    /// Fixed quadrature half-count; 0 selects N adaptively.
    int N = 0;
    int N_start = 16;
    int N_max = 1024;
    Index n_start = 64;
    Index n_max = 4096;
    /// Hyperbolic shift; negative selects sigma = beta / t1.
    double sigma = -1.0;
    /// Ratio of geometric time windows.
    double window_ratio = 10.0;
};

/// Certified spectral solution at one contour node.
struct NodeSolution {
    Complex z;
    ChebSeries y;            // Chebyshev T coefficients
    double residual = 0.0;   // ||K - T(z) y||_rho of the operator rows
    double boundary_residual = 0.0;  // l2 mismatch of the boundary rows
    double eps = 0.0;        // certified resolvent parameter at z
    Index n = 0;             // final truncation
    bool certified = false;  // residual / eps <= eta
    [[nodiscard]] double certified_error() const { return eps > 0.0 ? residual / eps : INFINITY; }
};

/// Pole p of the transform with known principal part field/(z - p): the forcing
/// poles +-i omega with field = T(p)^{-1} (residue * profile), and z = 0 with
/// field = y0. crossed is true when the contour deformation passes p, so that
/// e^{p t} field is a residue correction. Evaluation subtracts field/(z - p) from
/// every node and adds e^{p t} field for all poles, which is the same sum.
struct PoleCorrection {
    Complex p;
    ChebSeries field;
    bool crossed = false;
};

struct LaplaceSolve {
    Contour contour;
    BoundParams bounds;
    double target = 0.0;
    double eta = 0.0;
    double beta = 0.0;
    std::vector<NodeSolution> nodes;  // j = 0..N; j < 0 are conjugates
    std::vector<PoleCorrection> poles;  // forcing poles +-i omega, then z = 0 when y0 != 0
    double quadrature_estimate = 0.0;  // N vs 2N self-difference (adaptive N only)
    std::size_t solve_count = 0;       // linear solves performed

    [[nodiscard]] double max_certified_error() const;
    [[nodiscard]] std::size_t uncertified_count() const;
    /// sum_j |w_j| max_{t in window} e^{Re z_j t} (residual_j / eps_j): bound on the
    /// time-domain error caused by inexact node values.
    [[nodiscard]] double node_error_bound() const;
};

struct TimeCertificate {
    double quadrature_estimate = 0.0;
    double eta_term = 0.0;  // eta-amplification term (hyperbolic only; 0 otherwise)
};

struct TimeSolution {
    std::vector<double> times;
    std::vector<ChebSeries> y;
    std::vector<ChebSeries> y_t;
    std::vector<double> energy;
    std::vector<TimeCertificate> certificates;
};

struct EnergyAsymptote {
    double e1 = 0.0;
    double exponent = 0.0;
    double correction_exponent = 0.0;
    [[nodiscard]] double operator()(double t) const { return e1 * std::pow(t, exponent); }
};

// ============================================================================
// Laplace-domain solve
// ============================================================================

/// Contour for one window: sector or parabola selection from the resolvent bounds, then Algorithm 1 or 2.
[[nodiscard]] Contour select_contour(const BoundParams& bp, TimeWindow win, int N, double eta, const SolverOptions& opt);

/// Adaptive solve of T(z) y = K(z): n doubles from n_start until the certified error is
/// below eta and the coefficient tail is below max(eta, 64 eps). A node whose residual
/// stagnates first (or whose residual is already at the rounding floor) is returned uncertified.
[[nodiscard]] NodeSolution solve_node(const BeamPencil& p, const RhsAssembler& rhs, const BoundParams& bp, Complex z,
                                      double eta, const SolverOptions& opt, std::size_t* solves = nullptr);

/// Solves T(p) y = v with only the truncation-tail criterion (no resolvent certificate).
[[nodiscard]] ChebSeries solve_uncertified(const BeamPencil& p, const ChebSeries& v, Complex z, double tol,
                                           const SolverOptions& opt, std::size_t* solves = nullptr);

/// True when the pole p lies strictly to the right of the contour. Throws when p lies on it.
[[nodiscard]] bool pole_right_of_contour(const Contour& c, Complex p);

[[nodiscard]] LaplaceSolve solve_laplace(const BeamPencil& p, const InitialData& init, const Forcing& forcing,
                                         TimeWindow win, double target_accuracy, const SolverOptions& opt = {});

/// Splits [t_start, t_end] into windows of ratio opt.window_ratio, each with its own contour.
[[nodiscard]] std::vector<LaplaceSolve> solve_windows(const BeamPencil& p, const InitialData& init,
                                                      const Forcing& forcing, double t_start, double t_end,
                                                      double target_accuracy, const SolverOptions& opt = {});

// ============================================================================
// Time domain
// ============================================================================

/// y(., t) and y_t(., t) for each t; every t must lie in the window of the solve.
[[nodiscard]] TimeSolution evaluate(const LaplaceSolve& ls, std::span<const double> times);
/// Same, choosing for each time the first window that contains it.
[[nodiscard]] TimeSolution evaluate(std::span<const LaplaceSolve> windows, std::span<const double> times);

/// E = 1/2 int a |y''|^2 + rho |y_t|^2 dx.
[[nodiscard]] double energy(const BeamPencil& p, const ChebSeries& y, const ChebSeries& y_t);
/// Fills ts.energy.
void compute_energy(TimeSolution& ts, const BeamPencil& p);

/// Leading large-time energy e1 t^{-2 nu} for constant a, b, y1 = 0, no forcing and 0 < nu < 1.
[[nodiscard]] EnergyAsymptote energy_asymptote(const BeamPencil& p, const InitialData& init,
                                               const Forcing& forcing = {});

/// int_0^{t1} e^{-z s} f(s) ds by panelled Clenshaw-Curtis quadrature.
[[nodiscard]] Complex forcing_transform_numeric(const std::function<double(double)>& f, double t1, Complex z);

/// sqrt(int_{-1}^{1} |u|^2 dx) for a series in any basis.
[[nodiscard]] double l2_norm(const ChebSeries& u);

}  // namespace fraclap
