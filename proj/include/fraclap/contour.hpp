#pragma once

#include "fraclap/cheb_series.hpp"

#include <span>
#include <vector>

namespace fraclap {

enum class ContourKind { Hyperbolic, Parabolic };

[[nodiscard]] const char* to_string(ContourKind k);

/// Time interval [t0, t1] served by one contour.
struct TimeWindow {
    double t0 = 1.0;
    double t1 = 1.0;

    [[nodiscard]] double ratio() const noexcept { return t1 / t0; }
    /// Throws std::invalid_argument unless 0 < t0 <= t1.
    void validate() const;
    [[nodiscard]] bool contains(double t, double rel_slack = 1e-12) const noexcept;
};

/// Deformed Bromwich contour with trapezoid nodes z_j = gamma(j h), j = -N..N,
/// and weights w_j = h/(2 pi i) gamma'(j h).
///   Hyperbolic: gamma(s) = sigma + mu (1 + sin(i s - alpha))
///   Parabolic:  gamma(s) = sigma - 1/(4 delta) + mu (1 + i s)^2
struct Contour {
    ContourKind kind = ContourKind::Hyperbolic;
    double mu = 0.0;
    double alpha = 0.0;  // hyperbolic only
    double delta = 0.0;  // sector angle (hyperbolic) or parabola parameter (parabolic)
    double sigma = 0.0;
    double h = 0.0;
    int N = 0;
    TimeWindow window;

    [[nodiscard]] Complex gamma(double s) const;
    [[nodiscard]] Complex dgamma(double s) const;
    [[nodiscard]] Complex node(int j) const { return gamma(j * h); }
    [[nodiscard]] Complex weight(int j) const;
    /// Nodes for j = 0..N (the j < 0 half is their conjugate).
    [[nodiscard]] std::vector<Complex> half_nodes() const;
    [[nodiscard]] double max_node_real() const;
};

[[nodiscard]] Contour make_hyperbolic(double mu, double alpha, double sigma, double h, int N, TimeWindow win);
[[nodiscard]] Contour make_parabolic(double mu, double delta, double sigma, double h, int N, TimeWindow win);

// ============================================================================
// Algorithm 1: closed-form parameters for the hyperbolic contour
// ============================================================================

/// mu, h and alpha from the Lambert-W formulas. The sector angle delta is
/// stored in the contour for the error certificate.
[[nodiscard]] Contour hyperbolic_params(double delta, double sigma, TimeWindow win, double beta, int N);

// ============================================================================
// Algorithm 2: minimax parameters for the parabolic contour
// ============================================================================

struct ParabolicProblem {
    double delta = 0.0;
    TimeWindow window;
    int N = 0;
    double eta = 1e-14;
};

/// Max over t in {t0, t1} of the four log error exponents. +inf when mu <= 1/(4 delta) or h <= 0.
[[nodiscard]] double parabolic_objective(const ParabolicProblem& prob, double h, double mu);

struct ParabolicOptimum {
    double h = 0.0;
    double mu = 0.0;
    double objective = 0.0;
};

/// Coarse grid in (log h, log(mu - 1/(4 delta))), eight Nelder-Mead starts and
/// a shrinking compass-search polish.
[[nodiscard]] ParabolicOptimum optimize_parabolic(const ParabolicProblem& prob);

[[nodiscard]] Contour parabolic_params(double delta, double sigma, TimeWindow win, int N, double eta);

// ============================================================================
// Quadrature
// ============================================================================

/// Factors c_j, j = 0..N, with q_N(t) = 2 Re sum_j c_j v_j for data satisfying
/// v_{-j} = conj(v_j). The j = 0 factor is halved. order 1 multiplies by z_j.
[[nodiscard]] std::vector<Complex> half_factors(const Contour& c, double t, int order);

/// q_N(t) for each t. values holds either N+1 entries (j = 0..N, conjugate
/// symmetric data, real result) or 2N+1 entries (j = -N..N).
/// Throws std::domain_error for a time outside the contour's window.
[[nodiscard]] std::vector<Complex> invert_at_times(std::span<const Complex> values, const Contour& c,
                                                   std::span<const double> times, int order);

// ============================================================================
// Error certificate for Algorithm-1 contours
// ============================================================================

struct ErrorCertificate {
    double eta_term = 0.0;        // error due to inexact node values
    double quadrature_term = 0.0; // modulo the constant C
    double exponent = 0.0;        // printed exponent of the quadrature term
    double C = 1.0;
    [[nodiscard]] double total() const noexcept { return eta_term + quadrature_term; }
};

/// Printed exponent of the Algorithm-1 quadrature term:
/// -(N pi (pi - 2 delta)/2) / log(ratio (1/sin(pi/4 - delta/2) - 1)/beta * N pi (pi - 2 delta)).
[[nodiscard]] double quadrature_exponent(double delta, double ratio, double beta, int N);

/// integral_0^inf exp(x - c cosh x) dx by double-exponential quadrature.
[[nodiscard]] double eta_amplification_integral(double c);

[[nodiscard]] ErrorCertificate error_certificate(const Contour& c, double beta, double eta, double C = 1.0);

}  // namespace fraclap
