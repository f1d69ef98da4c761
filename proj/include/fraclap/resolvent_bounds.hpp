#pragma once

#include "fraclap/pencil.hpp"

#include <vector>

namespace fraclap {

/// Constants entering the resolvent bounds of the beam pencil.
struct BoundParams {
    double M = 0.0;       // max over [-1,1] of a/b
    double C = 0.0;       // 2 sqrt(M)
    double nu = 0.0;
    double c_norm = 1.0;  // ||T(z)^{-1}||_{L2_rho} <= c_norm / (eps (1 + |z|))
};

/// M by sampling a/b at 256 Chebyshev points with golden-section refinement;
/// c_norm from the Poincare bound ||u|| <= (4/pi^2)||u''|| for u(+-1) = 0.
[[nodiscard]] BoundParams bound_params(const BeamPencil& p);
[[nodiscard]] BoundParams bound_params(double M, double nu);

struct SectorRegion {
    double delta = 0.0;
    double sigma = 0.0;
    [[nodiscard]] bool contains(Complex z) const;
};

struct ParabolaRegion {
    double delta = 0.0;
    double sigma = 0.0;
    [[nodiscard]] bool contains(Complex z) const;
};

/// Radius beyond which the resolvent bound with parameter eps holds in direction theta.
[[nodiscard]] double r_star(const BoundParams& bp, double theta, double eps);

/// Largest certified eps at z, or 0 when z is not certified.
[[nodiscard]] double epsilon_bound(const BoundParams& bp, Complex z);

/// Smallest delta such that the uncertified region lies outside S_{delta,sigma}.
[[nodiscard]] double select_sector_delta(const BoundParams& bp, double sigma);

/// Parabola parameter for the parabolic contour (sigma = 0).
[[nodiscard]] ParabolaRegion select_parabola_delta(const BoundParams& bp, double t0);

/// Real part used for the parabola intersection: where |e^{z t0}| = 1e-16.
[[nodiscard]] double parabola_intersection_real(double t0);

struct CurveSample {
    double theta = 0.0;
    double eps = 0.0;
    double r = 0.0;
};

/// Samples of r*(theta, eps) over the admissible upper half-plane angles.
[[nodiscard]] std::vector<CurveSample> region_curve(const BoundParams& bp, double eps, std::size_t count);

/// Largest admissible |theta| (exclusive) for the curve: min(pi, pi/(2-nu)).
[[nodiscard]] double max_admissible_theta(double nu);

}  // namespace fraclap
