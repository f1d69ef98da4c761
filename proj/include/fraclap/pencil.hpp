#pragma once

#include "fraclap/almost_banded.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace fraclap {

enum class BoundaryCondition { Clamped, SimplySupported };
enum class Convention { Caputo, RiemannLiouville };

[[nodiscard]] std::string to_string(BoundaryCondition bc);
[[nodiscard]] std::string to_string(Convention c);

/// Principal branch z^nu = exp(nu log z); throws on the cut z <= 0.
[[nodiscard]] Complex fractional_power(Complex z, double nu);

/// Initial displacement and velocity.
struct InitialData {
    ChebSeries y0 = ChebSeries::constant(0.0);
    ChebSeries y1 = ChebSeries::constant(0.0);
};

enum class TimeKind { Zero, Sin, Cos };

/// Separable forcing amplitude * g(x) * trig(omega t) in the normalized equation
/// y_tt + rho^{-1}(a y'' + b D^nu y'')'' = f.
struct Forcing {
    ChebSeries profile = ChebSeries::constant(0.0);
    TimeKind kind = TimeKind::Zero;
    double omega = 0.0;
    double amplitude = 1.0;
};

/// Laplace transform of the time factor amplitude * trig(omega t).
[[nodiscard]] Complex forcing_time_transform(const Forcing& f, Complex z);

/// Fractional Kelvin-Voigt beam pencil
///   T(z) u = z^2 u + rho^{-1} (a u'' + z^nu b u'')''
/// mapping Chebyshev T coefficients to C^(4) coefficients.
class BeamPencil {
public:
    BeamPencil(ChebSeries a, ChebSeries b, ChebSeries rho, double nu, BoundaryCondition left,
               BoundaryCondition right, Convention convention = Convention::Caputo);

    [[nodiscard]] const ChebSeries& a() const noexcept { return a_; }
    [[nodiscard]] const ChebSeries& b() const noexcept { return b_; }
    [[nodiscard]] const ChebSeries& rho() const noexcept { return rho_; }
    [[nodiscard]] double nu() const noexcept { return nu_; }
    [[nodiscard]] BoundaryCondition bc_left() const noexcept { return left_; }
    [[nodiscard]] BoundaryCondition bc_right() const noexcept { return right_; }
    [[nodiscard]] Convention convention() const noexcept { return convention_; }

    /// Conversion chain T -> C^(4) (the coefficient of z^2).
    [[nodiscard]] const BandedOp& mass_op() const noexcept { return mass_; }
    /// rho^{-1} (a u'')''.
    [[nodiscard]] const BandedOp& stiffness_op() const noexcept { return stiffness_; }
    /// rho^{-1} (b u'')''.
    [[nodiscard]] const BandedOp& damping_op() const noexcept { return damping_; }
    [[nodiscard]] Index lower() const noexcept { return lower_; }
    [[nodiscard]] Index upper() const noexcept { return upper_; }

    [[nodiscard]] std::vector<BoundaryFunctional> boundary_functionals() const;
    /// T(z) as a banded operator; materializations reuse cached z-independent parts.
    [[nodiscard]] BandedOp op_at(Complex z) const;

    /// sqrt(int rho |r|^2) for r given by C^(4) coefficients.
    [[nodiscard]] double rho_norm_c4(const CVec& coeffs) const;
    /// sqrt(int rho |u|^2) for a Chebyshev T series.
    [[nodiscard]] double rho_norm(const ChebSeries& u) const;
    /// Graph norm sqrt(<u,u>_a + |z|^2 ||u||^2_rho) of a Chebyshev T series.
    [[nodiscard]] double graph_norm(const ChebSeries& u, Complex z) const;

    /// Sections of the three z-independent parts materialized at (n + lower) x n.
    struct Parts {
        BandMatrix mass, stiffness, damping;
    };
    [[nodiscard]] std::shared_ptr<const Parts> parts(Index n) const;

private:
    struct Cache;
    ChebSeries a_, b_, rho_;
    double nu_;
    BoundaryCondition left_, right_;
    Convention convention_;
    BandedOp mass_, stiffness_, damping_;
    Index lower_ = 0, upper_ = 0;
    std::shared_ptr<Cache> cache_;
};

/// Operator and boundary rows of T(z) with homogeneous boundary data and an empty rhs.
[[nodiscard]] AlmostBandedSystem assemble_pencil_matrix(const BeamPencil& p, Complex z, Index n);

/// Precomputed z-independent pieces of K(z).
class RhsAssembler {
public:
    RhsAssembler(const BeamPencil& p, const InitialData& init, const Forcing& forcing);
    /// K(z) in the C^(4) basis.
    [[nodiscard]] ChebSeries operator()(Complex z) const;
    [[nodiscard]] bool is_zero() const noexcept { return zero_; }
    /// Profile g in C^(4), used for residue fields.
    [[nodiscard]] const ChebSeries& profile_c4() const noexcept { return g4_; }

private:
    double nu_;
    Convention convention_;
    Forcing forcing_;
    ChebSeries g4_, y0_4_, y1_4_, by0_, by1_;
    bool has_y1_frac_ = false;
    bool zero_ = false;
};

[[nodiscard]] ChebSeries assemble_rhs(const BeamPencil& p, const InitialData& init, const Forcing& forcing, Complex z);

/// Largest mismatch of y0 against the displacement boundary conditions.
[[nodiscard]] double boundary_mismatch(const BeamPencil& p, const InitialData& init);

/// Physical beam data in SI units.
struct PhysicalBeam {
    double rho_a = 0.0;            // mass per unit length [kg/m]
    double e0 = 0.0;               // elastic modulus [Pa]
    double e1 = 0.0;               // viscoelastic modulus [Pa s^nu]
    double inertia = 0.0;          // second moment of area [m^4]
    double length = 0.0;           // [m]
    double frequency_scale = 1.0;  // f [1/s], time scale T = 1/f
    double width_fraction = 0.1;   // width as a fraction of the length
    double nu = 0.5;
};

struct NondimensionalBeam {
    double rho = 0.0;
    double e0i = 0.0;
    double e1i = 0.0;
};

/// Lengths scaled by the half length L, time by T = 1/f and mass by rho0 = rhoA / width.
[[nodiscard]] NondimensionalBeam nondimensionalize(const PhysicalBeam& beam);

}  // namespace fraclap
