#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fraclap {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

/// Function on [-1,1] stored as coefficients in the Chebyshev T basis
/// (basis order 0) or the ultraspherical C^(lambda) basis (order >= 1).
class ChebSeries {
public:
    ChebSeries() = default;
    explicit ChebSeries(CVec coeffs, int basis_order = 0);

    /// Adaptive interpolation: doubles the number of Chebyshev points until
    /// the coefficient tail falls below tol relative to the largest coefficient.
    [[nodiscard]] static ChebSeries from_function(const std::function<Complex(double)>& f,
                                                  double tol = 1e-15, std::size_t max_points = 1 << 14);
    [[nodiscard]] static ChebSeries from_real_function(const std::function<double(double)>& f,
                                                       double tol = 1e-15, std::size_t max_points = 1 << 14);
    [[nodiscard]] static ChebSeries constant(Complex c);

    [[nodiscard]] const CVec& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] int basis_order() const noexcept { return basis_; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }
    [[nodiscard]] Complex coeff(std::size_t k) const noexcept { return k < coeffs_.size() ? coeffs_[k] : Complex{}; }

    /// Clenshaw evaluation in the series' own basis.
    [[nodiscard]] Complex operator()(double x) const;
    [[nodiscard]] CVec evaluate(std::span<const double> xs) const;

    /// Drops trailing coefficients with magnitude below abs_tol.
    [[nodiscard]] ChebSeries trimmed(double abs_tol = 1e-300) const;
    /// Truncates or zero-pads to exactly n coefficients.
    [[nodiscard]] ChebSeries resized(std::size_t n) const;
    /// Re-expresses the series in a higher basis by applying conversion operators.
    [[nodiscard]] ChebSeries converted_to(int basis_order) const;

    [[nodiscard]] double max_abs_coeff() const noexcept;
    [[nodiscard]] double coeff_norm() const noexcept;
    /// Relative l2 norm of the last 10% of coefficients (at least one coefficient).
    [[nodiscard]] double relative_tail() const noexcept;
    [[nodiscard]] bool is_real(double tol = 0.0) const noexcept;

    ChebSeries& operator+=(const ChebSeries& other);
    ChebSeries& operator*=(Complex s);

private:
    CVec coeffs_;
    int basis_ = 0;
};

[[nodiscard]] ChebSeries operator+(ChebSeries a, const ChebSeries& b);
[[nodiscard]] ChebSeries operator-(ChebSeries a, const ChebSeries& b);
[[nodiscard]] ChebSeries operator*(Complex s, ChebSeries a);

/// Chebyshev points of the second kind x_k = cos(pi k / n), k = 0..n.
[[nodiscard]] std::vector<double> cheb_points(std::size_t n);

/// Chebyshev T coefficients of the degree-n interpolant through samples at cheb_points(n).
[[nodiscard]] ChebSeries cheb_transform(std::span<const Complex> samples);

/// Clenshaw-Curtis nodes (cheb_points) and weights on [-1,1] for n+1 points.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] QuadratureRule clenshaw_curtis(std::size_t n);

/// Integral over [-1,1] of f by Clenshaw-Curtis with n+1 points.
[[nodiscard]] Complex integrate(const std::function<Complex(double)>& f, std::size_t n);

}  // namespace fraclap
