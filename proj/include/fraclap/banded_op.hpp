#pragma once

#include "fraclap/cheb_series.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>

namespace fraclap {

using Index = std::ptrdiff_t;

/// Finite band-stored complex matrix with entries only for -lower <= j-i <= upper.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(Index rows, Index cols, Index lower, Index upper);

    [[nodiscard]] Index rows() const noexcept { return rows_; }
    [[nodiscard]] Index cols() const noexcept { return cols_; }
    [[nodiscard]] Index lower() const noexcept { return lower_; }
    [[nodiscard]] Index upper() const noexcept { return upper_; }
    [[nodiscard]] bool in_band(Index i, Index j) const noexcept {
        return i >= 0 && j >= 0 && i < rows_ && j < cols_ && j - i <= upper_ && i - j <= lower_;
    }

    /// Entry (i,j); zero outside the band.
    [[nodiscard]] Complex operator()(Index i, Index j) const noexcept {
        return in_band(i, j) ? data_[slot(i, j)] : Complex{};
    }
    /// Mutable reference; (i,j) must lie in the band.
    Complex& at(Index i, Index j);

    /// y = A x, where x may be shorter than cols() (missing entries are zero).
    [[nodiscard]] CVec apply(std::span<const Complex> x) const;
    /// Leading rows x cols block, keeping the same bandwidths.
    [[nodiscard]] BandMatrix section(Index rows, Index cols) const;

    BandMatrix& operator*=(Complex s);
    /// this += s * other (sizes must agree; bandwidths grow as needed).
    void add_scaled(const BandMatrix& other, Complex s);

private:
    [[nodiscard]] std::size_t slot(Index i, Index j) const noexcept {
        return static_cast<std::size_t>(i * (lower_ + upper_ + 1) + (j - i + lower_));
    }
    Index rows_ = 0, cols_ = 0, lower_ = 0, upper_ = 0;
    CVec data_;
};

/// Product of band matrices with A.cols() == B.rows().
[[nodiscard]] BandMatrix multiply(const BandMatrix& a, const BandMatrix& b);

/// Infinite banded operator, materialized on demand. Every materialization is a
/// leading section of the same infinite matrix.
class BandedOp {
public:
    using Materializer = std::function<BandMatrix(Index rows, Index cols)>;

    BandedOp() = default;
    BandedOp(Index lower, Index upper, int domain_basis, int range_basis, Materializer m);

    [[nodiscard]] Index lower() const noexcept { return lower_; }
    [[nodiscard]] Index upper() const noexcept { return upper_; }
    [[nodiscard]] int domain_basis() const noexcept { return domain_; }
    [[nodiscard]] int range_basis() const noexcept { return range_; }

    [[nodiscard]] BandMatrix materialize(Index rows, Index cols) const;
    /// Exact action on a finite series: output has size(u) + lower coefficients.
    [[nodiscard]] ChebSeries apply(const ChebSeries& u) const;

private:
    Index lower_ = 0, upper_ = 0;
    int domain_ = 0, range_ = 0;
    std::shared_ptr<const Materializer> materializer_;
};

/// Composition a * b (apply b first). Sections are exact.
[[nodiscard]] BandedOp compose(const BandedOp& a, const BandedOp& b);
/// Linear combination sum_k s_k ops_k; all operators must share bases.
[[nodiscard]] BandedOp linear_combination(std::span<const BandedOp> ops, std::span<const Complex> scales);

[[nodiscard]] BandedOp identity_op(int basis);
/// S_lambda: basis lambda -> basis lambda+1.
[[nodiscard]] BandedOp conversion_op(int lambda);
/// Chain of conversions from basis `from` to basis `to`.
[[nodiscard]] BandedOp conversion_chain(int from, int to);
/// k-th derivative mapping basis lambda to basis lambda+k.
[[nodiscard]] BandedOp diff_op(int lambda, int k);
/// Multiplication by c (given in basis 0), acting in basis lambda.
/// Coefficients below bandwidth_tol * max|c_k| are dropped from the tail.
[[nodiscard]] BandedOp mult_op(const ChebSeries& c, int lambda, double bandwidth_tol = 1e-14);

enum class BoundaryKind { Value, Slope, SecondDerivative };

/// Row [phi(T_0), ..., phi(T_{n-1})] of a point functional at endpoint -1 or +1.
[[nodiscard]] CVec boundary_row(BoundaryKind kind, int endpoint, Index n);

}  // namespace fraclap
