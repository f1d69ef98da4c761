#include "fraclap/banded_op.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fraclap {

// === BandMatrix =============================================================

BandMatrix::BandMatrix(Index rows, Index cols, Index lower, Index upper)
    : rows_(rows), cols_(cols), lower_(lower), upper_(upper) {
    if (rows < 0 || cols < 0 || lower < 0 || upper < 0)
        throw std::invalid_argument("BandMatrix: negative dimension or bandwidth");
    data_.assign(static_cast<std::size_t>(rows * (lower + upper + 1)), Complex{});
}

Complex& BandMatrix::at(Index i, Index j) {
    if (!in_band(i, j)) throw std::out_of_range("BandMatrix::at: entry outside band");
    return data_[slot(i, j)];
}

CVec BandMatrix::apply(std::span<const Complex> x) const {
    CVec y(static_cast<std::size_t>(rows_));
    const Index xn = std::min<Index>(cols_, static_cast<Index>(x.size()));
    for (Index i = 0; i < rows_; ++i) {
        const Index j0 = std::max<Index>(0, i - lower_);
        const Index j1 = std::min<Index>(xn - 1, i + upper_);
        Complex acc{};
        const Complex* row = data_.data() + i * (lower_ + upper_ + 1) - i + lower_;
        for (Index j = j0; j <= j1; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

BandMatrix BandMatrix::section(Index rows, Index cols) const {
    if (rows > rows_ || cols > cols_) throw std::out_of_range("BandMatrix::section: larger than source");
    BandMatrix out(rows, cols, lower_, upper_);
    for (Index i = 0; i < rows; ++i) {
        const Index j0 = std::max<Index>(0, i - lower_);
        const Index j1 = std::min<Index>(cols - 1, i + upper_);
        for (Index j = j0; j <= j1; ++j) out.data_[out.slot(i, j)] = data_[slot(i, j)];
    }
    return out;
}

BandMatrix& BandMatrix::operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
}

void BandMatrix::add_scaled(const BandMatrix& other, Complex s) {
    if (other.rows_ != rows_ || other.cols_ != cols_) throw std::invalid_argument("BandMatrix::add_scaled: size mismatch");
    if (other.lower_ > lower_ || other.upper_ > upper_) {
        BandMatrix grown(rows_, cols_, std::max(lower_, other.lower_), std::max(upper_, other.upper_));
        grown.add_scaled(*this, 1.0);
        *this = std::move(grown);
    }
    for (Index i = 0; i < rows_; ++i) {
        const Index j0 = std::max<Index>(0, i - other.lower_);
        const Index j1 = std::min<Index>(cols_ - 1, i + other.upper_);
        for (Index j = j0; j <= j1; ++j) data_[slot(i, j)] += s * other.data_[other.slot(i, j)];
    }
}

BandMatrix multiply(const BandMatrix& a, const BandMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
    BandMatrix c(a.rows(), b.cols(), a.lower() + b.lower(), a.upper() + b.upper());
    for (Index i = 0; i < a.rows(); ++i) {
        const Index k0 = std::max<Index>(0, i - a.lower());
        const Index k1 = std::min<Index>(a.cols() - 1, i + a.upper());
        for (Index k = k0; k <= k1; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            const Index j0 = std::max<Index>(0, k - b.lower());
            const Index j1 = std::min<Index>(b.cols() - 1, k + b.upper());
            for (Index j = j0; j <= j1; ++j) c.at(i, j) += aik * b(k, j);
        }
    }
    return c;
}

// === BandedOp ===============================================================

BandedOp::BandedOp(Index lower, Index upper, int domain_basis, int range_basis, Materializer m)
    : lower_(lower), upper_(upper), domain_(domain_basis), range_(range_basis),
      materializer_(std::make_shared<const Materializer>(std::move(m))) {}

BandMatrix BandedOp::materialize(Index rows, Index cols) const {
    if (!materializer_) throw std::logic_error("BandedOp: empty operator");
    if (rows < 0 || cols < 0) throw std::invalid_argument("BandedOp::materialize: negative size");
    return (*materializer_)(rows, cols);
}

ChebSeries BandedOp::apply(const ChebSeries& u) const {
    if (u.basis_order() != domain_) throw std::invalid_argument("BandedOp::apply: basis mismatch");
    const auto n = static_cast<Index>(u.size());
    return ChebSeries(materialize(n + lower_, n).apply(u.coeffs()), range_);
}

BandedOp compose(const BandedOp& a, const BandedOp& b) {
    if (a.domain_basis() != b.range_basis()) throw std::invalid_argument("compose: basis mismatch");
    return BandedOp(a.lower() + b.lower(), a.upper() + b.upper(), b.domain_basis(), a.range_basis(),
                    [a, b](Index rows, Index cols) {
                        // Rows of a reach at most rows-1+upper(a); columns of b reach cols-1+lower(b).
                        const Index inner = std::max<Index>(0, std::min(rows + a.upper(), cols + b.lower()));
                        return multiply(a.materialize(rows, inner), b.materialize(inner, cols));
                    });
}

BandedOp linear_combination(std::span<const BandedOp> ops, std::span<const Complex> scales) {
    if (ops.empty() || ops.size() != scales.size()) throw std::invalid_argument("linear_combination: bad arguments");
    Index lo = 0, up = 0;
    for (const auto& op : ops) {
        if (op.domain_basis() != ops[0].domain_basis() || op.range_basis() != ops[0].range_basis())
            throw std::invalid_argument("linear_combination: basis mismatch");
        lo = std::max(lo, op.lower());
        up = std::max(up, op.upper());
    }
    std::vector<BandedOp> o(ops.begin(), ops.end());
    CVec s(scales.begin(), scales.end());
    return BandedOp(lo, up, ops[0].domain_basis(), ops[0].range_basis(), [o, s, lo, up](Index rows, Index cols) {
        BandMatrix m(rows, cols, lo, up);
        for (std::size_t k = 0; k < o.size(); ++k) m.add_scaled(o[k].materialize(rows, cols), s[k]);
        return m;
    });
}

BandedOp identity_op(int basis) {
    return BandedOp(0, 0, basis, basis, [](Index rows, Index cols) {
        BandMatrix m(rows, cols, 0, 0);
        for (Index i = 0; i < std::min(rows, cols); ++i) m.at(i, i) = 1.0;
        return m;
    });
}

BandedOp conversion_op(int lambda) {
    if (lambda < 0) throw std::invalid_argument("conversion_op: negative basis order");
    return BandedOp(0, 2, lambda, lambda + 1, [lambda](Index rows, Index cols) {
        BandMatrix m(rows, cols, 0, 2);
        for (Index k = 0; k < cols; ++k) {
            double diag = 0.0, super = 0.0;
            if (lambda == 0) {
                diag = (k == 0) ? 1.0 : 0.5;
                super = (k >= 2) ? -0.5 : 0.0;
            } else {
                const double f = lambda / (static_cast<double>(k) + lambda);
                diag = f;
                super = (k >= 2) ? -f : 0.0;
            }
            if (k < rows) m.at(k, k) = diag;
            if (k >= 2 && k - 2 < rows) m.at(k - 2, k) = super;
        }
        return m;
    });
}

BandedOp conversion_chain(int from, int to) {
    if (to < from) throw std::invalid_argument("conversion_chain: target below source");
    BandedOp op = identity_op(from);
    for (int lam = from; lam < to; ++lam) op = compose(conversion_op(lam), op);
    return op;
}

BandedOp diff_op(int lambda, int k) {
    if (lambda < 0 || k < 1) throw std::invalid_argument("diff_op: need lambda >= 0 and k >= 1");
    double factor = 1.0;
    if (lambda == 0) {
        factor = std::pow(2.0, k - 1);
        for (int i = 1; i < k; ++i) factor *= i;
    } else {
        factor = std::pow(2.0, k);
        for (int i = 0; i < k; ++i) factor *= lambda + i;
    }
    return BandedOp(0, k, lambda, lambda + k, [lambda, k, factor](Index rows, Index cols) {
        BandMatrix m(rows, cols, 0, k);
        for (Index n = k; n < cols; ++n) {
            if (n - k >= rows) break;
            m.at(n - k, n) = (lambda == 0) ? factor * static_cast<double>(n) : factor;
        }
        return m;
    });
}

namespace {

/// Multiplication by x in basis lambda, materialized at size n x n.
BandMatrix x_multiplication(int lambda, Index n) {
    BandMatrix x(n, n, 1, 1);
    for (Index k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        if (lambda == 0) {
            if (k + 1 < n) x.at(k + 1, k) = (k == 0) ? 1.0 : 0.5;
            if (k >= 1) x.at(k - 1, k) = 0.5;
        } else {
            const double den = 2.0 * (kd + lambda);
            if (k + 1 < n) x.at(k + 1, k) = (kd + 1.0) / den;
            if (k >= 1) x.at(k - 1, k) = (kd + 2.0 * lambda - 1.0) / den;
        }
    }
    return x;
}

}  // namespace

BandedOp mult_op(const ChebSeries& c, int lambda, double bandwidth_tol) {
    if (c.basis_order() != 0) throw std::invalid_argument("mult_op: coefficient must be in basis 0");
    if (lambda < 0) throw std::invalid_argument("mult_op: negative basis order");
    if (!(bandwidth_tol > 0.0)) throw std::invalid_argument("mult_op: bandwidth_tol must be positive");
    const double scale = c.max_abs_coeff();
    ChebSeries a = c.trimmed(bandwidth_tol * scale);
    if (scale == 0.0) a = ChebSeries(CVec{Complex{}}, 0);
    const auto m = static_cast<Index>(a.size()) - 1;

    if (lambda == 0) {
        CVec ac = a.coeffs();
        return BandedOp(m, m, 0, 0, [ac, m](Index rows, Index cols) {
            BandMatrix out(rows, cols, m, m);
            auto coef = [&](Index k) { return k <= m ? ac[static_cast<std::size_t>(k)] : Complex{}; };
            for (Index i = 0; i < rows; ++i) {
                const Index j0 = std::max<Index>(0, i - m);
                const Index j1 = std::min<Index>(cols - 1, i + m);
                for (Index j = j0; j <= j1; ++j) {
                    Complex v = coef(std::abs(i - j));
                    if (i == j) v *= 2.0;
                    if (i >= 1) v += coef(i + j);
                    out.at(i, j) = 0.5 * v;
                }
            }
            return out;
        });
    }

    // Clenshaw recurrence with the operator M[x] in place of x, using the
    // coefficients of c re-expressed in the C^(lambda) basis.
    const CVec al = a.converted_to(lambda).coeffs();
    return BandedOp(m, m, lambda, lambda, [al, m, lambda](Index rows, Index cols) {
        const Index big = std::max(rows, cols) + m + 2;
        const BandMatrix x = x_multiplication(lambda, big);
        BandMatrix b1(big, big, 0, 0), b2(big, big, 0, 0);
        for (Index k = m; k >= 0; --k) {
            const double kd = static_cast<double>(k);
            const double a_k = 2.0 * (kd + lambda) / (kd + 1.0);
            const double b_next = (kd + 2.0 * lambda) / (kd + 2.0);
            BandMatrix b0 = multiply(x, b1);
            b0 *= a_k;
            b0.add_scaled(b2, -b_next);
            BandMatrix diag(big, big, 0, 0);
            for (Index i = 0; i < big; ++i) diag.at(i, i) = al[static_cast<std::size_t>(k)];
            b0.add_scaled(diag, 1.0);
            b2 = std::move(b1);
            b1 = std::move(b0);
        }
        // b1 has bandwidth m+1 from the recurrence bookkeeping; the true band is m.
        BandMatrix out(rows, cols, m, m);
        for (Index i = 0; i < rows; ++i) {
            const Index j0 = std::max<Index>(0, i - m);
            const Index j1 = std::min<Index>(cols - 1, i + m);
            for (Index j = j0; j <= j1; ++j) out.at(i, j) = b1(i, j);
        }
        return out;
    });
}

CVec boundary_row(BoundaryKind kind, int endpoint, Index n) {
    if (endpoint != 1 && endpoint != -1) throw std::invalid_argument("boundary_row: endpoint must be -1 or +1");
    if (n < 1) throw std::invalid_argument("boundary_row: n must be positive");
    CVec row(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double sign_k = (endpoint == -1 && (k % 2 == 1)) ? -1.0 : 1.0;
        double v = 0.0;
        switch (kind) {
            case BoundaryKind::Value: v = sign_k; break;
            case BoundaryKind::Slope: v = -sign_k * (endpoint == -1 ? 1.0 : -1.0) * kd * kd; break;
            case BoundaryKind::SecondDerivative: v = sign_k * kd * kd * (kd * kd - 1.0) / 3.0; break;
            default: throw std::invalid_argument("boundary_row: unsupported kind");
        }
        row[static_cast<std::size_t>(k)] = v;
    }
    return row;
}

}  // namespace fraclap
