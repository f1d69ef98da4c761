#include "fraclap/almost_banded.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclap {

namespace {

void check_truncation(const AlmostBandedSystem& sys, Index n) {
    const auto nb = static_cast<Index>(sys.boundary.size());
    if (n <= nb) throw std::invalid_argument("almost-banded system: truncation must exceed the number of boundary rows");
    if (static_cast<Index>(sys.rhs_boundary.size()) != nb)
        throw std::invalid_argument("almost-banded system: boundary data size mismatch");
    if (sys.op.domain_basis() != 0) throw std::invalid_argument("almost-banded system: operator must act on basis 0");
    if (sys.rhs.basis_order() != sys.op.range_basis())
        throw std::invalid_argument("almost-banded system: rhs basis differs from operator range basis");
}

/// Working rows of the QR sweep. Row r keeps its banded part in a fixed window of
/// columns [r - nb - lo, r + lo + up] (Givens fill-in never leaves it) plus a
/// combination of the (normalized) dense boundary rows.
class WorkRows {
public:
    WorkRows(Index n, Index nb, Index lo, Index up)
        : n_(n), nb_(nb), lo_(lo), width_(std::min(n, 2 * lo + up + nb + 1)),
          data_(static_cast<std::size_t>(n * width_)), coef_(static_cast<std::size_t>(n * nb)),
          last_(static_cast<std::size_t>(n), -1) {}

    [[nodiscard]] Index start(Index r) const { return std::clamp<Index>(r - nb_ - lo_, 0, n_ - width_); }
    [[nodiscard]] Index last(Index r) const { return last_[static_cast<std::size_t>(r)]; }
    void set_last(Index r, Index j) { last_[static_cast<std::size_t>(r)] = j; }
    /// Pointer to the entry of row r at column j; j must lie in the row's window.
    [[nodiscard]] Complex* at(Index r, Index j) {
        return data_.data() + r * width_ + (j - start(r));
    }
    [[nodiscard]] Complex band_at(Index r, Index j) const {
        const Index k = j - start(r);
        return (k >= 0 && k < width_ && j <= last(r)) ? data_[static_cast<std::size_t>(r * width_ + k)] : Complex{};
    }
    [[nodiscard]] Complex* coef(Index r) { return coef_.data() + r * nb_; }
    [[nodiscard]] const Complex* coef(Index r) const { return coef_.data() + r * nb_; }

private:
    Index n_, nb_, lo_, width_;
    CVec data_, coef_;
    std::vector<Index> last_;
};
/// [a; b] <- [c s; -conj(s) c] [a; b] in real arithmetic (std::complex products
/// carry NaN-recovery branches that defeat vectorization).
void rotate(Complex* a, Complex* b, Index len, double c, Complex s) {
    double* pa = reinterpret_cast<double*>(a);
    double* pb = reinterpret_cast<double*>(b);
    const double sr = s.real(), si = s.imag();
    for (Index k = 0; k < len; ++k) {
        const double ar = pa[2 * k], ai = pa[2 * k + 1], br = pb[2 * k], bi = pb[2 * k + 1];
        pa[2 * k] = c * ar + sr * br - si * bi;
        pa[2 * k + 1] = c * ai + sr * bi + si * br;
        pb[2 * k] = -sr * ar - si * ai + c * br;
        pb[2 * k + 1] = -sr * ai + si * ar + c * bi;
    }
}

}  // namespace

DenseSystem materialize_dense(const AlmostBandedSystem& sys, Index n) {
    check_truncation(sys, n);
    const auto nb = static_cast<Index>(sys.boundary.size());
    DenseSystem d;
    d.rows.reserve(static_cast<std::size_t>(n));
    d.rhs.assign(static_cast<std::size_t>(n), Complex{});
    for (Index r = 0; r < nb; ++r) {
        const auto& bf = sys.boundary[static_cast<std::size_t>(r)];
        d.rows.push_back(boundary_row(bf.kind, bf.endpoint, n));
        d.rhs[static_cast<std::size_t>(r)] = sys.rhs_boundary[static_cast<std::size_t>(r)];
    }
    const BandMatrix l = sys.op.materialize(n - nb, n);
    for (Index i = 0; i < n - nb; ++i) {
        CVec row(static_cast<std::size_t>(n));
        for (Index j = std::max<Index>(0, i - l.lower()); j <= std::min<Index>(n - 1, i + l.upper()); ++j)
            row[static_cast<std::size_t>(j)] = l(i, j);
        d.rows.push_back(std::move(row));
        d.rhs[static_cast<std::size_t>(i + nb)] = sys.rhs.coeff(static_cast<std::size_t>(i));
    }
    return d;
}

ChebSeries solve_almost_banded(const AlmostBandedSystem& sys, Index n) {
    check_truncation(sys, n);
    const auto nb = static_cast<Index>(sys.boundary.size());
    const auto unb = static_cast<std::size_t>(nb);

    const BandMatrix l = sys.op.materialize(n - nb, n);
    const Index lo = l.lower(), up = l.upper();
    double op_scale = 0.0;
    for (Index i = 0; i < n - nb; ++i)
        for (Index j = std::max<Index>(0, i - lo); j <= std::min<Index>(n - 1, i + up); ++j)
            op_scale = std::max(op_scale, std::abs(l(i, j)));
    if (op_scale == 0.0) op_scale = 1.0;

    // Boundary rows are rescaled to the size of the operator rows so that the
    // normwise backward error of the QR sweep also holds for the boundary conditions.
    std::vector<CVec> bdense(unb);
    CVec rhs(static_cast<std::size_t>(n));
    for (std::size_t m = 0; m < unb; ++m) {
        bdense[m] = boundary_row(sys.boundary[m].kind, sys.boundary[m].endpoint, n);
        double scale = 0.0;
        for (const auto& v : bdense[m]) scale = std::max(scale, std::abs(v));
        const double f = op_scale / scale;
        for (auto& v : bdense[m]) v *= f;
        rhs[m] = sys.rhs_boundary[m] * f;
    }

    WorkRows rows(n, nb, lo, up);
    for (Index r = 0; r < n; ++r) {
        if (r < nb) {
            rows.coef(r)[r] = 1.0;
            continue;
        }
        const Index i = r - nb;
        const Index first = std::max<Index>(0, i - lo);
        const Index last = std::min<Index>(n - 1, i + up);
        for (Index j = first; j <= last; ++j) *rows.at(r, j) = l(i, j);
        rows.set_last(r, last);
        rhs[static_cast<std::size_t>(r)] = sys.rhs.coeff(static_cast<std::size_t>(i));
    }

    auto value_at = [&](Index r, Index j) {
        Complex v = rows.band_at(r, j);
        const Complex* cf = rows.coef(r);
        for (std::size_t m = 0; m < unb; ++m)
            if (cf[m] != Complex{}) v += cf[m] * bdense[m][static_cast<std::size_t>(j)];
        return v;
    };

    for (Index j = 0; j < n; ++j) {
        const Index r_end = std::min<Index>(n - 1, j + nb + lo);
        for (Index r = j + 1; r <= r_end; ++r) {
            const Complex y = value_at(r, j);
            if (y == Complex{}) continue;
            const Complex x = value_at(j, j);
            const double rr = std::hypot(std::abs(x), std::abs(y));
            double c = 0.0;
            Complex s = 1.0;
            if (std::abs(x) != 0.0) {
                c = std::abs(x) / rr;
                s = (x / std::abs(x)) * std::conj(y) / rr;
            }
            const Complex ms = -std::conj(s);
            // Rows combined over [j, max(last)]; entries before j are eliminated.
            const Index last = std::max(rows.last(j), rows.last(r));
            if (last >= j) {
                // Zero the entries between each row's current last and the common last.
                for (Index k = std::max(rows.last(j) + 1, j); k <= last; ++k) *rows.at(j, k) = Complex{};
                for (Index k = std::max(rows.last(r) + 1, j); k <= last; ++k) *rows.at(r, k) = Complex{};
                rotate(rows.at(j, j), rows.at(r, j), last - j + 1, c, s);
                rows.set_last(j, last);
                rows.set_last(r, last);
            }
            Complex* ca = rows.coef(j);
            Complex* cb = rows.coef(r);
            for (std::size_t m = 0; m < unb; ++m) {
                const Complex va = ca[m], vb = cb[m];
                ca[m] = c * va + s * vb;
                cb[m] = ms * va + c * vb;
            }
            const Complex ra = rhs[static_cast<std::size_t>(j)], rb = rhs[static_cast<std::size_t>(r)];
            rhs[static_cast<std::size_t>(j)] = c * ra + s * rb;
            rhs[static_cast<std::size_t>(r)] = ms * ra + c * rb;
        }
    }

    // Back substitution with R = banded part + coef * B (dense part via running sums).
    const double tiny = 64.0 * std::numeric_limits<double>::epsilon() * op_scale;
    CVec x(static_cast<std::size_t>(n));
    CVec tail_sums(unb);
    for (Index j = n - 1; j >= 0; --j) {
        Complex acc = rhs[static_cast<std::size_t>(j)];
        for (Index k = j + 1; k <= rows.last(j); ++k) acc -= *rows.at(j, k) * x[static_cast<std::size_t>(k)];
        const Complex* cf = rows.coef(j);
        for (std::size_t m = 0; m < unb; ++m) acc -= cf[m] * tail_sums[m];
        const Complex diag = value_at(j, j);
        if (!(std::abs(diag) > tiny) || !std::isfinite(std::abs(diag)))
            throw SingularSystemError("solve_almost_banded: numerically singular system at column " + std::to_string(j));
        x[static_cast<std::size_t>(j)] = acc / diag;
        for (std::size_t m = 0; m < unb; ++m) tail_sums[m] += bdense[m][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    }
    return ChebSeries(std::move(x), 0);
}

ChebSeries solve_almost_banded_dense(const AlmostBandedSystem& sys, Index n) {
    const DenseSystem d = materialize_dense(sys, n);
    Eigen::MatrixXcd a(n, n);
    Eigen::VectorXcd b(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) a(i, j) = d.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        b(i) = d.rhs[static_cast<std::size_t>(i)];
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const Eigen::VectorXcd x = lu.solve(b);
    if (!x.allFinite()) throw SingularSystemError("solve_almost_banded_dense: numerically singular system");
    return ChebSeries(CVec(x.data(), x.data() + n), 0);
}

CVec residual_vector(const AlmostBandedSystem& sys, const ChebSeries& candidate, Index n_extended) {
    if (candidate.basis_order() != 0) throw std::invalid_argument("residual_vector: candidate must be in basis 0");
    const auto len = static_cast<Index>(candidate.size());
    CVec res;
    for (std::size_t m = 0; m < sys.boundary.size(); ++m) {
        const CVec row = boundary_row(sys.boundary[m].kind, sys.boundary[m].endpoint, std::max<Index>(len, 1));
        Complex v{};
        for (Index k = 0; k < len; ++k) v += row[static_cast<std::size_t>(k)] * candidate.coeffs()[static_cast<std::size_t>(k)];
        res.push_back(v - sys.rhs_boundary[m]);
    }
    const Index rows = std::max<Index>(n_extended, static_cast<Index>(sys.rhs.size()));
    const CVec lu = sys.op.materialize(rows, len).apply(candidate.coeffs());
    for (Index i = 0; i < rows; ++i) res.push_back(lu[static_cast<std::size_t>(i)] - sys.rhs.coeff(static_cast<std::size_t>(i)));
    return res;
}

double residual_norm(const AlmostBandedSystem& sys, const ChebSeries& candidate, Index n_extended) {
    double s = 0.0;
    for (const auto& v : residual_vector(sys, candidate, n_extended)) s += std::norm(v);
    return std::sqrt(s);
}

}  // namespace fraclap
