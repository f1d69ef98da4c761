#include "fraclap/cheb_series.hpp"

#include "fraclap/banded_op.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fraclap {

ChebSeries::ChebSeries(CVec coeffs, int basis_order) : coeffs_(std::move(coeffs)), basis_(basis_order) {
    if (basis_order < 0) throw std::invalid_argument("ChebSeries: negative basis order");
    for (const auto& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("ChebSeries: non-finite coefficient");
    }
}

ChebSeries ChebSeries::constant(Complex c) { return ChebSeries(CVec{c}, 0); }

ChebSeries ChebSeries::from_function(const std::function<Complex(double)>& f, double tol,
                                     std::size_t max_points) {
    for (std::size_t n = 16; n <= max_points; n *= 2) {
        const auto xs = cheb_points(n);
        CVec samples(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) samples[k] = f(xs[k]);
        ChebSeries s = cheb_transform(samples);
        const double scale = s.max_abs_coeff();
        if (scale == 0.0) return ChebSeries(CVec{Complex{}}, 0);
        // Converged when the last eighth of the coefficients is negligible.
        const std::size_t tail_start = s.size() - std::max<std::size_t>(4, s.size() / 8);
        double tail = 0.0;
        for (std::size_t k = tail_start; k < s.size(); ++k) tail = std::max(tail, std::abs(s.coeffs_[k]));
        if (tail <= tol * scale) return s.trimmed(tol * scale);
    }
    throw std::runtime_error("ChebSeries::from_function: not resolved with the maximum number of points");
}

ChebSeries ChebSeries::from_real_function(const std::function<double(double)>& f, double tol,
                                          std::size_t max_points) {
    ChebSeries s = from_function([&](double x) { return Complex(f(x), 0.0); }, tol, max_points);
    for (auto& c : s.coeffs_) c = Complex(c.real(), 0.0);
    return s;
}

Complex ChebSeries::operator()(double x) const {
    const std::size_t n = coeffs_.size();
    if (n == 0) return {};
    if (basis_ == 0) {
        Complex b1{}, b2{};
        for (std::size_t k = n; k-- > 1;) {
            const Complex b0 = coeffs_[k] + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return coeffs_[0] + x * b1 - b2;
    }
    // C^(lambda): C_{k+1} = A_k x C_k - B_k C_{k-1} with A_k = 2(k+lambda)/(k+1), B_k = (k+2lambda-1)/(k+1).
    const double lam = basis_;
    Complex b1{}, b2{};
    for (std::size_t k = n; k-- > 0;) {
        const double kd = static_cast<double>(k);
        const double a_k = 2.0 * (kd + lam) / (kd + 1.0);
        const double b_next = (kd + 2.0 * lam) / (kd + 2.0);
        const Complex b0 = coeffs_[k] + a_k * x * b1 - b_next * b2;
        b2 = b1;
        b1 = b0;
    }
    return b1;
}

CVec ChebSeries::evaluate(std::span<const double> xs) const {
    CVec out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
    return out;
}

ChebSeries ChebSeries::trimmed(double abs_tol) const {
    std::size_t n = coeffs_.size();
    while (n > 1 && std::abs(coeffs_[n - 1]) < abs_tol) --n;
    return ChebSeries(CVec(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n)), basis_);
}

ChebSeries ChebSeries::resized(std::size_t n) const {
    CVec c(n);
    std::copy_n(coeffs_.begin(), std::min(n, coeffs_.size()), c.begin());
    return ChebSeries(std::move(c), basis_);
}

ChebSeries ChebSeries::converted_to(int basis_order) const {
    if (basis_order < basis_) throw std::invalid_argument("ChebSeries::converted_to: cannot lower basis order");
    ChebSeries s = *this;
    for (int lam = basis_; lam < basis_order; ++lam) {
        const BandedOp op = conversion_op(lam);
        const auto m = static_cast<Index>(s.size());
        s = ChebSeries(op.materialize(m, m).apply(s.coeffs_), lam + 1);
    }
    return s;
}

double ChebSeries::max_abs_coeff() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double ChebSeries::coeff_norm() const noexcept {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
}

double ChebSeries::relative_tail() const noexcept {
    const double total = coeff_norm();
    if (total == 0.0) return 0.0;
    const std::size_t n = coeffs_.size();
    const std::size_t count = std::max<std::size_t>(1, n / 10);
    double tail = 0.0;
    for (std::size_t k = n - count; k < n; ++k) tail += std::norm(coeffs_[k]);
    return std::sqrt(tail) / total;
}

bool ChebSeries::is_real(double tol) const noexcept {
    const double scale = max_abs_coeff();
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [&](const Complex& c) { return std::abs(c.imag()) <= tol * scale; });
}

ChebSeries& ChebSeries::operator+=(const ChebSeries& other) {
    if (other.basis_ != basis_) throw std::invalid_argument("ChebSeries: basis mismatch in addition");
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
    for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    return *this;
}

ChebSeries& ChebSeries::operator*=(Complex s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

ChebSeries operator+(ChebSeries a, const ChebSeries& b) { return a += b; }
ChebSeries operator-(ChebSeries a, const ChebSeries& b) { return a += Complex(-1.0) * b; }
ChebSeries operator*(Complex s, ChebSeries a) { return a *= s; }

std::vector<double> cheb_points(std::size_t n) {
    std::vector<double> x(n + 1);
    if (n == 0) {
        x[0] = 1.0;
        return x;
    }
    // sin form keeps the points exactly symmetric.
    for (std::size_t k = 0; k <= n; ++k) {
        const double m = static_cast<double>(n) - 2.0 * static_cast<double>(k);
        x[k] = std::sin(std::numbers::pi * m / (2.0 * static_cast<double>(n)));
    }
    return x;
}

ChebSeries cheb_transform(std::span<const Complex> samples) {
    if (samples.empty()) throw std::invalid_argument("cheb_transform: empty sample set");
    const std::size_t n = samples.size() - 1;
    if (n == 0) return ChebSeries(CVec{samples[0]}, 0);
    // Direct DCT-I with a cosine table indexed by (j k) mod 2n.
    std::vector<double> cos_table(2 * n);
    for (std::size_t m = 0; m < 2 * n; ++m)
        cos_table[m] = std::cos(std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
    CVec c(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        Complex acc = 0.5 * (samples[0] + samples[n] * cos_table[(j * n) % (2 * n)]);
        for (std::size_t k = 1; k < n; ++k) acc += samples[k] * cos_table[(j * k) % (2 * n)];
        c[j] = acc * (2.0 / static_cast<double>(n));
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return ChebSeries(std::move(c), 0);
}

namespace {

QuadratureRule build_clenshaw_curtis(std::size_t n) {
    QuadratureRule rule;
    rule.nodes = cheb_points(n);
    rule.weights.assign(n + 1, 0.0);
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
        const double theta = std::numbers::pi * static_cast<double>(k) / nd;
        double v = 1.0;
        for (std::size_t j = 1; j <= n / 2; ++j) {
            const double bj = (2 * j == n) ? 1.0 : 2.0;
            const double jd = static_cast<double>(j);
            v -= bj * std::cos(2.0 * jd * theta) / (4.0 * jd * jd - 1.0);
        }
        const double ck = (k == 0 || k == n) ? 1.0 : 2.0;
        rule.weights[k] = ck * v / nd;
    }
    return rule;
}

}  // namespace

QuadratureRule clenshaw_curtis(std::size_t n) {
    if (n == 0) throw std::invalid_argument("clenshaw_curtis: need at least two points");
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const QuadratureRule>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(n); it != cache.end()) return *it->second;
    }
    auto rule = std::make_shared<const QuadratureRule>(build_clenshaw_curtis(n));
    std::lock_guard lock(mutex);
    cache.emplace(n, rule);
    return *rule;
}

Complex integrate(const std::function<Complex(double)>& f, std::size_t n) {
    const auto rule = clenshaw_curtis(n);
    Complex s{};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(rule.nodes[k]);
    return s;
}

}  // namespace fraclap
