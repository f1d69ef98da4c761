#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fraclap/almost_banded.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fraclap;

namespace {

double bessel_i_power_series(int order, double x) {
    double term = std::pow(x / 2.0, order) / std::tgamma(order + 1.0);
    double sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= (x * x / 4.0) / (k * static_cast<double>(k + order));
        sum += term;
    }
    return sum;
}

std::vector<double> random_points(std::mt19937& rng, int count) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (auto& x : xs) x = u(rng);
    return xs;
}

ChebSeries random_series(std::mt19937& rng, std::size_t n) {
    std::normal_distribution<double> g;
    CVec c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = Complex(g(rng), g(rng)) * std::exp(-0.3 * static_cast<double>(k));
    return ChebSeries(c, 0);
}

double max_rel_err(const CVec& a, const CVec& b) {
    double err = 0.0, scale = 1e-300;
    for (std::size_t i = 0; i < a.size(); ++i) {
        err = std::max(err, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return err / scale;
}

}  // namespace

TEST_CASE("cheb_transform basic expansions") {
    for (std::size_t n : {1u, 4u, 17u}) {
        const auto xs = cheb_points(n);
        CVec ones(xs.size(), 1.0), lin(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) lin[k] = xs[k];
        const auto c1 = cheb_transform(ones);
        const auto cx = cheb_transform(lin);
        CHECK(std::abs(c1.coeff(0) - 1.0) < 1e-15);
        CHECK(std::abs(cx.coeff(1) - 1.0) < 1e-15);
        for (std::size_t k = 1; k <= n; ++k) CHECK(std::abs(c1.coeff(k)) < 1e-15);
        for (std::size_t k = 0; k <= n; ++k)
            if (k != 1) CHECK(std::abs(cx.coeff(k)) < 1e-15);
    }
    CHECK_THROWS((void)cheb_transform(CVec{}));
}

TEST_CASE("cheb_transform of cosh matches modified Bessel coefficients") {
    const auto xs = cheb_points(32);
    CVec s(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) s[k] = std::cosh(xs[k]);
    const auto c = cheb_transform(s);
    CHECK(std::abs(c.coeff(0) - bessel_i_power_series(0, 1.0)) < 1e-14);
    CHECK(std::abs(c.coeff(0) - 1.2660658778) < 1e-10);
    CHECK(std::abs(c.coeff(1)) < 1e-15);
    CHECK(std::abs(c.coeff(2) - 2.0 * bessel_i_power_series(2, 1.0)) < 1e-14);
}

TEST_CASE("cheb_transform round trip") {
    const auto xs = cheb_points(40);
    CVec s(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) s[k] = Complex(std::exp(xs[k]) * std::sin(3 * xs[k]), std::cos(xs[k]));
    const auto c = cheb_transform(s);
    for (std::size_t k = 0; k < xs.size(); ++k) CHECK(std::abs(c(xs[k]) - s[k]) <= 1e-13 * std::abs(s[k]) + 1e-15);
}

TEST_CASE("adaptive construction resolves smooth functions") {
    const auto f = ChebSeries::from_real_function([](double x) { return std::tanh(10 * x); });
    std::mt19937 rng(1);
    for (double x : random_points(rng, 50)) CHECK(std::abs(f(x) - std::tanh(10 * x)) < 1e-13);
}

TEST_CASE("conversion operators") {
    std::mt19937 rng(2);
    const auto xs = random_points(rng, 50);
    const ChebSeries one(CVec{1.0}, 0);
    for (int lam = 0; lam < 4; ++lam) {
        const auto c = conversion_op(lam).apply(one.converted_to(lam));
        CHECK(c.basis_order() == lam + 1);
        CHECK(std::abs(c.coeff(0) - 1.0) < 1e-15);
    }
    const ChebSeries t2(CVec{0, 0, 1}, 0);
    const auto s = conversion_op(0).apply(t2);
    CHECK(std::abs(s.coeff(0) + 0.5) < 1e-15);
    CHECK(std::abs(s.coeff(1)) < 1e-15);
    CHECK(std::abs(s.coeff(2) - 0.5) < 1e-15);
    for (double x : xs) CHECK(std::abs(s(x) - t2(x)) < 1e-14);

    const ChebSeries t4(CVec{0, 0, 0, 0, 1}, 0);
    const auto s4 = conversion_chain(0, 4).apply(t4);
    CHECK(s4.basis_order() == 4);
    for (double x : xs) CHECK(std::abs(s4(x) - std::cos(4 * std::acos(x))) < 1e-14);

    const auto u = random_series(rng, 30);
    for (int lam = 0; lam < 5; ++lam) {
        const auto ul = u.converted_to(lam);
        const auto v = conversion_op(lam).apply(ul);
        CHECK(max_rel_err(v.evaluate(xs), ul.evaluate(xs)) < 1e-12);
    }
}

TEST_CASE("differentiation operators") {
    std::mt19937 rng(3);
    const auto xs = random_points(rng, 50);
    const auto d1 = diff_op(0, 1).apply(ChebSeries(CVec{0, 1}, 0));
    CHECK(d1.basis_order() == 1);
    CHECK(std::abs(d1.coeff(0) - 1.0) < 1e-15);
    const auto d2 = diff_op(0, 2).apply(ChebSeries(CVec{0, 0, 0, 0, 1}, 0));
    CHECK(d2.basis_order() == 2);
    for (double x : xs) CHECK(std::abs(d2(x) - (96 * x * x - 16)) < 1e-12);
    const auto d4 = diff_op(0, 4).apply(random_series(rng, 4));
    for (const auto& c : d4.coeffs()) CHECK(std::abs(c) < 1e-15);

    // Compare composed derivatives against finite differences of the series.
    const auto u = random_series(rng, 25);
    for (int k = 1; k <= 4; ++k) {
        const auto dk = diff_op(0, k).apply(u);
        const auto chained = [&] {
            ChebSeries v = u;
            for (int i = 0; i < k; ++i) v = diff_op(i, 1).apply(v);
            return v;
        }();
        CHECK(max_rel_err(chained.evaluate(xs), dk.evaluate(xs)) < 1e-12);
    }
    const auto du = diff_op(0, 1).apply(u);
    const double hstep = 1e-5;
    for (double x : {-0.7, 0.1, 0.55}) {
        const Complex fd = (u(x + hstep) - u(x - hstep)) / (2 * hstep);
        CHECK(std::abs(fd - du(x)) < 1e-6 * (1 + std::abs(du(x))));
    }
}

TEST_CASE("multiplication operators") {
    std::mt19937 rng(4);
    const auto xs = random_points(rng, 50);
    const auto two = mult_op(ChebSeries::constant(2.0), 3);
    CHECK(two.lower() == 0);
    CHECK(two.upper() == 0);
    const auto m2 = two.materialize(6, 6);
    for (Index i = 0; i < 6; ++i) CHECK(std::abs(m2(i, i) - 2.0) < 1e-15);

    const auto xt0 = mult_op(ChebSeries(CVec{0, 1}, 0), 0).apply(ChebSeries(CVec{1}, 0));
    CHECK(std::abs(xt0.coeff(0)) < 1e-15);
    CHECK(std::abs(xt0.coeff(1) - 1.0) < 1e-15);

    const auto c = ChebSeries::from_real_function([](double x) { return std::sin(std::numbers::pi * x) + 2.0; });
    const auto u = random_series(rng, 40);
    for (int lam = 0; lam <= 4; ++lam) {
        const auto op = mult_op(c, lam);
        CHECK(op.lower() == static_cast<Index>(c.size()) - 1);
        CHECK(op.upper() == static_cast<Index>(c.size()) - 1);
        const auto ul = u.converted_to(lam);
        const auto v = op.apply(ul);
        CVec expect(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) expect[i] = c(xs[i]) * ul(xs[i]);
        CHECK(max_rel_err(v.evaluate(xs), expect) < 1e-12);
    }
}

TEST_CASE("bandwidth contract for polynomial coefficients") {
    for (int m = 0; m < 6; ++m) {
        CVec c(static_cast<std::size_t>(m + 1), 0.3);
        const auto op = mult_op(ChebSeries(c, 0), 2);
        CHECK(op.lower() == m);
        CHECK(op.upper() == m);
    }
}

TEST_CASE("section consistency of materialized operators") {
    const auto c = ChebSeries::from_real_function([](double x) { return std::cosh(x); });
    const std::vector<BandedOp> ops = {
        conversion_op(0), diff_op(0, 2), diff_op(2, 2), mult_op(c, 0), mult_op(c, 2),
        compose(mult_op(c, 4), compose(diff_op(2, 2), compose(mult_op(c, 2), diff_op(0, 2)))),
    };
    for (const auto& op : ops) {
        const auto small = op.materialize(20, 23);
        const auto large = op.materialize(45, 41);
        for (Index i = 0; i < 20; ++i)
            for (Index j = 0; j < 23; ++j) CHECK(std::abs(small(i, j) - large(i, j)) < 1e-12 * (1 + std::abs(large(i, j))));
    }
}

TEST_CASE("composed operators agree with analytic composition pointwise") {
    std::mt19937 rng(5);
    const auto xs = random_points(rng, 50);
    // (a u'')'' with a = exp(x): = a'' u'' + 2 a' u''' + a u''''.
    const auto a = ChebSeries::from_real_function([](double x) { return std::exp(x); });
    const auto u = random_series(rng, 30);
    const auto op = compose(diff_op(2, 2), compose(mult_op(a, 2), diff_op(0, 2)));
    const auto v = op.apply(u);
    const auto u2 = diff_op(0, 2).apply(u), u3 = diff_op(0, 3).apply(u), u4 = diff_op(0, 4).apply(u);
    CVec expect(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = std::exp(xs[i]);
        expect[i] = e * u2(xs[i]) + 2 * e * u3(xs[i]) + e * u4(xs[i]);
    }
    CHECK(max_rel_err(v.evaluate(xs), expect) < 1e-10);
}

TEST_CASE("boundary rows") {
    const Index n = 10;
    const auto v1 = boundary_row(BoundaryKind::Value, 1, n);
    const auto vm = boundary_row(BoundaryKind::Value, -1, n);
    const auto s1 = boundary_row(BoundaryKind::Slope, 1, n);
    for (Index k = 0; k < n; ++k) {
        CHECK(v1[static_cast<std::size_t>(k)] == Complex(1.0));
        CHECK(vm[static_cast<std::size_t>(k)] == Complex(k % 2 ? -1.0 : 1.0));
        CHECK(std::abs(s1[static_cast<std::size_t>(k)] - static_cast<double>(k * k)) < 1e-15);
    }
    // Each T_k differentiated spectrally and evaluated at the endpoint.
    for (int e : {-1, 1}) {
        const auto sl = boundary_row(BoundaryKind::Slope, e, n);
        const auto sd = boundary_row(BoundaryKind::SecondDerivative, e, n);
        for (Index k = 0; k < n; ++k) {
            CVec c(static_cast<std::size_t>(k + 1));
            c.back() = 1.0;
            const ChebSeries tk(c, 0);
            const double x = e;
            CHECK(std::abs(diff_op(0, 1).apply(tk)(x) - sl[static_cast<std::size_t>(k)]) < 1e-10);
            CHECK(std::abs(diff_op(0, 2).apply(tk)(x) - sd[static_cast<std::size_t>(k)]) < 1e-10);
        }
    }
}

namespace {

AlmostBandedSystem quartic_system() {
    AlmostBandedSystem sys;
    sys.op = diff_op(0, 4);
    sys.boundary = {{BoundaryKind::Value, -1}, {BoundaryKind::Slope, -1},
                    {BoundaryKind::Value, 1}, {BoundaryKind::SecondDerivative, 1}};
    sys.rhs = ChebSeries(CVec{24.0}, 4);
    sys.rhs_boundary = CVec(4, 0.0);
    return sys;
}

double rel_diff(const ChebSeries& a, const ChebSeries& b) {
    double e = 0.0;
    for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k) e += std::norm(a.coeff(k) - b.coeff(k));
    return std::sqrt(e) / b.coeff_norm();
}

}  // namespace

TEST_CASE("almost-banded solve: identity operator") {
    AlmostBandedSystem sys;
    sys.op = identity_op(0);
    sys.rhs = ChebSeries(CVec{1.0, 2.0, -0.5}, 0);
    const auto u = solve_almost_banded(sys, 8);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(u.coeff(k) - sys.rhs.coeff(k)) < 1e-15);
}

TEST_CASE("almost-banded solve: quartic problem") {
    const auto sys = quartic_system();
    const auto u = solve_almost_banded(sys, 16);
    const auto ud = solve_almost_banded_dense(sys, 16);
    CHECK(rel_diff(u, ud) < 1e-11);
    CHECK(residual_norm(sys, u, 40) < 1e-12 * 24.0);
    // Quartic: coefficients beyond degree 4 vanish.
    for (std::size_t k = 5; k < 16; ++k) CHECK(std::abs(u.coeff(k)) < 1e-12);
    // Boundary functionals and the operator applied to the output.
    CHECK(std::abs(u(-1.0)) < 1e-13);
    CHECK(std::abs(u(1.0)) < 1e-13);
    CHECK(std::abs(diff_op(0, 1).apply(u)(-1.0)) < 1e-12);
    CHECK(std::abs(diff_op(0, 2).apply(u)(1.0)) < 1e-12);
}

TEST_CASE("residual norm: zero candidate and linearity") {
    const auto sys = quartic_system();
    CHECK(std::abs(residual_norm(sys, ChebSeries(CVec{0.0}, 0), 30) - 24.0) < 1e-14);
    const auto u = solve_almost_banded(sys, 16);
    const auto r0 = residual_norm(sys, u, 40);
    CVec pert = u.coeffs();
    pert.resize(17);
    double prev = 0.0;
    for (double delta : {1e-6, 1e-4, 1e-2}) {
        auto p = pert;
        p[16] += delta;
        const double r = residual_norm(sys, ChebSeries(p, 0), 40);
        CHECK(r > r0);
        if (prev > 0) CHECK(std::abs(r / prev - 100.0) < 1e-3);
        prev = r;
    }
}

TEST_CASE("almost-banded solve matches dense solve for variable coefficients") {
    std::mt19937 rng(6);
    const auto a = ChebSeries::from_real_function([](double x) { return 2.0 + std::cos(x); });
    const auto b = ChebSeries::from_real_function([](double x) { return 1.5 + 0.5 * std::sin(2 * x); });
    const Complex z(0.7, 2.1);
    const BandedOp ops[] = {
        compose(diff_op(2, 2), compose(mult_op(a, 2), diff_op(0, 2))),
        compose(mult_op(b, 4), conversion_chain(0, 4)),
    };
    const Complex scales[] = {1.0, z * z};
    AlmostBandedSystem sys;
    sys.op = linear_combination(ops, scales);
    sys.boundary = {{BoundaryKind::Value, -1}, {BoundaryKind::SecondDerivative, -1},
                    {BoundaryKind::Value, 1}, {BoundaryKind::Slope, 1}};
    sys.rhs = ChebSeries::from_real_function([](double x) { return std::exp(-x * x); }).converted_to(4);
    sys.rhs_boundary = {0.1, 0.0, -0.2, 0.3};
    for (Index n : {32, 64, 128, 256, 512}) {
        const auto u = solve_almost_banded(sys, n);
        const auto ud = solve_almost_banded_dense(sys, n);
        CHECK(rel_diff(u, ud) < 1e-11);
    }
    // Residuals decrease as n doubles until round-off is reached.
    const auto r8 = residual_norm(sys, solve_almost_banded(sys, 8), 8 + 40);
    const auto r16 = residual_norm(sys, solve_almost_banded(sys, 16), 16 + 40);
    const auto r32 = residual_norm(sys, solve_almost_banded(sys, 32), 32 + 40);
    CHECK(r16 < r8);
    CHECK(r32 < r16);
    CHECK(r32 < 1e-12 * sys.rhs.coeff_norm());
}
