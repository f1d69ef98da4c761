#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fraclap/resolvent_bounds.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace fraclap;
using std::numbers::pi;

TEST_CASE("closed-form curve values") {
    const auto b1 = bound_params(6.25, 1.0);
    CHECK(b1.C == doctest::Approx(5.0));
    const double r = r_star(b1, 3 * pi / 4, 0.0);
    CHECK(std::abs(r - 25.0 * std::sqrt(2.0)) < 1e-12 * r);
    const Complex w = std::polar(r, 3 * pi / 4);
    CHECK(std::abs(w.real() + 25.0) < 1e-11);
    CHECK(std::abs(w.imag() - 25.0) < 1e-11);
    CHECK(std::abs(w.imag() * w.imag() - 25.0 * (-w.real())) < 1e-9);

    const auto b16 = bound_params(6.25, 1.6);
    const double t3 = pi / (2 * (1.6 - 1));
    CHECK(std::abs(r_star(b16, t3, 0.0)) < 1e-12);
    CHECK(std::abs(r_star(b16, -t3, 0.0)) < 1e-12);

    const auto b07 = bound_params(6.25, 0.7);
    const double asym = pi / (2 - 0.7);
    double prev = 0.0;
    for (double gap : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
        const double rr = r_star(b07, asym - gap, 0.0);
        CHECK(rr > prev);
        prev = rr;
    }
    CHECK(prev > 1e6);
    CHECK_THROWS_AS((void)r_star(b07, asym + 1e-3, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)r_star(b07, 1.0, 0.0), std::domain_error);
}

TEST_CASE("nu = 1 curve is the parabola") {
    const auto bp = bound_params(6.25, 1.0);
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double theta = pi / 2 + 0.01 + (pi / 2 - 0.02) * k / 1000.0;
        const double r = r_star(bp, theta, 0.0);
        const double rp = bp.C * bp.C * (-std::cos(theta)) / std::pow(std::sin(theta), 2);
        worst = std::max(worst, std::abs(r - rp) / r);
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("r_star monotone in eps and symmetric in theta") {
    for (double nu : {0.5, 1.0, 1.4}) {
        const auto bp = bound_params(3.0, nu);
        const double tmax = max_admissible_theta(nu);
        for (double theta : {0.3, 1.2, 2.0, tmax - 0.05}) {
            double prev = 0.0;
            for (double eps : {0.0, 0.5, 1.0, 5.0, 10.0}) {
                if (eps == 0.0 && theta < pi / 2) continue;
                const double r = r_star(bp, theta, eps);
                CHECK(r >= prev * (1 - 1e-12));
                CHECK(std::abs(r - r_star(bp, -theta, eps)) <= 1e-12 * (1 + r));
                prev = r;
            }
        }
    }
}

TEST_CASE("epsilon bound") {
    const auto bp = bound_params(821.2 / 3.70, 0.64);
    CHECK(epsilon_bound(bp, Complex(3.0, 1.0)) >= 3.0);
    CHECK_THROWS_AS((void)epsilon_bound(bp, Complex(-1.0, 0.0)), std::domain_error);

    // On the curve r*(theta,0) the certificate vanishes.
    const double theta = 2.0;
    const double r = r_star(bp, theta, 0.0);
    CHECK(epsilon_bound(bp, std::polar(r, theta)) <= 1e-8 * r);
    CHECK(epsilon_bound(bp, std::polar(0.5 * r, theta)) == 0.0);

    // Consistency with r_star: eps(z) certifies exactly at radius |z|.
    const Complex z = std::polar(4.0 * r, theta);
    const double eps = epsilon_bound(bp, z);
    CHECK(eps > 0.0);
    CHECK(std::abs(r_star(bp, theta, eps) - std::abs(z)) < 1e-9 * std::abs(z));

    // Monotone along rays inside the certified region.
    for (double th : {1.7, 2.1, 2.3}) {
        const double r0 = r_star(bp, th, 0.0);
        double prev = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double rr = r0 * std::pow(1.2, k + 1);
            const double e = epsilon_bound(bp, std::polar(rr, th));
            CHECK(e >= prev);
            prev = e;
        }
    }
}

TEST_CASE("sector selection") {
    const auto b16 = bound_params(6.25, 1.6);
    for (double sigma : {0.1, 1.0, 10.0}) {
        const double delta = select_sector_delta(b16, sigma);
        CHECK(delta > 0.0);
        CHECK(delta < pi / 2);
        const double tmax = max_admissible_theta(1.6);
        for (int k = 1; k < 10000; ++k) {
            const double theta = pi / 2 + (tmax - pi / 2) * k / 10000.0;
            const Complex w = std::polar(r_star(b16, theta, 0.0), theta);
            CHECK(std::abs(std::arg(w - sigma)) >= pi - delta - 1e-9);
        }
    }
    const auto b1 = bound_params(6.25, 1.0);
    CHECK(select_sector_delta(b1, 1e4) < select_sector_delta(b1, 1.0));
    CHECK(select_sector_delta(b1, 1e6) < 0.01);

    const auto b07 = bound_params(6.25, 0.7);
    const double d07 = select_sector_delta(b07, 0.2);
    CHECK(d07 >= pi - pi / (2 - 0.7) - 1e-12);
    CHECK(d07 < pi / 2);
}

TEST_CASE("parabola selection") {
    CHECK(select_parabola_delta(bound_params(6.25, 1.0), 1.0).delta == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(select_parabola_delta(bound_params(6.25, 1.3), 1.0).delta == doctest::Approx(0.04).epsilon(1e-15));
    const auto bp = bound_params(821.2 / 3.70, 0.64);
    const auto pr = select_parabola_delta(bp, 1.0);
    CHECK(pr.sigma == 0.0);
    CHECK(pr.delta > 0.0);
    // Independent bisection for the curve point at the target real part; the
    // returned parabola must pass through it.
    const double target = parabola_intersection_real(1.0);
    const double tmax = max_admissible_theta(0.64);
    double lo = pi / 2 + 1e-12, hi = tmax - 1e-9;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        (r_star(bp, mid, 0.0) * std::cos(mid) > target ? lo : hi) = mid;
    }
    const Complex w = std::polar(r_star(bp, lo, 0.0), lo);
    CHECK(std::abs(w.real() - target) < 1e-9 * std::abs(target));
    CHECK(std::abs(-pr.delta * w.imag() * w.imag() - target) < 1e-9 * std::abs(target));
}

TEST_CASE("bound parameters from a pencil") {
    const BeamPencil p(ChebSeries::from_real_function([](double x) { return std::cosh(x); }),
                       ChebSeries::from_real_function([](double x) { return std::sin(pi * x) + 2.0; }),
                       ChebSeries::from_real_function([](double x) { return std::tanh(x) + 2.0; }), 0.8,
                       BoundaryCondition::Clamped, BoundaryCondition::SimplySupported);
    const auto bp = bound_params(p);
    double m = 0.0;
    for (int k = 0; k <= 100000; ++k) {
        const double x = -1.0 + 2.0 * k / 100000.0;
        m = std::max(m, std::cosh(x) / (std::sin(pi * x) + 2.0));
    }
    CHECK(bp.M >= m - 1e-12);
    CHECK(bp.M <= m + 1e-8);
    CHECK(bp.c_norm > 1.0);
}

TEST_CASE("certified resolvent bound holds for computed solutions") {
    const BeamPencil p(ChebSeries::constant(821.2), ChebSeries::constant(3.70), ChebSeries::constant(1.0), 0.64,
                       BoundaryCondition::SimplySupported, BoundaryCondition::SimplySupported);
    const auto bp = bound_params(p);
    const auto v = ChebSeries::from_real_function([](double x) { return std::exp(x) * std::cos(3 * x); });
    const auto v4 = p.mass_op().apply(v);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    int tested = 0;
    while (tested < 20) {
        const double theta = 0.2 + (max_admissible_theta(0.64) - 0.21) * ur(rng);
        const double r = std::pow(10.0, -1.0 + 5.0 * ur(rng));
        const Complex z = std::polar(r, theta);
        const double eps = epsilon_bound(bp, z);
        if (eps <= 0.0) continue;
        ++tested;
        auto sys = assemble_pencil_matrix(p, z, 400);
        sys.rhs = v4;
        const auto u = solve_almost_banded(sys, 400);
        CHECK(p.graph_norm(u, z) <= p.rho_norm(v) / eps * (1 + 1e-8));
        CHECK(p.rho_norm(u) <= bp.c_norm / (eps * (1 + std::abs(z))) * p.rho_norm(v) * (1 + 1e-8));
        // The dense matrix is far from singular at certified points.
        const auto d = materialize_dense(sys, 400);
        Eigen::MatrixXcd a(400, 400);
        for (int i = 0; i < 400; ++i)
            for (int j = 0; j < 400; ++j) a(i, j) = d.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
        const auto& sv = svd.singularValues();
        CHECK(sv(sv.size() - 1) > 1e-14 * sv(0));
    }
}
