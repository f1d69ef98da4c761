#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fraclap/pencil.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fraclap;
using std::numbers::pi;

namespace {

ChebSeries fn(double (*f)(double)) { return ChebSeries::from_real_function(f); }

BeamPencil constant_pencil(double a, double b, double nu, BoundaryCondition l = BoundaryCondition::SimplySupported,
                           BoundaryCondition r = BoundaryCondition::SimplySupported,
                           Convention c = Convention::Caputo) {
    return BeamPencil(ChebSeries::constant(a), ChebSeries::constant(b), ChebSeries::constant(1.0), nu, l, r, c);
}

BeamPencil variable_pencil(double nu) {
    return BeamPencil(fn([](double x) { return std::cosh(x); }), fn([](double x) { return std::sin(pi * x) + 2.0; }),
                      fn([](double x) { return std::tanh(x) + 2.0; }), nu, BoundaryCondition::Clamped,
                      BoundaryCondition::SimplySupported);
}

double y0_example(double x) { return std::pow(std::sin(2 * pi * x), 2) * (1 + x) * (1 - x) * (1 - x); }

/// Fourth derivative of sin^2(2 pi x)(1+x)(1-x)^2 by the Leibniz rule.
double y0_example_d4(double x) {
    const double c = std::cos(4 * pi * x), s = std::sin(4 * pi * x);
    const double sd[5] = {0.5 - 0.5 * c, 2 * pi * s, 8 * pi * pi * c, -32 * std::pow(pi, 3) * s, -128 * std::pow(pi, 4) * c};
    const double pd[5] = {1 - x - x * x + x * x * x, -1 - 2 * x + 3 * x * x, -2 + 6 * x, 6.0, 0.0};
    const double binom[5] = {1, 4, 6, 4, 1};
    double acc = 0.0;
    for (int k = 0; k <= 4; ++k) acc += binom[k] * sd[k] * pd[4 - k];
    return acc;
}

}  // namespace

TEST_CASE("pencil on simple polynomials") {
    const auto p = constant_pencil(1.0, 1.0, 0.7);
    const Complex z = 1.0;
    const auto op = p.op_at(z);
    const auto tx = op.apply(ChebSeries(CVec{0, 1}, 0));
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 20; ++i) {
        const double x = u(rng);
        CHECK(std::abs(tx(x) - z * z * x) < 1e-13);
    }
    const Complex z2 = Complex(0.3, 1.7);
    const auto t4 = p.op_at(z2).apply(ChebSeries(CVec{0, 0, 0, 0, 1}, 0));
    const Complex znu = fractional_power(z2, 0.7);
    for (int i = 0; i < 20; ++i) {
        const double x = u(rng);
        const Complex expect = z2 * z2 * std::cos(4 * std::acos(x)) + 192.0 * (1.0 + znu);
        CHECK(std::abs(t4(x) - expect) < 1e-11 * std::abs(expect));
    }
}

TEST_CASE("pencil matches a finite-difference discretization") {
    const Complex z = 2.0 * std::exp(Complex(0, pi / 3));
    auto check = [&](const BeamPencil& p) {
        auto u = [](double x) { return std::exp(x) * std::sin(2 * x); };
        auto u2 = [](double x) { return std::exp(x) * (4 * std::cos(2 * x) - 3 * std::sin(2 * x)); };
        const auto us = ChebSeries::from_real_function(u);
        const auto tu = p.op_at(z).apply(us);
        const Complex znu = fractional_power(z, p.nu());
        const int npts = 4000;
        const double h = 2.0 / npts;
        auto w = [&](double x) { return p.a()(x) * u2(x) + znu * p.b()(x) * u2(x); };
        double err = 0.0, scale = 0.0;
        for (int i = 200; i < npts - 200; i += 37) {
            const double x = -1.0 + i * h;
            const Complex fd = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
            const Complex expect = z * z * u(x) + fd / p.rho()(x);
            err = std::max(err, std::abs(tu(x) - expect));
            scale = std::max(scale, std::abs(expect));
        }
        CHECK(err / scale < 1e-6);
    };
    check(constant_pencil(821.2, 3.70, 0.64));
    check(variable_pencil(0.8));
}

TEST_CASE("pencil parity and conjugate symmetry") {
    const auto p = BeamPencil(fn([](double x) { return std::cosh(x); }), fn([](double x) { return 2.0 + x * x; }),
                              ChebSeries::constant(1.0), 0.6, BoundaryCondition::Clamped, BoundaryCondition::Clamped);
    const Complex z(-0.4, 3.0);
    const auto m = p.op_at(z).materialize(60, 64);
    const auto mc = p.op_at(std::conj(z)).materialize(60, 64);
    double maxv = 0.0, odd = 0.0, conj_err = 0.0;
    for (Index i = 0; i < 60; ++i)
        for (Index j = 0; j < 64; ++j) {
            maxv = std::max(maxv, std::abs(m(i, j)));
            if ((i + j) % 2) odd = std::max(odd, std::abs(m(i, j)));
            conj_err = std::max(conj_err, std::abs(mc(i, j) - std::conj(m(i, j))));
        }
    CHECK(odd <= 1e-12 * maxv);
    CHECK(conj_err <= 1e-13 * maxv);
}

TEST_CASE("section consistency of the pencil operator") {
    const auto p = variable_pencil(1.3);
    const auto op = p.op_at(Complex(1, 1));
    const auto s = op.materialize(40, 44);
    const auto l = op.materialize(90, 80);
    for (Index i = 0; i < 40; ++i)
        for (Index j = 0; j < 44; ++j) CHECK(std::abs(s(i, j) - l(i, j)) <= 1e-12 * (1 + std::abs(l(i, j))));
}

TEST_CASE("right-hand side assembly") {
    const auto p = constant_pencil(821.2, 3.70, 0.64);
    const Complex z(0.5, 2.0);
    CHECK(assemble_rhs(p, InitialData{}, Forcing{}, z).max_abs_coeff() == 0.0);

    Forcing f;
    f.profile = fn([](double x) { return std::sin(pi * (x - 1)); });
    f.kind = TimeKind::Sin;
    f.omega = 5.0;
    f.amplitude = 2.0;
    const auto k = assemble_rhs(p, InitialData{}, f, z);
    for (double x : {-0.8, -0.1, 0.3, 0.9}) {
        const Complex expect = 2.0 * std::sin(pi * (x - 1)) * 5.0 / (z * z + 25.0);
        CHECK(std::abs(k(x) - expect) < 1e-13);
    }
    f.kind = TimeKind::Cos;
    const auto kc = assemble_rhs(p, InitialData{}, f, z);
    CHECK(std::abs(kc(0.3) - 2.0 * std::sin(pi * (0.3 - 1)) * z / (z * z + 25.0)) < 1e-13);
    CHECK_THROWS_AS((void)assemble_rhs(p, InitialData{}, f, Complex(0, 5)), std::domain_error);

    InitialData init;
    init.y0 = ChebSeries::from_real_function(y0_example);
    const auto ki = assemble_rhs(p, init, Forcing{}, z);
    const Complex zf = fractional_power(z, 0.64 - 1.0);
    double err = 0.0, scale = 0.0;
    for (double x = -0.99; x < 1.0; x += 0.0731) {
        const Complex expect = z * y0_example(x) + zf * 3.70 * y0_example_d4(x);
        err = std::max(err, std::abs(ki(x) - expect));
        scale = std::max(scale, std::abs(expect));
    }
    CHECK(err / scale < 1e-10);

    // nu in (1,2): the y1 term enters with z^{nu-2}.
    const auto p2 = constant_pencil(1.0, 2.0, 1.5);
    InitialData init2;
    init2.y1 = init.y0;
    const auto k2 = assemble_rhs(p2, init2, Forcing{}, z);
    const Complex expect2 = y0_example(0.2) + fractional_power(z, -0.5) * 2.0 * y0_example_d4(0.2);
    CHECK(std::abs(k2(0.2) - expect2) < 1e-10 * std::abs(expect2));
}

TEST_CASE("conventions agree for zero initial data") {
    Forcing f;
    f.profile = fn([](double x) { return 1.0 - x * x; });
    f.kind = TimeKind::Sin;
    f.omega = 3.0;
    const auto pc = constant_pencil(2.0, 1.0, 0.5, BoundaryCondition::Clamped, BoundaryCondition::Clamped, Convention::Caputo);
    const auto pr = constant_pencil(2.0, 1.0, 0.5, BoundaryCondition::Clamped, BoundaryCondition::Clamped,
                                    Convention::RiemannLiouville);
    const Complex z(-1.0, 4.0);
    const auto kc = assemble_rhs(pc, InitialData{}, f, z);
    const auto kr = assemble_rhs(pr, InitialData{}, f, z);
    REQUIRE(kc.size() == kr.size());
    for (std::size_t i = 0; i < kc.size(); ++i) CHECK(kc.coeff(i) == kr.coeff(i));

    InitialData init;
    init.y0 = ChebSeries::from_real_function([](double x) { return std::pow(1 - x * x, 2); });
    const auto kc2 = assemble_rhs(pc, init, f, z);
    const auto kr2 = assemble_rhs(pr, init, f, z);
    CHECK(std::abs(kc2(0.1) - kr2(0.1)) > 1e-3);
}

TEST_CASE("pencil validation") {
    CHECK_THROWS_AS(constant_pencil(1.0, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(constant_pencil(-1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(constant_pencil(1.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(constant_pencil(1.0, 1.0, 0.0), std::invalid_argument);
    const auto p = constant_pencil(1.0, 1.0, 0.5);
    CHECK_THROWS_AS((void)assemble_pencil_matrix(p, Complex(-2.0, 0.0), 32), std::domain_error);
    CHECK_THROWS_AS((void)fractional_power(0.0, 0.5), std::domain_error);
    CHECK(assemble_pencil_matrix(p, Complex(-2.0, 1e-3), 32).boundary.size() == 4);
}

TEST_CASE("boundary functionals follow the boundary conditions") {
    const auto p = constant_pencil(1.0, 1.0, 0.5, BoundaryCondition::Clamped, BoundaryCondition::SimplySupported);
    const auto b = p.boundary_functionals();
    REQUIRE(b.size() == 4);
    CHECK(b[0].kind == BoundaryKind::Value);
    CHECK(b[0].endpoint == -1);
    CHECK(b[1].kind == BoundaryKind::Slope);
    CHECK(b[2].kind == BoundaryKind::Value);
    CHECK(b[2].endpoint == 1);
    CHECK(b[3].kind == BoundaryKind::SecondDerivative);
    InitialData init;
    init.y0 = ChebSeries::from_real_function(y0_example);
    CHECK(boundary_mismatch(p, init) < 1e-10);
}

TEST_CASE("Example-1 pencil solve has a small residual") {
    const auto p = constant_pencil(821.2, 3.70, 0.64);
    InitialData init;
    init.y0 = ChebSeries::from_real_function(y0_example);
    const Complex z(1.0, 1.0);
    auto sys = assemble_pencil_matrix(p, z, 200);
    sys.rhs = assemble_rhs(p, init, Forcing{}, z);
    const auto u = solve_almost_banded(sys, 200);
    CHECK(residual_norm(sys, u, 200 + p.lower() + 4) < 1e-10 * sys.rhs.coeff_norm());
    const auto ud = solve_almost_banded_dense(sys, 200);
    double diff = 0.0;
    for (std::size_t k = 0; k < 200; ++k) diff += std::norm(u.coeff(k) - ud.coeff(k));
    CHECK(std::sqrt(diff) < 1e-9 * u.coeff_norm());
}

TEST_CASE("weighted norms") {
    const auto p = variable_pencil(0.8);
    // int (tanh x + 2) x^2 dx = 4/3 by parity.
    const auto u = ChebSeries(CVec{0, 1}, 0);
    CHECK(std::abs(p.rho_norm(u) - std::sqrt(4.0 / 3.0)) < 1e-13);
    const auto u4 = p.mass_op().apply(u);
    CHECK(std::abs(p.rho_norm_c4(u4.coeffs()) - std::sqrt(4.0 / 3.0)) < 1e-13);
    CVec big(600);
    big[1] = 1.0;
    CHECK(std::abs(p.rho_norm_c4(p.mass_op().apply(ChebSeries(big, 0)).coeffs()) - std::sqrt(4.0 / 3.0)) < 1e-12);
    // Graph norm of x^2 at z with a = cosh: int cosh(x) * 4 = 8 sinh(1).
    const auto q = ChebSeries(CVec{0.5, 0, 0.5}, 0);
    const double rq2 = std::pow(p.rho_norm(q), 2);
    CHECK(std::abs(p.graph_norm(q, Complex(0, 2)) - std::sqrt(8 * std::sinh(1.0) + 4 * rq2)) < 1e-12);
}

TEST_CASE("nondimensionalization") {
    PhysicalBeam beam{0.818, 5.04e7, 2.27e5, 8.33e-6, 1.0, 1.0, 0.1, 0.64};
    const auto nd = nondimensionalize(beam);
    CHECK(std::abs(nd.rho - 1.0) < 1e-14);
    CHECK(std::abs(nd.e0i - 821.2) < 0.05);
    CHECK(std::abs(nd.e1i - 3.70) < 0.005);
    PhysicalBeam unit{1.0, 3.0, 0.5, 2.0, 2.0, 1.0, 0.5, 0.3};
    const auto nu = nondimensionalize(unit);
    CHECK(std::abs(nu.e0i - 6.0) < 1e-14);
    CHECK(std::abs(nu.e1i - 1.0) < 1e-14);
    auto doubled = beam;
    doubled.e0 *= 2;
    CHECK(std::abs(nondimensionalize(doubled).e0i - 2 * nd.e0i) < 1e-10);
    beam.e0 = -1;
    CHECK_THROWS_AS((void)nondimensionalize(beam), std::invalid_argument);
}
