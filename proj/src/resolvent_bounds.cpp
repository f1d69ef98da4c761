#include "fraclap/resolvent_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fraclap {

using std::numbers::pi;

namespace {

/// Golden-section search for the maximum of f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-14) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return std::max({f(lo), f(hi), fc, fd});
}

/// Maximum of f over [-1,1]: sampling at Chebyshev points plus local refinement.
template <class F>
double sampled_max(F&& f, std::size_t n = 256) {
    const auto xs = cheb_points(n);
    std::size_t best = 0;
    double fbest = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double v = f(xs[k]);
        if (v > fbest) {
            fbest = v;
            best = k;
        }
    }
    // cheb_points are decreasing in k.
    const double lo = xs[std::min(best + 1, xs.size() - 1)];
    const double hi = xs[best == 0 ? 0 : best - 1];
    if (hi > lo) fbest = std::max(fbest, golden_max(f, lo, hi));
    return fbest;
}

bool admissible(double nu, double theta) {
    const double w = std::abs((2.0 - nu) * theta);
    return w > 0.0 && w < pi;
}

}  // namespace

BoundParams bound_params(double M, double nu) {
    if (!(M > 0.0)) throw std::invalid_argument("bound_params: M must be positive");
    if (!(nu > 0.0 && nu < 2.0)) throw std::invalid_argument("bound_params: nu must lie in (0,2)");
    BoundParams bp;
    bp.M = M;
    bp.C = 2.0 * std::sqrt(M);
    bp.nu = nu;
    return bp;
}

BoundParams bound_params(const BeamPencil& p) {
    const double M = sampled_max([&](double x) { return p.a()(x).real() / p.b()(x).real(); });
    BoundParams bp = bound_params(M, p.nu());
    const double max_rho = sampled_max([&](double x) { return p.rho()(x).real(); });
    const double min_a = -sampled_max([&](double x) { return -p.a()(x).real(); });
    // ||u||_rho^2 <= max rho (16/pi^4) ||u''||^2 <= kappa^2 <u,u>_a.
    const double kappa2 = 16.0 / std::pow(pi, 4) * max_rho / min_a;
    bp.c_norm = std::sqrt(1.0 + kappa2);
    return bp;
}

bool SectorRegion::contains(Complex z) const { return std::abs(std::arg(z - sigma)) < pi - delta; }

bool ParabolaRegion::contains(Complex z) const { return z.real() > sigma - delta * z.imag() * z.imag(); }

double max_admissible_theta(double nu) { return std::min(pi, pi / (2.0 - nu)); }

double r_star(const BoundParams& bp, double theta, double eps) {
    const double nu = bp.nu;
    if (!admissible(nu, theta) || std::abs(theta) > pi)
        throw std::domain_error("r_star: theta outside the admissible range 0 < |(2-nu) theta| < pi");
    if (eps < 0.0) throw std::invalid_argument("r_star: eps must be nonnegative");
    const double s = std::abs(std::sin((2.0 - nu) * theta));
    double cn = std::abs(std::cos((nu - 1.0) * theta));
    // theta = pi/(2(nu-1)) is only representable up to rounding; the closed form
    // amplifies that rounding by the power 1/nu, so the zero is snapped.
    if (std::abs(std::abs((nu - 1.0) * theta) - pi / 2.0) <= 8.0 * std::numeric_limits<double>::epsilon()) cn = 0.0;
    const double ct = std::cos(theta);
    if (eps == 0.0) {
        if (std::abs(theta) < pi / 2.0) throw std::domain_error("r_star: closed form requires |theta| >= pi/2");
        return std::pow(4.0 * bp.M * std::abs(ct) * cn / (s * s), 1.0 / nu);
    }
    // g(r) = r^{nu/2} - C sqrt((eps/r - cos) |cos((nu-1)theta)|)/s - r^{nu/2-1} eps sqrt2 / s is increasing.
    auto g = [&](double r) {
        const double inner = std::max(eps / r - ct, 0.0) * cn;
        return std::pow(r, nu / 2.0) - bp.C * std::sqrt(inner) / s - std::pow(r, nu / 2.0 - 1.0) * eps * std::sqrt(2.0) / s;
    };
    // With cos(theta) > 0 the bound also holds once Re z = r cos(theta) >= eps.
    const double r_re = ct > 0.0 ? eps / ct : std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = std::max(1.0, eps);
    while (g(hi) < 0.0) {
        if (hi >= r_re) return r_re;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::runtime_error("r_star: bracketing failed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) >= 0.0 ? hi : lo) = mid;
    }
    return std::min(hi, r_re);
}

double epsilon_bound(const BoundParams& bp, Complex z) {
    if (z.imag() == 0.0 && z.real() <= 0.0) throw std::domain_error("epsilon_bound: z on the branch cut");
    const double r = std::abs(z);
    const double theta = std::arg(z);
    const double eps_re = std::max(z.real(), 0.0);
    if (!admissible(bp.nu, theta)) return eps_re;
    const double nu = bp.nu;
    const double s = std::abs(std::sin((2.0 - nu) * theta));
    const double cn = std::abs(std::cos((nu - 1.0) * theta));
    const double ct = std::cos(theta);
    const double lhs = std::pow(r, nu / 2.0);
    const double pre = std::pow(r, nu / 2.0 - 1.0) * std::sqrt(2.0) / s;
    auto h = [&](double eps) {
        const double inner = std::max(eps / r - ct, 0.0) * cn;
        return lhs - bp.C * std::sqrt(inner) / s - pre * eps;
    };
    double lo = eps_re;
    if (h(lo) < 0.0) return eps_re;
    double hi = r * s / std::sqrt(2.0);
    if (hi <= lo) return eps_re;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) >= 0.0 ? lo : hi) = mid;
    }
    return std::max(eps_re, lo);
}

double select_sector_delta(const BoundParams& bp, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("select_sector_delta: sigma must be nonnegative");
    const double tmax = max_admissible_theta(bp.nu);
    auto arg_at = [&](double theta) {
        const double r = r_star(bp, theta, 0.0);
        if (!std::isfinite(r)) return theta;
        return std::arg(std::polar(r, theta) - sigma);
    };
    // Log-spaced from both ends of [pi/2, tmax) plus a uniform interior grid.
    const double span = tmax - pi / 2.0;
    std::vector<double> thetas;
    for (int k = 0; k <= 1200; ++k) {
        const double f = std::pow(10.0, -12.0 + 12.0 * k / 1200.0);
        thetas.push_back(pi / 2.0 + f * span);
        thetas.push_back(tmax - f * span);
    }
    for (int k = 1; k < 2000; ++k) thetas.push_back(pi / 2.0 + span * k / 2000.0);
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
    std::vector<double> vals;
    vals.reserve(thetas.size());
    for (double t : thetas) vals.push_back((t > pi / 2.0 && t < tmax) ? arg_at(t) : pi);
    std::size_t best = 0;
    for (std::size_t k = 1; k < vals.size(); ++k)
        if (vals[k] < vals[best]) best = k;
    double inf_arg = vals[best];
    if (best > 0 && best + 1 < thetas.size()) {
        const double lo = thetas[best - 1], hi = thetas[best + 1];
        inf_arg = std::min(inf_arg, -golden_max([&](double t) { return -arg_at(t); }, lo, hi));
    }
    // For nu < 1 the uncertified wedge |theta| >= pi/(2-nu) reaches infinity.
    if (bp.nu < 1.0) inf_arg = std::min(inf_arg, tmax);
    return std::clamp(pi - inf_arg, 0.0, pi / 2.0);
}

double parabola_intersection_real(double t0) {
    if (!(t0 > 0.0)) throw std::invalid_argument("parabola_intersection_real: t0 must be positive");
    return std::log(1e-16) / t0;
}

ParabolaRegion select_parabola_delta(const BoundParams& bp, double t0) {
    ParabolaRegion pr;
    pr.sigma = 0.0;
    if (bp.nu >= 1.0) {
        (void)parabola_intersection_real(t0);
        pr.delta = 1.0 / (4.0 * bp.M);
        return pr;
    }
    const double target = parabola_intersection_real(t0);
    const double tmax = max_admissible_theta(bp.nu);
    auto re_at = [&](double theta) { return r_star(bp, theta, 0.0) * std::cos(theta); };
    // Re w(theta) decreases from 0 at pi/2 towards -inf at the asymptote.
    double lo = pi / 2.0 + 1e-15, hi = tmax;
    double d = 1e-3 * (tmax - pi / 2.0);
    while (re_at(tmax - d) > target) d *= 0.5;
    hi = tmax - d;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        (re_at(mid) > target ? lo : hi) = mid;
    }
    const double theta = 0.5 * (lo + hi);
    const double r = r_star(bp, theta, 0.0);
    const double y = r * std::sin(theta);
    pr.delta = -target / (y * y);
    return pr;
}

std::vector<CurveSample> region_curve(const BoundParams& bp, double eps, std::size_t count) {
    std::vector<CurveSample> out;
    const double tmax = max_admissible_theta(bp.nu);
    const double tmin = eps == 0.0 ? pi / 2.0 : 0.0;
    for (std::size_t k = 1; k <= count; ++k) {
        const double theta = tmin + (tmax - tmin) * static_cast<double>(k) / static_cast<double>(count + 1);
        out.push_back({theta, eps, r_star(bp, theta, eps)});
    }
    return out;
}

}  // namespace fraclap
