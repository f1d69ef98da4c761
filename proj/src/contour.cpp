#include "fraclap/contour.hpp"

#include "fraclap/lambert_w.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fraclap {

using std::numbers::pi;

namespace {

constexpr Complex I{0.0, 1.0};

}  // namespace

const char* to_string(ContourKind k) { return k == ContourKind::Hyperbolic ? "hyperbolic" : "parabolic"; }

void TimeWindow::validate() const {
    if (!(t0 > 0.0) || !(t1 >= t0) || !std::isfinite(t1))
        throw std::invalid_argument("TimeWindow: require 0 < t0 <= t1 < inf");
}

bool TimeWindow::contains(double t, double rel_slack) const noexcept {
    return t >= t0 * (1.0 - rel_slack) && t <= t1 * (1.0 + rel_slack);
}

Complex Contour::gamma(double s) const {
    if (kind == ContourKind::Hyperbolic) return sigma + mu * (1.0 + std::sin(I * s - alpha));
    const Complex u = 1.0 + I * s;
    return sigma - 1.0 / (4.0 * delta) + mu * u * u;
}

Complex Contour::dgamma(double s) const {
    if (kind == ContourKind::Hyperbolic) return I * mu * std::cos(I * s - alpha);
    return 2.0 * I * mu * (1.0 + I * s);
}

Complex Contour::weight(int j) const { return h / (2.0 * pi * I) * dgamma(j * h); }

std::vector<Complex> Contour::half_nodes() const {
    std::vector<Complex> z(static_cast<std::size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) z[static_cast<std::size_t>(j)] = node(j);
    return z;
}

double Contour::max_node_real() const {
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= N; ++j) m = std::max(m, node(j).real());
    return m;
}

Contour make_hyperbolic(double mu, double alpha, double sigma, double h, int N, TimeWindow win) {
    win.validate();
    if (!(mu > 0.0)) throw std::invalid_argument("hyperbolic contour: mu must be positive");
    if (!(alpha > 0.0 && alpha < pi / 2.0)) throw std::invalid_argument("hyperbolic contour: alpha must lie in (0, pi/2)");
    if (!(h > 0.0) || N < 1) throw std::invalid_argument("hyperbolic contour: need h > 0 and N >= 1");
    Contour c;
    c.kind = ContourKind::Hyperbolic;
    c.mu = mu;
    c.alpha = alpha;
    c.sigma = sigma;
    c.h = h;
    c.N = N;
    c.window = win;
    return c;
}

Contour make_parabolic(double mu, double delta, double sigma, double h, int N, TimeWindow win) {
    win.validate();
    if (!(delta > 0.0)) throw std::invalid_argument("parabolic contour: delta must be positive");
    if (!(mu > 1.0 / (4.0 * delta))) throw std::invalid_argument("parabolic contour: need mu > 1/(4 delta)");
    if (!(h > 0.0) || N < 1) throw std::invalid_argument("parabolic contour: need h > 0 and N >= 1");
    Contour c;
    c.kind = ContourKind::Parabolic;
    c.mu = mu;
    c.delta = delta;
    c.sigma = sigma;
    c.h = h;
    c.N = N;
    c.window = win;
    return c;
}

Contour hyperbolic_params(double delta, double sigma, TimeWindow win, double beta, int N) {
    win.validate();
    if (!(delta >= 0.0 && delta < pi / 2.0)) throw std::invalid_argument("hyperbolic_params: delta must lie in [0, pi/2)");
    if (!(beta > 0.0)) throw std::invalid_argument("hyperbolic_params: beta must be positive");
    if (N < 1) throw std::invalid_argument("hyperbolic_params: N must be at least 1");
    const double s = std::sin((pi - 2.0 * delta) / 4.0);
    const double mu = beta / (win.t1 * (1.0 - s));
    const double h = lambert_w0(win.ratio() * N * pi * (pi - 2.0 * delta) / (beta * s) * (1.0 - s)) / N;
    const double alpha = (h * mu * win.t1 + pi * pi - 2.0 * pi * delta) / (4.0 * pi);
    if (!(alpha < pi / 2.0 - delta))
        throw std::invalid_argument("hyperbolic_params: alpha >= pi/2 - delta (N too small for this window)");
    Contour c = make_hyperbolic(mu, alpha, sigma, h, N, win);
    c.delta = delta;
    return c;
}

// ============================================================================
// Algorithm 2
// ============================================================================

double parabolic_objective(const ParabolicProblem& p, double h, double mu) {
    const double d = p.delta;
    if (!(h > 0.0) || !(mu * 4.0 * d > 1.0) || !std::isfinite(h) || !std::isfinite(mu))
        return std::numeric_limits<double>::infinity();
    const double le = std::log(p.eta);
    const double e1 = -2.0 * pi / h * (1.0 - 1.0 / (2.0 * std::sqrt(mu * d)));
    double worst = e1;
    for (double t : {p.window.t0, p.window.t1}) {
        const double base = -t / (4.0 * d);
        const double hn = h * p.N;
        const double e2 = base - pi * pi / (mu * t * h * h) + 2.0 * pi / h;
        const double e3 = base + mu * t * (1.0 - hn * hn);
        const double e4 = base + mu * t + le;
        worst = std::max({worst, e2, e3, e4});
    }
    return worst;
}

namespace {

struct Search {
    const ParabolicProblem& prob;
    double mu_floor;  // 1/(4 delta)

    [[nodiscard]] double h_of(double p) const { return std::exp(p); }
    [[nodiscard]] double mu_of(double q) const { return mu_floor * (1.0 + std::exp(q)); }
    [[nodiscard]] double f(const std::array<double, 2>& v) const {
        return parabolic_objective(prob, h_of(v[0]), mu_of(v[1]));
    }
};

/// Nelder-Mead simplex search in two dimensions.
std::array<double, 2> nelder_mead(const Search& s, std::array<double, 2> start, double step, double& fbest) {
    std::array<std::array<double, 2>, 3> x{start, start, start};
    x[1][0] += step;
    x[2][1] += step;
    std::array<double, 3> fx{s.f(x[0]), s.f(x[1]), s.f(x[2])};
    for (int it = 0; it < 2000; ++it) {
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        const int b = idx[0], m = idx[1], w = idx[2];
        if (std::abs(fx[w] - fx[b]) <= 1e-15 * (1.0 + std::abs(fx[b])) &&
            std::max(std::abs(x[w][0] - x[b][0]), std::abs(x[w][1] - x[b][1])) < 1e-12)
            break;
        std::array<double, 2> c{0.5 * (x[b][0] + x[m][0]), 0.5 * (x[b][1] + x[m][1])};
        auto along = [&](double t) {
            return std::array<double, 2>{c[0] + t * (x[w][0] - c[0]), c[1] + t * (x[w][1] - c[1])};
        };
        const auto xr = along(-1.0);
        const double fr = s.f(xr);
        if (fr < fx[b]) {
            const auto xe = along(-2.0);
            const double fe = s.f(xe);
            if (fe < fr) {
                x[w] = xe;
                fx[w] = fe;
            } else {
                x[w] = xr;
                fx[w] = fr;
            }
        } else if (fr < fx[m]) {
            x[w] = xr;
            fx[w] = fr;
        } else {
            const auto xc = fr < fx[w] ? along(-0.5) : along(0.5);
            const double fc = s.f(xc);
            if (fc < std::min(fr, fx[w])) {
                x[w] = xc;
                fx[w] = fc;
            } else {
                for (int k : {m, w}) {
                    x[k] = {0.5 * (x[k][0] + x[b][0]), 0.5 * (x[k][1] + x[b][1])};
                    fx[k] = s.f(x[k]);
                }
            }
        }
    }
    const int b = static_cast<int>(std::min_element(fx.begin(), fx.end()) - fx.begin());
    fbest = fx[b];
    return x[b];
}

/// Compass search with step halving; robust at the kinks of the max function.
std::array<double, 2> compass(const Search& s, std::array<double, 2> x, double step, double& fx) {
    fx = s.f(x);
    static constexpr std::array<std::array<double, 2>, 8> dirs{
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
    while (step > 1e-14) {
        bool moved = false;
        for (const auto& d : dirs) {
            const std::array<double, 2> y{x[0] + step * d[0], x[1] + step * d[1]};
            const double fy = s.f(y);
            if (fy < fx) {
                x = y;
                fx = fy;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    return x;
}

}  // namespace

ParabolicOptimum optimize_parabolic(const ParabolicProblem& prob) {
    prob.window.validate();
    if (!(prob.delta > 0.0)) throw std::invalid_argument("parabolic_params: delta must be positive");
    if (!(prob.eta > 0.0 && prob.eta < 1.0)) throw std::invalid_argument("parabolic_params: eta must lie in (0,1)");
    if (prob.N < 1) throw std::invalid_argument("parabolic_params: N must be at least 1");
    const Search s{prob, 1.0 / (4.0 * prob.delta)};

    // Box: h in [1e-6, 50]; mu - 1/(4 delta) from 1e-13 relative up to where E4 exceeds 1.
    const double p_lo = std::log(1e-6), p_hi = std::log(50.0);
    const double mu_span = 10.0 * (1.0 + std::abs(std::log(prob.eta))) / prob.window.t0 + 10.0;
    const double q_lo = std::log(1e-13), q_hi = std::log(std::max(mu_span / s.mu_floor, 1e-10));
    constexpr int G = 300;
    struct Cand {
        double f;
        std::array<double, 2> x;
    };
    std::vector<Cand> grid;
    grid.reserve(G * G);
    for (int i = 0; i < G; ++i)
        for (int k = 0; k < G; ++k) {
            const std::array<double, 2> x{p_lo + (p_hi - p_lo) * i / (G - 1.0), q_lo + (q_hi - q_lo) * k / (G - 1.0)};
            grid.push_back({s.f(x), x});
        }
    std::partial_sort(grid.begin(), grid.begin() + 8, grid.end(), [](const Cand& a, const Cand& b) { return a.f < b.f; });
    if (!std::isfinite(grid.front().f)) throw std::runtime_error("parabolic_params: no feasible grid point");

    Cand best = grid.front();
    const double step = 4.0 * std::max((p_hi - p_lo), (q_hi - q_lo)) / (G - 1.0);
    for (int k = 0; k < 8; ++k) {
        double f = 0.0;
        const auto x = nelder_mead(s, grid[static_cast<std::size_t>(k)].x, step, f);
        if (f < best.f) best = {f, x};
    }
    double f = 0.0;
    const auto x = compass(s, best.x, step, f);
    if (f < best.f) best = {f, x};
    return {s.h_of(best.x[0]), s.mu_of(best.x[1]), best.f};
}

Contour parabolic_params(double delta, double sigma, TimeWindow win, int N, double eta) {
    const auto opt = optimize_parabolic({delta, win, N, eta});
    return make_parabolic(opt.mu, delta, sigma, opt.h, N, win);
}

// ============================================================================
// Quadrature
// ============================================================================

std::vector<Complex> half_factors(const Contour& c, double t, int order) {
    if (order != 0 && order != 1) throw std::invalid_argument("half_factors: order must be 0 or 1");
    std::vector<Complex> f(static_cast<std::size_t>(c.N) + 1);
    for (int j = 0; j <= c.N; ++j) {
        const Complex z = c.node(j);
        Complex v = std::exp(z * t) * c.weight(j);
        if (order == 1) v *= z;
        f[static_cast<std::size_t>(j)] = j == 0 ? 0.5 * v : v;
    }
    return f;
}

std::vector<Complex> invert_at_times(std::span<const Complex> values, const Contour& c,
                                     std::span<const double> times, int order) {
    const std::size_t half = static_cast<std::size_t>(c.N) + 1;
    const std::size_t full = 2 * static_cast<std::size_t>(c.N) + 1;
    if (values.size() != half && values.size() != full)
        throw std::invalid_argument("invert_at_times: expected N+1 or 2N+1 node values");
    std::vector<Complex> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!c.window.contains(t))
            throw std::domain_error("invert_at_times: t = " + std::to_string(t) + " outside the contour window");
        if (values.size() == half) {
            const auto f = half_factors(c, t, order);
            double acc = 0.0;
            for (std::size_t j = 0; j < half; ++j) acc += (f[j] * values[j]).real();
            out.emplace_back(2.0 * acc, 0.0);
        } else {
            Complex acc{};
            for (int j = -c.N; j <= c.N; ++j) {
                const Complex z = c.node(j);
                Complex v = std::exp(z * t) * c.weight(j) * values[static_cast<std::size_t>(j + c.N)];
                if (order == 1) v *= z;
                acc += v;
            }
            out.push_back(acc);
        }
    }
    return out;
}

// ============================================================================
// Error certificate
// ============================================================================

double eta_amplification_integral(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("eta_amplification_integral: c must be positive");
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([c](double x) {
        const double e = x - c * std::cosh(x);
        return e < -745.0 ? 0.0 : std::exp(e);
    });
}

double quadrature_exponent(double delta, double ratio, double beta, int N) {
    const double npd = N * pi * (pi - 2.0 * delta);
    const double lg = std::log(ratio * (1.0 / std::sin(pi / 4.0 - delta / 2.0) - 1.0) / beta * npd);
    return -(npd / 2.0) / lg;
}

ErrorCertificate error_certificate(const Contour& c, double beta, double eta, double C) {
    if (c.kind != ContourKind::Hyperbolic) throw std::invalid_argument("error_certificate: hyperbolic contours only");
    if (!(beta > 0.0) || !(eta >= 0.0)) throw std::invalid_argument("error_certificate: need beta > 0 and eta >= 0");
    const double sa = std::sin(c.alpha);
    const double pref = std::exp(beta / (1.0 - sa));
    ErrorCertificate ec;
    ec.C = C;
    ec.eta_term = 2.0 * c.mu * pref / pi * eta_amplification_integral(c.mu * c.window.t0 * sa) * eta;
    ec.exponent = quadrature_exponent(c.delta, c.window.ratio(), beta, c.N);
    ec.quadrature_term = C * pref * std::exp(ec.exponent);
    return ec;
}

}  // namespace fraclap
