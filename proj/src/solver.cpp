#include "fraclap/solver.hpp"

#include "fraclap/thread_pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace fraclap {

using std::numbers::pi;

namespace {

constexpr double machine_eps = std::numeric_limits<double>::epsilon();

std::string describe(Complex z) {
    std::ostringstream os;
    os.precision(6);
    os << "z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i (|z| = " << std::abs(z)
       << ")";
    return os.str();
}

/// Norms of the boundary and operator parts of the residual. The operator part
/// includes the rounding floor of evaluating K - T(z) y in floating point,
/// 16 eps ||m||_rho with m the componentwise magnitudes |z^2 S y| + |A y| + |z^nu B y| + |K|.
struct ResidualParts {
    double op = 0.0;        // operator residual including the rounding floor
    double floor = 0.0;     // rounding floor alone
    double boundary = 0.0;  // l2 mismatch of the boundary rows
};

ResidualParts residual_parts(const BeamPencil& p, const AlmostBandedSystem& sys, const ChebSeries& y,
                                         Complex z) {
    const auto len = static_cast<Index>(y.size());
    // T(z) y has no nonzero rows beyond len + lower, so the cached sections suffice.
    const auto parts = p.parts(len);
    const CVec sy = parts->mass.apply(y.coeffs());
    const CVec ay = parts->stiffness.apply(y.coeffs());
    const CVec by = parts->damping.apply(y.coeffs());
    const Complex z2 = z * z;
    const Complex znu = fractional_power(z, p.nu());
    CVec ops(std::max(sy.size(), sys.rhs.size())), mag(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const Complex k = sys.rhs.coeff(i);
        if (i < sy.size()) {
            const Complex a = z2 * sy[i], b = znu * by[i];
            ops[i] = a + ay[i] + b - k;
            mag[i] = std::abs(a) + std::abs(ay[i]) + std::abs(b) + std::abs(k);
        } else {
            ops[i] = -k;
            mag[i] = std::abs(k);
        }
    }
    double bnd = 0.0;
    for (std::size_t m = 0; m < sys.boundary.size(); ++m) {
        const CVec row = boundary_row(sys.boundary[m].kind, sys.boundary[m].endpoint, std::max<Index>(len, 1));
        Complex v = -sys.rhs_boundary[m];
        for (Index k = 0; k < len; ++k) v += row[static_cast<std::size_t>(k)] * y.coeffs()[static_cast<std::size_t>(k)];
        bnd += std::norm(v);
    }
    const double floor = 16.0 * machine_eps * p.rho_norm_c4(mag);
    return {p.rho_norm_c4(ops) + floor, floor, std::sqrt(bnd)};
}

void check_coefficient_sum(const BeamPencil& p, Complex z) {
    if (p.nu() <= 1.0) return;
    const Complex zn = fractional_power(z, p.nu());
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : cheb_points(64)) {
        const double m = std::abs(p.a()(x) + zn * p.b()(x));
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    if (!(lo > 1e-12 * hi)) throw NodeFailure("a + z^nu b vanishes near the contour node " + describe(z));
}

/// 5 probe times, geometrically spaced over the window.
std::vector<double> probe_times(TimeWindow w) {
    std::vector<double> t(5);
    for (int k = 0; k < 5; ++k) t[static_cast<std::size_t>(k)] = w.t0 * std::pow(w.ratio(), k / 4.0);
    t.back() = w.t1;
    return t;
}

/// Quadrature size rounded up to a power of two so cached rules are reused.
std::size_t rule_size(std::size_t m) {
    std::size_t n = 16;
    while (n < m) n *= 2;
    return n;
}

ChebSeries real_part(const CVec& c) {
    CVec r(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) r[k] = c[k].real();
    return ChebSeries(std::move(r), 0);
}

}  // namespace

double LaplaceSolve::max_certified_error() const {
    double m = 0.0;
    for (const auto& n : nodes) m = std::max(m, n.certified_error());
    return m;
}

double LaplaceSolve::node_error_bound() const {
    const TimeWindow& win = contour.window;
    double total = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double re = nodes[j].z.real();
        const double growth = std::exp(re * (re > 0.0 ? win.t1 : win.t0));
        total += (j == 0 ? 1.0 : 2.0) * std::abs(contour.weight(static_cast<int>(j))) * growth * nodes[j].certified_error();
    }
    return total;
}

std::size_t LaplaceSolve::uncertified_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const NodeSolution& n) { return !n.certified; }));
}

// ============================================================================
// Node solves
// ============================================================================

NodeSolution solve_node(const BeamPencil& p, const RhsAssembler& rhs, const BoundParams& bp, Complex z, double eta,
                        const SolverOptions& opt, std::size_t* solves) {
    NodeSolution out;
    out.z = z;
    out.eps = epsilon_bound(bp, z);
    if (!(out.eps > 0.0)) throw NodeFailure("contour node outside the certified region: " + describe(z));
    check_coefficient_sum(p, z);
    const ChebSeries k = rhs(z);
    if (rhs.is_zero() || k.max_abs_coeff() == 0.0) {
        out.y = ChebSeries::constant(0.0);
        out.n = 0;
        out.certified = true;
        return out;
    }
    const double tail_tol = std::max(eta, 64.0 * machine_eps);
    double prev_res = std::numeric_limits<double>::infinity();
    for (Index n = std::max<Index>(opt.n_start, 16); n <= opt.n_max; n *= 2) {
        AlmostBandedSystem sys = assemble_pencil_matrix(p, z, n);
        sys.rhs = k;
        ChebSeries y = solve_almost_banded(sys, n);
        if (solves) ++*solves;
        const auto [res, floor, bnd] = residual_parts(p, sys, y, z);
        const bool tail_ok = y.relative_tail() <= tail_tol;
        const bool cert_ok = res <= eta * out.eps;
        const bool stagnated = res > 0.5 * prev_res || res <= 2.0 * floor;
        prev_res = res;
        if (tail_ok && (cert_ok || stagnated)) {
            out.y = y.trimmed();
            out.residual = res;
            out.boundary_residual = bnd;
            out.n = n;
            out.certified = cert_ok;
            return out;
        }
    }
    throw NodeFailure("adaptive truncation did not converge below n_max = " + std::to_string(opt.n_max) + " at " +
                      describe(z));
}

ChebSeries solve_uncertified(const BeamPencil& p, const ChebSeries& v, Complex z, double tol, const SolverOptions& opt,
                             std::size_t* solves) {
    const double tail_tol = std::max(tol, 64.0 * machine_eps);
    for (Index n = std::max<Index>(opt.n_start, 16); n <= opt.n_max; n *= 2) {
        AlmostBandedSystem sys = assemble_pencil_matrix(p, z, n);
        sys.rhs = v;
        ChebSeries y = solve_almost_banded(sys, n);
        if (solves) ++*solves;
        if (y.relative_tail() <= tail_tol) return y.trimmed();
    }
    throw NodeFailure("adaptive truncation did not converge at the pole " + describe(z));
}

// ============================================================================
// Contour selection and poles
// ============================================================================

Contour select_contour(const BoundParams& bp, TimeWindow win, int N, double eta, const SolverOptions& opt) {
    win.validate();
    if (opt.contour == ContourKind::Hyperbolic) {
        const double sigma = opt.sigma < 0.0 ? opt.beta / win.t1 : opt.sigma;
        const double delta = select_sector_delta(bp, sigma);
        return hyperbolic_params(delta, sigma, win, opt.beta, N);
    }
    const auto pr = select_parabola_delta(bp, win.t0);
    return parabolic_params(pr.delta, pr.sigma, win, N, std::min(eta, 0.5));
}

bool pole_right_of_contour(const Contour& c, Complex p) {
    double re_gamma = 0.0;
    if (c.kind == ContourKind::Hyperbolic) {
        const double s = std::asinh(p.imag() / (c.mu * std::cos(c.alpha)));
        re_gamma = c.gamma(s).real();
    } else {
        re_gamma = c.gamma(p.imag() / (2.0 * c.mu)).real();
    }
    if (std::abs(p.real() - re_gamma) <= 1e-10 * (1.0 + std::abs(p)))
        throw std::invalid_argument("forcing pole lies on the contour; shift beta to reparametrize");
    return p.real() > re_gamma;
}

// ============================================================================
// Laplace solve
// ============================================================================

namespace {

LaplaceSolve solve_fixed(const BeamPencil& p, const RhsAssembler& rhs, const InitialData& init, const Forcing& forcing,
                         const BoundParams& bp, TimeWindow win, double target, int N, const SolverOptions& opt) {
    LaplaceSolve ls;
    ls.bounds = bp;
    ls.target = target;
    ls.beta = opt.beta;
    ls.contour = select_contour(bp, win, N, target / 10.0, opt);
    double amp = 0.0;
    for (int j = -N; j <= N; ++j) {
        const Complex z = ls.contour.node(j);
        amp += std::abs(ls.contour.weight(j)) * std::exp(z.real() * win.t0);
    }
    ls.eta = target / (10.0 * amp);

    const auto zs = ls.contour.half_nodes();
    ls.nodes.resize(zs.size());
    std::vector<std::size_t> counts(zs.size(), 0);
    parallel_for(zs.size(), [&](std::size_t j) {
        ls.nodes[j] = solve_node(p, rhs, bp, zs[j], ls.eta, opt, &counts[j]);
    });
    for (auto c : counts) ls.solve_count += c;

    if (forcing.kind != TimeKind::Zero && forcing.amplitude != 0.0 && forcing.profile.max_abs_coeff() != 0.0) {
        const double w = forcing.omega;
        for (double sgn : {1.0, -1.0}) {
            const Complex pole(0.0, sgn * w);
            // Residue of amplitude*omega/(z^2+omega^2) or amplitude*z/(z^2+omega^2) at z = pole.
            const Complex res = forcing.kind == TimeKind::Sin ? forcing.amplitude * w / (2.0 * pole)
                                                              : Complex(forcing.amplitude / 2.0);
            ChebSeries v = res * rhs.profile_c4();
            const bool crossed = pole_right_of_contour(ls.contour, pole);
            ls.poles.push_back({pole, solve_uncertified(p, v, pole, ls.eta, opt, &ls.solve_count), crossed});
        }
    }
    // y(., t) -> y0 as t -> 0, so the transform behaves like y0/z for large |z|.
    // Treating y0/z as a known pole at the origin leaves an integrand decaying like z^{-3}.
    if (init.y0.max_abs_coeff() != 0.0) ls.poles.push_back({Complex{}, init.y0.converted_to(0), false});
    return ls;
}

double probe_difference(const LaplaceSolve& a, const LaplaceSolve& b) {
    const auto ts = probe_times(a.contour.window);
    const auto ya = evaluate(a, ts);
    const auto yb = evaluate(b, ts);
    double d = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) d = std::max(d, l2_norm(ya.y[k] - yb.y[k]));
    return d;
}

}  // namespace

LaplaceSolve solve_laplace(const BeamPencil& p, const InitialData& init, const Forcing& forcing, TimeWindow win,
                           double target_accuracy, const SolverOptions& opt) {
    win.validate();
    if (!(target_accuracy > 0.0)) throw std::invalid_argument("solve_laplace: target accuracy must be positive");
    if (forcing.kind != TimeKind::Zero && !(forcing.omega > 0.0))
        throw std::invalid_argument("solve_laplace: forcing frequency must be positive");
    const BoundParams bp = bound_params(p);
    const RhsAssembler rhs(p, init, forcing);
    if (opt.N > 0) return solve_fixed(p, rhs, init, forcing, bp, win, target_accuracy, opt.N, opt);

    int N = std::max(opt.N_start, 2);
    if (opt.contour == ContourKind::Hyperbolic) {
        // Start one doubling below the N at which the printed quadrature exponent reaches the target.
        const double sigma = opt.sigma < 0.0 ? opt.beta / win.t1 : opt.sigma;
        const double delta = select_sector_delta(bp, sigma);
        int n = N;
        while (2 * n <= opt.N_max && quadrature_exponent(delta, win.ratio(), opt.beta, n) > std::log(target_accuracy)) n *= 2;
        N = std::max(N, n / 2);
    }
    auto attempt = [&](int n) -> std::optional<LaplaceSolve> {
        try {
            return solve_fixed(p, rhs, init, forcing, bp, win, target_accuracy, n, opt);
        } catch (const std::invalid_argument&) {
            // Algorithm-1 parameters outside their domain for this N.
            if (n >= opt.N_max) throw;
            return std::nullopt;
        }
    };
    std::optional<LaplaceSolve> coarse;
    while (!(coarse = attempt(N))) N *= 2;
    for (;;) {
        LaplaceSolve fine = *attempt(2 * N);
        fine.quadrature_estimate = probe_difference(*coarse, fine);
        fine.solve_count += coarse->solve_count;
        if (fine.quadrature_estimate <= target_accuracy || 4 * N > opt.N_max) return fine;
        coarse = std::move(fine);
        N *= 2;
    }
}

std::vector<LaplaceSolve> solve_windows(const BeamPencil& p, const InitialData& init, const Forcing& forcing,
                                        double t_start, double t_end, double target_accuracy,
                                        const SolverOptions& opt) {
    if (!(t_start > 0.0 && t_end >= t_start)) throw std::invalid_argument("solve_windows: require 0 < t_start <= t_end");
    if (!(opt.window_ratio > 1.0)) throw std::invalid_argument("solve_windows: window ratio must exceed 1");
    std::vector<LaplaceSolve> out;
    double t0 = t_start;
    for (;;) {
        const double t1 = t_end <= t0 * opt.window_ratio * (1.0 + 1e-9) ? t_end : t0 * opt.window_ratio;
        out.push_back(solve_laplace(p, init, forcing, {t0, t1}, target_accuracy, opt));
        if (t1 >= t_end) break;
        t0 = t1;
    }
    return out;
}

// ============================================================================
// Time domain
// ============================================================================

TimeSolution evaluate(const LaplaceSolve& ls, std::span<const double> times) {
    TimeSolution ts;
    ts.times.assign(times.begin(), times.end());
    std::size_t len = 1;
    for (const auto& n : ls.nodes) len = std::max(len, n.y.size());
    for (const auto& pc : ls.poles) len = std::max(len, pc.field.size());
    TimeCertificate cert;
    cert.quadrature_estimate = ls.quadrature_estimate;
    if (ls.contour.kind == ContourKind::Hyperbolic && ls.beta > 0.0)
        cert.eta_term = error_certificate(ls.contour, ls.beta, ls.eta).eta_term;

    // The principal parts field/(z - p) of every forcing pole are subtracted
    // from the node values and their exact inverse e^{p t} field is added back,
    // so the quadrature sees an integrand that is analytic near the poles.
    std::vector<CVec> node_coeffs(ls.nodes.size());
    for (std::size_t j = 0; j < ls.nodes.size(); ++j) {
        CVec c = ls.nodes[j].y.coeffs();
        c.resize(len);
        const Complex z = ls.nodes[j].z;
        for (const auto& pc : ls.poles) {
            const Complex inv = 1.0 / (z - pc.p);
            const auto& f = pc.field.coeffs();
            for (std::size_t k = 0; k < f.size(); ++k) c[k] -= f[k] * inv;
        }
        node_coeffs[j] = std::move(c);
    }

    for (double t : times) {
        if (!ls.contour.window.contains(t))
            throw std::domain_error("evaluate: t = " + std::to_string(t) + " outside the solve window");
        CVec y(len), yt(len);
        for (int order : {0, 1}) {
            CVec& acc = order == 0 ? y : yt;
            const auto f = half_factors(ls.contour, t, order);
            for (std::size_t j = 0; j < node_coeffs.size(); ++j) {
                const auto& c = node_coeffs[j];
                for (std::size_t k = 0; k < c.size(); ++k) acc[k] += 2.0 * (f[j] * c[k]).real();
            }
        }
        for (const auto& pc : ls.poles) {
            const Complex e = std::exp(pc.p * t);
            const auto& c = pc.field.coeffs();
            for (std::size_t k = 0; k < c.size(); ++k) {
                y[k] += e * c[k];
                yt[k] += pc.p * e * c[k];
            }
        }
        ts.y.push_back(real_part(y));
        ts.y_t.push_back(real_part(yt));
        ts.certificates.push_back(cert);
    }
    return ts;
}

TimeSolution evaluate(std::span<const LaplaceSolve> windows, std::span<const double> times) {
    TimeSolution out;
    for (double t : times) {
        const auto it = std::find_if(windows.begin(), windows.end(),
                                     [t](const LaplaceSolve& w) { return w.contour.window.contains(t); });
        if (it == windows.end()) throw std::domain_error("evaluate: t = " + std::to_string(t) + " outside every window");
        const double one[1] = {t};
        auto ts = evaluate(*it, one);
        out.times.push_back(t);
        out.y.push_back(std::move(ts.y[0]));
        out.y_t.push_back(std::move(ts.y_t[0]));
        out.certificates.push_back(ts.certificates[0]);
    }
    return out;
}

double energy(const BeamPencil& p, const ChebSeries& y, const ChebSeries& y_t) {
    const ChebSeries y2 = diff_op(0, 2).apply(y.converted_to(0));
    const std::size_t m = 2 * std::max(y2.size(), y_t.size()) + 2 * std::max(p.a().size(), p.rho().size()) + 8;
    const auto rule = clenshaw_curtis(rule_size(m));
    double e = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = rule.nodes[q];
        e += rule.weights[q] * (p.a()(x).real() * std::norm(y2(x)) + p.rho()(x).real() * std::norm(y_t(x)));
    }
    return 0.5 * std::max(e, 0.0);
}

void compute_energy(TimeSolution& ts, const BeamPencil& p) {
    ts.energy.assign(ts.times.size(), 0.0);
    parallel_for(ts.times.size(), [&](std::size_t k) { ts.energy[k] = energy(p, ts.y[k], ts.y_t[k]); });
}

EnergyAsymptote energy_asymptote(const BeamPencil& p, const InitialData& init, const Forcing& forcing) {
    auto constant_value = [](const ChebSeries& c, const char* name) {
        const double c0 = std::abs(c.coeff(0));
        for (std::size_t k = 1; k < c.size(); ++k)
            if (std::abs(c.coeff(k)) > 1e-13 * c0)
                throw std::invalid_argument(std::string("energy_asymptote: coefficient ") + name + " is not constant");
        return c.coeff(0).real();
    };
    const double a = constant_value(p.a(), "a");
    const double b = constant_value(p.b(), "b");
    const double nu = p.nu();
    if (!(nu < 1.0)) throw std::invalid_argument("energy_asymptote: requires 0 < nu < 1");
    if (p.convention() != Convention::Caputo) throw std::invalid_argument("energy_asymptote: requires the Caputo convention");
    if (init.y1.max_abs_coeff() != 0.0) throw std::invalid_argument("energy_asymptote: requires y1 = 0");
    if (forcing.kind != TimeKind::Zero && forcing.amplitude != 0.0 && forcing.profile.max_abs_coeff() != 0.0)
        throw std::invalid_argument("energy_asymptote: requires zero forcing");
    const ChebSeries y2 = diff_op(0, 2).apply(init.y0);
    const auto rule = clenshaw_curtis(rule_size(2 * y2.size() + 8));
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) integral += rule.weights[q] * std::norm(y2(rule.nodes[q]));
    const double s = std::sin(pi * nu);
    const double g = std::tgamma(nu);
    EnergyAsymptote ea;
    ea.e1 = s * s * g * g / (2.0 * pi * pi) * (b * b / a) * integral;
    ea.exponent = -2.0 * nu;
    ea.correction_exponent = -3.0 * nu;
    return ea;
}

Complex forcing_transform_numeric(const std::function<double(double)>& f, double t1, Complex z) {
    if (!(t1 > 0.0)) throw std::invalid_argument("forcing_transform_numeric: t1 must be positive");
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(z) * t1 / 50.0)));
    const auto rule = clenshaw_curtis(129);
    const double w = t1 / panels;
    Complex acc{};
    for (int k = 0; k < panels; ++k) {
        const double a = k * w;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double s = a + 0.5 * w * (rule.nodes[q] + 1.0);
            acc += 0.5 * w * rule.weights[q] * std::exp(-z * s) * f(s);
        }
    }
    return acc;
}

double l2_norm(const ChebSeries& u) {
    const auto rule = clenshaw_curtis(rule_size(2 * u.size() + 8));
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) acc += rule.weights[q] * std::norm(u(rule.nodes[q]));
    return std::sqrt(std::max(acc, 0.0));
}

}  // namespace fraclap
