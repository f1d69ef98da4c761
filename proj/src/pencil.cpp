#include "fraclap/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fraclap {

std::string to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Clamped ? "clamped" : "simply_supported";
}

std::string to_string(Convention c) { return c == Convention::Caputo ? "caputo" : "riemann_liouville"; }

Complex fractional_power(Complex z, double nu) {
    if (z.imag() == 0.0 && z.real() <= 0.0) throw std::domain_error("fractional_power: z on the branch cut (-inf, 0]");
    return std::exp(nu * std::log(z));
}

Complex forcing_time_transform(const Forcing& f, Complex z) {
    if (f.kind == TimeKind::Zero || f.amplitude == 0.0) return {};
    const Complex den = z * z + f.omega * f.omega;
    if (std::abs(den) <= 1e-14 * (std::abs(z * z) + f.omega * f.omega))
        throw std::domain_error("forcing transform evaluated at a forcing pole");
    return f.kind == TimeKind::Sin ? f.amplitude * f.omega / den : f.amplitude * z / den;
}

// === BeamPencil =============================================================

struct BeamPencil::Cache {
    BandedOp mass, stiffness, damping;
    Index lower = 0;
    ChebSeries rho;
    std::mutex mutex;
    std::map<Index, std::shared_ptr<const Parts>> parts;
    // Gram matrices G_kl = int rho C4_k C4_l, keyed by size.
    std::map<Index, std::shared_ptr<const std::vector<double>>> gram;
};

namespace {

void check_positive_real(const ChebSeries& c, const char* name) {
    const auto xs = cheb_points(199);
    for (double x : xs) {
        const Complex v = c(x);
        if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-12 * std::abs(v.real()))
            throw std::invalid_argument(std::string("BeamPencil: coefficient ") + name +
                                        " must be real and strictly positive on [-1,1]");
    }
}

/// Values of C^(lambda)_k(x), k = 0..n-1.
void ultraspherical_values(int lambda, double x, Index n, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return;
    out[0] = 1.0;
    if (n == 1) return;
    out[1] = 2.0 * lambda * x;
    for (Index k = 1; k + 1 < n; ++k) {
        const double kd = static_cast<double>(k);
        out[static_cast<std::size_t>(k + 1)] =
            (2.0 * (kd + lambda) * x * out[static_cast<std::size_t>(k)] -
             (kd + 2.0 * lambda - 1.0) * out[static_cast<std::size_t>(k - 1)]) / (kd + 1.0);
    }
}

double weighted_sq_integral(const ChebSeries& weight, const ChebSeries& s, std::size_t extra) {
    const std::size_t m = 2 * s.size() + 2 * weight.size() + extra;
    const auto rule = clenshaw_curtis(m);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        acc += rule.weights[q] * weight(rule.nodes[q]).real() * std::norm(s(rule.nodes[q]));
    return std::max(acc, 0.0);
}

}  // namespace

BeamPencil::BeamPencil(ChebSeries a, ChebSeries b, ChebSeries rho, double nu, BoundaryCondition left,
                       BoundaryCondition right, Convention convention)
    : a_(std::move(a)), b_(std::move(b)), rho_(std::move(rho)), nu_(nu), left_(left), right_(right),
      convention_(convention) {
    if (!(nu > 0.0 && nu < 2.0)) throw std::invalid_argument("BeamPencil: nu must lie in (0,2)");
    if (a_.basis_order() != 0 || b_.basis_order() != 0 || rho_.basis_order() != 0)
        throw std::invalid_argument("BeamPencil: coefficients must be Chebyshev T series");
    check_positive_real(a_, "a");
    check_positive_real(b_, "b");
    check_positive_real(rho_, "rho");
    const ChebSeries& rho_ref = rho_;
    const auto inv_rho = ChebSeries::from_function([&](double x) { return 1.0 / rho_ref(x).real(); });
    mass_ = conversion_chain(0, 4);
    const BandedOp m_inv_rho = mult_op(inv_rho, 4);
    stiffness_ = compose(m_inv_rho, compose(diff_op(2, 2), compose(mult_op(a_, 2), diff_op(0, 2))));
    damping_ = compose(m_inv_rho, compose(diff_op(2, 2), compose(mult_op(b_, 2), diff_op(0, 2))));
    lower_ = std::max({mass_.lower(), stiffness_.lower(), damping_.lower()});
    upper_ = std::max({mass_.upper(), stiffness_.upper(), damping_.upper()});
    cache_ = std::make_shared<Cache>();
    cache_->mass = mass_;
    cache_->stiffness = stiffness_;
    cache_->damping = damping_;
    cache_->lower = lower_;
    cache_->rho = rho_;
}

std::vector<BoundaryFunctional> BeamPencil::boundary_functionals() const {
    std::vector<BoundaryFunctional> out;
    for (const auto& [bc, end] : {std::pair{left_, -1}, std::pair{right_, 1}}) {
        out.push_back({BoundaryKind::Value, end});
        out.push_back({bc == BoundaryCondition::Clamped ? BoundaryKind::Slope : BoundaryKind::SecondDerivative, end});
    }
    return out;
}

std::shared_ptr<const BeamPencil::Parts> BeamPencil::parts(Index n) const {
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->parts.find(n); it != cache_->parts.end()) return it->second;
    }
    auto p = std::make_shared<Parts>();
    const Index rows = n + lower_;
    p->mass = mass_.materialize(rows, n);
    p->stiffness = stiffness_.materialize(rows, n);
    p->damping = damping_.materialize(rows, n);
    std::lock_guard lock(cache_->mutex);
    return cache_->parts.emplace(n, std::move(p)).first->second;
}

BandedOp BeamPencil::op_at(Complex z) const {
    const Complex z2 = z * z;
    const Complex znu = fractional_power(z, nu_);
    const BeamPencil self = *this;
    return BandedOp(lower_, upper_, 0, 4, [self, z2, znu](Index rows, Index cols) {
        BandMatrix out(rows, cols, self.lower_, self.upper_);
        if (rows <= cols + self.lower_) {
            const auto p = self.parts(cols);
            out.add_scaled(p->mass.section(rows, cols), z2);
            out.add_scaled(p->stiffness.section(rows, cols), 1.0);
            out.add_scaled(p->damping.section(rows, cols), znu);
        } else {
            out.add_scaled(self.mass_.materialize(rows, cols), z2);
            out.add_scaled(self.stiffness_.materialize(rows, cols), 1.0);
            out.add_scaled(self.damping_.materialize(rows, cols), znu);
        }
        return out;
    });
}

double BeamPencil::rho_norm_c4(const CVec& coeffs) const {
    const auto n = static_cast<Index>(coeffs.size());
    if (n == 0) return 0.0;
    if (n > 512) return std::sqrt(weighted_sq_integral(rho_, ChebSeries(coeffs, 4), 8));
    std::shared_ptr<const std::vector<double>> g;
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->gram.find(n); it != cache_->gram.end()) g = it->second;
    }
    if (!g) {
        auto gram = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n * n), 0.0);
        const auto rule = clenshaw_curtis(static_cast<std::size_t>(2 * n) + 2 * rho_.size() + 8);
        std::vector<double> vals;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            ultraspherical_values(4, rule.nodes[q], n, vals);
            const double w = rule.weights[q] * rho_(rule.nodes[q]).real();
            for (Index k = 0; k < n; ++k)
                for (Index l = 0; l < n; ++l)
                    (*gram)[static_cast<std::size_t>(k * n + l)] += w * vals[static_cast<std::size_t>(k)] * vals[static_cast<std::size_t>(l)];
        }
        std::lock_guard lock(cache_->mutex);
        g = cache_->gram.emplace(n, std::move(gram)).first->second;
    }
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) {
        Complex row{};
        for (Index l = 0; l < n; ++l) row += (*g)[static_cast<std::size_t>(k * n + l)] * coeffs[static_cast<std::size_t>(l)];
        acc += (std::conj(coeffs[static_cast<std::size_t>(k)]) * row).real();
    }
    return std::sqrt(std::max(acc, 0.0));
}

double BeamPencil::rho_norm(const ChebSeries& u) const {
    if (u.basis_order() != 0) throw std::invalid_argument("rho_norm: expects a Chebyshev T series");
    return std::sqrt(weighted_sq_integral(rho_, u, 8));
}

double BeamPencil::graph_norm(const ChebSeries& u, Complex z) const {
    const ChebSeries u2 = diff_op(0, 2).apply(u);
    const double a_part = weighted_sq_integral(a_, u2, 8);
    const double r = rho_norm(u);
    return std::sqrt(a_part + std::norm(z) * r * r);
}

AlmostBandedSystem assemble_pencil_matrix(const BeamPencil& p, Complex z, Index n) {
    if (n < 16) throw std::invalid_argument("assemble_pencil_matrix: truncation must be at least 16");
    AlmostBandedSystem sys;
    sys.op = p.op_at(z);
    sys.boundary = p.boundary_functionals();
    sys.rhs = ChebSeries(CVec{Complex{}}, 4);
    sys.rhs_boundary = CVec(sys.boundary.size(), Complex{});
    return sys;
}

// === Right-hand side ========================================================

RhsAssembler::RhsAssembler(const BeamPencil& p, const InitialData& init, const Forcing& forcing)
    : nu_(p.nu()), convention_(p.convention()), forcing_(forcing) {
    if (init.y0.basis_order() != 0 || init.y1.basis_order() != 0 || forcing.profile.basis_order() != 0)
        throw std::invalid_argument("RhsAssembler: data must be Chebyshev T series");
    if (!std::isfinite(forcing.amplitude) || !std::isfinite(forcing.omega))
        throw std::invalid_argument("RhsAssembler: forcing parameters must be finite");
    const BandedOp& s = p.mass_op();
    g4_ = s.apply(forcing.profile);
    y0_4_ = s.apply(init.y0);
    y1_4_ = s.apply(init.y1);
    by0_ = p.damping_op().apply(init.y0);
    by1_ = p.damping_op().apply(init.y1);
    has_y1_frac_ = nu_ > 1.0;
    const bool no_force = forcing.kind == TimeKind::Zero || forcing.amplitude == 0.0 || forcing.profile.max_abs_coeff() == 0.0;
    if (no_force) forcing_.kind = TimeKind::Zero;
    zero_ = no_force && init.y0.max_abs_coeff() == 0.0 && init.y1.max_abs_coeff() == 0.0;
}

ChebSeries RhsAssembler::operator()(Complex z) const {
    ChebSeries k = z * y0_4_;
    k += y1_4_;
    if (forcing_.kind != TimeKind::Zero) k += forcing_time_transform(forcing_, z) * g4_;
    if (convention_ == Convention::Caputo) {
        k += fractional_power(z, nu_ - 1.0) * by0_;
        if (has_y1_frac_) k += fractional_power(z, nu_ - 2.0) * by1_;
    }
    return k;
}

ChebSeries assemble_rhs(const BeamPencil& p, const InitialData& init, const Forcing& forcing, Complex z) {
    return RhsAssembler(p, init, forcing)(z);
}

double boundary_mismatch(const BeamPencil& p, const InitialData& init) {
    double worst = 0.0;
    const auto n = std::max<Index>(static_cast<Index>(init.y0.size()), 1);
    for (const auto& bf : p.boundary_functionals()) {
        if (bf.kind != BoundaryKind::Value && bf.kind != BoundaryKind::Slope) continue;
        const CVec row = boundary_row(bf.kind, bf.endpoint, n);
        Complex v{};
        for (Index k = 0; k < n; ++k) v += row[static_cast<std::size_t>(k)] * init.y0.coeff(static_cast<std::size_t>(k));
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

NondimensionalBeam nondimensionalize(const PhysicalBeam& beam) {
    for (double v : {beam.rho_a, beam.e0, beam.e1, beam.inertia, beam.length, beam.frequency_scale, beam.width_fraction})
        if (!(v > 0.0)) throw std::invalid_argument("nondimensionalize: physical quantities must be positive");
    const double width = beam.width_fraction * beam.length;
    const double rho0 = beam.rho_a / width;
    const double half = 0.5 * beam.length;
    const double t = 1.0 / beam.frequency_scale;
    const double denom = rho0 * std::pow(half, 4);
    NondimensionalBeam out;
    out.rho = beam.rho_a / (rho0 * width);
    out.e0i = beam.e0 * beam.inertia * t * t / denom;
    out.e1i = beam.e1 * beam.inertia * std::pow(t, 2.0 - beam.nu) / denom;
    return out;
}

}  // namespace fraclap
