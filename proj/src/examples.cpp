#include "fraclap/examples.hpp"

#include "fraclap/expr.hpp"
#include "fraclap/thread_pool.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fraclap {

using std::numbers::pi;

namespace {

std::vector<double> x_grid(int n) {
    std::vector<double> x;
    for (int k = 0; k < n; ++k) x.push_back(-1.0 + 2.0 * k / (n - 1));
    x.back() = 1.0;
    return x;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
    return s;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(3);
    o << std::scientific << v;
    return o.str();
}

std::string number_tag(double v) {
    std::ostringstream o;
    o << v;
    return o.str();
}

void add_window_metadata(CsvTable& t, const ProblemRun& run) {
    t.add_meta("threads", std::to_string(worker_count()));
    t.add_meta("windows", std::to_string(run.windows.size()));
    for (std::size_t k = 0; k < run.windows.size(); ++k) {
        const auto& ls = run.windows[k];
        const auto& c = ls.contour;
        const auto& wc = run.certificates[k];
        const std::string p = "window" + std::to_string(k) + ".";
        t.add_meta(p + "t0", c.window.t0);
        t.add_meta(p + "t1", c.window.t1);
        t.add_meta(p + "contour", to_string(c.kind));
        t.add_meta(p + "N", std::to_string(c.N));
        t.add_meta(p + "mu", c.mu);
        t.add_meta(p + "alpha", c.alpha);
        t.add_meta(p + "delta", c.delta);
        t.add_meta(p + "sigma", c.sigma);
        t.add_meta(p + "h", c.h);
        t.add_meta(p + "eta", ls.eta);
        t.add_meta(p + "quadrature_error", wc.quadrature);
        t.add_meta(p + "node_error_bound", wc.node_error);
        t.add_meta(p + "uncertified_nodes", std::to_string(ls.uncertified_count()));
        t.add_meta(p + "certificate", wc.met ? "met" : "not_met");
    }
}

bool constant_expr(const std::string& src) {
    const ExprPtr e = parse_expr(src);
    const double v = evaluate(*e, 0.0);
    for (int k = 0; k <= 20; ++k)
        if (evaluate(*e, -1.0 + 0.1 * k) != v) return false;
    return true;
}

void apply_common(ProblemConfig& c, const ExampleOverrides& ov) {
    if (ov.accuracy) c.target_accuracy = *ov.accuracy;
    if (ov.contour) c.contour = *ov.contour;
    if (ov.N) c.N = *ov.N;
    if (ov.t0) c.t0 = *ov.t0;
    if (ov.t1) c.t1 = *ov.t1;
}

void append(RunReport& into, const RunReport& r) {
    into.certified = into.certified && r.certified;
    into.files.insert(into.files.end(), r.files.begin(), r.files.end());
    into.summary.insert(into.summary.end(), r.summary.begin(), r.summary.end());
}

RunReport write_run(const ProblemRun& run, const std::filesystem::path& out_dir, const std::string& label) {
    RunReport rep;
    rep.certified = run.certified();
    const auto sol = out_dir / run.config.solution_file;
    const auto en = out_dir / run.config.energy_file;
    write_csv(sol, solution_table(run));
    write_csv(en, energy_table(run));
    rep.files = {sol, en};
    std::size_t uncert = 0;
    double node = 0.0, quad = 0.0;
    int nmax = 0;
    for (std::size_t k = 0; k < run.windows.size(); ++k) {
        uncert += run.windows[k].uncertified_count();
        node = std::max(node, run.certificates[k].node_error);
        quad = std::max(quad, run.certificates[k].quadrature);
        nmax = std::max(nmax, run.windows[k].contour.N);
    }
    rep.summary.push_back(label + ": windows=" + std::to_string(run.windows.size()) + " N_max=" + std::to_string(nmax) +
                          " quadrature=" + fmt(quad) + " node_bound=" + fmt(node) + " uncertified_nodes=" +
                          std::to_string(uncert) + " certificate=" + (rep.certified ? "met" : "NOT met"));
    return rep;
}

}  // namespace

// ============================================================================
// Configured runs
// ============================================================================

bool ProblemRun::certified() const {
    return std::all_of(certificates.begin(), certificates.end(), [](const WindowCertificate& w) { return w.met; });
}

SolverOptions solver_options(const ProblemConfig& c) {
    SolverOptions opt;
    opt.contour = c.contour;
    opt.beta = c.beta;
    opt.N = c.N;
    opt.N_max = std::max(c.N_max, opt.N_start);
    return opt;
}

WindowCertificate window_certificate(const LaplaceSolve& ls, bool adaptive) {
    WindowCertificate w;
    if (adaptive) {
        w.quadrature = ls.quadrature_estimate;
    } else if (ls.contour.kind == ContourKind::Hyperbolic) {
        w.quadrature = error_certificate(ls.contour, ls.beta, ls.eta).quadrature_term;
    } else {
        const ParabolicProblem prob{ls.contour.delta, ls.contour.window, ls.contour.N, std::min(ls.eta, 0.5)};
        w.quadrature = std::exp(parabolic_objective(prob, ls.contour.h, ls.contour.mu));
    }
    w.node_error = ls.node_error_bound();
    w.met = w.quadrature <= ls.target && w.node_error <= ls.target;
    return w;
}

ProblemRun run_problem(const ProblemConfig& c) {
    ProblemRun run;
    run.config = c;
    const Problem prob = build_problem(c);
    const SolverOptions opt = solver_options(c);
    run.windows = solve_windows(prob.pencil, prob.init, prob.forcing, c.t0, c.t1, c.target_accuracy, opt);
    for (const auto& ls : run.windows) run.certificates.push_back(window_certificate(ls, c.N == 0));
    const auto times = output_times(c);
    run.solution = evaluate(std::span<const LaplaceSolve>(run.windows), times);
    compute_energy(run.solution, prob.pencil);
    return run;
}

void add_config_metadata(CsvTable& t, const ProblemConfig& c) {
    const std::string text = to_text(c);
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2) + ".";
            continue;
        }
        const auto eq = line.find(" = ");
        std::string v = line.substr(eq + 3);
        if (v.size() >= 2 && v.front() == '"') v = v.substr(1, v.size() - 2);
        t.add_meta(section + line.substr(0, eq), v);
    }
    t.add_meta("config_sha1", content_hash(text));
}

CsvTable solution_table(const ProblemRun& run) {
    CsvTable t;
    add_config_metadata(t, run.config);
    add_window_metadata(t, run);
    const auto xs = x_grid(run.config.x_points);
    t.add_meta("x", join(xs));
    t.columns.push_back("t");
    for (std::size_t i = 0; i < xs.size(); ++i) t.columns.push_back("y_" + std::to_string(i));
    for (std::size_t i = 0; i < xs.size(); ++i) t.columns.push_back("yt_" + std::to_string(i));
    const auto& s = run.solution;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        std::vector<double> row{s.times[k]};
        for (double x : xs) row.push_back(s.y[k](x).real());
        for (double x : xs) row.push_back(s.y_t[k](x).real());
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable energy_table(const ProblemRun& run) {
    CsvTable t;
    add_config_metadata(t, run.config);
    add_window_metadata(t, run);
    std::optional<EnergyAsymptote> asym;
    const auto& c = run.config;
    if (constant_expr(c.a) && constant_expr(c.b)) {
        const Problem prob = build_problem(c);
        try {
            asym = energy_asymptote(prob.pencil, prob.init, prob.forcing);
        } catch (const std::invalid_argument&) {
            asym.reset();
        }
    }
    t.columns = {"t", "E"};
    if (asym) {
        t.add_meta("e1", asym->e1);
        t.add_meta("asymptote_exponent", asym->exponent);
        t.add_meta("correction_exponent", asym->correction_exponent);
        t.columns.insert(t.columns.end(), {"asymptote", "abs_difference"});
    }
    const auto& s = run.solution;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        std::vector<double> row{s.times[k], s.energy[k]};
        if (asym) {
            const double a = (*asym)(s.times[k]);
            row.push_back(a);
            row.push_back(std::abs(s.energy[k] - a));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

RunReport solve_config(const ProblemConfig& c, const std::filesystem::path& out_dir) {
    return write_run(run_problem(c), out_dir, "solve");
}

// ============================================================================
// Built-in examples
// ============================================================================

ProblemConfig example1_config(double omega, double nu) {
    ProblemConfig c;
    c.a = "821.2";
    c.b = "3.7";
    c.rho = "1";
    c.nu = nu;
    c.bc_left = c.bc_right = BoundaryCondition::SimplySupported;
    c.forcing.profile = "sin(pi*(x-1))";
    c.forcing.kind = TimeKind::Sin;
    c.forcing.omega = omega;
    c.t0 = 0.1;
    c.t1 = 5.0;
    c.times = 20;
    c.target_accuracy = 1e-8;
    c.N_max = 16384;
    const std::string tag = number_tag(omega);
    c.solution_file = "example1_omega" + tag + "_solution.csv";
    c.energy_file = "example1_omega" + tag + "_energy.csv";
    return c;
}

ProblemConfig example1_free_config(double nu) {
    ProblemConfig c = example1_config(0.0, nu);
    c.forcing = ForcingConfig{};
    c.y0 = "sin(2*pi*x)^2*(1+x)*(1-x)^2";
    c.t0 = 0.1;
    c.t1 = 1e4;
    c.times = 101;
    c.spacing = TimeSpacing::Log;
    c.target_accuracy = 1e-10;
    c.N_max = 131072;
    const std::string tag = number_tag(nu);
    c.solution_file = "example1_free_nu" + tag + "_solution.csv";
    c.energy_file = "example1_free_nu" + tag + "_energy.csv";
    return c;
}

ProblemConfig example2_config(double nu, const std::string& damping) {
    ProblemConfig c;
    c.a = "1";
    c.b = damping;
    c.rho = "1";
    c.nu = nu;
    c.bc_left = c.bc_right = BoundaryCondition::Clamped;
    c.y0 = "(1+x)^2*(1-x)^2";
    c.forcing.profile = "24-pi^2*(1+x)^2*(1-x)^2";
    c.forcing.kind = TimeKind::Cos;
    c.forcing.omega = pi;
    c.t0 = 0.05;
    c.t1 = 6.0;
    c.times = 120;
    c.target_accuracy = 1e-8;
    c.N_max = 16384;
    const std::string tag = number_tag(nu);
    c.solution_file = "example2_nu" + tag + "_solution.csv";
    c.energy_file = "example2_nu" + tag + "_energy.csv";
    return c;
}

ProblemConfig convergence_config(double nu) {
    ProblemConfig c;
    c.a = "cosh(x)";
    c.b = "sin(pi*x)+2";
    c.rho = "tanh(x)+2";
    c.nu = nu;
    c.bc_left = BoundaryCondition::Clamped;
    c.bc_right = BoundaryCondition::SimplySupported;
    c.y0 = "sin(2*pi*x)*(1+x)*(1-x)^2";
    c.forcing.profile = "sin(pi*x)";
    c.forcing.kind = TimeKind::Cos;
    c.forcing.omega = 20.0;
    c.t0 = 1.0;
    c.t1 = 10.0;
    c.times = 20;
    c.target_accuracy = 1e-13;
    c.solution_file = "convergence_solution.csv";
    c.energy_file = "convergence_energy.csv";
    return c;
}

double example1_closed_form(double omega, double nu, double x, double t) {
    const double p4 = std::pow(pi, 4);
    const Complex iw(0.0, omega);
    const Complex denom = p4 * 821.2 + p4 * 3.7 * std::pow(iw, nu) - omega * omega;
    return (std::exp(iw * t) * std::sin(pi * (x - 1.0)) / denom).imag();
}

double example2_undamped(double x, double t) { return std::pow((1.0 + x) * (1.0 - x), 2) * std::cos(pi * t); }

const std::vector<std::string>& example_names() {
    static const std::vector<std::string> names{"example1", "example1_free", "example2", "example3", "convergence"};
    return names;
}

std::vector<ConvergenceRow> convergence_study(const ProblemConfig& c, ContourKind kind, const std::vector<int>& Ns,
                                              int N_ref) {
    const Problem prob = build_problem(c);
    const auto times = output_times(c);
    const TimeWindow win{c.t0, c.t1};
    SolverOptions ref_opt = solver_options(c);
    ref_opt.contour = ContourKind::Hyperbolic;
    ref_opt.N = N_ref;
    const auto ref = evaluate(solve_laplace(prob.pencil, prob.init, prob.forcing, win, c.target_accuracy, ref_opt), times);
    std::vector<ConvergenceRow> out;
    for (int N : Ns) {
        SolverOptions opt = solver_options(c);
        opt.contour = kind;
        opt.N = N;
        ConvergenceRow row{N, NAN};
        try {
            const auto s = evaluate(solve_laplace(prob.pencil, prob.init, prob.forcing, win, c.target_accuracy, opt), times);
            double e = 0.0;
            for (std::size_t k = 0; k < times.size(); ++k) e = std::max(e, l2_norm(s.y[k] - ref.y[k]));
            row.error = e;
        } catch (const std::exception&) {
            row.error = NAN;
        }
        out.push_back(row);
    }
    return out;
}

RunReport run_example(std::string_view name, const ExampleOverrides& ov, const std::filesystem::path& out_dir) {
    RunReport rep;
    if (name == "example1") {
        std::vector<double> omegas{5.0, 25.0, 100.0};
        if (ov.omega) omegas = {*ov.omega};
        CsvTable dev;
        dev.columns = {"t"};
        std::vector<std::vector<double>> cols;
        for (double omega : omegas) {
            ProblemConfig c = example1_config(omega, ov.nu.value_or(0.64));
            apply_common(c, ov);
            const ProblemRun run = run_problem(c);
            append(rep, write_run(run, out_dir, "example1 omega=" + number_tag(omega)));
            const auto g = series_from_expr(c.forcing.profile);
            const Complex iw(0.0, omega);
            const Complex denom = std::pow(pi, 4) * (821.2 + 3.7 * std::pow(iw, c.nu)) - omega * omega;
            std::vector<double> d;
            double worst = 0.0;
            for (std::size_t k = 0; k < run.solution.times.size(); ++k) {
                const double q = (std::exp(iw * run.solution.times[k]) / denom).imag();
                d.push_back(l2_norm(run.solution.y[k] - Complex(q) * g));
                worst = std::max(worst, d.back());
            }
            if (dev.rows.empty()) {
                add_config_metadata(dev, c);
                for (double t : run.solution.times) dev.rows.push_back({t});
            }
            dev.columns.push_back("l2_deviation_omega" + number_tag(omega));
            for (std::size_t k = 0; k < d.size(); ++k) dev.rows[k].push_back(d[k]);
            rep.summary.push_back("example1 omega=" + number_tag(omega) + ": max L2 deviation from closed form = " +
                                  fmt(worst) + " (target " + fmt(c.target_accuracy) + ")");
        }
        const auto path = out_dir / "example1_deviation.csv";
        write_csv(path, dev);
        rep.files.push_back(path);
        return rep;
    }
    if (name == "example1_free") {
        std::vector<double> nus{0.32, 0.64};
        if (ov.nu) nus = {*ov.nu};
        for (double nu : nus) {
            ProblemConfig c = example1_free_config(nu);
            apply_common(c, ov);
            append(rep, write_run(run_problem(c), out_dir, "example1_free nu=" + number_tag(nu)));
        }
        return rep;
    }
    if (name == "example2" || name == "example3") {
        std::vector<double> nus = name == "example2" ? std::vector<double>{0.5, 0.7, 1.0} : std::vector<double>{1.2, 1.8};
        if (ov.nu) nus = {*ov.nu};
        ProblemConfig last;
        for (double nu : nus) {
            ProblemConfig c = example2_config(nu);
            c.solution_file = std::string(name) + "_nu" + number_tag(nu) + "_solution.csv";
            c.energy_file = std::string(name) + "_nu" + number_tag(nu) + "_energy.csv";
            apply_common(c, ov);
            append(rep, write_run(run_problem(c), out_dir, std::string(name) + " nu=" + number_tag(nu)));
            last = c;
        }
        if (name == "example2") {
            // E1 I = 0 is not a valid pencil; the undamped reference comes from the closed form.
            CsvTable ref;
            ProblemConfig c = last;
            c.b = "0";
            add_config_metadata(ref, c);
            const auto xs = x_grid(c.x_points);
            ref.add_meta("x", join(xs));
            ref.add_meta("source", "closed form (1+x)^2 (1-x)^2 cos(pi t)");
            ref.columns.push_back("t");
            for (std::size_t i = 0; i < xs.size(); ++i) ref.columns.push_back("y_" + std::to_string(i));
            for (double t : output_times(c)) {
                std::vector<double> row{t};
                for (double x : xs) row.push_back(example2_undamped(x, t));
                ref.rows.push_back(std::move(row));
            }
            const auto path = out_dir / "example2_undamped_reference.csv";
            write_csv(path, ref);
            rep.files.push_back(path);
        }
        return rep;
    }
    if (name == "convergence") {
        ProblemConfig c = convergence_config(ov.nu.value_or(0.8));
        if (ov.accuracy) c.target_accuracy = *ov.accuracy;
        const int N_ref = ov.N.value_or(480);
        const std::vector<int> Ns{10, 20, 30, 40, 60, 80, 100, 120, 160, 200, 240};
        const auto hyp = convergence_study(c, ContourKind::Hyperbolic, Ns, N_ref);
        const auto par = convergence_study(c, ContourKind::Parabolic, Ns, N_ref);
        CsvTable t;
        add_config_metadata(t, c);
        t.add_meta("reference_N", std::to_string(N_ref));
        t.add_meta("reference_contour", "hyperbolic");
        t.add_meta("error", "max over output times of the L2 difference to the reference solve");
        t.columns = {"N", "error_hyperbolic", "error_parabolic"};
        for (std::size_t k = 0; k < Ns.size(); ++k)
            t.rows.push_back({static_cast<double>(Ns[k]), hyp[k].error, par[k].error});
        const auto path = out_dir / "convergence.csv";
        write_csv(path, t);
        rep.files.push_back(path);
        for (std::size_t k = 0; k < Ns.size(); ++k)
            rep.summary.push_back("convergence N=" + std::to_string(Ns[k]) + ": hyperbolic " + fmt(hyp[k].error) +
                                  ", parabolic " + fmt(par[k].error));
        // The study is certified when its reference solve is.
        const Problem prob = build_problem(c);
        SolverOptions opt = solver_options(c);
        opt.N = N_ref;
        const auto ref = solve_laplace(prob.pencil, prob.init, prob.forcing, {c.t0, c.t1}, c.target_accuracy, opt);
        const auto wc = window_certificate(ref, false);
        rep.certified = wc.met;
        rep.summary.push_back("convergence reference N=" + std::to_string(N_ref) + ": a priori quadrature " +
                              fmt(wc.quadrature) + ", node bound " + fmt(wc.node_error) +
                              " certificate=" + (wc.met ? "met" : "NOT met"));
        return rep;
    }
    throw std::invalid_argument("unknown example '" + std::string(name) + "'");
}

// ============================================================================
// Region curves and contours
// ============================================================================

CsvTable region_curves_table(double nu, double M, std::size_t count) {
    const auto bp = bound_params(M, nu);
    CsvTable t;
    t.add_meta("nu", nu);
    t.add_meta("M", M);
    t.add_meta("C", bp.C);
    t.add_meta("samples_per_eps", std::to_string(count));
    t.columns = {"eps", "theta", "r", "re", "im"};
    for (double eps : {0.0, 1.0, 5.0, 10.0}) {
        for (const auto& s : region_curve(bp, eps, count)) {
            const Complex w = std::polar(s.r, s.theta);
            t.rows.push_back({eps, s.theta, s.r, w.real(), w.imag()});
        }
    }
    return t;
}

CsvTable contour_table(const Contour& c) {
    CsvTable t;
    t.add_meta("contour", to_string(c.kind));
    t.add_meta("t0", c.window.t0);
    t.add_meta("t1", c.window.t1);
    t.add_meta("N", std::to_string(c.N));
    t.add_meta("mu", c.mu);
    t.add_meta("alpha", c.alpha);
    t.add_meta("delta", c.delta);
    t.add_meta("sigma", c.sigma);
    t.add_meta("h", c.h);
    t.columns = {"j", "re_z", "im_z", "re_w", "im_w"};
    for (int j = -c.N; j <= c.N; ++j) {
        const Complex z = c.node(j), w = c.weight(j);
        t.rows.push_back({static_cast<double>(j), z.real(), z.imag(), w.real(), w.imag()});
    }
    return t;
}

}  // namespace fraclap
