#include "fraclap/config.hpp"
#include "fraclap/examples.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace fraclap;

namespace {

constexpr int kExitCertified = 0;
constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

int report(const RunReport& rep) {
    for (const auto& s : rep.summary) std::cout << s << "\n";
    for (const auto& f : rep.files) std::cout << "wrote " << f.string() << "\n";
    std::cout << (rep.certified ? "all certificates met" : "certificates NOT met") << "\n";
    return rep.certified ? kExitCertified : kExitNotCertified;
}

void emit(const CsvTable& t, const std::string& out) {
    if (out.empty() || out == "-")
        write_csv(std::cout, t);
    else
        write_csv(std::filesystem::path(out), t);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclap: time-fractional beam equations by contour Laplace inversion"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "Solve a problem described by a config file");
    std::string config_path, out_dir = ".";
    solve->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    solve->add_option("--out", out_dir, "Output directory");

    // example
    auto* example = app.add_subcommand("example", "Run a built-in example");
    std::string example_name;
    ExampleOverrides ov;
    double nu = 0.0, omega = 0.0, accuracy = 0.0, t0 = 0.0, t1 = 0.0;
    int N = 0;
    std::string contour;
    example->add_option("name", example_name, "Example name")->required()->check(CLI::IsMember(example_names()));
    auto* o_nu = example->add_option("--nu", nu, "Fractional order (replaces the example's list)");
    auto* o_omega = example->add_option("--omega", omega, "Forcing frequency (example1)");
    auto* o_acc = example->add_option("--accuracy", accuracy, "Target accuracy");
    auto* o_contour = example->add_option("--contour", contour, "Contour kind")->check(CLI::IsMember({"hyperbolic", "parabolic"}));
    auto* o_N = example->add_option("--N", N, "Fixed quadrature half-count (reference N for convergence)");
    auto* o_t0 = example->add_option("--t0", t0, "Start of the output time range");
    auto* o_t1 = example->add_option("--t1", t1, "End of the output time range");
    example->add_option("--out", out_dir, "Output directory");

    // curves
    auto* curves = app.add_subcommand("curves", "Region curves r*(theta, eps) for eps in {0, 1, 5, 10}");
    double c_nu = 1.0, c_M = 6.25;
    int c_count = 2000;
    std::string c_out;
    curves->add_option("--nu", c_nu, "Fractional order")->required();
    curves->add_option("--M", c_M, "max a/b (default gives 2 sqrt(M) = 5)");
    curves->add_option("--count", c_count, "Angles per curve");
    curves->add_option("--out", c_out, "Output CSV (default stdout)");

    // contour-dump
    auto* dump = app.add_subcommand("contour-dump", "Contour nodes and weights for a window");
    double d_nu = 0.64, d_M = 6.25, d_t0 = 1.0, d_t1 = 10.0, d_beta = 2.0, d_eta = 1e-10;
    int d_N = 32;
    std::string d_contour = "hyperbolic", d_out, d_config;
    dump->add_option("--config", d_config, "Take nu, M, window and contour from a config file")->check(CLI::ExistingFile);
    dump->add_option("--nu", d_nu, "Fractional order");
    dump->add_option("--M", d_M, "max a/b");
    dump->add_option("--t0", d_t0, "Window start");
    dump->add_option("--t1", d_t1, "Window end");
    dump->add_option("--N", d_N, "Quadrature half-count");
    dump->add_option("--beta", d_beta, "Hyperbolic beta");
    dump->add_option("--eta", d_eta, "Node accuracy used by the parabolic optimizer");
    dump->add_option("--contour", d_contour, "Contour kind")->check(CLI::IsMember({"hyperbolic", "parabolic"}));
    dump->add_option("--out", d_out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*solve) {
            return report(solve_config(load_config(config_path), out_dir));
        }
        if (*example) {
            if (*o_nu) ov.nu = nu;
            if (*o_omega) ov.omega = omega;
            if (*o_acc) ov.accuracy = accuracy;
            if (*o_contour) ov.contour = parse_contour_kind(contour);
            if (*o_N) ov.N = N;
            if (*o_t0) ov.t0 = t0;
            if (*o_t1) ov.t1 = t1;
            return report(run_example(example_name, ov, out_dir));
        }
        if (*curves) {
            emit(region_curves_table(c_nu, c_M, static_cast<std::size_t>(c_count)), c_out);
            return kExitCertified;
        }
        if (*dump) {
            SolverOptions opt;
            opt.contour = parse_contour_kind(d_contour);
            opt.beta = d_beta;
            BoundParams bp = bound_params(d_M, d_nu);
            TimeWindow win{d_t0, d_t1};
            if (!d_config.empty()) {
                const ProblemConfig c = load_config(d_config);
                const Problem prob = build_problem(c);
                bp = bound_params(prob.pencil);
                opt = solver_options(c);
                win = {c.t0, std::min(c.t1, c.t0 * opt.window_ratio)};
            }
            emit(contour_table(select_contour(bp, win, d_N, d_eta, opt)), d_out);
            return kExitCertified;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
