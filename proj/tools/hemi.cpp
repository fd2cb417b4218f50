// Command-line front end: cap spectra, domain spectra, inequality verification and sweeps.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hemi/cap_spectrum.hpp"
#include "hemi/errors.hpp"
#include "hemi/fem.hpp"
#include "hemi/mesh.hpp"
#include "hemi/report_io.hpp"
#include "hemi/verifier.hpp"

namespace {

enum Exit { kPass = 0, kMarginFail = 1, kInputError = 2, kSolverFailure = 3 };

struct CapArgs {
    int dim = 2;
    double gamma = 1.5707963267948966;
    int l = 1;
    int kmax = 1;
};

struct SolveArgs {
    std::string spec;
    double h = 0.05;
    int count = 6;
    int refinements = 0;
    bool dense = false;
    std::string export_mesh;
    std::string export_matrices;
};

struct VerifyArgs {
    std::string spec;
    double h = 0.04;
    int refinements = 1;
    bool proof_steps = false;
    bool no_extrapolate = false;
    double tolerance_constant = 1.0;
    std::string csv;
};

struct SweepArgs {
    std::string templ;
    std::string param;
    double from = 0.0;
    double to = 1.0;
    int steps = 10;
    double h = 0.04;
    int refinements = 1;
    bool cap_only = false;
    unsigned threads = 0;
    std::string out;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw hemi::InputError("cannot open output file: " + path);
    return f;
}

int run_cap(const CapArgs& a) {
    const auto pairs = hemi::cap::solve_mode(hemi::cap::CapProblem{a.dim, a.gamma, a.l}, a.kmax);
    hemi::io::write_cap_table(std::cout, pairs);
    const auto mu1 = hemi::cap::mu1_cap(a.dim, a.gamma);
    std::cout << "mu1_cap=" << hemi::io::fmt(mu1.mu1) << '\n';
    std::cout << "attained_by_l1=" << (mu1.attained_by_l1 ? "true" : "false") << '\n';
    if (mu1.warning) std::cout << "warning=" << *mu1.warning << '\n';
    return kPass;
}

int run_solve(const SolveArgs& a) {
    const auto spec = hemi::load_domain_spec(a.spec);
    auto mesh = hemi::build_mesh(spec, a.h);
    for (int r = 0; r < a.refinements; ++r) mesh = hemi::refine(mesh);
    if (!a.export_mesh.empty()) hemi::write_mesh(a.export_mesh, mesh);
    hemi::fem::SpectrumOptions opts;
    if (a.dense) opts.solver = hemi::fem::SolverKind::dense;

    std::vector<double> values;
    if (spec.dim == 2) {
        const auto sys = hemi::fem::assemble_s2(mesh);
        if (!a.export_matrices.empty()) {
            hemi::fem::write_matrix(a.export_matrices + "_K.txt", sys.stiffness);
            hemi::fem::write_matrix(a.export_matrices + "_M.txt", sys.mass);
        }
        values = hemi::fem::neumann_spectrum(sys, a.count, opts).values;
    } else {
        if (!a.export_matrices.empty()) {
            const auto sys = hemi::fem::assemble_s3_axisym(mesh, 0);
            hemi::fem::write_matrix(a.export_matrices + "_K.txt", sys.stiffness);
            hemi::fem::write_matrix(a.export_matrices + "_M.txt", sys.mass);
        }
        values = hemi::domain_spectrum(spec, mesh, a.count, opts);
    }
    std::cout << "vertices=" << mesh.vertex_count() << '\n';
    std::cout << "triangles=" << mesh.triangle_count() << '\n';
    std::cout << "mesh_h=" << hemi::io::fmt(mesh.h) << '\n';
    std::cout << "index,mu\n";
    for (std::size_t i = 0; i < values.size(); ++i) std::cout << i << ',' << hemi::io::fmt(values[i]) << '\n';
    return kPass;
}

int run_verify(const VerifyArgs& a) {
    const auto spec = hemi::load_domain_spec(a.spec);
    hemi::VerifyOptions opts;
    opts.h = a.h;
    opts.refinements = a.refinements;
    opts.proof_steps = a.proof_steps;
    opts.extrapolate = !a.no_extrapolate;
    opts.tolerance_constant = a.tolerance_constant;
    const auto report = hemi::verify_domain(spec, opts);
    hemi::io::write_report(std::cout, report);
    if (!a.csv.empty()) {
        auto f = open_output(a.csv);
        f << hemi::io::report_csv_header() << '\n' << hemi::io::report_csv_row(report) << '\n';
    }
    return report.passed ? kPass : kMarginFail;
}

int run_sweep(const SweepArgs& a) {
    const auto family = hemi::load_domain_spec(a.templ);
    hemi::SweepOptions opts;
    opts.parameter = a.param;
    opts.from = a.from;
    opts.to = a.to;
    opts.steps = a.steps;
    opts.cap_only = a.cap_only;
    opts.threads = a.threads;
    opts.verify.h = a.h;
    opts.verify.refinements = a.refinements;
    const auto rows = hemi::sweep(family, opts);
    {
        auto f = open_output(a.out);
        hemi::io::write_sweep_csv(f, rows, a.param, a.cap_only);
    }
    int code = kPass;
    for (const auto& row : rows) {
        if (row.status != 0) std::cerr << "row " << row.index << ": status " << row.status << ' ' << row.error << '\n';
        code = std::max(code, row.status);
    }
    std::cout << "rows=" << rows.size() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neumann eigenvalues of hemisphere domains and the harmonic-mean inequality"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CapArgs cap;
    auto* c = app.add_subcommand("cap-spectrum", "radial eigenvalues mu_{l,k} of a geodesic cap");
    c->add_option("--dim", cap.dim, "sphere dimension N")->required();
    c->add_option("--gamma", cap.gamma, "cap radius in radians")->required();
    c->add_option("--l", cap.l, "angular mode");
    c->add_option("--kmax", cap.kmax, "number of radial modes");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "FEM eigenvalues of a domain");
    s->add_option("--spec", solve.spec, "domain spec file")->required();
    s->add_option("--h", solve.h, "target edge length")->required();
    s->add_option("--count", solve.count, "number of eigenvalues")->required();
    s->add_option("--refinements", solve.refinements, "uniform refinements after meshing");
    s->add_option("--export-mesh", solve.export_mesh, "write the mesh to this path");
    s->add_option("--export-matrices", solve.export_matrices, "write K and M with this path prefix");
    s->add_flag("--dense", solve.dense, "use the dense solver");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "check the inequality for one domain");
    v->add_option("--spec", verify.spec, "domain spec file")->required();
    v->add_option("--h", verify.h, "target edge length")->required();
    v->add_option("--refinements", verify.refinements, "uniform refinements (default 1)");
    v->add_flag("--proof-steps", verify.proof_steps, "also check the intermediate estimates");
    v->add_flag("--no-extrapolate", verify.no_extrapolate, "report finest-mesh eigenvalues");
    v->add_option("--tolerance-constant", verify.tolerance_constant, "C in max(1e-3, C h^2)");
    v->add_option("--csv", verify.csv, "also write a one-row CSV");

    SweepArgs sweep;
    auto* w = app.add_subcommand("sweep", "verify a one-parameter family");
    w->add_option("--template", sweep.templ, "domain spec file")->required();
    w->add_option("--param", sweep.param, "parameter name")->required();
    w->add_option("--from", sweep.from, "range start (excluded)")->required();
    w->add_option("--to", sweep.to, "range end (included)")->required();
    w->add_option("--steps", sweep.steps, "number of grid values")->required();
    w->add_option("--h", sweep.h, "target edge length");
    w->add_option("--refinements", sweep.refinements, "uniform refinements");
    w->add_option("--threads", sweep.threads, "worker threads (0: all cores)");
    w->add_flag("--cap-only", sweep.cap_only, "only mu_1 of the cap with the swept gamma");
    w->add_option("--out", sweep.out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInputError;
    }

    try {
        if (*c) return run_cap(cap);
        if (*s) return run_solve(solve);
        if (*v) return run_verify(verify);
        if (*w) return run_sweep(sweep);
    } catch (const hemi::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const hemi::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kInputError;
}
