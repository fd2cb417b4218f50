// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hemi/cap_spectrum.hpp"
#include "hemi/fem.hpp"
#include "hemi/mesh.hpp"
#include "hemi/report_io.hpp"
#include "hemi/verifier.hpp"
#include "support/radial_fd.hpp"

using namespace hemi;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail.clear();
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string num(double v, const char* f = "%.3g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CorpusEntry {
    std::string name;
    DomainSpec spec;
    InequalityReport report;
};

std::vector<CorpusEntry> load_corpus() {
    std::vector<CorpusEntry> out;
    for (const auto& e : std::filesystem::directory_iterator(HEMI_CORPUS_DIR))
        if (e.path().extension() == ".txt") out.push_back({e.path().stem().string(), load_domain_spec(e.path()), {}});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

const CorpusEntry* find(const std::vector<CorpusEntry>& c, const std::string& name) {
    for (const auto& e : c)
        if (e.name == name) return &e;
    return nullptr;
}

Outcome hemisphere_exactness() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    for (int N : {2, 3, 4, 6, 10}) {
        const double mu = cap::mu1_cap(N, pi / 2).mu1;
        worst = std::max(worst, std::abs(mu - N));
        o.require(std::abs(mu - N) <= 1e-8, "N=" + std::to_string(N) + " mu1=" + num(mu, "%.12g"));
    }
    const double t = seconds_since(t0);
    o.require(t < 1.0, "runtime " + num(t) + " s");
    if (o.pass) o.detail = "max |mu1 - N| = " + num(worst) + ", " + num(t) + " s";
    return o;
}

Outcome hemisphere_zonal() {
    Outcome o;
    const double m2 = cap::solve_mode({2, pi / 2, 0}, 2)[1].mu;
    const double m3 = cap::solve_mode({3, pi / 2, 0}, 2)[1].mu;
    o.require(std::abs(m2 - 6.0) <= 1e-7, "N=2 mu_02=" + num(m2, "%.12g"));
    o.require(std::abs(m3 - 8.0) <= 1e-7, "N=3 mu_02=" + num(m3, "%.12g"));
    for (int N : {2, 3}) {
        const auto r = cap::mu1_cap(N, pi / 2);
        o.require(r.attained_by_l1 && r.mu_11 < r.mu_02, "mu1 not attained by l=1 for N=" + std::to_string(N));
    }
    if (o.pass) o.detail = "errors " + num(std::abs(m2 - 6.0)) + ", " + num(std::abs(m3 - 8.0));
    return o;
}

Outcome oracle_agreement() {
    Outcome o;
    double worst = 0;
    for (int N : {2, 3})
        for (double g : {pi / 6, pi / 4, pi / 3}) {
            const double shoot = cap::solve_mode({N, g, 1}, 1)[0].mu;
            const double ref = testing::radial_fd_extrapolated(N, g);
            const double rel = std::abs(shoot - ref) / ref;
            worst = std::max(worst, rel);
            o.require(rel <= 1e-6, "N=" + std::to_string(N) + " gamma=" + num(g) + " rel " + num(rel));
        }
    if (o.pass) o.detail = "max relative difference " + num(worst);
    return o;
}

Outcome cap_properties() {
    Outcome o;
    SweepOptions grid_opt;
    grid_opt.from = 0.1;
    grid_opt.to = pi / 2;
    grid_opt.steps = 50;
    const auto grid = sweep_grid(grid_opt);
    for (int N : {2, 3}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double g : grid) {
            const double mu = cap::mu1_cap(N, g).mu1;
            o.require(mu < prev, "not decreasing at N=" + std::to_string(N) + " gamma=" + num(g));
            if (g < pi / 2) o.require(mu > N, "mu1 <= N at gamma=" + num(g));
            prev = mu;
            const auto p = cap::solve_mode({N, g, 1}, 1)[0];
            for (std::size_t i = 0; i < p.theta_grid.size(); ++i)
                if (p.theta_grid[i] < g && !(p.y_prime_values[i] > 0.0)) {
                    o.require(false, "g' <= 0 at theta=" + num(p.theta_grid[i]) + " gamma=" + num(g));
                    break;
                }
        }
    }
    if (o.pass) o.detail = "50-point grid, N=2,3";
    return o;
}

Outcome profile_monotonicity() {
    Outcome o;
    double worst_fit = 0;
    for (int N : {2, 3}) {
        for (double g : {pi / 6, pi / 4, pi / 3, pi / 2}) {
            const auto p = cap::solve_mode({N, g, 1}, 1)[0];
            const auto rep = cap::check_lemma(cap::extend_profile(p, g), N, p.mu);
            const std::string where = " N=" + std::to_string(N) + " gamma=" + num(g);
            if (g < pi / 2) {
                o.require(rep.max_W < 0.0, "max W=" + num(rep.max_W) + where);
                o.require(rep.max_ratio_step < 0.0, "G/sin step " + num(rep.max_ratio_step) + where);
            } else {
                o.require(std::abs(rep.max_W) <= 1e-10, "W not zero" + where);
                o.require(std::abs(rep.max_ratio_step) <= 1e-10, "G/sin not flat" + where);
            }
            const double fit = std::abs(rep.fitted_cubic - rep.frobenius_a);
            worst_fit = std::max(worst_fit, fit);
            o.require(fit <= 1e-4, "cubic fit off by " + num(fit) + where);
            if (N == 2 && g == pi / 2)
                o.require(std::abs(rep.frobenius_a - 1.0 / 6.0) <= 1e-12, "a=" + num(rep.frobenius_a, "%.15g"));
        }
    }
    if (o.pass) o.detail = "max |a - fitted| = " + num(worst_fit);
    return o;
}

Outcome fem_convergence() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double gamma = pi / 3;
    const auto spec = parse_domain_spec("kind = cap\ndim = 2\ngamma = 1.0471975511965976\n");
    const double exact = cap::solve_mode({2, gamma, 1}, 1)[0].mu;
    auto mesh = build_mesh(spec, 0.08);
    std::vector<double> hs, errs;
    double gap_002 = 1, err_002 = 1;
    for (int level = 0; level <= 3; ++level) {
        if (level > 0) mesh = refine(mesh);
        const auto pairs = fem::neumann_spectrum(fem::assemble_s2(mesh), 3);
        const double e = std::abs(pairs.values[1] - exact) / exact;
        hs.push_back(mesh.h);
        errs.push_back(e);
        if (level == 2) {
            err_002 = e;
            gap_002 = std::abs(pairs.values[1] - pairs.values[2]) / pairs.values[1];
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double x = std::log(hs[i]), y = std::log(errs[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double t = seconds_since(t0);
    o.require(std::abs(order - 2.0) <= 0.3, "order " + num(order));
    o.require(err_002 < 1e-3, "error at h=0.02 " + num(err_002));
    o.require(gap_002 < 1e-3, "gap at h=0.02 " + num(gap_002));
    o.require(t < 60.0, "runtime " + num(t) + " s");
    if (o.pass)
        o.detail = "order " + num(order) + ", error(0.02) " + num(err_002) + ", gap(0.02) " + num(gap_002) + ", " +
                   num(t) + " s";
    return o;
}

Outcome axisymmetric() {
    Outcome o;
    const double gamma = pi / 3;
    const auto spec = parse_domain_spec("kind = cap\ndim = 3\ngamma = 1.0471975511965976\n");
    const double mu11 = cap::solve_mode({3, gamma, 1}, 1)[0].mu;
    const double mu02 = cap::solve_mode({3, gamma, 0}, 2)[1].mu;
    const auto mesh = build_mesh(spec, 0.02);
    const auto m0 = fem::neumann_spectrum(fem::assemble_s3_axisym(mesh, 0), 4).values;
    const auto m1 = fem::neumann_spectrum(fem::assemble_s3_axisym(mesh, 1), 2).values;
    auto nearest = [](const std::vector<double>& v, double x) {
        double best = std::numeric_limits<double>::infinity();
        for (double y : v) best = std::min(best, std::abs(y - x) / x);
        return best;
    };
    const double e02 = nearest(m0, mu02);
    const double e11_m0 = nearest(m0, mu11);
    const double e11_m1 = std::abs(m1[0] - mu11) / mu11;
    o.require(e02 <= 1e-3, "m=0 misses mu_02 (" + num(e02) + ")");
    o.require(e11_m0 <= 1e-3, "m=0 misses mu_11 (" + num(e11_m0) + ")");
    o.require(e11_m1 <= 1e-3, "m=1 misses mu_11 (" + num(e11_m1) + ")");
    if (o.pass) o.detail = "rel errors mu_02 " + num(e02) + ", mu_11 " + num(e11_m0) + " (m=0) " + num(e11_m1) + " (m=1)";
    return o;
}

Outcome main_theorem(std::vector<CorpusEntry>& corpus, double& seconds) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    VerifyOptions opt;
    opt.h = 0.04;
    opt.refinements = 1;
    opt.proof_steps = true;
    double min_noncap = std::numeric_limits<double>::infinity(), max_cap = 0;
    for (auto& e : corpus) {
        try {
            e.report = verify_domain(e.spec, opt);
        } catch (const std::exception& ex) {
            o.require(false, e.name + ": " + ex.what());
            continue;
        }
        const double m = e.report.margin;
        o.require(m >= -1e-3, e.name + " margin " + num(m));
        if (e.spec.is_geodesic_ball()) {
            o.require(std::abs(m) <= 1e-3, e.name + " |margin| " + num(m));
            max_cap = std::max(max_cap, std::abs(m));
        } else {
            o.require(m > 0.0, e.name + " margin " + num(m));
            min_noncap = std::min(min_noncap, m);
        }
    }
    auto margin_of = [&](const char* name) {
        const auto* e = find(corpus, name);
        return e ? e->report.margin : std::nan("");
    };
    const double w2a = margin_of("s2_wave2_a"), w2b = margin_of("s2_wave2_b"), w2c = margin_of("s2_wave2_c");
    const double w3a = margin_of("s2_wave3_a"), w3b = margin_of("s2_wave3_b");
    o.require(w2a < w2b && w2b < w2c, "wave2 margins not ordered by amplitude");
    o.require(w3a < w3b, "wave3 margins not ordered by amplitude");
    // second order in the amplitude: halving it should cut the margin by well over half
    o.require(w2a < 0.5 * w2b && w2b < 0.5 * w2c, "wave2 margins do not shrink toward 0");
    seconds = seconds_since(t0);
    o.require(corpus.size() == 20, "corpus has " + std::to_string(corpus.size()) + " domains");
    o.require(seconds < 300.0, "runtime " + num(seconds) + " s");
    if (o.pass)
        o.detail = std::to_string(corpus.size()) + " domains, max |cap margin| " + num(max_cap) + ", min non-cap margin " +
                   num(min_noncap) + ", " + num(seconds) + " s";
    return o;
}

Outcome proof_steps(const std::vector<CorpusEntry>& corpus) {
    Outcome o;
    double worst_cap = 0, worst_balance = 0;
    for (const auto& e : corpus) {
        if (!e.report.proof) {
            o.require(false, e.name + ": no proof-step record");
            continue;
        }
        const auto& p = *e.report.proof;
        o.require(p.holds_rearrangement, e.name + " rearrangement residual " + num(p.rearrangement_residual));
        o.require(p.holds_sin_weighted, e.name + " sin-weighted residual " + num(p.sin_weighted_residual));
        o.require(p.holds_mass, e.name + " mass residual " + num(p.mass_residual));
        if (e.spec.is_geodesic_ball()) {
            const double r = std::max(std::abs(p.sin_weighted_residual), std::abs(p.mass_residual));
            worst_cap = std::max(worst_cap, r);
            o.require(r <= 1e-6, e.name + " cap equality off by " + num(r));
        }
        if (e.spec.dim == 2) {
            worst_balance = std::max(worst_balance, p.balance.residual / p.balance.scale);
            o.require(p.balance.residual < 1e-8 * p.balance.scale,
                      e.name + " balance residual " + num(p.balance.residual));
        }
    }
    if (o.pass)
        o.detail = "cap equality within " + num(worst_cap) + ", max balance residual / scale " + num(worst_balance);
    return o;
}

std::string corpus_csv(const std::vector<InequalityReport>& reports) {
    std::ostringstream s;
    s << io::report_csv_header() << '\n';
    for (const auto& r : reports) s << io::report_csv_row(r) << '\n';
    return s.str();
}

Outcome solver_hygiene(const std::vector<CorpusEntry>& corpus) {
    Outcome o;
    int compared = 0, solved = 0;
    double worst_rel = 0, worst_res = 0;
    auto check_system = [&](const std::string& tag, const fem::AssembledSystem& sys, int count) {
        count = std::min<int>(count, static_cast<int>(sys.n));
        const auto lz = fem::neumann_spectrum(sys, count);
        ++solved;
        for (double r : lz.residuals) {
            worst_res = std::max(worst_res, r);
            o.require(r <= 1e-8, tag + " residual " + num(r));
        }
        if (sys.n > 3000) return;
        fem::SpectrumOptions dense;
        dense.solver = fem::SolverKind::dense;
        const auto dn = fem::neumann_spectrum(sys, count, dense);
        ++compared;
        // the zero of the constant mode is measured against mu_1
        const bool kernel = sys.has_constant_kernel();
        for (int j = 0; j < count; ++j) {
            const double ref = kernel && j == 0 ? std::abs(dn.values[1]) : std::abs(dn.values[j]);
            const double rel = std::abs(lz.values[j] - dn.values[j]) / ref;
            worst_rel = std::max(worst_rel, rel);
            o.require(rel <= 1e-8, tag + " value " + std::to_string(j) + " rel " + num(rel));
        }
    };
    for (const auto& e : corpus) {
        for (double h : {0.08, 0.04, 0.02}) {
            const auto mesh = build_mesh(e.spec, h);
            const std::string tag = e.name + "@" + num(h);
            if (e.spec.dim == 2) {
                check_system(tag, fem::assemble_s2(mesh), 5);
            } else {
                check_system(tag + "/m0", fem::assemble_s3_axisym(mesh, 0), 4);
                check_system(tag + "/m1", fem::assemble_s3_axisym(mesh, 1), 3);
                check_system(tag + "/m2", fem::assemble_s3_axisym(mesh, 2), 2);
            }
        }
    }

    // determinism: the corpus CSV again, and a sweep on one and several threads
    std::vector<InequalityReport> first, second;
    VerifyOptions opt;
    opt.h = 0.04;
    opt.proof_steps = true;
    for (const auto& e : corpus) first.push_back(e.report);
    for (const auto& e : corpus) second.push_back(verify_domain(e.spec, opt));
    o.require(corpus_csv(first) == corpus_csv(second), "corpus CSV differs between runs");

    SweepOptions sw;
    sw.parameter = "eps2";
    sw.from = 0.0;
    sw.to = 0.2;
    sw.steps = 4;
    sw.verify.h = 0.06;
    const auto family = parse_domain_spec("kind = perturbed_cap\ndim = 2\ngamma = 0.78539816339744831\neps2 = 0\n");
    std::ostringstream a, b;
    sw.threads = 1;
    io::write_sweep_csv(a, sweep(family, sw), sw.parameter, false);
    sw.threads = 4;
    io::write_sweep_csv(b, sweep(family, sw), sw.parameter, false);
    o.require(a.str() == b.str(), "sweep CSV depends on the thread count");

    if (o.pass)
        o.detail = std::to_string(compared) + " dense comparisons (max rel " + num(worst_rel) + "), " +
                   std::to_string(solved) + " systems (max residual " + num(worst_res) + "), CSV bit-identical";
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* title, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };

    report(1, "hemisphere exactness", hemisphere_exactness);
    report(2, "hemisphere second zonal mode", hemisphere_zonal);
    report(3, "finite-difference oracle agreement", oracle_agreement);
    report(4, "cap eigenvalue properties", cap_properties);
    report(5, "profile monotonicity", profile_monotonicity);
    report(6, "FEM convergence", fem_convergence);
    report(7, "axisymmetric cross-check", axisymmetric);

    std::vector<CorpusEntry> corpus;
    double corpus_seconds = 0;
    report(8, "main inequality on the corpus", [&] {
        corpus = load_corpus();
        return main_theorem(corpus, corpus_seconds);
    });
    report(9, "proof steps on the corpus", [&] { return proof_steps(corpus); });
    report(10, "solver hygiene", [&] { return solver_hygiene(corpus); });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
