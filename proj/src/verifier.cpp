#include "hemi/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "hemi/errors.hpp"
#include "quadrature.hpp"

namespace hemi {

namespace {

using integrals::Mat3;
using integrals::RadialPrimitive;
using stereo::Vec3;

Vec3 normalized(const Vec3& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(n > 0.0)) throw SolverError("balancing: zero direction");
    return {v[0] / n, v[1] / n, v[2] / n};
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

RadialPrimitive primitive_of(const cap::ExtendedProfile& G, int power, double (*f)(const cap::ExtendedProfile&, double)) {
    return RadialPrimitive([&G, f](double t) { return f(G, t); }, power, {G.gamma()});
}

double f_G(const cap::ExtendedProfile& G, double t) { return G.value(t); }
double f_G2(const cap::ExtendedProfile& G, double t) {
    const double g = G.value(t);
    return g * g;
}
double f_G2_over_sin2(const cap::ExtendedProfile& G, double t) {
    const double r = G.value(t) / std::sin(t);
    return r * r;
}
double f_Gprime2(const cap::ExtendedProfile& G, double t) {
    if (t > G.gamma()) return 0.0;
    const double d = G.slope(t);
    return d * d;
}

/// Integrals of Phi_1, Phi_2 over a dim 2 domain after rotating q to the pole.
std::vector<double> phi_integrals(const BoundaryCurve& curve, const RadialPrimitive& HG, const Rotation& rot) {
    const Mat3 R = rot.matrix();
    return {integrals::surface_integral(curve, R, HG, [](double psi) { return std::cos(psi); }),
            integrals::surface_integral(curve, R, HG, [](double psi) { return std::sin(psi); })};
}

int status_of(const InequalityReport& r) { return r.passed ? 0 : 1; }

}  // namespace

// ------------------------------------------------------------------ rotation

Rotation Rotation::to_pole(const Vec3& q, int dim) {
    const Vec3 u = normalized(q);
    return Rotation{dim, std::atan2(std::hypot(u[0], u[1]), u[2]), std::atan2(u[1], u[0])};
}

Vec3 Rotation::pole() const {
    return {std::sin(colatitude) * std::cos(longitude), std::sin(colatitude) * std::sin(longitude), std::cos(colatitude)};
}

Mat3 Rotation::matrix() const {
    // R_z(b) R_y(-a) R_z(-b)
    const double ca = std::cos(colatitude), sa = std::sin(colatitude);
    const double cb = std::cos(longitude), sb = std::sin(longitude);
    const Mat3 rz_back{{{cb, -sb, 0.0}, {sb, cb, 0.0}, {0.0, 0.0, 1.0}}};
    const Mat3 ry{{{ca, 0.0, -sa}, {0.0, 1.0, 0.0}, {sa, 0.0, ca}}};
    const Mat3 rz{{{cb, sb, 0.0}, {-sb, cb, 0.0}, {0.0, 0.0, 1.0}}};
    auto mul = [](const Mat3& A, const Mat3& B) {
        Mat3 C{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) C[i][j] += A[i][k] * B[k][j];
        return C;
    };
    return mul(rz_back, mul(ry, rz));
}

Vec3 Rotation::apply(const Vec3& x) const {
    const Mat3 R = matrix();
    Vec3 y{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) y[i] += R[i][j] * x[j];
    return y;
}

// ----------------------------------------------------------------- balancing

BalancingResult find_balancing_rotation(const DomainSpec& spec, const cap::ExtendedProfile& G) {
    if (spec.dim != 2) throw InputError("find_balancing_rotation: dim 2 domain required");
    spec.validate();
    const auto curve = make_boundary(spec);
    const RadialPrimitive HG = primitive_of(G, 1, f_G);

    BalancingResult out;
    const double volume = integrals::exact_volume(spec);
    out.scale = G.plateau() * volume;
    out.target = 1e-8 * out.scale;

    // centre of mass as the starting pole
    const Mat3 I = integrals::identity3();
    const RadialPrimitive Hs([](double t) { return std::sin(t); }, 1);
    const RadialPrimitive Hc([](double t) { return std::cos(t); }, 1);
    const Vec3 centroid{integrals::surface_integral(*curve, I, Hs, [](double p) { return std::cos(p); }),
                        integrals::surface_integral(*curve, I, Hs, [](double p) { return std::sin(p); }),
                        integrals::surface_integral(*curve, I, Hc, [](double) { return 1.0; })};

    auto evaluate = [&](const Vec3& q) { return phi_integrals(*curve, HG, Rotation::to_pole(q)); };
    auto chart = [](const Vec3& q, double u, double v) {
        // tangent frame at q
        Vec3 e1 = std::abs(q[2]) < 0.9 ? Vec3{-q[1], q[0], 0.0} : Vec3{q[2], 0.0, -q[0]};
        e1 = normalized(e1);
        const Vec3 e2{q[1] * e1[2] - q[2] * e1[1], q[2] * e1[0] - q[0] * e1[2], q[0] * e1[1] - q[1] * e1[0]};
        return normalized(Vec3{q[0] + u * e1[0] + v * e2[0], q[1] + u * e1[1] + v * e2[1], q[2] + u * e1[2] + v * e2[2]});
    };

    auto newton = [&](Vec3 q, int& steps) {
        std::vector<double> F = evaluate(q);
        for (int it = 0; it < 60 && norm(F) >= 1e-3 * out.target; ++it) {
            const double d = 1e-5;
            std::array<std::array<double, 2>, 2> J{};
            for (int c = 0; c < 2; ++c) {
                const auto Fp = evaluate(chart(q, c == 0 ? d : 0.0, c == 1 ? d : 0.0));
                const auto Fm = evaluate(chart(q, c == 0 ? -d : 0.0, c == 1 ? -d : 0.0));
                for (int r = 0; r < 2; ++r) J[r][c] = (Fp[r] - Fm[r]) / (2.0 * d);
            }
            const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            if (!(std::abs(det) > 0.0)) break;
            const double du = -(J[1][1] * F[0] - J[0][1] * F[1]) / det;
            const double dv = -(-J[1][0] * F[0] + J[0][0] * F[1]) / det;
            bool accepted = false;
            for (double lambda = 1.0; lambda > 1e-6; lambda *= 0.5) {
                const Vec3 qn = chart(q, lambda * du, lambda * dv);
                if (qn[2] <= 0.0) continue;
                const auto Fn = evaluate(qn);
                if (norm(Fn) < norm(F)) {
                    q = qn;
                    F = Fn;
                    accepted = true;
                    break;
                }
            }
            ++steps;
            if (!accepted) break;
        }
        return std::make_pair(q, F);
    };

    int steps = 0;
    auto [q, F] = newton(normalized(centroid), steps);
    if (norm(F) >= out.target) {
        out.used_grid_search = true;
        double best = std::numeric_limits<double>::infinity();
        Vec3 best_q = q;
        for (int a = 0; a < 32; ++a)
            for (int b = 0; b < 32; ++b) {
                const double col = (a + 0.5) * (0.5 * std::numbers::pi) / 32.0;
                const double lon = b * 2.0 * std::numbers::pi / 32.0;
                const Vec3 c{std::sin(col) * std::cos(lon), std::sin(col) * std::sin(lon), std::cos(col)};
                const double r = norm(evaluate(c));
                if (r < best) {
                    best = r;
                    best_q = c;
                }
            }
        auto [q2, F2] = newton(best_q, steps);
        if (norm(F2) < norm(F)) {
            q = q2;
            F = F2;
        }
    }
    out.rotation = Rotation::to_pole(q, 2);
    out.integrals = F;
    out.residual = norm(F);
    out.newton_steps = steps;
    out.success = out.residual < out.target;
    return out;
}

BalancingResult revolution_balance(const DomainSpec& spec, const cap::ExtendedProfile& G) {
    if (spec.dim != 3) throw InputError("revolution_balance: dim 3 domain required");
    const RadialPrimitive HG = primitive_of(G, 2, f_G);
    BalancingResult out;
    out.rotation = Rotation::identity(3);
    out.scale = G.plateau() * integrals::exact_volume(spec);
    out.target = 1e-8 * out.scale;
    // the azimuthal components vanish identically by symmetry
    out.integrals = {integrals::revolution_integral(spec, HG, [](double phi) { return std::cos(phi); }), 0.0, 0.0};
    out.residual = norm(out.integrals);
    out.success = out.residual < out.target;
    return out;
}

// ---------------------------------------------------------------- proof steps

ProofStepReport check_proof_steps(const DomainSpec& spec, const cap::ExtendedProfile& G, const std::vector<double>& mu,
                                  const EigenfunctionData& ef) {
    spec.validate();
    const int N = spec.dim;
    if (static_cast<int>(mu.size()) < N + 1) throw InputError("check_proof_steps: need mu_0..mu_N");
    for (int i = 1; i <= N; ++i)
        if (!(mu[i] > 0.0)) throw SolverError("check_proof_steps: non-positive eigenvalue");

    ProofStepReport rep;
    rep.balance = N == 2 ? find_balancing_rotation(spec, G) : revolution_balance(spec, G);
    const auto curve = make_boundary(spec);
    const Mat3 R = rep.balance.rotation.matrix();
    const double gamma = G.gamma();

    const RadialPrimitive H_G2 = primitive_of(G, N - 1, f_G2);
    const RadialPrimitive H_G2s = primitive_of(G, N - 1, f_G2_over_sin2);
    const RadialPrimitive H_Gp2 = primitive_of(G, N - 1, f_Gprime2);

    auto over_omega = [&](const RadialPrimitive& H, const std::function<double(double)>& a) {
        return N == 2 ? integrals::surface_integral(*curve, R, H, a) : integrals::revolution_integral(spec, H, a);
    };
    auto one = [](double) { return 1.0; };

    rep.omega_G2_over_sin2 = over_omega(H_G2s, one);
    rep.cap_g2_over_sin2 = integrals::cap_integral(N, gamma, H_G2s);
    rep.sin_weighted_residual = rep.omega_G2_over_sin2 - rep.cap_g2_over_sin2;
    rep.omega_G2 = over_omega(H_G2, one);
    rep.cap_g2 = integrals::cap_integral(N, gamma, H_G2);
    rep.mass_residual = rep.omega_G2 - rep.cap_g2;
    rep.cap_gprime2 = integrals::cap_integral(N, gamma, H_Gp2);

    const double slack_sin_weighted = 1e-9 * std::abs(rep.cap_g2_over_sin2);
    const double slack_mass = 1e-9 * std::abs(rep.cap_g2);
    rep.holds_sin_weighted = rep.sin_weighted_residual <= slack_sin_weighted;
    rep.holds_mass = rep.mass_residual >= -slack_mass;

    double sum_N = 0.0, sum_Nm1 = 0.0;
    for (int i = 1; i <= N; ++i) sum_N += 1.0 / mu[i];
    for (int i = 1; i < N; ++i) sum_Nm1 += 1.0 / mu[i];
    rep.energy_lhs = rep.omega_G2;
    rep.energy_rhs = sum_N / N * rep.cap_gprime2 + sum_Nm1 * rep.omega_G2_over_sin2;

    // pointwise rearrangement over unit directions x / s
    double worst = -std::numeric_limits<double>::infinity();
    constexpr int kDir = 360;
    if (N == 2) {
        for (int k = 0; k < kDir; ++k) {
            const double psi = 2.0 * std::numbers::pi * k / kDir;
            const double c = std::cos(psi), s = std::sin(psi);
            worst = std::max(worst, 1.0 / mu[2] - (c * c / mu[1] + s * s / mu[2]));
        }
    } else {
        for (int a = 0; a <= kDir / 2; ++a) {
            const double phi = std::numbers::pi * a / (kDir / 2);
            for (int b = 0; b < kDir; ++b) {
                const double psi = 2.0 * std::numbers::pi * b / kDir;
                const double w1 = std::cos(phi) * std::cos(phi);
                const double w2 = std::sin(phi) * std::sin(phi) * std::cos(psi) * std::cos(psi);
                const double w3 = std::sin(phi) * std::sin(phi) * std::sin(psi) * std::sin(psi);
                worst = std::max(worst, 1.0 / mu[3] - (w1 / mu[1] + w2 / mu[2] + w3 / mu[3]));
            }
        }
    }
    rep.rearrangement_residual = worst;
    rep.holds_rearrangement = worst <= 1e-14 / mu[1];

    // per-direction test-function bounds
    std::vector<std::function<double(double)>> weights;
    if (N == 2) {
        weights.push_back([](double psi) { return std::cos(psi) * std::cos(psi); });
        weights.push_back([](double psi) { return std::sin(psi) * std::sin(psi); });
    } else {
        weights.push_back([](double phi) { return std::cos(phi) * std::cos(phi); });
        weights.push_back([](double phi) { return 0.5 * std::sin(phi) * std::sin(phi); });
        weights.push_back([](double phi) { return 0.5 * std::sin(phi) * std::sin(phi); });
    }
    for (int i = 1; i <= N; ++i) {
        TestBound s;
        const auto& w = weights[i - 1];
        s.lhs = over_omega(H_G2, w);
        s.rhs = rep.cap_gprime2 / (N * mu[i]) + (rep.omega_G2_over_sin2 - over_omega(H_G2s, w)) / mu[i];
        rep.test_bounds.push_back(s);
    }

    if (N == 2 && ef.mesh && ef.system && ef.pairs) {
        const auto& mesh = *ef.mesh;
        const int nvec = static_cast<int>(ef.pairs->vectors.cols());
        const int jmax = std::min(N - 1, nvec - 1);
        std::vector<std::vector<double>> u;
        for (int j = 1; j <= jmax; ++j) u.push_back(ef.system->vertex_values(ef.pairs->vectors.col(j)));
        std::vector<std::vector<double>> dot(N, std::vector<double>(jmax, 0.0));
        std::vector<double> phi_norm(N, 0.0), u_norm(jmax, 0.0);
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            const auto& tri = mesh.triangles[t];
            const double area = mesh.triangle_area(t);
            for (const auto& q : detail::kSevenPointRule) {
                const double x = q.l1 * mesh.vertices[tri[0]][0] + q.l2 * mesh.vertices[tri[1]][0] + q.l3 * mesh.vertices[tri[2]][0];
                const double y = q.l1 * mesh.vertices[tri[0]][1] + q.l2 * mesh.vertices[tri[1]][1] + q.l3 * mesh.vertices[tri[2]][1];
                const double p = stereo::conformal_factor(std::hypot(x, y));
                const double w = area * q.w * p * p;
                const Vec3 Y = rep.balance.rotation.apply(stereo::to_sphere(x, y));
                const double rho = std::hypot(Y[0], Y[1]);
                const double theta = std::atan2(rho, Y[2]);
                const double g = G.value(theta);
                const std::array<double, 2> phi{rho > 0.0 ? g * Y[0] / rho : 0.0, rho > 0.0 ? g * Y[1] / rho : 0.0};
                for (int j = 0; j < jmax; ++j) {
                    const double uj = q.l1 * u[j][tri[0]] + q.l2 * u[j][tri[1]] + q.l3 * u[j][tri[2]];
                    u_norm[j] += w * uj * uj;
                    for (int i = 0; i < N; ++i) dot[i][j] += w * phi[i] * uj;
                }
                for (int i = 0; i < N; ++i) phi_norm[i] += w * phi[i] * phi[i];
            }
        }
        rep.orthogonality.assign(N, std::vector<double>(jmax, 0.0));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < jmax; ++j)
                rep.orthogonality[i][j] = std::abs(dot[i][j]) / std::sqrt(phi_norm[i] * u_norm[j]);
    }
    return rep;
}

// ------------------------------------------------------------------- spectra

std::vector<double> domain_spectrum(const DomainSpec& spec, const TriangleMesh& mesh, int count,
                                    const fem::SpectrumOptions& options) {
    if (spec.dim == 2) return fem::neumann_spectrum(fem::assemble_s2(mesh), count, options).values;
    std::vector<double> merged;
    for (int m = 0; m <= 2; ++m) {
        const auto sys = fem::assemble_s3_axisym(mesh, m);
        const int want = std::min<int>(m == 0 ? count : count / 2 + 1, static_cast<int>(sys.n));
        const auto sp = fem::neumann_spectrum(sys, want, options);
        for (double v : sp.values) {
            merged.push_back(v);
            if (m > 0) merged.push_back(v);  // modes +m and -m
        }
    }
    std::sort(merged.begin(), merged.end());
    if (static_cast<int>(merged.size()) < count) throw SolverError("domain_spectrum: unresolved spectrum");
    merged.resize(count);
    return merged;
}

InequalityReport verify_domain(const DomainSpec& spec, const VerifyOptions& options) {
    spec.validate();
    if (options.refinements < 0) throw InputError("verify: refinements must be non-negative");
    const int N = spec.dim;
    const int count = options.count > 0 ? options.count : N + 2;
    if (count < N + 1) throw InputError("verify: count must reach mu_N");

    InequalityReport rep;
    rep.dim = N;
    rep.kind = spec.kind;
    rep.domain_volume = integrals::exact_volume(spec);
    rep.equivalent_gamma = stereo::equivalent_radius(N, rep.domain_volume);

    TriangleMesh mesh = build_mesh(spec, options.h, options.mesh);
    std::optional<TriangleMesh> coarse;
    for (int r = 0; r < options.refinements; ++r) {
        coarse = mesh;
        mesh = refine(mesh);
    }
    rep.mesh_h = mesh.h;
    rep.refinements = options.refinements;
    rep.vertices = mesh.vertex_count();
    rep.mesh_volume = mesh_volume(mesh, spec).value;

    std::optional<fem::AssembledSystem> system;
    std::optional<eigen::EigenPairs> pairs;
    if (N == 2) {
        system = fem::assemble_s2(mesh);
        pairs = fem::neumann_spectrum(*system, count, options.spectrum);
        rep.fine_eigenvalues = pairs->values;
    } else {
        rep.fine_eigenvalues = domain_spectrum(spec, mesh, count, options.spectrum);
    }
    rep.eigenvalues = rep.fine_eigenvalues;
    if (coarse && options.extrapolate) {
        const auto c = domain_spectrum(spec, *coarse, count, options.spectrum);
        for (int i = 1; i < count; ++i) rep.eigenvalues[i] = (4.0 * rep.fine_eigenvalues[i] - c[i]) / 3.0;
        std::sort(rep.eigenvalues.begin() + 1, rep.eigenvalues.end());
    }
    for (int i = 1; i <= N; ++i)
        if (!(rep.eigenvalues[i] > 0.0)) throw SolverError("verify: non-positive eigenvalue beyond the constant mode");

    const auto capres = cap::mu1_cap(N, rep.equivalent_gamma);
    rep.mu1_cap = capres.mu1;
    rep.cap_attained_by_l1 = capres.attained_by_l1;
    for (int i = 1; i < N; ++i) rep.lhs += 1.0 / rep.eigenvalues[i];
    rep.rhs = (N - 1) / rep.mu1_cap;
    rep.margin = rep.lhs - rep.rhs;
    rep.harmonic_lhs = rep.lhs / (N - 1);
    rep.harmonic_rhs = 1.0 / rep.mu1_cap;
    rep.tolerance = std::max(1e-3, options.tolerance_constant * rep.mesh_h * rep.mesh_h);
    rep.passed = rep.margin >= -rep.tolerance;

    if (options.proof_steps) {
        const auto g = cap::solve_mode(cap::CapProblem{N, rep.equivalent_gamma, 1}, 1).front();
        const auto G = cap::extend_profile(g, rep.equivalent_gamma);
        EigenfunctionData ef;
        if (N == 2) {
            ef.mesh = &mesh;
            ef.system = &*system;
            ef.pairs = &*pairs;
        }
        rep.proof = check_proof_steps(spec, G, rep.eigenvalues, ef);
    }
    return rep;
}

// --------------------------------------------------------------------- sweep

std::vector<double> sweep_grid(const SweepOptions& options) {
    if (options.steps < 1) throw InputError("sweep: steps must be positive");
    if (!std::isfinite(options.from) || !std::isfinite(options.to)) throw InputError("sweep: non-finite range");
    std::vector<double> grid(options.steps);
    for (int k = 1; k <= options.steps; ++k)
        grid[k - 1] = k == options.steps ? options.to : options.from + (options.to - options.from) * k / options.steps;
    return grid;
}

std::vector<SweepRow> sweep(const DomainSpec& family, const SweepOptions& options) {
    const auto grid = sweep_grid(options);
    if (options.cap_only && options.parameter != "gamma") throw InputError("sweep: cap-only sweeps vary gamma");
    {
        DomainSpec probe = family;
        probe.set_parameter(options.parameter, grid.front());  // rejects unknown names up front
    }
    std::vector<SweepRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            SweepRow& row = rows[k];
            row.index = static_cast<int>(k);
            row.value = grid[k];
            try {
                DomainSpec spec = family;
                spec.set_parameter(options.parameter, grid[k]);
                if (options.cap_only) {
                    row.cap = cap::mu1_cap(spec.dim, spec.gamma);
                } else {
                    row.report = verify_domain(spec, options.verify);
                    row.status = status_of(*row.report);
                }
            } catch (const InputError& e) {
                row.status = 2;
                row.error = e.what();
            } catch (const std::exception& e) {
                row.status = 3;
                row.error = e.what();
            }
        }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace hemi
