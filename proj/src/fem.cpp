#include "hemi/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "hemi/errors.hpp"
#include "quadrature.hpp"

namespace hemi::fem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// fixed chunking keeps the floating-point summation order independent of the thread count
constexpr std::size_t kChunks = 16;

struct Element {
    std::array<int, 3> v;
    std::array<Vec2, 3> x;
    double area;
    std::array<double, 3> gx, gy;  // gradients of the barycentric functions
};

Element make_element(const TriangleMesh& mesh, std::size_t t) {
    Element e;
    e.v = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) e.x[i] = mesh.vertices[e.v[i]];
    const double x1 = e.x[0][0], y1 = e.x[0][1];
    const double x2 = e.x[1][0], y2 = e.x[1][1];
    const double x3 = e.x[2][0], y3 = e.x[2][1];
    const double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
    e.area = 0.5 * det;
    if (!(e.area >= 1e-14)) throw InputError("fem: degenerate or inverted triangle " + std::to_string(t));
    e.gx = {(y2 - y3) / det, (y3 - y1) / det, (y1 - y2) / det};
    e.gy = {(x3 - x2) / det, (x1 - x3) / det, (x2 - x1) / det};
    return e;
}

template <typename LocalFn>
void assemble(const TriangleMesh& mesh, LocalFn&& local, Triplets& K, Triplets& M) {
    const std::size_t nt = mesh.triangle_count();
    std::vector<Triplets> kc(kChunks), mc(kChunks);
    std::vector<std::string> errors(kChunks);
    auto work = [&](std::size_t c) {
        try {
            const std::size_t lo = nt * c / kChunks, hi = nt * (c + 1) / kChunks;
            kc[c].reserve(9 * (hi - lo));
            mc[c].reserve(9 * (hi - lo));
            for (std::size_t t = lo; t < hi; ++t) {
                const Element e = make_element(mesh, t);
                std::array<std::array<double, 3>, 3> ke{}, me{};
                local(e, ke, me);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        kc[c].emplace_back(e.v[i], e.v[j], ke[i][j]);
                        mc[c].emplace_back(e.v[i], e.v[j], me[i][j]);
                    }
            }
        } catch (const std::exception& ex) {
            errors[c] = ex.what();
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, kChunks);
    if (threads <= 1 || nt < 4096) {
        for (std::size_t c = 0; c < kChunks; ++c) work(c);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < kChunks; c += threads) work(c);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw InputError(err);
    for (std::size_t c = 0; c < kChunks; ++c) {
        K.insert(K.end(), kc[c].begin(), kc[c].end());
        M.insert(M.end(), mc[c].begin(), mc[c].end());
    }
}

AssembledSystem finish(const TriangleMesh& mesh, const Triplets& K, const Triplets& M, std::vector<char> fixed,
                       std::optional<int> mode) {
    AssembledSystem sys;
    sys.vertex_count = mesh.vertex_count();
    sys.mode_m = mode;
    sys.vertex_to_dof.assign(sys.vertex_count, -1);
    for (std::size_t v = 0; v < sys.vertex_count; ++v) {
        if (fixed[v]) continue;
        sys.vertex_to_dof[v] = static_cast<int>(sys.dof_to_vertex.size());
        sys.dof_to_vertex.push_back(static_cast<int>(v));
    }
    sys.n = sys.dof_to_vertex.size();
    if (sys.n == 0) throw InputError("fem: no free unknowns");
    auto build = [&](const Triplets& in) {
        Triplets out;
        out.reserve(in.size());
        for (const auto& t : in) {
            const int r = sys.vertex_to_dof[t.row()], c = sys.vertex_to_dof[t.col()];
            if (r >= 0 && c >= 0) out.emplace_back(r, c, t.value());
        }
        eigen::SparseMatrix A(static_cast<Eigen::Index>(sys.n), static_cast<Eigen::Index>(sys.n));
        A.setFromTriplets(out.begin(), out.end());
        A.makeCompressed();
        return A;
    };
    sys.stiffness = build(K);
    sys.mass = build(M);
    return sys;
}

}  // namespace

std::vector<double> AssembledSystem::vertex_values(const Eigen::VectorXd& dofs) const {
    if (static_cast<std::size_t>(dofs.size()) != n) throw InputError("vertex_values: size mismatch");
    std::vector<double> out(vertex_count, 0.0);
    for (std::size_t d = 0; d < n; ++d) out[dof_to_vertex[d]] = dofs[static_cast<Eigen::Index>(d)];
    return out;
}

AssembledSystem assemble_s2(const TriangleMesh& mesh) {
    if (mesh.triangle_count() == 0) throw InputError("assemble_s2: empty mesh");
    Triplets K, M;
    assemble(
        mesh,
        [](const Element& e, auto& ke, auto& me) {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) ke[i][j] = e.area * (e.gx[i] * e.gx[j] + e.gy[i] * e.gy[j]);
            for (const auto& q : detail::kMidEdgeRule) {
                const std::array<double, 3> phi{q.l1, q.l2, q.l3};
                const double x = q.l1 * e.x[0][0] + q.l2 * e.x[1][0] + q.l3 * e.x[2][0];
                const double y = q.l1 * e.x[0][1] + q.l2 * e.x[1][1] + q.l3 * e.x[2][1];
                const double p = stereo::conformal_factor(std::hypot(x, y));
                const double w = e.area * q.w * p * p;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) me[i][j] += w * phi[i] * phi[j];
            }
        },
        K, M);
    return finish(mesh, K, M, std::vector<char>(mesh.vertex_count(), 0), std::nullopt);
}

AssembledSystem assemble_s3_axisym(const TriangleMesh& mesh, int mode_m) {
    if (mode_m < 0) throw InputError("assemble_s3_axisym: mode must be non-negative");
    if (mesh.triangle_count() == 0) throw InputError("assemble_s3_axisym: empty mesh");
    const double m2 = static_cast<double>(mode_m) * mode_m;
    Triplets K, M;
    assemble(
        mesh,
        [m2](const Element& e, auto& ke, auto& me) {
            for (const auto& q : detail::kSevenPointRule) {
                const std::array<double, 3> phi{q.l1, q.l2, q.l3};
                const double th = q.l1 * e.x[0][0] + q.l2 * e.x[1][0] + q.l3 * e.x[2][0];
                const double ph = q.l1 * e.x[0][1] + q.l2 * e.x[1][1] + q.l3 * e.x[2][1];
                const double st = std::sin(th), sp = std::sin(ph);
                const double w = e.area * q.w;
                const double wt = w * st * st * sp;  // theta derivatives and mass
                const double wp = w * sp;            // phi derivatives
                const double wm = m2 > 0.0 ? w * m2 / sp : 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        ke[i][j] += wt * e.gx[i] * e.gx[j] + wp * e.gy[i] * e.gy[j] + wm * phi[i] * phi[j];
                        me[i][j] += wt * phi[i] * phi[j];
                    }
            }
        },
        K, M);
    std::vector<char> fixed(mesh.vertex_count(), 0);
    if (mode_m >= 1)
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
            if (std::abs(std::sin(mesh.vertices[v][1])) < 1e-12) fixed[v] = 1;
    return finish(mesh, K, M, std::move(fixed), mode_m);
}

eigen::EigenPairs neumann_spectrum(const AssembledSystem& system, int count, const SpectrumOptions& options) {
    if (count < 1) throw InputError("neumann_spectrum: count must be positive");
    if (static_cast<std::size_t>(count) > system.n) throw InputError("neumann_spectrum: count exceeds the unknowns");
    if (options.solver == SolverKind::dense) return eigen::dense_generalized(system.stiffness, system.mass, count);
    if (!system.has_constant_kernel()) return eigen::lanczos_shift_invert(system.stiffness, system.mass, count, options.lanczos);

    const auto projector = eigen::deflate_constants(system.stiffness, system.mass);
    eigen::EigenPairs out;
    out.values.push_back(0.0);
    out.vectors = projector.constant();
    if (count > 1) {
        auto opts = options.lanczos;
        opts.deflation = &projector;
        auto rest = eigen::lanczos_shift_invert(system.stiffness, system.mass, count - 1, opts);
        Eigen::MatrixXd V(static_cast<Eigen::Index>(system.n), count);
        V << projector.constant(), rest.vectors;
        out.vectors = V;
        out.values.insert(out.values.end(), rest.values.begin(), rest.values.end());
        out.iterations = rest.iterations;
    }
    out.residuals = eigen::generalized_residuals(system.stiffness, system.mass, out.values, out.vectors);
    return out;
}

MeshLocator::MeshLocator(const TriangleMesh& mesh) : mesh_(mesh) {
    if (mesh.vertex_count() == 0) throw InputError("MeshLocator: empty mesh");
    double x1 = mesh.vertices[0][0], y1 = mesh.vertices[0][1];
    x0_ = x1;
    y0_ = y1;
    for (const auto& v : mesh.vertices) {
        x0_ = std::min(x0_, v[0]);
        y0_ = std::min(y0_, v[1]);
        x1 = std::max(x1, v[0]);
        y1 = std::max(y1, v[1]);
    }
    const double span = std::max(x1 - x0_, y1 - y0_);
    const double target = std::sqrt(static_cast<double>(std::max<std::size_t>(mesh.triangle_count(), 1)));
    cell_ = std::max(span / std::max(1.0, target), 1e-12);
    nx_ = static_cast<int>((x1 - x0_) / cell_) + 1;
    ny_ = static_cast<int>((y1 - y0_) / cell_) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        double bx0 = 1e300, by0 = 1e300, bx1 = -1e300, by1 = -1e300;
        for (int v : mesh.triangles[t]) {
            bx0 = std::min(bx0, mesh.vertices[v][0]);
            by0 = std::min(by0, mesh.vertices[v][1]);
            bx1 = std::max(bx1, mesh.vertices[v][0]);
            by1 = std::max(by1, mesh.vertices[v][1]);
        }
        const int i0 = std::clamp(static_cast<int>((bx0 - x0_) / cell_), 0, nx_ - 1);
        const int i1 = std::clamp(static_cast<int>((bx1 - x0_) / cell_), 0, nx_ - 1);
        const int j0 = std::clamp(static_cast<int>((by0 - y0_) / cell_), 0, ny_ - 1);
        const int j1 = std::clamp(static_cast<int>((by1 - y0_) / cell_), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
    }
}

std::optional<MeshLocator::Hit> MeshLocator::locate(const Vec2& p) const {
    const double fx = (p[0] - x0_) / cell_, fy = (p[1] - y0_) / cell_;
    if (!(fx > -1e-9 && fy > -1e-9 && fx < nx_ + 1e-9 && fy < ny_ + 1e-9)) return std::nullopt;
    const int i = std::clamp(static_cast<int>(fx), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(fy), 0, ny_ - 1);
    Hit best;
    double best_min = -1e300;
    for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
        const auto& tri = mesh_.triangles[t];
        const Vec2& a = mesh_.vertices[tri[0]];
        const Vec2& b = mesh_.vertices[tri[1]];
        const Vec2& c = mesh_.vertices[tri[2]];
        const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        const double l2 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
        const double l3 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        const double l1 = 1.0 - l2 - l3;
        const double m = std::min({l1, l2, l3});
        if (m > best_min) {
            best_min = m;
            best.triangle = t;
            best.barycentric = {l1, l2, l3};
        }
    }
    if (best.triangle < 0 || best_min < -1e-10) return std::nullopt;
    return best;
}

double MeshLocator::interpolate(std::span<const double> values, const Vec2& point) const {
    if (values.size() != mesh_.vertex_count()) throw InputError("interpolate: one value per vertex required");
    const auto hit = locate(point);
    if (!hit) throw InputError("interpolate: point outside the mesh");
    const auto& tri = mesh_.triangles[hit->triangle];
    return hit->barycentric[0] * values[tri[0]] + hit->barycentric[1] * values[tri[1]] +
           hit->barycentric[2] * values[tri[2]];
}

double interpolate(const TriangleMesh& mesh, std::span<const double> values, const Vec2& point) {
    return MeshLocator(mesh).interpolate(values, point);
}

void write_matrix(std::ostream& out, const eigen::SparseMatrix& matrix) {
    const auto lower = eigen::SparseSymmetric::from_matrix(matrix);
    char buf[96];
    for (const auto& e : lower.lower) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.row, e.col, e.value);
        out << buf;
    }
}

void write_matrix(const std::string& path, const eigen::SparseMatrix& matrix) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open matrix output file: " + path);
    write_matrix(f, matrix);
}

}  // namespace hemi::fem
