#include "hemi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "delaunay.hpp"
#include "hemi/errors.hpp"
#include "quadrature.hpp"

namespace hemi {

namespace {

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

/// Boundary samples with chord length about h and sagitta at most h^2.
std::vector<double> sample_boundary(const BoundaryCurve& curve, double h) {
    std::vector<double> params;
    for (std::size_t k = 0; k < curve.piece_count(); ++k) {
        const auto& piece = curve.piece(k);
        double length = 0.0;
        constexpr int kProbe = 256;
        Vec2 prev = piece.point(0.0);
        for (int i = 1; i <= kProbe; ++i) {
            const Vec2 q = piece.point(static_cast<double>(i) / kProbe);
            length += dist(prev, q);
            prev = q;
        }
        int n = std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
        if (curve.piece_count() == 1) n = std::max(n, 8);
        if (!piece.straight) {
            for (int guard = 0; guard < 20; ++guard) {
                double worst = 0.0;
                for (int i = 0; i < n; ++i) {
                    const Vec2 a = piece.point(static_cast<double>(i) / n);
                    const Vec2 b = piece.point(static_cast<double>(i + 1) / n);
                    const Vec2 m = piece.point((i + 0.5) / n);
                    worst = std::max(worst, dist(m, {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}));
                }
                if (worst <= h * h) break;
                n *= 2;
            }
        }
        for (int i = 0; i < n; ++i) params.push_back(static_cast<double>(k) + static_cast<double>(i) / n);
    }
    return params;
}

TriangleMesh mesh_from_curve(std::shared_ptr<const BoundaryCurve> curve, double h, const MeshOptions& options) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InputError("mesh: h must be positive");
    if (options.min_angle_degrees <= 0.0 || options.min_angle_degrees > 30.0)
        throw InputError("mesh: minimum angle bound must lie in (0, 30] degrees");
    detail::RefinementInput in;
    in.curve = curve.get();
    in.boundary_parameters = sample_boundary(*curve, h);
    in.max_edge = h;
    in.min_angle_degrees = options.min_angle_degrees;
    in.max_vertices = options.max_vertices;
    auto out = detail::refine_delaunay(in);

    TriangleMesh mesh;
    mesh.vertices = std::move(out.vertices);
    mesh.triangles = std::move(out.triangles);
    mesh.boundary_edges = std::move(out.boundary_edges);
    mesh.boundary_parameter = std::move(out.boundary_parameter);
    mesh.h = h;
    mesh.boundary = std::move(curve);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
        if (mesh.triangle_area(t) < 1e-14) throw SolverError("mesh: degenerate triangle produced");
    return mesh;
}

}  // namespace

double TriangleMesh::triangle_area(std::size_t t) const {
    const auto& tri = triangles[t];
    return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double TriangleMesh::max_edge_length() const {
    double m = 0.0;
    for (const auto& t : triangles)
        for (int i = 0; i < 3; ++i) m = std::max(m, dist(vertices[t[i]], vertices[t[(i + 1) % 3]]));
    return m;
}

double TriangleMesh::min_angle_degrees() const {
    double m = 180.0;
    for (const auto& t : triangles) {
        for (int i = 0; i < 3; ++i) {
            const Vec2& a = vertices[t[i]];
            const Vec2& b = vertices[t[(i + 1) % 3]];
            const Vec2& c = vertices[t[(i + 2) % 3]];
            const double ux = b[0] - a[0], uy = b[1] - a[1];
            const double vx = c[0] - a[0], vy = c[1] - a[1];
            const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
            m = std::min(m, ang * 180.0 / std::numbers::pi);
        }
    }
    return m;
}

TriangleMesh build_planar_mesh(const DomainSpec& spec, double h, const MeshOptions& options) {
    if (spec.dim != 2) throw InputError("build_planar_mesh: dim must be 2");
    spec.validate();
    return mesh_from_curve(make_boundary(spec), h, options);
}

TriangleMesh build_meridian_mesh(const DomainSpec& spec, double h, const MeshOptions& options) {
    if (spec.dim != 3) throw InputError("build_meridian_mesh: dim must be 3");
    spec.validate();
    return mesh_from_curve(make_boundary(spec), h, options);
}

TriangleMesh build_mesh(const DomainSpec& spec, double h, const MeshOptions& options) {
    return spec.dim == 2 ? build_planar_mesh(spec, h, options) : build_meridian_mesh(spec, h, options);
}

stereo::SphereVolume mesh_volume(const TriangleMesh& mesh, const DomainSpec& spec) {
    stereo::SphereVolume vol;
    vol.dim = spec.dim;
    vol.unit_ball_volume = stereo::unit_ball_volume(spec.dim);
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2& a = mesh.vertices[tri[0]];
        const Vec2& b = mesh.vertices[tri[1]];
        const Vec2& c = mesh.vertices[tri[2]];
        const double area = mesh.triangle_area(t);
        double local = 0.0;
        if (spec.dim == 2) {
            for (const auto& q : detail::kMidEdgeRule) {
                const double x = q.l1 * a[0] + q.l2 * b[0] + q.l3 * c[0];
                const double y = q.l1 * a[1] + q.l2 * b[1] + q.l3 * c[1];
                const double p = stereo::conformal_factor(std::hypot(x, y));
                local += q.w * p * p;
            }
        } else {
            for (const auto& q : detail::kSevenPointRule) {
                const double th = q.l1 * a[0] + q.l2 * b[0] + q.l3 * c[0];
                const double ph = q.l1 * a[1] + q.l2 * b[1] + q.l3 * c[1];
                const double st = std::sin(th);
                local += q.w * st * st * std::sin(ph);
            }
        }
        sum += area * local;
    }
    vol.value = spec.dim == 3 ? 2.0 * std::numbers::pi * sum : sum;
    return vol;
}

TriangleMesh refine(const TriangleMesh& mesh) {
    TriangleMesh out;
    out.vertices = mesh.vertices;
    out.boundary_parameter = mesh.boundary_parameter;
    if (out.boundary_parameter.size() != out.vertices.size()) out.boundary_parameter.assign(out.vertices.size(), -1.0);
    out.boundary = mesh.boundary;
    out.h = 0.5 * mesh.h;
    out.refinement_level = mesh.refinement_level + 1;

    std::map<std::pair<int, int>, bool> on_boundary;
    for (const auto& e : mesh.boundary_edges) on_boundary[{std::min(e[0], e[1]), std::max(e[0], e[1])}] = true;

    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const Vec2& pa = mesh.vertices[a];
        const Vec2& pb = mesh.vertices[b];
        Vec2 p{0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
        double tag = -1.0;
        if (on_boundary.count(key) && mesh.boundary && mesh.boundary_parameter.size() == mesh.vertices.size()) {
            const double ta = mesh.boundary_parameter[a], tb = mesh.boundary_parameter[b];
            if (ta >= 0.0 && tb >= 0.0) {
                tag = mesh.boundary->parameter_midpoint(ta, tb);
                p = mesh.boundary->point(tag);
            }
        }
        const int idx = static_cast<int>(out.vertices.size());
        out.vertices.push_back(p);
        out.boundary_parameter.push_back(tag);
        midpoint.emplace(key, idx);
        return idx;
    };

    out.triangles.reserve(4 * mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        const int a = t[0], b = t[1], c = t[2];
        const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        out.triangles.push_back({a, ab, ca});
        out.triangles.push_back({ab, b, bc});
        out.triangles.push_back({ca, bc, c});
        out.triangles.push_back({ab, bc, ca});
    }
    out.boundary_edges.reserve(2 * mesh.boundary_edges.size());
    for (const auto& e : mesh.boundary_edges) {
        const int m = mid(e[0], e[1]);
        out.boundary_edges.push_back({e[0], m});
        out.boundary_edges.push_back({m, e[1]});
    }
    for (std::size_t t = 0; t < out.triangle_count(); ++t)
        if (out.triangle_area(t) <= 0.0) throw SolverError("refine: boundary projection inverted a triangle");
    return out;
}

void write_mesh(std::ostream& out, const TriangleMesh& mesh) {
    char buf[128];
    out << "mesh " << mesh.vertex_count() << ' ' << mesh.triangle_count() << ' ' << mesh.boundary_edges.size() << '\n';
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v[0], v[1]);
        out << buf;
    }
    for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : mesh.boundary_edges) out << "b " << e[0] << ' ' << e[1] << '\n';
}

void write_mesh(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open mesh output file: " + path);
    write_mesh(f, mesh);
}

TriangleMesh read_mesh(std::istream& in) {
    TriangleMesh mesh;
    std::string tag;
    std::size_t nv = 0, nt = 0, nb = 0;
    if (!(in >> tag >> nv >> nt >> nb) || tag != "mesh") throw InputError("read_mesh: bad header");
    mesh.vertices.resize(nv);
    mesh.triangles.resize(nt);
    mesh.boundary_edges.resize(nb);
    for (auto& v : mesh.vertices)
        if (!(in >> tag >> v[0] >> v[1]) || tag != "v") throw InputError("read_mesh: bad vertex line");
    for (auto& t : mesh.triangles)
        if (!(in >> tag >> t[0] >> t[1] >> t[2]) || tag != "t") throw InputError("read_mesh: bad triangle line");
    for (auto& e : mesh.boundary_edges)
        if (!(in >> tag >> e[0] >> e[1]) || tag != "b") throw InputError("read_mesh: bad boundary line");
    mesh.boundary_parameter.assign(nv, -1.0);
    mesh.h = mesh.max_edge_length();
    return mesh;
}

std::string check_mesh(const TriangleMesh& mesh) {
    const int nv = static_cast<int>(mesh.vertex_count());
    std::map<std::pair<int, int>, int> directed;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int v : tri)
            if (v < 0 || v >= nv) return "triangle " + std::to_string(t) + " has an invalid vertex index";
        if (!(mesh.triangle_area(t) > 0.0)) return "triangle " + std::to_string(t) + " is not positively oriented";
        for (int i = 0; i < 3; ++i) {
            if (++directed[{tri[i], tri[(i + 1) % 3]}] > 1)
                return "edge used twice with the same orientation in triangle " + std::to_string(t);
        }
    }
    std::map<std::pair<int, int>, int> expected_boundary;
    for (const auto& [e, count] : directed) {
        (void)count;
        if (!directed.count({e.second, e.first})) expected_boundary[e] = 1;
    }
    if (expected_boundary.size() != mesh.boundary_edges.size())
        return "boundary edge count does not match the free edges of the triangulation";
    std::vector<int> out_deg(nv, 0), in_deg(nv, 0);
    for (const auto& e : mesh.boundary_edges) {
        if (!expected_boundary.count({e[0], e[1]})) return "boundary edge is not a free edge with the domain on its left";
        ++out_deg[e[0]];
        ++in_deg[e[1]];
    }
    for (int v = 0; v < nv; ++v)
        if (out_deg[v] != in_deg[v]) return "boundary edges do not form closed loops";
    std::vector<char> used(nv, 0);
    for (const auto& t : mesh.triangles)
        for (int v : t) used[v] = 1;
    for (int v = 0; v < nv; ++v)
        if (!used[v]) return "vertex " + std::to_string(v) + " belongs to no triangle";
    return {};
}

}  // namespace hemi
