#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hemi/domain.hpp"
#include "hemi/errors.hpp"
#include "hemi/mesh.hpp"
#include "hemi/region_integrals.hpp"

using namespace hemi;
using std::numbers::pi;

TEST_CASE("spec parsing") {
    const auto s = parse_domain_spec("# a comment\nkind = perturbed_cap\ndim = 2\ngamma = 0.8  # inline\neps2 = 0.1\n");
    CHECK(s.kind == DomainKind::perturbed_cap);
    CHECK(s.gamma == 0.8);
    REQUIRE(s.amplitudes.size() == 2);
    CHECK(s.amplitudes[0] == 0.0);
    CHECK(s.amplitudes[1] == 0.1);

    const auto p = parse_domain_spec("kind = polygon_region\ndim = 2\nvertices = 0 0; 0.5 0; 0 0.5\n");
    CHECK(p.vertices.size() == 3);

    const auto again = parse_domain_spec(format_domain_spec(s));
    CHECK(again.gamma == s.gamma);
    CHECK(again.amplitudes == s.amplitudes);

    CHECK_THROWS_AS(parse_domain_spec("dim = 2\ngamma = 1\n"), InputError);
    CHECK_THROWS_AS(parse_domain_spec("kind = cap\ngamma = 1\n"), InputError);
    CHECK_THROWS_AS(parse_domain_spec("kind = cap\ndim = 2\ngamma = 1\ncolour = red\n"), InputError);
    CHECK_THROWS_AS(parse_domain_spec("kind = blob\ndim = 2\n"), InputError);
    CHECK_THROWS_AS(parse_domain_spec("kind = cap\ndim = 2\ngamma = abc\n"), InputError);
    CHECK_THROWS_AS(load_domain_spec("/nonexistent/spec.txt"), InputError);
}

namespace {

DomainSpec admissible(const std::string& text) {
    auto s = parse_domain_spec(text);
    s.validate();
    return s;
}

}  // namespace

TEST_CASE("hemisphere admissibility") {
    CHECK_THROWS_AS(admissible("kind = cap\ndim = 2\ngamma = 1.6\n"), InputError);
    CHECK_THROWS_AS(admissible("kind = disk_region\ndim = 2\ncenter = 0.5 0\nradius = 0.6\n"), InputError);
    CHECK_THROWS_AS(admissible("kind = polygon_region\ndim = 2\nvertices = 0 0; 1.2 0; 0 0.5\n"), InputError);
    CHECK_THROWS_AS(admissible("kind = polygon_region\ndim = 2\nvertices = 0 0; 0.5 0.5; 0.5 0; 0 0.5\n"),
                    InputError);
    CHECK_THROWS_AS(admissible("kind = perturbed_cap\ndim = 2\ngamma = 1.5\neps2 = 0.2\n"), InputError);
    CHECK_THROWS_AS(admissible("kind = perturbed_cap\ndim = 2\ngamma = 0.5\neps2 = 0.2\neps3 = 0.2\n"),
                    InputError);
    CHECK_THROWS_AS(admissible("kind = meridian_region\ndim = 3\ngamma = 1.4\nbulge = 0.3\n"), InputError);
    CHECK_THROWS_AS(admissible("kind = disk_region\ndim = 3\ncenter = 0 0\nradius = 0.3\n"), InputError);
}

TEST_CASE("geodesic balls") {
    CHECK(parse_domain_spec("kind = cap\ndim = 2\ngamma = 1\n").is_geodesic_ball());
    CHECK(parse_domain_spec("kind = disk_region\ndim = 2\ncenter = 0.2 0\nradius = 0.3\n").is_geodesic_ball());
    CHECK_FALSE(parse_domain_spec("kind = perturbed_cap\ndim = 2\ngamma = 1\neps2 = 0.1\n").is_geodesic_ball());
}

TEST_CASE("set_parameter") {
    auto s = parse_domain_spec("kind = perturbed_cap\ndim = 2\ngamma = 1\neps2 = 0.1\n");
    s.set_parameter("eps3", 0.05);
    REQUIRE(s.amplitudes.size() == 3);
    CHECK(s.amplitudes[2] == 0.05);
    s.set_parameter("gamma", 0.5);
    CHECK(s.gamma == 0.5);
    CHECK_THROWS_AS(s.set_parameter("radius2", 1.0), InputError);
}

TEST_CASE("boundary curves are closed and counter-clockwise") {
    for (const char* text : {"kind = cap\ndim = 2\ngamma = 1\n",
                             "kind = perturbed_cap\ndim = 2\ngamma = 0.8\neps3 = 0.2\n",
                             "kind = polygon_region\ndim = 2\nvertices = 0.1 0; 0.6 0.1; 0.2 0.5\n"}) {
        const auto curve = make_boundary(parse_domain_spec(text));
        const auto a = curve->point(0.0);
        const auto b = curve->point(curve->period());
        CHECK(a[0] == doctest::Approx(b[0]));
        CHECK(a[1] == doctest::Approx(b[1]));
        double area = 0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const auto p = curve->point(curve->period() * i / n);
            const auto q = curve->point(curve->period() * (i + 1) / n);
            area += p[0] * q[1] - p[1] * q[0];
        }
        CHECK(area > 0);
    }
}

namespace {

void check_quality(const TriangleMesh& m, double h) {
    CHECK(check_mesh(m).empty());
    CHECK(m.min_angle_degrees() >= 20.7);
    CHECK(m.max_edge_length() <= h * (1 + 1e-9));
}

}  // namespace

TEST_CASE("planar meshes are valid and graded") {
    for (const char* text : {"kind = cap\ndim = 2\ngamma = 1\n",
                             "kind = disk_region\ndim = 2\ncenter = 0.25 0.1\nradius = 0.35\n",
                             "kind = perturbed_cap\ndim = 2\ngamma = 0.8\neps2 = 0.2\n",
                             "kind = polygon_region\ndim = 2\nvertices = 0.7 0.05; -0.2 0.57; -0.2 -0.47\n"}) {
        const auto spec = parse_domain_spec(text);
        const auto m = build_mesh(spec, 0.06);
        check_quality(m, 0.06);
        for (std::size_t v = 0; v < m.vertex_count(); ++v) {
            if (m.boundary_parameter[v] < 0) continue;
            const auto p = m.boundary->point(m.boundary_parameter[v]);
            CHECK(std::hypot(p[0] - m.vertices[v][0], p[1] - m.vertices[v][1]) < 1e-12);
        }
        const auto r = refine(m);
        CHECK(check_mesh(r).empty());
        CHECK(r.triangle_count() == 4 * m.triangle_count());
        CHECK(r.h == doctest::Approx(m.h / 2));
    }
}

TEST_CASE("mesh volume converges to the exact volume at second order") {
    const auto spec = parse_domain_spec("kind = perturbed_cap\ndim = 2\ngamma = 0.8\neps2 = 0.2\n");
    const double exact = integrals::exact_volume(spec);
    auto m = build_mesh(spec, 0.08);
    const double e1 = std::abs(mesh_volume(m, spec).value - exact);
    m = refine(m);
    const double e2 = std::abs(mesh_volume(m, spec).value - exact);
    CHECK(e2 < e1 / 3.0);
    CHECK(e2 / exact < 1e-3);
}

TEST_CASE("meridian meshes") {
    const auto spec = parse_domain_spec("kind = meridian_region\ndim = 3\ngamma = 0.8\nbulge = 0.2\n");
    const auto m = build_mesh(spec, 0.05);
    check_quality(m, 0.05);
    const double exact = integrals::exact_volume(spec);
    CHECK(mesh_volume(m, spec).value == doctest::Approx(exact).epsilon(1e-3));
    const auto cap = parse_domain_spec("kind = cap\ndim = 3\ngamma = 1.5707963267948966\n");
    CHECK(mesh_volume(build_mesh(cap, 0.05), cap).value == doctest::Approx(pi * pi).epsilon(1e-12));
}

TEST_CASE("mesh export round trip") {
    const auto m = build_mesh(parse_domain_spec("kind = cap\ndim = 2\ngamma = 0.5\n"), 0.05);
    std::stringstream ss;
    write_mesh(ss, m);
    const auto r = read_mesh(ss);
    CHECK(r.vertices == m.vertices);
    CHECK(r.triangles == m.triangles);
    CHECK(r.boundary_edges == m.boundary_edges);
    CHECK(check_mesh(r).empty());
    std::stringstream bad("mesh 3 1 0\nv 0 0\n");
    CHECK_THROWS_AS(read_mesh(bad), InputError);
}

TEST_CASE("check_mesh reports defects") {
    auto m = build_mesh(parse_domain_spec("kind = cap\ndim = 2\ngamma = 0.5\n"), 0.1);
    std::swap(m.triangles[0][1], m.triangles[0][2]);
    CHECK_FALSE(check_mesh(m).empty());
}

TEST_CASE("meshing is deterministic") {
    const auto spec = parse_domain_spec("kind = disk_region\ndim = 2\ncenter = -0.2 0.4\nradius = 0.45\n");
    const auto a = build_mesh(spec, 0.05);
    const auto b = build_mesh(spec, 0.05);
    CHECK(a.vertices == b.vertices);
    CHECK(a.triangles == b.triangles);
}

TEST_CASE("invalid mesh sizes") {
    const auto spec = parse_domain_spec("kind = cap\ndim = 2\ngamma = 0.5\n");
    CHECK_THROWS_AS(build_mesh(spec, 0.0), InputError);
    CHECK_THROWS_AS(build_mesh(spec, -1.0), InputError);
}
