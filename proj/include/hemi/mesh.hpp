#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hemi/domain.hpp"
#include "hemi/stereographic.hpp"

namespace hemi {

/// Conforming P1 triangulation. Triangles are counter-clockwise; boundary
/// edges are oriented with the domain on their left.
struct TriangleMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> boundary_edges;
    double h = 0.0;  ///< target maximum edge length
    int refinement_level = 0;
    /// Boundary parameter of each vertex (negative for interior vertices).
    std::vector<double> boundary_parameter;
    std::shared_ptr<const BoundaryCurve> boundary;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
    double triangle_area(std::size_t t) const;
    double max_edge_length() const;
    /// Smallest interior angle over all triangles, in degrees.
    double min_angle_degrees() const;
};

struct MeshOptions {
    double min_angle_degrees = 20.7;  ///< Delaunay refinement quality bound
    std::size_t max_vertices = 2'000'000;
};

/// Mesh of the stereographic image of a dim 2 domain.
TriangleMesh build_planar_mesh(const DomainSpec& spec, double h, const MeshOptions& options = {});
/// Mesh of the (theta, phi) cross-section of a dim 3 domain of revolution.
TriangleMesh build_meridian_mesh(const DomainSpec& spec, double h, const MeshOptions& options = {});
/// Dispatches on spec.dim.
TriangleMesh build_mesh(const DomainSpec& spec, double h, const MeshOptions& options = {});

/// Spherical volume: int p(s)^2 dx (dim 2, mid-edge rule) or
/// 2 pi int sin^2(theta) sin(phi) dtheta dphi (dim 3, 7-point rule).
stereo::SphereVolume mesh_volume(const TriangleMesh& mesh, const DomainSpec& spec);

/// Uniform red refinement; new boundary vertices are moved onto the exact boundary curve.
TriangleMesh refine(const TriangleMesh& mesh);

/// Plain-text export: `mesh nv nt nb`, then `v x y`, `t i j k`, `b i j` lines.
void write_mesh(std::ostream& out, const TriangleMesh& mesh);
void write_mesh(const std::string& path, const TriangleMesh& mesh);
/// Reads the export format back (without boundary parametrization).
TriangleMesh read_mesh(std::istream& in);

/// Structural validity: orientation, conformity, closed boundary loops.
/// Returns an empty string when valid, otherwise a description of the first defect.
std::string check_mesh(const TriangleMesh& mesh);

}  // namespace hemi
