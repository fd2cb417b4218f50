#pragma once

// Delaunay refinement of a region bounded by one closed BoundaryCurve.

#include <array>
#include <vector>

#include "hemi/domain.hpp"

namespace hemi::detail {

struct RefinementInput {
    const BoundaryCurve* curve = nullptr;
    std::vector<double> boundary_parameters;  ///< initial boundary vertices, increasing in [0, period)
    double max_edge = 0.1;
    double min_angle_degrees = 20.7;
    std::size_t max_vertices = 2'000'000;
};

struct RefinementOutput {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> boundary_edges;
    std::vector<double> boundary_parameter;
};

/// Conforming Delaunay triangulation of the boundary samples followed by
/// Ruppert-style refinement: encroached boundary segments are split at their
/// parameter midpoint, bad or oversized triangles get their circumcenter.
RefinementOutput refine_delaunay(const RefinementInput& input);

}  // namespace hemi::detail
