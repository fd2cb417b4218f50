#pragma once

// P1 weak forms of the Neumann Laplace-Beltrami eigenproblem.
//
// dim 2 (stereographic chart):  int grad u . grad v dx = mu int p^2 u v dx.
// dim 3 (meridian, mode m):     int [u_t v_t sin^2 t sin f + u_f v_f sin f + m^2 u v / sin f]
//                                 = mu int u v sin^2 t sin f,   (t, f) = (theta, phi).

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hemi/eigensolver.hpp"
#include "hemi/mesh.hpp"

namespace hemi::fem {

struct AssembledSystem {
    eigen::SparseMatrix stiffness;
    eigen::SparseMatrix mass;
    std::size_t n = 0;                ///< number of unknowns
    std::optional<int> mode_m;        ///< azimuthal mode (dim 3 only)
    std::size_t vertex_count = 0;
    std::vector<int> dof_to_vertex;   ///< size n
    std::vector<int> vertex_to_dof;   ///< -1 for vertices fixed to zero

    /// True when constants span the kernel of the stiffness matrix.
    bool has_constant_kernel() const { return !mode_m || *mode_m == 0; }
    /// Expands a vector of unknowns to vertex values (fixed vertices get 0).
    std::vector<double> vertex_values(const Eigen::VectorXd& dofs) const;
};

/// Conformal S^2 form on a planar chart mesh.
AssembledSystem assemble_s2(const TriangleMesh& mesh);
/// Axisymmetric S^3 form for azimuthal mode m >= 0 on a meridian mesh.
/// For m >= 1 the values on the lines sin(phi) = 0 are fixed to zero.
AssembledSystem assemble_s3_axisym(const TriangleMesh& mesh, int mode_m);

enum class SolverKind { lanczos, dense };

struct SpectrumOptions {
    SolverKind solver = SolverKind::lanczos;
    eigen::LanczosOptions lanczos;
};

/// The `count` smallest eigenpairs. For systems with a constant kernel the
/// constant pair is returned first and the rest come from the deflated problem.
eigen::EigenPairs neumann_spectrum(const AssembledSystem& system, int count, const SpectrumOptions& options = {});

/// Point location on a triangle mesh with a uniform bucket grid.
class MeshLocator {
public:
    explicit MeshLocator(const TriangleMesh& mesh);

    struct Hit {
        int triangle = -1;
        std::array<double, 3> barycentric{};
    };
    /// Triangle containing the point (with a small tolerance), if any.
    std::optional<Hit> locate(const Vec2& point) const;
    /// P1 interpolation of vertex values; throws InputError outside the mesh.
    double interpolate(std::span<const double> vertex_values, const Vec2& point) const;

private:
    const TriangleMesh& mesh_;
    double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

double interpolate(const TriangleMesh& mesh, std::span<const double> vertex_values, const Vec2& point);

/// `i j value` lines for the lower triangle, 17 significant digits.
void write_matrix(std::ostream& out, const eigen::SparseMatrix& matrix);
void write_matrix(const std::string& path, const eigen::SparseMatrix& matrix);

}  // namespace hemi::fem
