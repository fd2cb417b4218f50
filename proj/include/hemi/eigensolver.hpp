#pragma once

// Smallest eigenpairs of the symmetric generalized problem K x = mu M x.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hemi::eigen {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Lower-triangle coordinate storage of a symmetric matrix.
struct SparseSymmetric {
    struct Entry {
        int row = 0;
        int col = 0;
        double value = 0.0;
    };
    std::size_t n = 0;
    std::vector<Entry> lower;  ///< row >= col

    static SparseSymmetric from_matrix(const SparseMatrix& full);
    /// Full symmetric matrix; throws InputError on non-finite or upper-triangle entries.
    SparseMatrix to_matrix() const;
};

struct EigenPairs {
    std::vector<double> values;   ///< non-decreasing
    Eigen::MatrixXd vectors;      ///< M-orthonormal columns
    std::vector<double> residuals;  ///< ||K x - mu M x|| in the M^{-1} norm
    int iterations = 0;
};

/// M-orthogonal projection onto the complement of the constant vector.
class ConstantProjector {
public:
    explicit ConstantProjector(const SparseMatrix& mass);

    /// x <- x - (c^T M x) c with c the M-normalized constant vector.
    void apply(Eigen::VectorXd& x) const;
    Eigen::VectorXd applied(const Eigen::VectorXd& x) const;
    const Eigen::VectorXd& constant() const { return c_; }

private:
    Eigen::VectorXd c_;
    Eigen::VectorXd mc_;  // M c
};

/// Checks that constants lie in the kernel of K and returns the projector.
ConstantProjector deflate_constants(const SparseMatrix& stiffness, const SparseMatrix& mass);

/// Dense reference solver for n <= 3000: Cholesky of M, reduction to a
/// standard symmetric problem, tridiagonalization and implicit QL/QR.
EigenPairs dense_generalized(const SparseMatrix& stiffness, const SparseMatrix& mass, int count);

struct LanczosOptions {
    /// Shift; defaults to -min(0.5, 0.1 tr K / tr M).
    std::optional<double> sigma;
    /// Krylov dimension per pass; 0 means 10 count + 100.
    int max_iterations = 0;
    double ritz_tolerance = 1e-12;
    double residual_tolerance = 1e-9;
    const ConstantProjector* deflation = nullptr;
    std::uint64_t seed = 0x5eed5eedULL;
    int polish_steps = 2;
};

/// Eigenvalues closest to sigma from above via Lanczos on (K - sigma M)^{-1} M
/// in the M inner product with full reorthogonalization.
EigenPairs lanczos_shift_invert(const SparseMatrix& stiffness, const SparseMatrix& mass, int count,
                                const LanczosOptions& options = {});

/// ||K x - mu M x||_{M^{-1}} for each column.
std::vector<double> generalized_residuals(const SparseMatrix& stiffness, const SparseMatrix& mass,
                                          const std::vector<double>& values, const Eigen::MatrixXd& vectors);

/// Flips each column so that its entry of largest magnitude is positive.
void normalize_signs(Eigen::MatrixXd& vectors);

}  // namespace hemi::eigen
