#include "hemi/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "hemi/errors.hpp"

namespace hemi::eigen {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_pair(const SparseMatrix& K, const SparseMatrix& M) {
    if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
        throw InputError("eigen: K and M must be square and of equal size");
    if (K.rows() == 0) throw InputError("eigen: empty system");
}

struct RitzPairs {
    std::vector<double> mu;
    MatrixXd X;
    int steps = 0;
    bool converged = false;
};

class ShiftInvert {
public:
    ShiftInvert(const SparseMatrix& K, const SparseMatrix& M, double sigma) : M_(M), sigma_(sigma) {
        SparseMatrix A = K - sigma * M;
        ldlt_.compute(A);
        if (ldlt_.info() != Eigen::Success) throw SolverError("eigen: factorization of K - sigma M failed");
        const VectorXd d = ldlt_.vectorD();
        for (Eigen::Index i = 0; i < d.size(); ++i)
            if (!(std::abs(d[i]) > 0.0) || !std::isfinite(d[i]))
                throw SolverError("eigen: K - sigma M is singular (sigma is an eigenvalue)");
    }

    VectorXd apply(const VectorXd& v) const { return ldlt_.solve(M_ * v); }
    double sigma() const { return sigma_; }

private:
    const SparseMatrix& M_;
    double sigma_;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

class Pass {
public:
    Pass(const ShiftInvert& op, const SparseMatrix& M, const MatrixXd& locked, const ConstantProjector* deflation,
         std::mt19937_64& rng)
        : op_(op), M_(M), locked_(locked), deflation_(deflation), rng_(rng) {}

    RitzPairs run(int want, int max_dim, double ritz_tol, double res_tol) {
        const Eigen::Index n = M_.rows();
        std::vector<VectorXd> Q;
        std::vector<double> alpha, beta;
        Q.push_back(fresh_vector(Q));

        std::vector<double> prev;
        RitzPairs out;
        for (int j = 0; j < max_dim; ++j) {
            VectorXd w = op_.apply(Q[j]);
            project_fixed(w);
            const double a = Q[j].dot(M_ * w);
            alpha.push_back(a);
            w -= a * Q[j];
            if (j > 0) w -= beta[j - 1] * Q[j - 1];
            for (int rep = 0; rep < 2; ++rep) {
                project_fixed(w);
                const VectorXd Mw = M_ * w;
                for (const auto& q : Q) w -= q.dot(Mw) * q;
            }
            double b = std::sqrt(std::max(0.0, w.dot(M_ * w)));

            const int m = j + 1;
            Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
            VectorXd da = Eigen::Map<VectorXd>(alpha.data(), m);
            VectorXd db = m > 1 ? VectorXd(Eigen::Map<VectorXd>(beta.data(), m - 1)) : VectorXd(0);
            tri.computeFromTridiagonal(da, db, Eigen::ComputeEigenvectors);
            const VectorXd& theta = tri.eigenvalues();  // ascending; wanted are the largest
            const int k = std::min(want, m);
            std::vector<double> cur(k);
            bool ok = m >= want;
            const double scale = std::abs(theta[m - 1]);
            for (int i = 0; i < k; ++i) {
                const int idx = m - 1 - i;
                cur[i] = theta[idx];
                const double est = std::abs(b * tri.eigenvectors()(m - 1, idx));
                if (est > res_tol * scale) ok = false;
                if (prev.size() != cur.size() || std::abs(cur[i] - prev[i]) > ritz_tol * std::abs(cur[i])) ok = false;
            }
            prev = cur;

            const bool exhausted = m >= available(n);
            if (ok || exhausted || m == max_dim) {
                out.steps = m;
                out.converged = ok || exhausted;
                out.X.resize(n, k);
                out.mu.resize(k);
                for (int i = 0; i < k; ++i) {
                    const int idx = m - 1 - i;
                    VectorXd x = VectorXd::Zero(n);
                    for (int r = 0; r < m; ++r) x += tri.eigenvectors()(r, idx) * Q[r];
                    out.X.col(i) = x;
                    out.mu[i] = op_.sigma() + 1.0 / theta[idx];
                }
                return out;
            }
            if (b <= 1e-13 * std::max(scale, 1e-300)) {
                // invariant subspace reached: continue in a fresh direction
                beta.push_back(0.0);
                Q.push_back(fresh_vector(Q));
            } else {
                beta.push_back(b);
                Q.push_back(w / b);
            }
        }
        throw SolverError("eigen: Lanczos loop exited without a result");
    }

private:
    Eigen::Index available(Eigen::Index n) const { return n - locked_.cols() - (deflation_ ? 1 : 0); }

    void project_fixed(VectorXd& w) const {
        if (deflation_) deflation_->apply(w);
        if (locked_.cols() > 0) w -= locked_ * (locked_.transpose() * (M_ * w));
    }

    VectorXd fresh_vector(const std::vector<VectorXd>& Q) {
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int attempt = 0; attempt < 8; ++attempt) {
            VectorXd v(M_.rows());
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = U(rng_);
            for (int rep = 0; rep < 2; ++rep) {
                project_fixed(v);
                const VectorXd Mv = M_ * v;
                for (const auto& q : Q) v -= q.dot(Mv) * q;
            }
            const double nrm = std::sqrt(std::max(0.0, v.dot(M_ * v)));
            if (nrm > 1e-10) return v / nrm;
        }
        throw SolverError("eigen: could not generate a start vector");
    }

    const ShiftInvert& op_;
    const SparseMatrix& M_;
    const MatrixXd& locked_;
    const ConstantProjector* deflation_;
    std::mt19937_64& rng_;
};

/// Rayleigh-Ritz on span(X); returns ascending values and M-orthonormal vectors.
void rayleigh_ritz(const SparseMatrix& K, const SparseMatrix& M, MatrixXd& X, std::vector<double>& mu) {
    const MatrixXd KX = K * X;
    const MatrixXd MX = M * X;
    MatrixXd Kr = X.transpose() * KX;
    MatrixXd Mr = X.transpose() * MX;
    Kr = 0.5 * (Kr + Kr.transpose()).eval();
    Mr = 0.5 * (Mr + Mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(Kr, Mr, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw SolverError("eigen: Rayleigh-Ritz projection failed");
    X = X * es.eigenvectors();
    mu.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
}

}  // namespace

SparseSymmetric SparseSymmetric::from_matrix(const SparseMatrix& full) {
    SparseSymmetric s;
    s.n = static_cast<std::size_t>(full.rows());
    for (int k = 0; k < full.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(full, k); it; ++it)
            if (it.row() >= it.col()) s.lower.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
    std::sort(s.lower.begin(), s.lower.end(),
              [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    return s;
}

SparseMatrix SparseSymmetric::to_matrix() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * lower.size());
    for (const auto& e : lower) {
        if (e.row < e.col) throw InputError("SparseSymmetric: entry above the diagonal");
        if (e.row < 0 || static_cast<std::size_t>(e.row) >= n) throw InputError("SparseSymmetric: index out of range");
        if (!std::isfinite(e.value)) throw InputError("SparseSymmetric: non-finite entry");
        trip.emplace_back(e.row, e.col, e.value);
        if (e.row != e.col) trip.emplace_back(e.col, e.row, e.value);
    }
    SparseMatrix A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

ConstantProjector::ConstantProjector(const SparseMatrix& mass) {
    const VectorXd ones = VectorXd::Ones(mass.rows());
    const double total = ones.dot(mass * ones);
    if (!(total > 0.0)) throw InputError("deflate_constants: mass matrix is not positive");
    c_ = ones / std::sqrt(total);
    mc_ = mass * c_;
}

void ConstantProjector::apply(VectorXd& x) const { x -= mc_.dot(x) * c_; }

VectorXd ConstantProjector::applied(const VectorXd& x) const {
    VectorXd y = x;
    apply(y);
    return y;
}

ConstantProjector deflate_constants(const SparseMatrix& stiffness, const SparseMatrix& mass) {
    check_pair(stiffness, mass);
    const VectorXd ones = VectorXd::Ones(stiffness.rows());
    double kscale = 0.0;
    for (int k = 0; k < stiffness.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(stiffness, k); it; ++it) kscale = std::max(kscale, std::abs(it.value()));
    if ((stiffness * ones).lpNorm<Eigen::Infinity>() > 1e-9 * std::max(kscale, 1e-300))
        throw InputError("deflate_constants: constants are not in the kernel of K");
    return ConstantProjector(mass);
}

std::vector<double> generalized_residuals(const SparseMatrix& stiffness, const SparseMatrix& mass,
                                          const std::vector<double>& values, const MatrixXd& vectors) {
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> mf(mass);
    if (mf.info() != Eigen::Success) throw SolverError("eigen: mass matrix factorization failed");
    std::vector<double> res(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const VectorXd x = vectors.col(static_cast<Eigen::Index>(i));
        const VectorXd r = stiffness * x - values[i] * (mass * x);
        res[i] = std::sqrt(std::max(0.0, r.dot(mf.solve(r))));
    }
    return res;
}

void normalize_signs(MatrixXd& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        Eigen::Index best = 0;
        double mag = -1.0;
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            // strict comparison keeps the first index among exact ties
            if (std::abs(vectors(i, j)) > mag * (1.0 + 1e-12)) {
                mag = std::abs(vectors(i, j));
                best = i;
            }
        }
        if (vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
    }
}

EigenPairs dense_generalized(const SparseMatrix& stiffness, const SparseMatrix& mass, int count) {
    check_pair(stiffness, mass);
    const Eigen::Index n = stiffness.rows();
    if (n > 3000) throw InputError("dense_generalized: n exceeds 3000");
    if (count < 1 || count > n) throw InputError("dense_generalized: count out of range");
    MatrixXd K = MatrixXd(stiffness);
    MatrixXd M = MatrixXd(mass);
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw SolverError("dense_generalized: M is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(K, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw SolverError("dense_generalized: eigensolver failed");
    EigenPairs out;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + count);
    out.vectors = es.eigenvectors().leftCols(count);
    normalize_signs(out.vectors);
    out.residuals = generalized_residuals(stiffness, mass, out.values, out.vectors);
    return out;
}

EigenPairs lanczos_shift_invert(const SparseMatrix& stiffness, const SparseMatrix& mass, int count,
                                const LanczosOptions& options) {
    check_pair(stiffness, mass);
    const Eigen::Index n = stiffness.rows();
    const Eigen::Index avail = n - (options.deflation ? 1 : 0);
    if (count < 1) throw InputError("lanczos_shift_invert: count must be positive");
    if (count > avail) throw InputError("lanczos_shift_invert: count exceeds the problem size");

    double sigma = 0.0;
    if (options.sigma) {
        sigma = *options.sigma;
    } else {
        double trK = 0.0, trM = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            trK += stiffness.coeff(i, i);
            trM += mass.coeff(i, i);
        }
        sigma = (trK > 0.0 && trM > 0.0) ? -std::min(0.5, 0.1 * trK / trM) : -0.5;
    }
    const ShiftInvert op(stiffness, mass, sigma);
    std::mt19937_64 rng(options.seed);

    const int buffer = static_cast<int>(std::min<Eigen::Index>(avail - count, 2));
    const int want = count + buffer;
    const int max_dim = static_cast<int>(
        std::min<Eigen::Index>(avail, options.max_iterations > 0 ? options.max_iterations : 10 * count + 100));
    if (max_dim < want) throw InputError("lanczos_shift_invert: max_iterations below the requested count");

    MatrixXd none(n, 0);
    Pass first(op, mass, none, options.deflation, rng);
    RitzPairs found = first.run(want, max_dim, options.ritz_tolerance, options.residual_tolerance);
    if (!found.converged) throw SolverError("eigen: Lanczos did not converge within the iteration limit");
    int iterations = found.steps;

    // look for copies of multiple eigenvalues hidden from the first Krylov space
    for (int extra = 0; extra < want && found.X.cols() < avail; ++extra) {
        Pass again(op, mass, found.X, options.deflation, rng);
        const int dim = static_cast<int>(std::min<Eigen::Index>(max_dim, avail - found.X.cols()));
        RitzPairs more = again.run(1, dim, options.ritz_tolerance, options.residual_tolerance);
        iterations += more.steps;
        if (!more.converged) throw SolverError("eigen: Lanczos restart did not converge");
        const double top = *std::max_element(found.mu.begin(), found.mu.end());
        if (!(more.mu[0] < top - 1e-10 * std::abs(top))) break;
        MatrixXd X(n, found.X.cols() + 1);
        X << found.X, more.X.col(0);
        found.X = X;
        found.mu.push_back(more.mu[0]);
        // drop the largest to keep the block size
        std::vector<int> order(found.mu.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return found.mu[a] < found.mu[b]; });
        MatrixXd Y(n, want);
        std::vector<double> mu(want);
        for (int i = 0; i < want; ++i) {
            Y.col(i) = found.X.col(order[i]);
            mu[i] = found.mu[order[i]];
        }
        found.X = Y;
        found.mu = mu;
    }

    MatrixXd X = found.X;
    std::vector<double> mu = found.mu;
    rayleigh_ritz(stiffness, mass, X, mu);
    for (int s = 0; s < options.polish_steps; ++s) {
        MatrixXd Y(n, X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            VectorXd y = op.apply(X.col(j));
            if (options.deflation) options.deflation->apply(y);
            Y.col(j) = y;
        }
        X = Y;
        rayleigh_ritz(stiffness, mass, X, mu);
    }

    EigenPairs out;
    out.values.assign(mu.begin(), mu.begin() + count);
    out.vectors = X.leftCols(count);
    normalize_signs(out.vectors);
    out.residuals = generalized_residuals(stiffness, mass, out.values, out.vectors);
    out.iterations = iterations;
    return out;
}

}  // namespace hemi::eigen
