#pragma once

// Finite-difference reference for the lowest l = 1 radial Neumann eigenvalue of
// a polar cap. Vertex-centred conservative scheme with y(0) = 0, half cell at the
// Neumann end, smallest eigenvalue of the symmetrized tridiagonal matrix by
// Sturm-sequence bisection, then two-stage Richardson extrapolation.

#include <algorithm>
#include <cmath>
#include <vector>

namespace hemi::testing {

inline double radial_fd_eigenvalue(int dim, double gamma, int n) {
    const double d = gamma / n;
    auto w = [dim](double t) { return std::pow(std::sin(t), dim - 1); };
    const double q = dim - 1.0;
    std::vector<double> diag(n), off(n, 0.0);  // off[j] couples j-1 and j
    std::vector<double> mass(n);
    for (int j = 1; j <= n; ++j) {
        const double t = j * d;
        const double wl = w(t - 0.5 * d);
        const double s2 = std::sin(t) * std::sin(t);
        if (j < n) {
            const double wr = w(t + 0.5 * d);
            diag[j - 1] = (wl + wr) / (d * d) + q * w(t) / s2;
            mass[j - 1] = w(t);
        } else {
            diag[j - 1] = wl / (d * d) + 0.5 * q * w(t) / s2;
            mass[j - 1] = 0.5 * w(t);
        }
        if (j > 1) off[j - 1] = -wl / (d * d);
    }
    for (int j = 0; j < n; ++j) diag[j] /= mass[j];
    for (int j = 1; j < n; ++j) off[j] /= std::sqrt(mass[j] * mass[j - 1]);

    auto count_below = [&](double x) {
        int c = 0;
        double p = diag[0] - x;
        if (p < 0) ++c;
        for (int j = 1; j < n; ++j) {
            if (p == 0.0) p = 1e-300;
            p = diag[j] - x - off[j] * off[j] / p;
            if (p < 0) ++c;
        }
        return c;
    };
    double lo = 0.0, hi = 1.0;
    while (count_below(hi) < 1) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_below(mid) >= 1 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Richardson extrapolation on n, 2n, 4n assuming an even error expansion.
inline double radial_fd_extrapolated(int dim, double gamma, int n = 500) {
    const double a = radial_fd_eigenvalue(dim, gamma, n);
    const double b = radial_fd_eigenvalue(dim, gamma, 2 * n);
    const double c = radial_fd_eigenvalue(dim, gamma, 4 * n);
    const double ab = (4.0 * b - a) / 3.0;
    const double bc = (4.0 * c - b) / 3.0;
    return (16.0 * bc - ab) / 15.0;
}

}  // namespace hemi::testing
