#include "hemi/region_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hemi/errors.hpp"
#include "hemi/stereographic.hpp"
#include "quadrature.hpp"

namespace hemi::integrals {

namespace {

constexpr double kPanel = 1e-3;

template <typename F>
double adaptive(F&& f, double a, double b, double tol) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol, &err);
}

}  // namespace

Mat3 identity3() { return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}; }

RadialPrimitive::RadialPrimitive(std::function<double(double)> f, int weight_power, std::vector<double> breakpoints,
                                 double theta_max)
    : f_(std::move(f)), power_(weight_power) {
    if (weight_power < 0) throw InputError("RadialPrimitive: negative weight power");
    if (!(theta_max > 0.0) || theta_max > std::numbers::pi + 1e-12) throw InputError("RadialPrimitive: bad range");
    breakpoints.push_back(0.0);
    breakpoints.push_back(theta_max);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(),
                                     [&](double b) { return b < 0.0 || b > theta_max; }),
                      breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    nodes_.push_back(breakpoints.front());
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        const double a = breakpoints[k], b = breakpoints[k + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / kPanel)));
        for (int i = 1; i <= n; ++i) nodes_.push_back(i == n ? b : a + (b - a) * i / n);
    }
    cumulative_.assign(nodes_.size(), 0.0);
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        cumulative_[i] = cumulative_[i - 1] +
                         detail::gauss_legendre(nodes_[i - 1], nodes_[i], [this](double t) { return integrand(t); });
}

double RadialPrimitive::integrand(double t) const { return f_(t) * std::pow(std::sin(t), power_); }

double RadialPrimitive::operator()(double theta) const {
    if (!(theta >= 0.0) || theta > nodes_.back() * (1.0 + 1e-14))
        throw InputError("RadialPrimitive: angle outside the tabulated range");
    theta = std::min(theta, nodes_.back());
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), theta);
    std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= nodes_.size() - 1 && theta >= nodes_.back()) return cumulative_.back();
    const double a = nodes_[k];
    if (theta == a) return cumulative_[k];
    return cumulative_[k] + detail::gauss_legendre(a, theta, [this](double t) { return integrand(t); });
}

double surface_integral(const BoundaryCurve& curve, const Mat3& R, const RadialPrimitive& H,
                        const std::function<double(double)>& angular, double tolerance) {
    if (H.weight_power() != 1) throw InputError("surface_integral: primitive must carry the weight sin(theta)");
    double total = 0.0;
    for (std::size_t k = 0; k < curve.piece_count(); ++k) {
        const auto& piece = curve.piece(k);
        auto integrand = [&](double t) {
            const Vec2 x = piece.point(t);
            const Vec2 dx = piece.tangent(t);
            const auto X = stereo::to_sphere(x[0], x[1]);
            const auto dX = stereo::to_sphere_derivative(x[0], x[1], dx[0], dx[1]);
            std::array<double, 3> Y{}, dY{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    Y[i] += R[i][j] * X[j];
                    dY[i] += R[i][j] * dX[j];
                }
            const double rho2 = Y[0] * Y[0] + Y[1] * Y[1];
            if (rho2 <= 0.0) return 0.0;
            const double theta = std::atan2(std::sqrt(rho2), Y[2]);
            const double psi = std::atan2(Y[1], Y[0]);
            const double dpsi = (Y[0] * dY[1] - Y[1] * dY[0]) / rho2;
            return H(theta) * angular(psi) * dpsi;
        };
        total += adaptive(integrand, 0.0, 1.0, tolerance);
    }
    return total;
}

double revolution_integral(const DomainSpec& spec, const RadialPrimitive& H,
                           const std::function<double(double)>& angular, double tolerance) {
    if (spec.dim != 3) throw InputError("revolution_integral: dim 3 domain required");
    if (H.weight_power() != 2) throw InputError("revolution_integral: primitive must carry the weight sin^2(theta)");
    const auto poly = meridian_polyline(spec);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        const double f0 = poly[k][1], f1 = poly[k + 1][1];
        if (!(f1 > f0)) continue;
        const double t0 = poly[k][0], t1 = poly[k + 1][0];
        auto integrand = [&](double phi) {
            const double theta = t0 + (t1 - t0) * (phi - f0) / (f1 - f0);
            return std::sin(phi) * angular(phi) * H(theta);
        };
        total += adaptive(integrand, f0, f1, tolerance);
    }
    return 2.0 * std::numbers::pi * total;
}

double cap_integral(int dim, double gamma, const RadialPrimitive& H) {
    if (H.weight_power() != dim - 1) throw InputError("cap_integral: weight power must be dim - 1");
    return dim * stereo::unit_ball_volume(dim) * H(gamma);
}

double exact_volume(const DomainSpec& spec) {
    spec.validate();
    if (spec.dim == 2) {
        const auto curve = make_boundary(spec);
        const RadialPrimitive H([](double) { return 1.0; }, 1);
        return surface_integral(*curve, identity3(), H, [](double) { return 1.0; });
    }
    const RadialPrimitive H([](double) { return 1.0; }, 2);
    return revolution_integral(spec, H, [](double) { return 1.0; });
}

}  // namespace hemi::integrals
