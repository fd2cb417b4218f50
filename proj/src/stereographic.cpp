#include "hemi/stereographic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>

#include "hemi/errors.hpp"

namespace hemi::stereo {

namespace {
constexpr double kHalfPi = 0.5 * std::numbers::pi;
}

double theta_from_s(double s) { return 2.0 * std::atan(s); }

double s_from_theta(double theta) { return std::tan(0.5 * theta); }

double conformal_factor(double s) { return 2.0 / (1.0 + s * s); }

ChartPoint ChartPoint::from_coords(std::vector<double> coords) {
    ChartPoint p;
    double s2 = 0.0;
    for (double c : coords) s2 += c * c;
    p.coords = std::move(coords);
    p.s = std::sqrt(s2);
    p.theta = theta_from_s(p.s);
    return p;
}

double unit_ball_volume(int dim) {
    const double half = 0.5 * dim;
    return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

SphereVolume cap_volume(int dim, double gamma) {
    if (dim < 2) throw InputError("cap_volume: dimension must be >= 2");
    if (!(gamma > 0.0) || gamma > kHalfPi + 1e-15) throw InputError("cap_volume: gamma must lie in (0, pi/2]");
    const double omega = unit_ball_volume(dim);
    auto f = [dim](double t) { return std::pow(std::sin(t), dim - 1); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, gamma, 8, 1e-13);
    return {dim, dim * omega * integral, omega};
}

double hemisphere_volume(int dim) { return cap_volume(dim, kHalfPi).value; }

double equivalent_radius(int dim, double volume) {
    const double hemi = hemisphere_volume(dim);
    if (!(volume > 0.0)) throw InputError("equivalent_radius: volume must be positive");
    if (volume > hemi * (1.0 + 1e-12))
        throw InputError("equivalent_radius: volume exceeds the hemisphere; domain not admissible");
    if (volume >= hemi) return kHalfPi;
    auto f = [&](double g) { return cap_volume(dim, std::max(g, 1e-300)).value - volume; };
    std::uintmax_t max_iter = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, 1e-300, kHalfPi, -volume, hemi - volume,
                                                    boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (a + b);
}

Vec3 to_sphere(double x, double y) {
    const double s2 = x * x + y * y;
    const double d = 1.0 + s2;
    return {2.0 * x / d, 2.0 * y / d, (1.0 - s2) / d};
}

std::array<double, 2> to_chart(const Vec3& point) {
    const double d = 1.0 + point[2];
    if (d <= 0.0) throw InputError("to_chart: the South Pole has no chart image");
    return {point[0] / d, point[1] / d};
}

Vec3 to_sphere_derivative(double x, double y, double dx, double dy) {
    const double s2 = x * x + y * y;
    const double d = 1.0 + s2;
    const double ds2 = 2.0 * (x * dx + y * dy);
    const double inv = 1.0 / d;
    return {2.0 * (dx * d - x * ds2) * inv * inv, 2.0 * (dy * d - y * ds2) * inv * inv, -2.0 * ds2 * inv * inv};
}

TestFunctionSet::TestFunctionSet(cap::ExtendedProfile profile, int dim) : profile_(std::move(profile)), dim_(dim) {
    if (dim < 2) throw InputError("TestFunctionSet: dimension must be >= 2");
}

std::vector<double> TestFunctionSet::values(const ChartPoint& point) const {
    if (static_cast<int>(point.coords.size()) != dim_) throw InputError("TestFunctionSet: wrong point dimension");
    std::vector<double> out(dim_, 0.0);
    if (point.s == 0.0) return out;
    const double g = profile_.value(point.theta);
    for (int i = 0; i < dim_; ++i) out[i] = g * point.coords[i] / point.s;
    return out;
}

std::vector<double> TestFunctionSet::values(std::span<const double> coords) const {
    return values(ChartPoint::from_coords(std::vector<double>(coords.begin(), coords.end())));
}

GradientCheck gradient_identity_check(const TestFunctionSet& tf, const ChartPoint& point, double h) {
    const int n = tf.dim();
    if (static_cast<int>(point.coords.size()) != n) throw InputError("gradient_identity_check: wrong point dimension");
    if (!(h > 0.0)) throw InputError("gradient_identity_check: step must be positive");
    if (point.s < 8.0 * h) throw InputError("gradient_identity_check: point too close to the origin");
    // theta moves by at most p h per coordinate step
    const double gamma = tf.profile().gamma();
    const double p = conformal_factor(point.s);
    if (gamma < 0.5 * std::numbers::pi && std::abs(point.theta - gamma) < 8.0 * p * h)
        throw InputError("gradient_identity_check: point too close to the kink of G");

    GradientCheck out;
    out.per_component_residual.assign(n, 0.0);
    std::vector<std::vector<double>> grad(n, std::vector<double>(n, 0.0));  // grad[i][j] = d Phi_i / d x_j
    for (int j = 0; j < n; ++j) {
        auto plus = point.coords;
        auto minus = point.coords;
        plus[j] += h;
        minus[j] -= h;
        const auto fp = tf.values(std::span<const double>(plus));
        const auto fm = tf.values(std::span<const double>(minus));
        for (int i = 0; i < n; ++i) grad[i][j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    const double G = tf.profile().value(point.theta);
    const double Gp = tf.profile().slope(point.theta);
    const double st = std::sin(point.theta);
    const double s = point.s;
    double fd_total = 0.0;
    for (int i = 0; i < n; ++i) {
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) norm2 += grad[i][j] * grad[i][j];
        norm2 /= p * p;
        fd_total += norm2;
        const double xi2 = point.coords[i] * point.coords[i];
        const double exact_i = Gp * Gp * xi2 / (s * s) + G * G / (s * s * p * p) - G * G * xi2 / (p * p * s * s * s * s);
        out.per_component_residual[i] = norm2 - exact_i;
    }
    out.fd_value = fd_total;
    out.exact_value = Gp * Gp + (n - 1) * G * G / (st * st);
    out.residual = out.fd_value - out.exact_value;
    return out;
}

}  // namespace hemi::stereo
