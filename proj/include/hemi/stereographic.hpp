#pragma once

// Stereographic chart of S^N from the South Pole onto the equatorial plane,
// the conformal factor p(s) = 2 / (1 + s^2), spherical volumes, and the
// trial functions Phi_i(x) = G(theta) x_i / s built from the extended cap profile.

#include <array>
#include <span>
#include <vector>

#include "hemi/cap_spectrum.hpp"

namespace hemi::stereo {

using Vec3 = std::array<double, 3>;

double theta_from_s(double s);
double s_from_theta(double theta);
double conformal_factor(double s);

/// A point of the chart together with its radius s and polar angle theta = 2 arctan s.
struct ChartPoint {
    std::vector<double> coords;
    double s = 0.0;
    double theta = 0.0;

    static ChartPoint from_coords(std::vector<double> coords);
};

double unit_ball_volume(int dim);

struct SphereVolume {
    int dim = 2;
    double value = 0.0;
    double unit_ball_volume = 0.0;
};

/// N omega_N int_0^gamma sin^{N-1} t dt.
SphereVolume cap_volume(int dim, double gamma);
/// Volume of the open hemisphere of S^N.
double hemisphere_volume(int dim);
/// Radius of the cap whose volume equals `volume`.
double equivalent_radius(int dim, double volume);

/// S^2 <-> chart (dim 2 only). The North Pole maps to the chart origin.
Vec3 to_sphere(double x, double y);
std::array<double, 2> to_chart(const Vec3& point);
/// Derivative of to_sphere along the chart direction (dx, dy).
Vec3 to_sphere_derivative(double x, double y, double dx, double dy);

class TestFunctionSet {
public:
    TestFunctionSet(cap::ExtendedProfile profile, int dim);

    int dim() const { return dim_; }
    const cap::ExtendedProfile& profile() const { return profile_; }

    /// Phi_i(point); the origin is mapped to 0 by continuity.
    std::vector<double> values(const ChartPoint& point) const;
    /// Phi_i at raw chart coordinates.
    std::vector<double> values(std::span<const double> coords) const;

private:
    cap::ExtendedProfile profile_;
    int dim_;
};

struct GradientCheck {
    double fd_value = 0.0;      ///< sum_i |(1/p) grad Phi_i|^2 by central differences
    double exact_value = 0.0;   ///< G'^2 + (N-1) G^2 / sin^2
    double residual = 0.0;      ///< fd_value - exact_value
    std::vector<double> per_component_residual;  ///< one entry per i against the single-component identity
};

/// Compares the finite-difference spherical gradient energy of the Phi_i
/// with the closed form. Throws InputError near the origin or the kink at gamma.
GradientCheck gradient_identity_check(const TestFunctionSet& tf, const ChartPoint& point, double h);

}  // namespace hemi::stereo
