#pragma once

// Integrals of zonal functions f(theta) over hemisphere domains, reduced to
// boundary integrals so that they are exact up to quadrature tolerance.
//
// dim 2: int_Omega f(theta) A(psi) dw = oint_{dOmega} H(theta) A(psi) dpsi,
//        H(theta) = int_0^theta f(t) sin t dt, (theta, psi) polar angles of R X.
// dim 3: int_Omega f(theta) B(phi) dw = 2 pi int_0^pi B(phi) sin(phi) H(Gamma(phi)) dphi,
//        H(theta) = int_0^theta f(t) sin^2 t dt.

#include <array>
#include <functional>
#include <vector>

#include "hemi/domain.hpp"

namespace hemi::integrals {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 identity3();

/// H(theta) = int_0^theta f(t) sin^k t dt on [0, theta_max], tabulated on
/// panels no wider than 1e-3 that respect the breakpoints of f.
class RadialPrimitive {
public:
    RadialPrimitive(std::function<double(double)> f, int weight_power, std::vector<double> breakpoints = {},
                    double theta_max = 3.141592653589793);

    double operator()(double theta) const;
    int weight_power() const { return power_; }
    double theta_max() const { return nodes_.back(); }

private:
    double integrand(double t) const;

    std::function<double(double)> f_;
    int power_;
    std::vector<double> nodes_;
    std::vector<double> cumulative_;
};

/// dim 2 domain integral seen from the frame rotated by R (weight power 1).
double surface_integral(const BoundaryCurve& chart_boundary, const Mat3& R, const RadialPrimitive& H,
                        const std::function<double(double)>& angular, double tolerance = 1e-13);

/// dim 3 revolution domain integral (weight power 2).
double revolution_integral(const DomainSpec& spec, const RadialPrimitive& H,
                           const std::function<double(double)>& angular, double tolerance = 1e-13);

/// Integral over the cap D_gamma centred at the pole: N omega_N H(gamma), H of weight power N-1.
double cap_integral(int dim, double gamma, const RadialPrimitive& H);

/// Spherical volume of the exact domain (not of a mesh).
double exact_volume(const DomainSpec& spec);

}  // namespace hemi::integrals
