#pragma once

// Separated radial Neumann eigenproblems on a polar cap D_gamma of S^N:
//
//   -(sin^{N-1} t y')' / sin^{N-1} t + l(l+N-2)/sin^2 t y = mu y   on (0, gamma)
//   y(0) finite,  y'(gamma) = 0
//
// solved by Frobenius start + adaptive Dormand-Prince shooting, plus the
// monotonicity checks on the first non-constant eigenfunction.

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace hemi::cap {

/// One radial problem: sphere dimension, cap radius and angular index.
struct CapProblem {
    int dim = 2;
    double gamma = 1.5707963267948966;
    int mode_l = 0;

    double potential() const { return static_cast<double>(mode_l) * (mode_l + dim - 2); }
    void validate() const;
};

struct ShootingOptions {
    double theta_start = 1e-4;     ///< left end of the numerical integration
    double rel_tol = 1e-11;        ///< Dormand-Prince relative tolerance
    double bisection_tol = 1e-12;  ///< relative width of the final eigenvalue bracket
    int output_points = 2048;      ///< uniform output grid on [0, gamma]
};

/// A solved mode. The profile is normalized so that y ~ theta^l (1 + c2 theta^2 + ...)
/// near 0, i.e. y'(0) = 1 for l = 1.
struct RadialEigenpair {
    int dim = 2;
    int mode_l = 0;
    int k = 1;
    double gamma = 0.0;
    double mu = 0.0;
    std::vector<double> theta_grid;
    std::vector<double> y_values;
    std::vector<double> y_prime_values;
    /// Coefficients of theta^{l+2j}, j = 0..3, of the Frobenius series at 0.
    std::array<double, 4> series{};
    double series_limit = 1e-4;
    /// Max over output intervals of the integrated ODE residual, relative to max|sin^{N-1} y'|.
    double ode_residual = 0.0;

    double value(double theta) const;
    double slope(double theta) const;
    /// y'' from the differential equation itself (series below series_limit).
    double curvature(double theta) const;

private:
    std::size_t interval(double theta) const;
};

/// Ascending eigenpairs mu_{l,1} < ... < mu_{l,k_max}.
std::vector<RadialEigenpair> solve_mode(const CapProblem& problem, int k_max,
                                        const ShootingOptions& options = {});

struct Mu1Result {
    double mu1 = 0.0;
    double mu_11 = 0.0;
    double mu_02 = 0.0;
    bool attained_by_l1 = true;
    std::optional<std::string> warning;
};

/// mu_1(D_gamma) = min(mu_{0,2}, mu_{1,1}).
Mu1Result mu1_cap(int dim, double gamma, const ShootingOptions& options = {});

/// Coefficient a in G(t) = t - a t^3 + o(t^3).
double frobenius_coefficient(double mu1, int dim);

/// G(t) = g(t) for t <= gamma and g(gamma) afterwards; defined on [0, pi).
class ExtendedProfile {
public:
    ExtendedProfile(RadialEigenpair g, double gamma);

    double gamma() const { return gamma_; }
    double plateau() const { return plateau_; }
    const RadialEigenpair& profile() const { return g_; }

    double value(double theta) const;
    double slope(double theta) const;

private:
    RadialEigenpair g_;
    double gamma_;
    double plateau_;
};

ExtendedProfile extend_profile(const RadialEigenpair& g, double gamma);

struct LemmaReport {
    double frobenius_a = 0.0;
    double fitted_cubic = 0.0;      ///< a fitted from the solved profile (minus its t^3 coefficient)
    double max_W = 0.0;             ///< max of G' - G cot t on [theta_from, gamma]
    double max_ratio_step = 0.0;    ///< max successive difference of G/sin t on [theta_from, pi/2]
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    bool ratio_monotone = false;    ///< non-increasing within 1e-10
    bool strict = false;            ///< strictly decreasing (only possible for gamma < pi/2)
};

struct LemmaOptions {
    int grid_points = 10000;
    double theta_from = 1e-3;
};

LemmaReport check_lemma(const ExtendedProfile& G, int dim, double mu1, const LemmaOptions& options = {});

/// Ratio of int [g'^2 + (N-1) g^2 / sin^2] sin^{N-1} and int g^2 sin^{N-1} over (0, gamma).
/// For l != 1 the potential weight is l(l+N-2) instead of N-1.
double rayleigh_quotient_radial(const RadialEigenpair& g, int dim, double gamma);

}  // namespace hemi::cap
