#include "hemi/cap_spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hemi/errors.hpp"
#include "ode.hpp"
#include "quadrature.hpp"

namespace hemi::cap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

using Stepper = detail::DormandPrince<2>;
using State = Stepper::State;

// Coefficients b_{l+2j}, j = 0..3, of the Frobenius solution with b_l = 1,
// from the equation multiplied through by sin^2:
//   sin^2 y'' + (N-1) sin cos y' + (mu sin^2 - L) y = 0.
std::array<double, 4> frobenius_series(int dim, int l, double mu) {
    const int n_max = l + 6;
    std::vector<double> s(n_max + 3, 0.0), c(n_max + 3, 0.0), b(n_max + 1, 0.0);
    // sin^2 t = sum_{m>=1} (-1)^{m+1} 2^{2m-1} t^{2m} / (2m)!
    // sin t cos t = sum_{m>=0} (-1)^m 2^{2m} t^{2m+1} / (2m+1)!
    double fact = 1.0;
    for (int j = 1; j < static_cast<int>(s.size()); ++j) {
        fact *= j;
        if (j % 2 == 0) {
            int m = j / 2;
            s[j] = ((m + 1) % 2 == 0 ? 1.0 : -1.0) * std::ldexp(1.0, 2 * m - 1) / fact;
        } else {
            int m = (j - 1) / 2;
            c[j] = (m % 2 == 0 ? 1.0 : -1.0) * std::ldexp(1.0, 2 * m) / fact;
        }
    }
    auto coeff = [&](int idx) { return (idx >= 0 && idx <= n_max) ? b[idx] : 0.0; };
    b[l] = 1.0;
    for (int n = l + 2; n <= n_max; n += 2) {
        double rest = 0.0;
        for (int j = 4; j <= n + 2 && j < static_cast<int>(s.size()); ++j)
            rest += s[j] * (n - j + 2) * (n - j + 1) * coeff(n - j + 2);
        for (int j = 3; j <= n + 1 && j < static_cast<int>(c.size()); ++j)
            rest += (dim - 1) * c[j] * (n - j + 1) * coeff(n - j + 1);
        for (int j = 2; j <= n && j < static_cast<int>(s.size()); ++j) rest += mu * s[j] * coeff(n - j);
        const double D = static_cast<double>(n - l) * (n + l + dim - 2);
        b[n] = -rest / D;
    }
    return {b[l], b[l + 2], b[l + 4], b[l + 6]};
}

struct SeriesEval {
    double y, yp, ypp;
};

SeriesEval eval_series(const std::array<double, 4>& a, int l, double t) {
    SeriesEval out{0.0, 0.0, 0.0};
    for (int j = 0; j < 4; ++j) {
        const int n = l + 2 * j;
        out.y += a[j] * std::pow(t, n);
        if (n >= 1) out.yp += a[j] * n * std::pow(t, n - 1);
        if (n >= 2) out.ypp += a[j] * n * (n - 1) * std::pow(t, n - 2);
    }
    return out;
}

Stepper::Rhs make_rhs(int dim, double L, double mu) {
    return [dim, L, mu](double t, const State& y) -> State {
        const double st = std::sin(t);
        const double ct = std::cos(t);
        return {y[1], -(dim - 1) * (ct / st) * y[1] + (L / (st * st) - mu) * y[0]};
    };
}

struct ShotResult {
    State end;
    int sign_changes = 0;
};

ShotResult shoot(const CapProblem& p, double mu, const ShootingOptions& opt) {
    const auto series = frobenius_series(p.dim, p.mode_l, mu);
    const auto start = eval_series(series, p.mode_l, opt.theta_start);
    Stepper stepper(make_rhs(p.dim, p.potential(), mu), opt.rel_tol);
    ShotResult r;
    r.end = stepper.integrate(opt.theta_start, {start.y, start.yp}, p.gamma,
                              [&r](double, const State& a, double, const State& b) {
                                  if ((a[0] > 0.0 && b[0] < 0.0) || (a[0] < 0.0 && b[0] > 0.0)) ++r.sign_changes;
                              });
    return r;
}

// Monotone in mu: pi * (#zeros of y) + angle of (y, y') at gamma measured from
// the last zero. Neumann eigenvalue k sits at (k - 1/2) pi.
double phase(const ShotResult& r) {
    const double sigma = (r.sign_changes % 2 == 0) ? 1.0 : -1.0;
    double psi = std::atan2(sigma * r.end[0], sigma * r.end[1]);
    if (psi < -kHalfPi) psi += 2.0 * kPi;  // y barely past a zero at gamma
    return kPi * r.sign_changes + psi;
}

RadialEigenpair tabulate(const CapProblem& p, int k, double mu, const ShootingOptions& opt) {
    RadialEigenpair out;
    out.dim = p.dim;
    out.mode_l = p.mode_l;
    out.k = k;
    out.gamma = p.gamma;
    out.mu = mu;
    out.series = frobenius_series(p.dim, p.mode_l, mu);
    out.series_limit = opt.theta_start;

    const int n = opt.output_points;
    out.theta_grid.resize(n);
    out.y_values.resize(n);
    out.y_prime_values.resize(n);
    for (int i = 0; i < n; ++i) out.theta_grid[i] = p.gamma * i / (n - 1);
    out.theta_grid[n - 1] = p.gamma;

    Stepper stepper(make_rhs(p.dim, p.potential(), mu), opt.rel_tol);
    const auto start = eval_series(out.series, p.mode_l, opt.theta_start);
    double t = opt.theta_start;
    State y{start.y, start.yp};
    for (int i = 0; i < n; ++i) {
        const double ti = out.theta_grid[i];
        if (ti <= opt.theta_start) {
            const auto s = eval_series(out.series, p.mode_l, ti);
            out.y_values[i] = s.y;
            out.y_prime_values[i] = s.yp;
            continue;
        }
        y = stepper.integrate(t, y, ti);
        t = ti;
        out.y_values[i] = y[0];
        out.y_prime_values[i] = y[1];
    }
    return out;
}

// Integrated form of the equation over each output interval:
//   [p y']_a^b + int_a^b p (mu - L/sin^2) y = 0,  p = sin^{N-1}.
double integrated_residual(const RadialEigenpair& g) {
    const double L = static_cast<double>(g.mode_l) * (g.mode_l + g.dim - 2);
    auto p = [&](double t) { return std::pow(std::sin(t), g.dim - 1); };
    double scale = 0.0;
    for (std::size_t i = 0; i < g.theta_grid.size(); ++i) {
        const double pt = p(g.theta_grid[i]);
        scale = std::max({scale, std::abs(pt * g.y_prime_values[i]), std::abs(pt * g.y_values[i])});
    }
    if (scale == 0.0) scale = 1.0;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < g.theta_grid.size(); ++i) {
        const double a = g.theta_grid[i];
        const double b = g.theta_grid[i + 1];
        const double flux = p(b) * g.y_prime_values[i + 1] - p(a) * g.y_prime_values[i];
        const double source = detail::gauss_legendre(a, b, [&](double t) {
            const double st = std::sin(t);
            return p(t) * (g.mu - L / (st * st)) * g.value(t);
        });
        worst = std::max(worst, std::abs(flux + source));
    }
    return worst / scale;
}

}  // namespace

void CapProblem::validate() const {
    if (dim < 2) throw InputError("cap problem: dimension must be >= 2");
    if (!(gamma > 0.0) || gamma > kHalfPi + 1e-15) throw InputError("cap problem: gamma must lie in (0, pi/2]");
    if (mode_l < 0) throw InputError("cap problem: mode l must be >= 0");
}

std::size_t RadialEigenpair::interval(double theta) const {
    const std::size_t n = theta_grid.size();
    const double step = gamma / static_cast<double>(n - 1);
    auto i = static_cast<std::size_t>(std::floor(theta / step));
    return std::min(i, n - 2);
}

double RadialEigenpair::curvature(double theta) const {
    if (theta <= series_limit) return eval_series(series, mode_l, theta).ypp;
    const double L = static_cast<double>(mode_l) * (mode_l + dim - 2);
    const double st = std::sin(theta);
    // y'' recovered from the equation at a grid node via value/slope
    return -(dim - 1) * (std::cos(theta) / st) * slope(theta) + (L / (st * st) - mu) * value(theta);
}

double RadialEigenpair::value(double theta) const {
    if (theta <= series_limit) return eval_series(series, mode_l, theta).y;
    const std::size_t i = interval(theta);
    const double a = theta_grid[i];
    const double h = theta_grid[i + 1] - a;
    const double s = (theta - a) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y_values[i] + h10 * h * y_prime_values[i] + h01 * y_values[i + 1] +
           h11 * h * y_prime_values[i + 1];
}

double RadialEigenpair::slope(double theta) const {
    if (theta <= series_limit) return eval_series(series, mode_l, theta).yp;
    const std::size_t i = interval(theta);
    const double a = theta_grid[i];
    const double b = theta_grid[i + 1];
    const double h = b - a;
    const double s = (theta - a) / h;
    const double L = static_cast<double>(mode_l) * (mode_l + dim - 2);
    auto node_curv = [&](std::size_t j) {
        const double t = theta_grid[j];
        if (t <= series_limit) return eval_series(series, mode_l, t).ypp;
        const double st = std::sin(t);
        return -(dim - 1) * (std::cos(t) / st) * y_prime_values[j] + (L / (st * st) - mu) * y_values[j];
    };
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y_prime_values[i] + h10 * h * node_curv(i) + h01 * y_prime_values[i + 1] +
           h11 * h * node_curv(i + 1);
}

std::vector<RadialEigenpair> solve_mode(const CapProblem& problem, int k_max, const ShootingOptions& options) {
    problem.validate();
    if (k_max < 1) throw InputError("solve_mode: k_max must be >= 1");
    if (options.output_points < 4) throw InputError("solve_mode: need at least 4 output points");

    std::vector<RadialEigenpair> out;
    double lo = problem.mode_l == 0 ? -1.0 : 0.0;
    for (int k = 1; k <= k_max; ++k) {
        const double target = (k - 0.5) * kPi;
        double step = std::max(1.0, std::abs(lo));
        double hi = lo + step;
        int guard = 0;
        while (phase(shoot(problem, hi, options)) <= target) {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
            if (++guard > 200) throw SolverError("solve_mode: could not bracket eigenvalue");
        }
        int iterations = 0;
        while (hi - lo > options.bisection_tol * std::max(1.0, std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            if (phase(shoot(problem, mid, options)) <= target) lo = mid;
            else hi = mid;
            if (++iterations > 400) throw SolverError("solve_mode: bisection did not converge");
        }
        // secant polish on the Neumann mismatch y'(gamma)
        const double f_lo = shoot(problem, lo, options).end[1];
        const double f_hi = shoot(problem, hi, options).end[1];
        double mu = 0.5 * (lo + hi);
        if (f_lo != f_hi) {
            const double cand = lo - f_lo * (hi - lo) / (f_hi - f_lo);
            if (cand >= lo && cand <= hi) mu = cand;
        }
        auto pair = tabulate(problem, k, mu, options);
        pair.ode_residual = integrated_residual(pair);
        if (!std::isfinite(pair.ode_residual)) throw SolverError("solve_mode: non-finite profile");
        if (!out.empty() && !(mu > out.back().mu)) throw SolverError("solve_mode: eigenvalues not increasing");
        out.push_back(std::move(pair));
        lo = hi;
    }
    return out;
}

Mu1Result mu1_cap(int dim, double gamma, const ShootingOptions& options) {
    Mu1Result r;
    r.mu_11 = solve_mode({dim, gamma, 1}, 1, options).front().mu;
    r.mu_02 = solve_mode({dim, gamma, 0}, 2, options).back().mu;
    if (std::abs(r.mu_02 - r.mu_11) < 1e-10) {
        r.mu1 = r.mu_11;
        r.attained_by_l1 = true;
        r.warning = "mu_{0,2} and mu_{1,1} coincide to 1e-10; reporting mu_{1,1}";
    } else {
        r.mu1 = std::min(r.mu_11, r.mu_02);
        r.attained_by_l1 = r.mu_11 < r.mu_02;
    }
    return r;
}

double frobenius_coefficient(double mu1, int dim) {
    if (dim < 2) throw InputError("frobenius_coefficient: dimension must be >= 2");
    return (mu1 - (2.0 / 3.0) * (dim - 1)) / (2.0 * dim + 4.0);
}

ExtendedProfile::ExtendedProfile(RadialEigenpair g, double gamma)
    : g_(std::move(g)), gamma_(gamma), plateau_(g_.value(gamma)) {}

double ExtendedProfile::value(double theta) const { return theta <= gamma_ ? g_.value(theta) : plateau_; }

double ExtendedProfile::slope(double theta) const { return theta <= gamma_ ? g_.slope(theta) : 0.0; }

ExtendedProfile extend_profile(const RadialEigenpair& g, double gamma) {
    if (g.mode_l != 1 || g.k != 1) throw InputError("extend_profile: needs the (l=1, k=1) eigenpair");
    if (std::abs(gamma - g.gamma) > 1e-14) throw InputError("extend_profile: gamma does not match the profile");
    double max_slope = 0.0;
    for (double v : g.y_prime_values) max_slope = std::max(max_slope, std::abs(v));
    for (std::size_t i = 0; i < g.y_prime_values.size(); ++i) {
        if (g.y_prime_values[i] < -1e-9 * max_slope) {
            std::ostringstream msg;
            msg << "extend_profile: profile decreases at theta=" << g.theta_grid[i];
            throw SolverError(msg.str());
        }
    }
    return ExtendedProfile(g, gamma);
}

LemmaReport check_lemma(const ExtendedProfile& G, int dim, double mu1, const LemmaOptions& options) {
    LemmaReport r;
    r.frobenius_a = frobenius_coefficient(mu1, dim);

    const double gamma = G.gamma();
    const int n = options.grid_points;
    r.max_W = -std::numeric_limits<double>::infinity();
    r.max_ratio_step = -std::numeric_limits<double>::infinity();
    r.min_ratio = std::numeric_limits<double>::infinity();
    r.max_ratio = -std::numeric_limits<double>::infinity();
    double prev_ratio = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = options.theta_from + (kHalfPi - options.theta_from) * i / (n - 1);
        const double ratio = G.value(t) / std::sin(t);
        r.min_ratio = std::min(r.min_ratio, ratio);
        r.max_ratio = std::max(r.max_ratio, ratio);
        if (i > 0) r.max_ratio_step = std::max(r.max_ratio_step, ratio - prev_ratio);
        prev_ratio = ratio;
    }
    for (int i = 0; i < n; ++i) {
        const double t = options.theta_from + (gamma - options.theta_from) * i / (n - 1);
        const double W = G.slope(t) - G.value(t) * std::cos(t) / std::sin(t);
        r.max_W = std::max(r.max_W, W);
    }
    r.ratio_monotone = r.max_ratio_step <= 1e-10;
    r.strict = gamma < kHalfPi - 1e-12 && r.max_ratio_step < 0.0;

    // (g(t) - t) / t^3 = -a + c1 t^2 + c2 t^4 on a short interval near 0
    const double t_hi = std::min(0.3, 0.5 * gamma);
    const double t_lo = 0.1 * t_hi;
    const int m = 60;
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (m - 1);
        A(i, 0) = 1.0;
        A(i, 1) = t * t;
        A(i, 2) = t * t * t * t;
        rhs(i) = (G.value(t) - t) / (t * t * t);
    }
    const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(rhs);
    r.fitted_cubic = -coef(0);
    return r;
}

double rayleigh_quotient_radial(const RadialEigenpair& g, int dim, double gamma) {
    if (std::abs(gamma - g.gamma) > 1e-14) throw InputError("rayleigh_quotient_radial: gamma mismatch");
    const double L = static_cast<double>(g.mode_l) * (g.mode_l + dim - 2);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < g.theta_grid.size(); ++i) {
        const double a = g.theta_grid[i];
        const double b = g.theta_grid[i + 1];
        // the sin^{N-1} weight keeps L g^2 / sin^2 bounded: g ~ t^l near 0
        num += detail::gauss_legendre(a, b, [&](double t) {
            const double st = std::sin(t);
            const double y = g.value(t);
            const double yp = g.slope(t);
            return (yp * yp + L * y * y / (st * st)) * std::pow(st, dim - 1);
        });
        den += detail::gauss_legendre(a, b, [&](double t) {
            const double y = g.value(t);
            return y * y * std::pow(std::sin(t), dim - 1);
        });
    }
    if (!(den > 0.0) || !std::isfinite(num)) throw SolverError("rayleigh_quotient_radial: quadrature failure");
    return num / den;
}

}  // namespace hemi::cap
