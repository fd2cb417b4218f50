#pragma once

// Adaptive Dormand-Prince 5(4) for small fixed-size systems. Internal to the
// library; the cap solver is the only user.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>

#include "hemi/errors.hpp"

namespace hemi::detail {

template <std::size_t Dim>
class DormandPrince {
public:
    using State = std::array<double, Dim>;
    using Rhs = std::function<State(double, const State&)>;
    /// Called after every accepted step with (t_old, y_old, t_new, y_new).
    using StepObserver = std::function<void(double, const State&, double, const State&)>;

    DormandPrince(Rhs rhs, double rel_tol) : rhs_(std::move(rhs)), rtol_(rel_tol) {}

    /// Integrates from (t0, y0) to t1, landing exactly on t1. The error of each
    /// component is measured against the largest magnitude seen so far over
    /// all components, so zero crossings never stall the controller.
    State integrate(double t0, const State& y0, double t1, const StepObserver& observer = {}) {
        double t = t0;
        State y = y0;
        double h = h_hint_ > 0.0 ? h_hint_ : 1e-3 * (t1 - t0);
        if (h_hint_ <= 0.0 && t0 > 0.0) h = std::min(h, 0.1 * t0);
        if (h <= 0.0) h = 1e-6;
        double scale = 0.0;
        for (double v : y) scale = std::max(scale, std::abs(v));

        State k1 = rhs_(t, y);
        int steps = 0;
        while (t < t1) {
            if (++steps > max_steps_) throw SolverError("Dormand-Prince: step budget exhausted");
            bool last = false;
            if (t + h >= t1) {
                h = t1 - t;
                last = true;
            }
            State k2 = rhs_(t + c2 * h, combine(y, h, {a21}, k1));
            State k3 = rhs_(t + c3 * h, combine(y, h, {a31, a32}, k1, k2));
            State k4 = rhs_(t + c4 * h, combine(y, h, {a41, a42, a43}, k1, k2, k3));
            State k5 = rhs_(t + c5 * h, combine(y, h, {a51, a52, a53, a54}, k1, k2, k3, k4));
            State k6 = rhs_(t + h, combine(y, h, {a61, a62, a63, a64, a65}, k1, k2, k3, k4, k5));
            State ynew;
            for (std::size_t i = 0; i < Dim; ++i)
                ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            State k7 = rhs_(t + h, ynew);

            double local_scale = scale;
            for (std::size_t i = 0; i < Dim; ++i) local_scale = std::max(local_scale, std::abs(ynew[i]));
            if (!(local_scale > 0.0)) local_scale = 1e-300;
            double err = 0.0;
            for (std::size_t i = 0; i < Dim; ++i) {
                double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                double sc = rtol_ * (local_scale + std::max(std::abs(y[i]), std::abs(ynew[i])));
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err)) throw SolverError("Dormand-Prince: non-finite state");

            if (err <= 1.0) {
                double t_new = last ? t1 : t + h;
                if (observer) observer(t, y, t_new, ynew);
                t = t_new;
                y = ynew;
                k1 = k7;
                scale = local_scale;
                double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (!last) h_hint_ = h * fac;
                h *= fac;
            } else {
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (h < 1e-15 * std::max(1.0, std::abs(t))) throw SolverError("Dormand-Prince: step size underflow");
            }
        }
        return y;
    }

    void reset_step_hint() { h_hint_ = 0.0; }

private:
    template <typename... Ks>
    static State combine(const State& y, double h, std::initializer_list<double> a, const Ks&... ks) {
        State out = y;
        const State* list[] = {&ks...};
        std::size_t j = 0;
        for (double aj : a) {
            for (std::size_t i = 0; i < Dim; ++i) out[i] += h * aj * (*list[j])[i];
            ++j;
        }
        return out;
    }

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Rhs rhs_;
    double rtol_;
    double h_hint_ = 0.0;
    int max_steps_ = 2'000'000;
};

}  // namespace hemi::detail
