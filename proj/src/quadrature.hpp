#pragma once

#include <array>

namespace hemi::detail {

// 5-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 5> kGaussNodes5 = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights5 = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891};

template <typename F>
double gauss_legendre(double a, double b, F&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) sum += kGaussWeights5[i] * f(mid + half * kGaussNodes5[i]);
    return half * sum;
}

/// Barycentric point (l1, l2, l3) with weight summing to 1 over the rule.
struct TriangleNode {
    double l1, l2, l3, w;
};

/// Mid-edge rule, exact for quadratics.
inline constexpr std::array<TriangleNode, 3> kMidEdgeRule = {{
    {0.5, 0.5, 0.0, 1.0 / 3.0},
    {0.0, 0.5, 0.5, 1.0 / 3.0},
    {0.5, 0.0, 0.5, 1.0 / 3.0},
}};

/// 7-point degree-5 rule (Radon / Dunavant); all nodes strictly inside.
inline constexpr double kA1 = 0.0597158717897698, kB1 = 0.4701420641051151;
inline constexpr double kA2 = 0.7974269853530873, kB2 = 0.1012865073234563;
inline constexpr double kW0 = 0.225, kW1 = 0.1323941527885062, kW2 = 0.1259391805448271;
inline constexpr std::array<TriangleNode, 7> kSevenPointRule = {{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, kW0},
    {kA1, kB1, kB1, kW1},
    {kB1, kA1, kB1, kW1},
    {kB1, kB1, kA1, kW1},
    {kA2, kB2, kB2, kW2},
    {kB2, kA2, kB2, kW2},
    {kB2, kB2, kA2, kW2},
}};

}  // namespace hemi::detail
