#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hemi/cap_spectrum.hpp"
#include "hemi/errors.hpp"
#include "support/radial_fd.hpp"

using namespace hemi::cap;
using std::numbers::pi;

TEST_CASE("hemisphere: first eigenvalue equals the dimension") {
    for (int N : {2, 3, 4, 6, 10}) {
        const auto r = mu1_cap(N, pi / 2);
        CHECK(r.mu1 == doctest::Approx(N).epsilon(1e-9));
        CHECK(r.attained_by_l1);
    }
}

TEST_CASE("hemisphere: second zonal eigenvalue") {
    CHECK(solve_mode({2, pi / 2, 0}, 2)[1].mu == doctest::Approx(6.0).epsilon(1e-8));
    CHECK(solve_mode({3, pi / 2, 0}, 2)[1].mu == doctest::Approx(8.0).epsilon(1e-8));
}

TEST_CASE("zonal ground state is the constant") {
    const auto r = solve_mode({2, 1.0, 0}, 1);
    CHECK(std::abs(r[0].mu) < 1e-9);
}

TEST_CASE("shooting agrees with the finite-difference reference") {
    for (int N : {2, 3})
        for (double g : {pi / 6, pi / 4, pi / 3, 1.2}) {
            const double shoot = solve_mode({N, g, 1}, 1)[0].mu;
            const double ref = hemi::testing::radial_fd_extrapolated(N, g);
            CHECK(std::abs(shoot - ref) / ref < 1e-6);
        }
}

TEST_CASE("higher modes ascend and have k-1 interior sign changes") {
    const auto modes = solve_mode({2, 1.0, 1}, 3);
    REQUIRE(modes.size() == 3);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (k > 0) CHECK(modes[k].mu > modes[k - 1].mu);
        int changes = 0;
        const auto& y = modes[k].y_values;
        for (std::size_t i = 2; i < y.size(); ++i)
            if ((y[i] > 0) != (y[i - 1] > 0)) ++changes;
        CHECK(changes == static_cast<int>(k));
        CHECK(modes[k].ode_residual < 1e-6);
    }
}

TEST_CASE("profile satisfies the Neumann condition and normalization") {
    const auto g = solve_mode({3, 0.9, 1}, 1)[0];
    CHECK(std::abs(g.slope(0.9)) < 1e-7);
    CHECK(g.slope(0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(g.value(0.0) == doctest::Approx(0.0));
}

TEST_CASE("radial Rayleigh quotient reproduces the eigenvalue") {
    for (int N : {2, 3}) {
        const double gamma = 1.1;
        const auto g = solve_mode({N, gamma, 1}, 1)[0];
        CHECK(rayleigh_quotient_radial(g, N, gamma) == doctest::Approx(g.mu).epsilon(1e-8));
    }
}

TEST_CASE("mu1 decreases with the radius and exceeds N below the hemisphere") {
    for (int N : {2, 3}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double g = 0.2; g < 1.57; g += 0.15) {
            const auto r = mu1_cap(N, g);
            CHECK(r.mu1 < prev);
            CHECK(r.mu1 > N);
            CHECK(r.mu1 == doctest::Approx(std::min(r.mu_11, r.mu_02)));
            prev = r.mu1;
        }
    }
}

TEST_CASE("small caps approach the Euclidean disk value j'_{1,1}^2 / gamma^2") {
    const double j11 = 1.8411837813406593;
    const double gamma = 0.02;
    CHECK(mu1_cap(2, gamma).mu1 * gamma * gamma == doctest::Approx(j11 * j11).epsilon(1e-3));
}

TEST_CASE("Frobenius coefficient") {
    CHECK(frobenius_coefficient(2.0, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(frobenius_coefficient(3.0, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(frobenius_coefficient(1.0, 1), hemi::InputError);
}

TEST_CASE("lemma checks") {
    SUBCASE("strict below the hemisphere") {
        const double gamma = pi / 4;
        const auto g = solve_mode({2, gamma, 1}, 1)[0];
        const auto rep = check_lemma(extend_profile(g, gamma), 2, g.mu);
        CHECK(rep.max_W < 0.0);
        CHECK(rep.strict);
        CHECK(rep.fitted_cubic == doctest::Approx(rep.frobenius_a).epsilon(1e-4));
    }
    SUBCASE("degenerate at the hemisphere") {
        const auto g = solve_mode({2, pi / 2, 1}, 1)[0];
        const auto rep = check_lemma(extend_profile(g, pi / 2), 2, g.mu);
        CHECK(std::abs(rep.max_W) < 1e-10);
        CHECK(std::abs(rep.max_ratio_step) < 1e-10);
        CHECK_FALSE(rep.strict);
    }
}

TEST_CASE("extended profile is constant past gamma") {
    const double gamma = 0.7;
    const auto G = extend_profile(solve_mode({2, gamma, 1}, 1)[0], gamma);
    CHECK(G.value(1.5) == G.plateau());
    CHECK(G.slope(1.5) == 0.0);
    CHECK(G.value(gamma) == doctest::Approx(G.plateau()));
}

TEST_CASE("invalid problems") {
    CHECK_THROWS_AS(solve_mode({2, 1.7, 1}, 1), hemi::InputError);
    CHECK_THROWS_AS(solve_mode({1, 1.0, 1}, 1), hemi::InputError);
    CHECK_THROWS_AS(solve_mode({2, 0.0, 1}, 1), hemi::InputError);
    CHECK_THROWS_AS(solve_mode({2, 1.0, -1}, 1), hemi::InputError);
    CHECK_THROWS_AS(solve_mode({2, 1.0, 1}, 0), hemi::InputError);
}
