#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hemi/errors.hpp"
#include "hemi/region_integrals.hpp"
#include "hemi/report_io.hpp"
#include "hemi/verifier.hpp"

using namespace hemi;
using std::numbers::pi;

namespace {

cap::ExtendedProfile profile_for(const DomainSpec& spec) {
    const double gamma = stereo::equivalent_radius(spec.dim, integrals::exact_volume(spec));
    return cap::extend_profile(cap::solve_mode({spec.dim, gamma, 1}, 1)[0], gamma);
}

// chart disk of the geodesic ball with centre at colatitude t0 on the first axis
DomainSpec offset_cap(double t0, double rho) {
    const double a = stereo::s_from_theta(t0 - rho), b = stereo::s_from_theta(t0 + rho);
    DomainSpec s;
    s.kind = DomainKind::disk_region;
    s.dim = 2;
    s.center = {0.5 * (a + b), 0.0};
    s.radius = 0.5 * (b - a);
    return s;
}

}  // namespace

TEST_CASE("rotations") {
    const auto R = Rotation::to_pole({std::sin(0.5) * std::cos(1.0), std::sin(0.5) * std::sin(1.0), std::cos(0.5)});
    CHECK(R.colatitude == doctest::Approx(0.5));
    const auto north = R.apply(R.pole());
    CHECK(north[2] == doctest::Approx(1.0).epsilon(1e-14));
    const auto M = R.matrix();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double d = 0;
            for (int k = 0; k < 3; ++k) d += M[i][k] * M[j][k];
            CHECK(d == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-14));
        }
    const auto I = Rotation::identity();
    CHECK(I.apply({0.6, 0.0, 0.8})[0] == 0.6);
}

TEST_CASE("balancing a centred cap needs no rotation") {
    const auto spec = parse_domain_spec("kind = cap\ndim = 2\ngamma = 0.9\n");
    const auto b = find_balancing_rotation(spec, profile_for(spec));
    CHECK(b.success);
    CHECK(b.rotation.colatitude < 1e-12);
    CHECK(b.residual < 1e-14);
}

TEST_CASE("balancing an off-centre cap finds its centre") {
    const auto spec = offset_cap(0.4, 0.5);
    const auto b = find_balancing_rotation(spec, profile_for(spec));
    CHECK(b.success);
    CHECK(b.rotation.colatitude == doctest::Approx(0.4).epsilon(1e-7));
    CHECK(std::abs(std::sin(b.rotation.longitude)) < 1e-7);
    CHECK(b.residual < b.target);
}

TEST_CASE("balancing a perturbed cap") {
    const auto spec = parse_domain_spec("kind = perturbed_cap\ndim = 2\ngamma = 0.7\neps1 = 0.1\neps2 = 0.1\n");
    const auto b = find_balancing_rotation(spec, profile_for(spec));
    CHECK(b.success);
    CHECK(b.residual < 1e-8 * b.scale);
    CHECK(b.rotation.colatitude > 0.01);
}

TEST_CASE("verify: cap has zero margin, perturbed cap a positive one") {
    VerifyOptions opt;
    opt.h = 0.05;
    opt.proof_steps = true;
    const auto cap_rep = verify_domain(parse_domain_spec("kind = cap\ndim = 2\ngamma = 1.0471975511965976\n"), opt);
    CHECK(std::abs(cap_rep.margin) < 1e-3);
    CHECK(cap_rep.passed);
    CHECK(cap_rep.equivalent_gamma == doctest::Approx(pi / 3).epsilon(1e-13));
    REQUIRE(cap_rep.proof);
    CHECK(std::abs(cap_rep.proof->sin_weighted_residual) < 1e-6);
    CHECK(std::abs(cap_rep.proof->mass_residual) < 1e-6);
    CHECK(cap_rep.harmonic_lhs - cap_rep.harmonic_rhs == doctest::Approx(cap_rep.margin));

    const auto pert = verify_domain(parse_domain_spec("kind = perturbed_cap\ndim = 2\ngamma = 1.0\neps2 = 0.15\n"), opt);
    CHECK(pert.margin > 0.0);
    REQUIRE(pert.proof);
    CHECK(pert.proof->holds_rearrangement);
    CHECK(pert.proof->holds_sin_weighted);
    CHECK(pert.proof->holds_mass);
    CHECK(pert.proof->sin_weighted_residual < 0.0);
    CHECK(pert.proof->mass_residual > 0.0);
    CHECK(pert.proof->test_bounds.size() == 2);
    CHECK(pert.proof->orthogonality.size() == 2);
}

TEST_CASE("verify on a domain of revolution") {
    VerifyOptions opt;
    opt.h = 0.06;
    opt.proof_steps = true;
    const auto r = verify_domain(parse_domain_spec("kind = meridian_region\ndim = 3\ngamma = 0.8\nbulge = 0.2\n"), opt);
    CHECK(r.eigenvalues.size() == 5);
    CHECK(r.margin > 0.0);
    REQUIRE(r.proof);
    CHECK(r.proof->holds_sin_weighted);
    CHECK(r.proof->holds_mass);
    CHECK(r.proof->holds_rearrangement);
}

TEST_CASE("verify rejects inadmissible domains") {
    DomainSpec big;
    big.kind = DomainKind::cap;
    big.dim = 2;
    big.gamma = 1.7;
    CHECK_THROWS_AS(verify_domain(big), InputError);
}

TEST_CASE("rotated caps give the same cap comparison") {
    const double rho = 0.6;
    const double base = cap::mu1_cap(2, rho).mu1;
    for (double t0 : {0.2, 0.5, 0.9}) {
        const auto spec = offset_cap(t0, rho);
        const double g = stereo::equivalent_radius(2, integrals::exact_volume(spec));
        CHECK(g == doctest::Approx(rho).epsilon(1e-12));
        CHECK(std::abs(cap::mu1_cap(2, g).mu1 - base) < 1e-6 * base);
    }
}

TEST_CASE("sweep grid and rows") {
    SweepOptions opt;
    opt.from = 0.1;
    opt.to = pi / 2;
    opt.steps = 4;
    const auto grid = sweep_grid(opt);
    REQUIRE(grid.size() == 4);
    CHECK(grid.front() > opt.from);
    CHECK(grid.back() == opt.to);

    opt.cap_only = true;
    const auto rows = sweep(parse_domain_spec("kind = cap\ndim = 2\ngamma = 1\n"), opt);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].cap->mu1 < rows[i - 1].cap->mu1);

    SweepOptions bad;
    bad.parameter = "gamma";
    bad.from = 1.3;
    bad.to = 1.7;
    bad.steps = 4;
    bad.verify.h = 0.1;
    bad.verify.refinements = 0;
    const auto r2 = sweep(parse_domain_spec("kind = cap\ndim = 2\ngamma = 1\n"), bad);
    CHECK(r2[0].status == 0);
    CHECK(r2[3].status == 2);
    CHECK_FALSE(r2[3].error.empty());

    SweepOptions unknown = opt;
    unknown.parameter = "nope";
    CHECK_THROWS_AS(sweep(parse_domain_spec("kind = cap\ndim = 2\ngamma = 1\n"), unknown), InputError);
}

TEST_CASE("sweep output does not depend on the thread count") {
    SweepOptions opt;
    opt.parameter = "eps2";
    opt.from = 0.0;
    opt.to = 0.15;
    opt.steps = 3;
    opt.verify.h = 0.1;
    const auto fam = parse_domain_spec("kind = perturbed_cap\ndim = 2\ngamma = 0.8\neps2 = 0\n");
    std::ostringstream a, b;
    opt.threads = 1;
    io::write_sweep_csv(a, sweep(fam, opt), "eps2", false);
    opt.threads = 3;
    io::write_sweep_csv(b, sweep(fam, opt), "eps2", false);
    CHECK(a.str() == b.str());
    CHECK(a.str().find('\r') == std::string::npos);
}

TEST_CASE("report formats") {
    CHECK(io::fmt(0.1) == "0.10000000000000001");
    VerifyOptions opt;
    opt.h = 0.1;
    opt.refinements = 0;
    const auto r = verify_domain(parse_domain_spec("kind = cap\ndim = 2\ngamma = 0.5\n"), opt);
    std::ostringstream out;
    io::write_report(out, r);
    CHECK(out.str().find("margin=") != std::string::npos);
    CHECK(out.str().find("passed=true") != std::string::npos);
    const auto header = io::report_csv_header();
    const auto row = io::report_csv_row(r);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}
