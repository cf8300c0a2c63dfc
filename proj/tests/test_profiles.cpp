#include <doctest.h>

#include <cmath>
#include <vector>

#include "beamtrace/launch.hpp"
#include "beamtrace/profiles.hpp"

using namespace beamtrace;

TEST_CASE("eval_R closed forms") {
    const auto g = LaunchProfile::gaussian(0.1);
    CHECK(eval_R(g, 0.0) == 1.0);
    CHECK(eval_R(g, 10.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

    const auto a = LaunchProfile::algebraic(0.1, 1);
    CHECK(eval_R(a, 10.0) == doctest::Approx(0.5).epsilon(1e-15));

    const auto d = LaunchProfile::dual_beam(20.0, LaunchProfile::gaussian(0.1));
    CHECK(eval_R(d, 0.0) == doctest::Approx(2.0 * std::exp(-4.0)).epsilon(1e-15));
}

TEST_CASE("eval_G0 closed forms") {
    const auto g = LaunchProfile::gaussian(0.1);
    CHECK(eval_G0(g, 0.0) == doctest::Approx(-0.02).epsilon(1e-14));
    CHECK(eval_G0(g, 1.0 / (0.1 * std::sqrt(2.0))) == doctest::Approx(0.0).epsilon(1e-14));

    const auto a = LaunchProfile::algebraic(0.1, 1);
    CHECK(eval_G0(a, 0.0) == doctest::Approx(-0.02).epsilon(1e-14));
}

TEST_CASE("eval_G0 agrees with central finite differences of eval_R") {
    const double h = 0.01;
    for (const auto& p : {LaunchProfile::gaussian(0.1), LaunchProfile::algebraic(0.1, 1),
                          LaunchProfile::algebraic(0.1, 3),
                          LaunchProfile::dual_beam(15.0, LaunchProfile::gaussian(0.1))}) {
        for (double xi = -30.0; xi <= 30.0; xi += 1.7) {
            const double stencil =
                (eval_R(p, xi - h) - 2.0 * eval_R(p, xi) + eval_R(p, xi + h)) / (h * h) /
                eval_R(p, xi);
            CHECK(std::fabs(eval_G0(p, xi) - stencil) <= 1e-6);
        }
    }
}

TEST_CASE("eval_dG0 agrees with central finite differences of eval_G0") {
    const double h = 1e-3;
    for (const auto& p : {LaunchProfile::gaussian(0.1), LaunchProfile::algebraic(0.1, 1),
                          LaunchProfile::algebraic(0.1, 2)}) {
        for (double xi = -25.0; xi <= 25.0; xi += 1.3) {
            const double stencil = (eval_G0(p, xi + h) - eval_G0(p, xi - h)) / (2.0 * h);
            CHECK(eval_dG0(p, xi) == doctest::Approx(stencil).epsilon(1e-6));
        }
    }
}

TEST_CASE("symmetric variants are exactly even") {
    const auto g = LaunchProfile::gaussian(0.17);
    const auto a = LaunchProfile::algebraic(0.23, 2);
    const auto d = LaunchProfile::dual_beam(7.0, LaunchProfile::gaussian(0.1));
    for (double xi = 0.1; xi < 40.0; xi *= 1.9) {
        CHECK(eval_R(g, xi) == eval_R(g, -xi));
        CHECK(eval_R(a, xi) == eval_R(a, -xi));
        CHECK(eval_R(d, xi) == eval_R(d, -xi));
        CHECK(eval_G0(g, xi) == eval_G0(g, -xi));
        CHECK(eval_G0(a, xi) == eval_G0(a, -xi));
        CHECK(eval_G0(d, xi) == eval_G0(d, -xi));
    }
}

TEST_CASE("tabulated profile interpolates its knots and rejects range violations") {
    std::vector<std::pair<double, double>> knots;
    const auto src = LaunchProfile::gaussian(0.1);
    for (double xi = -30.0; xi <= 30.001; xi += 0.5) knots.emplace_back(xi, eval_R(src, xi));
    const auto t = LaunchProfile::tabulated(knots);
    CHECK(eval_R(t, -10.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(eval_R(t, 3.3) == doctest::Approx(eval_R(src, 3.3)).epsilon(1e-4));
    CHECK_THROWS_AS(eval_R(t, 31.0), std::domain_error);
    CHECK_THROWS_AS(eval_G0(t, 0.0), std::invalid_argument);
}

TEST_CASE("tabulated knots must be increasing and positive") {
    CHECK_THROWS_AS(LaunchProfile::tabulated({{0, 1}, {1, 1}, {1, 1}, {2, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(LaunchProfile::tabulated({{0, 1}, {1, -1}, {2, 1}, {3, 1}}),
                    std::invalid_argument);
}

TEST_CASE("make_front: grid, momenta, amplitudes") {
    const auto g = LaunchProfile::gaussian(0.1);
    const BeamFront f = make_front(g, 3, 10.0);
    REQUIRE(f.rays.size() == 3);
    CHECK(f.rays[0].xi0 == -10.0);
    CHECK(f.rays[1].xi0 == 0.0);
    CHECK(f.rays[2].xi0 == 10.0);
    CHECK(f.rays[0].amp_R == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(f.rays[1].amp_R == 1.0);
    for (const auto& r : f.rays) {
        CHECK(r.rho_x == 0.0);
        CHECK(r.rho_z == 1.0);
        CHECK(r.zeta == 0.0);
        CHECK(r.phase == 0.0);
    }

    const BeamFront f5 = make_front(g, 5, 8.0);
    for (std::size_t i = 1; i < f5.sigma.size(); ++i)
        CHECK(f5.sigma[i] - f5.sigma[i - 1] == doctest::Approx(4.0).epsilon(1e-15));
}
