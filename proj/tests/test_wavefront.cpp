#include <doctest.h>

#include <cmath>
#include <vector>

#include "beamtrace/launch.hpp"
#include "beamtrace/profiles.hpp"
#include "beamtrace/wavefront.hpp"

using namespace beamtrace;

namespace {

BeamFront front_from(const std::vector<double>& xi, const std::vector<double>& amp) {
    BeamFront f;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        RayState r;
        r.ray_id = static_cast<int>(i);
        r.xi = r.xi0 = xi[i];
        r.amp_R = amp[i];
        f.rays.push_back(r);
    }
    f.sigma.resize(xi.size(), 0.0);
    return f;
}

}  // namespace

TEST_CASE("front_geometry of a collimated launch front") {
    const BeamFront f = make_front(LaunchProfile::gaussian(0.1), 5, 8.0);
    const FrontGeometry geom = front_geometry(f, 4.0);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(geom.sigma[i] == doctest::Approx(4.0 * i).epsilon(1e-15));
        CHECK(geom.tangent_xi[i] == doctest::Approx(1.0));
        CHECK(geom.tangent_zeta[i] == doctest::Approx(0.0));
        CHECK(geom.normal_xi[i] == doctest::Approx(1.0));
        CHECK(geom.normal_zeta[i] == doctest::Approx(0.0));
    }
    CHECK(geom.crossed_pairs.empty());
}

TEST_CASE("coincident neighbors get the spacing floor and a crossing record") {
    BeamFront f = front_from({0.0, 1.0, 1.0, 2.0, 3.0}, {1, 1, 1, 1, 1});
    const FrontGeometry geom = front_geometry(f, 1.0);
    REQUIRE(geom.crossed_pairs.size() == 1);
    CHECK(geom.crossed_pairs[0] == 1);
    CHECK(geom.sigma[2] - geom.sigma[1] == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("arc-length increments on a circular front follow the chord formula") {
    const double radius = 50.0, dang = 0.02;
    BeamFront f;
    for (int i = 0; i < 9; ++i) {
        RayState r;
        r.ray_id = i;
        const double ang = (i - 4) * dang;
        r.xi = radius * std::sin(ang);
        r.zeta = radius * (1.0 - std::cos(ang));
        r.rho_x = std::sin(ang);
        r.rho_z = std::cos(ang);
        f.rays.push_back(r);
    }
    f.sigma.resize(9, 0.0);
    const FrontGeometry geom = front_geometry(f, 1.0);
    const double chord = 2.0 * radius * std::sin(dang / 2.0);
    for (std::size_t i = 1; i < 9; ++i)
        CHECK(geom.sigma[i] - geom.sigma[i - 1] == doctest::Approx(chord).epsilon(1e-12));
}

TEST_CASE("front collapse below 3 rays") {
    BeamFront f = front_from({0.0, 1.0}, {1, 1});
    CHECK_THROWS_AS(front_geometry(f, 1.0), FrontCollapse);
}

TEST_CASE("estimate_G: flat amplitude gives zero") {
    BeamFront f = front_from({0, 1, 2, 3, 4}, {1, 1, 1, 1, 1});
    const FrontGeometry geom = front_geometry(f, 1.0);
    const GField gf = estimate_G(f, geom, 1e-6, 0.0);
    for (double g : gf.g) CHECK(g == 0.0);
}

TEST_CASE("estimate_G: exact on quadratics, including non-uniform grids") {
    // R(sigma) = 2 + 0.3 sigma + 0.25 sigma^2 -> R'' = 0.5
    const std::vector<double> xi = {-2.0, -0.7, 0.1, 1.3, 2.9};
    std::vector<double> amp;
    // sigma equals xi here (collinear front at zeta = 0)
    for (double x : xi) amp.push_back(2.0 + 0.3 * (x - xi[0]) + 0.25 * (x - xi[0]) * (x - xi[0]));
    BeamFront f = front_from(xi, amp);
    const FrontGeometry geom = front_geometry(f, 1.0);
    const GField gf = estimate_G(f, geom, 1e-12, 0.0);
    for (std::size_t i = 0; i < xi.size(); ++i)
        CHECK(std::fabs(gf.g[i] * amp[i] - 0.5) <= 1e-13);
}

TEST_CASE("known value: R = {1,2,5} at sigma = {-1,0,1}") {
    BeamFront f = front_from({-1.0, 0.0, 1.0}, {1.0, 2.0, 5.0});
    const FrontGeometry geom = front_geometry(f, 1.0);
    const GField gf = estimate_G(f, geom, 1e-12, 0.0);
    CHECK(gf.g[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("estimate_G at launch matches the closed form, with O(h^2) convergence") {
    const auto p = LaunchProfile::gaussian(0.1);
    auto max_err = [&](double spacing) {
        const int n = static_cast<int>(2.0 * 30.0 / spacing) + 1;
        const BeamFront f = make_front(p, n, 30.0);
        const FrontGeometry geom = front_geometry(f, spacing);
        const GField gf = estimate_G(f, geom, 1e-9, 0.0);
        double err = 0.0;
        // central region; the relative stencil error grows in the deep tail
        // where R''''/R is large
        for (std::size_t i = 1; i + 1 < f.rays.size(); ++i)
            if (std::fabs(f.rays[i].xi) <= 10.0)
                err = std::max(err, std::fabs(gf.g[i] - eval_G0(p, f.rays[i].xi)));
        return err;
    };
    const double e1 = max_err(0.5);
    const double e2 = max_err(0.25);
    CHECK(e1 <= 1e-4);
    CHECK(e1 / e2 >= 3.5);

    // axis value
    const BeamFront f = make_front(p, 121, 30.0);
    const FrontGeometry geom = front_geometry(f, 0.5);
    const GField gf = estimate_G(f, geom, 1e-9, 0.0);
    CHECK(std::fabs(gf.g[60] - (-0.02)) <= 1e-4);
}

TEST_CASE("amplitude floor clamps deep tails and flags them") {
    const auto p = LaunchProfile::gaussian(0.5);
    const BeamFront f = make_front(p, 41, 20.0);  // tails at exp(-100)
    const FrontGeometry geom = front_geometry(f, 1.0);
    const GField gf = estimate_G(f, geom, 1e-6, 0.0);
    CHECK(gf.clamped.front());
    CHECK_FALSE(gf.clamped[20]);
    for (double g : gf.g) CHECK(std::isfinite(g));
}

TEST_CASE("transverse_gradient: exact for constant and linear g") {
    BeamFront f = front_from({0, 1, 2, 3, 4}, {1, 1, 1, 1, 1});
    const FrontGeometry geom = front_geometry(f, 1.0);
    GField gf;
    gf.g = {3.0, 3.0, 3.0, 3.0, 3.0};
    transverse_gradient(gf, geom);
    for (double d : gf.dg_dsigma) CHECK(std::fabs(d) <= 1e-14);

    gf.g = {0.0, 1.0, 2.0, 3.0, 4.0};
    transverse_gradient(gf, geom);
    for (double d : gf.dg_dsigma) CHECK(d == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("launch gradient matches the derivative of the Gaussian closed form") {
    const auto p = LaunchProfile::gaussian(0.1);
    const BeamFront f = make_front(p, 241, 30.0);  // spacing 0.25
    const FrontGeometry geom = front_geometry(f, 0.25);
    GField gf = estimate_G(f, geom, 1e-9, 0.0);
    transverse_gradient(gf, geom);
    // ray at xi = 10 -> dG/dsigma = 8 eps^4 xi = 8e-3
    const std::size_t i = 160;
    REQUIRE(f.rays[i].xi == doctest::Approx(10.0));
    CHECK(gf.dg_dsigma[i] == doctest::Approx(8e-3).epsilon(0.01));
}

TEST_CASE("mirror symmetry of G and its gradient for symmetric profiles") {
    for (const auto& p : {LaunchProfile::gaussian(0.1), LaunchProfile::algebraic(0.1, 1)}) {
        const BeamFront f = make_front(p, 101, 30.0);
        const FrontGeometry geom = front_geometry(f, 0.6);
        GField gf = estimate_G(f, geom, 1e-9, 0.0);
        transverse_gradient(gf, geom);
        const std::size_t n = f.rays.size();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(gf.g[i] == doctest::Approx(gf.g[n - 1 - i]).epsilon(1e-12));
            CHECK(gf.dg_dsigma[i] == doctest::Approx(-gf.dg_dsigma[n - 1 - i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalization invariance: scaling amplitudes leaves G unchanged") {
    const auto p = LaunchProfile::algebraic(0.1, 1);
    BeamFront f = make_front(p, 101, 30.0);
    const FrontGeometry geom = front_geometry(f, 0.6);
    const GField base = estimate_G(f, geom, 1e-6, 0.0);
    for (auto& r : f.rays) r.amp_R *= 1000.0;
    const GField scaled = estimate_G(f, geom, 1e-6, 0.0);
    for (std::size_t i = 0; i < base.g.size(); ++i)
        CHECK(scaled.g[i] == doctest::Approx(base.g[i]).epsilon(1e-13));
}

TEST_CASE("g_blend mixes current and previous fields") {
    BeamFront f = front_from({0, 1, 2, 3, 4}, {1, 1, 1, 1, 1});
    const FrontGeometry geom = front_geometry(f, 1.0);
    GField prev;
    prev.g = {1.0, 1.0, 1.0, 1.0, 1.0};
    const GField gf = estimate_G(f, geom, 1e-6, 0.25, &prev);
    CHECK(gf.blended);
    for (double g : gf.g) CHECK(g == doctest::Approx(0.25).epsilon(1e-14));
}
