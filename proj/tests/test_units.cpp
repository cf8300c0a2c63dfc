#include <doctest.h>

#include <cmath>

#include "beamtrace/units.hpp"

using namespace beamtrace;

TEST_CASE("rho0 = 1 by definition of p0") {
    const BeamScales s = beam_scales(9.109e-28, 1.0);
    const auto d = dimensionless_from_physical(9.109e-28, 1.0, 0.0, s.p0, 0.0);
    CHECK(d.xi == 0.0);
    CHECK(d.rho == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.tau == 0.0);
}

TEST_CASE("x equal to lambda0 maps to xi = 1") {
    const BeamScales s = beam_scales(9.109e-28, 1.0);
    const auto d = dimensionless_from_physical(9.109e-28, 1.0, s.lambda0, 0.0, 0.0);
    CHECK(d.xi == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.rho == 0.0);
}

TEST_CASE("electron at ~500 eV: independent constants check") {
    // independent evaluation of the three definitions
    const double m = 9.109e-28, E = 8.011e-10;
    const double p0_ref = std::sqrt(2.0 * m * E);
    const double lambda0_ref = 2.0 * M_PI * 1.0546e-27 / p0_ref;
    CHECK(lambda0_ref == doctest::Approx(5.48e-9).epsilon(2e-3));

    const auto d = dimensionless_from_physical(m, E, 1e-8, 0.0, 0.0);
    CHECK(d.xi == doctest::Approx(1e-8 / lambda0_ref).epsilon(1e-14));
    CHECK(d.xi == doctest::Approx(1.82).epsilon(2e-3));
}

TEST_CASE("round trip reproduces inputs to 1e-12 relative") {
    const double m = 1.6726e-24, E = 3.2e-6;
    const double x = 7.5e-7, p = 1.1e-15, t = 4.2e-13;
    const auto d = dimensionless_from_physical(m, E, x, p, t);
    double x2, p2, t2;
    physical_from_dimensionless(m, E, d, x2, p2, t2);
    CHECK(x2 == doctest::Approx(x).epsilon(1e-12));
    CHECK(p2 == doctest::Approx(p).epsilon(1e-12));
    CHECK(t2 == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("non-positive mass or energy is a domain error") {
    CHECK_THROWS_AS(beam_scales(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(beam_scales(1.0, -1.0), std::domain_error);
}
