#ifndef BEAMTRACE_WAVEFRONT_HPP
#define BEAMTRACE_WAVEFRONT_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "beamtrace/model.hpp"

namespace beamtrace {

struct FrontCollapse : std::runtime_error {
    explicit FrontCollapse(const char* what) : std::runtime_error(what) {}
};

struct FrontGeometry {
    std::vector<double> sigma;        // arc length, sigma[0] = 0
    std::vector<double> tangent_xi;   // unit tangent along the front
    std::vector<double> tangent_zeta;
    std::vector<double> normal_xi;    // momentum rotated into the front plane,
    std::vector<double> normal_zeta;  // sign-matched to the tangent
    std::vector<int> crossed_pairs;   // lower index of each inverted neighbor pair
    double h_min = 0.0;               // spacing floor applied to chord lengths
};

struct GField {
    std::vector<double> g;
    std::vector<double> dg_dsigma;
    std::vector<bool> clamped;
    bool blended = false;
};

namespace stencil {

// Second derivative of the quadratic through three points, exact for quadratics
// on non-uniform grids.
inline double second_derivative(double h1, double h2, double y0, double y1, double y2) {
    return 2.0 * (h1 * y2 - (h1 + h2) * y1 + h2 * y0) / (h1 * h2 * (h1 + h2));
}

// First derivative of the same quadratic, evaluated at a point x measured from
// the middle node (x = -h1, 0, +h2 give the three nodes).
inline double first_derivative(double h1, double h2, double y0, double y1, double y2, double x) {
    const double d2 = second_derivative(h1, h2, y0, y1, y2);
    const double d1_mid = (h1 * h1 * y2 - h2 * h2 * y0 + (h2 * h2 - h1 * h1) * y1) /
                          (h1 * h2 * (h1 + h2));
    return d1_mid + d2 * x;
}

}  // namespace stencil

namespace detail {

// Least-squares quadratic smoothing over ray index (Savitzky-Golay). The
// smooth part of the front map xi(xi0) passes through unchanged; grid-scale
// position ripples, which otherwise feed back through the G stencil and grow
// wherever G > 0, are strongly attenuated.
inline std::vector<double> sg_smooth(const std::vector<double>& y, int half) {
    const int n = static_cast<int>(y.size());
    if (half < 1 || n < 2 * half + 1) return y;
    std::vector<double> out(y.size());

    // interior: symmetric window, so the fit reduces to a fixed kernel
    double s0 = 2 * half + 1, s2 = 0, s4 = 0;
    for (int j = -half; j <= half; ++j) {
        s2 += double(j) * j;
        s4 += double(j) * j * double(j) * j;
    }
    const double denom = s0 * s4 - s2 * s2;
    std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
    for (int j = -half; j <= half; ++j)
        w[static_cast<std::size_t>(j + half)] = (s4 - s2 * double(j) * j) / denom;
    for (int i = half; i < n - half; ++i) {
        double acc = 0.0;
        for (int j = -half; j <= half; ++j)
            acc += w[static_cast<std::size_t>(j + half)] * y[static_cast<std::size_t>(i + j)];
        out[static_cast<std::size_t>(i)] = acc;
    }

    // boundaries: shifted window, generic quadratic fit evaluated off center
    for (int i = 0; i < n; ++i) {
        if (i >= half && i < n - half) continue;
        int lo = i - half, hi = i + half;
        if (lo < 0) { hi -= lo; lo = 0; }
        if (hi >= n) { lo -= hi - n + 1; hi = n - 1; }
        double t0 = 0, t1 = 0, t2 = 0, t3 = 0, t4 = 0, b0 = 0, b1 = 0, b2 = 0;
        for (int j = lo; j <= hi; ++j) {
            const double x = j - i;
            const double x2 = x * x;
            t0 += 1.0; t1 += x; t2 += x2; t3 += x2 * x; t4 += x2 * x2;
            b0 += y[static_cast<std::size_t>(j)];
            b1 += y[static_cast<std::size_t>(j)] * x;
            b2 += y[static_cast<std::size_t>(j)] * x2;
        }
        const double m00 = t0, m01 = t1, m02 = t2, m11 = t2, m12 = t3, m22 = t4;
        const double det = m00 * (m11 * m22 - m12 * m12) - m01 * (m01 * m22 - m12 * m02) +
                           m02 * (m01 * m12 - m11 * m02);
        const double c0 = (b0 * (m11 * m22 - m12 * m12) - m01 * (b1 * m22 - m12 * b2) +
                           m02 * (b1 * m12 - m11 * b2)) / det;
        out[static_cast<std::size_t>(i)] = c0;
    }
    return out;
}

// Smoothing window half-width in rays. The ripple feedback grows fastest at
// the grid scale, so the window must cover a fixed transverse length, not a
// fixed number of rays; otherwise refining the launch grid reintroduces the
// instability at wavelengths the window no longer reaches.
constexpr double sg_half_length = 15.0;

inline int sg_half_rays(double launch_spacing) {
    return static_cast<int>(std::lround(sg_half_length / launch_spacing));
}

}  // namespace detail

inline FrontGeometry front_geometry(const BeamFront& front, double launch_spacing) {
    const std::size_t n = front.rays.size();
    if (n < 3) throw FrontCollapse("front_geometry: fewer than 3 rays alive");

    FrontGeometry geom;
    geom.h_min = 1e-6 * launch_spacing;
    geom.sigma.resize(n);
    geom.tangent_xi.resize(n);
    geom.tangent_zeta.resize(n);
    geom.normal_xi.resize(n);
    geom.normal_zeta.resize(n);

    std::vector<double> xs(n), zs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = front.rays[i].xi;
        zs[i] = front.rays[i].zeta;
    }
    // crossings are judged on the raw positions; the arc length and tangents
    // come from the smoothed front
    for (std::size_t i = 1; i < n; ++i)
        if (xs[i] - xs[i - 1] <= 0.0) geom.crossed_pairs.push_back(static_cast<int>(i - 1));
    const int sg_half = detail::sg_half_rays(launch_spacing);
    xs = detail::sg_smooth(xs, sg_half);
    zs = detail::sg_smooth(zs, sg_half);

    geom.sigma[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double chord = std::hypot(xs[i] - xs[i - 1], zs[i] - zs[i - 1]);
        if (chord < geom.h_min) chord = geom.h_min;
        geom.sigma[i] = geom.sigma[i - 1] + chord;
    }

    auto set_tangent = [&](std::size_t i, double dxi, double dzeta) {
        const double len = std::hypot(dxi, dzeta);
        geom.tangent_xi[i] = dxi / len;
        geom.tangent_zeta[i] = dzeta / len;
    };
    set_tangent(0, xs[1] - xs[0], zs[1] - zs[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        set_tangent(i, xs[i + 1] - xs[i - 1], zs[i + 1] - zs[i - 1]);
    set_tangent(n - 1, xs[n - 1] - xs[n - 2], zs[n - 1] - zs[n - 2]);

    for (std::size_t i = 0; i < n; ++i) {
        const double pn = std::hypot(front.rays[i].rho_x, front.rays[i].rho_z);
        double nx = -front.rays[i].rho_z / pn;
        double nz = front.rays[i].rho_x / pn;
        if (nx * geom.tangent_xi[i] + nz * geom.tangent_zeta[i] < 0.0) {
            nx = -nx;
            nz = -nz;
        }
        geom.normal_xi[i] = nx;
        geom.normal_zeta[i] = nz;
    }
    return geom;
}

// G = R''/R along the front, via the 3-point Lagrange second derivative of the
// transported amplitudes with respect to arc length. Endpoints reuse the
// nearest interior triple. The denominator is floored at r_floor * max R.
inline GField estimate_G(const BeamFront& front, const FrontGeometry& geom,
                         double r_floor, double g_blend,
                         const GField* prev = nullptr) {
    const std::size_t n = front.rays.size();
    if (n < 3) throw FrontCollapse("estimate_G: fewer than 3 rays alive");

    double r_max = 0.0;
    for (const auto& r : front.rays) r_max = std::max(r_max, r.amp_R);
    const double floor_val = r_floor * r_max;

    GField gf;
    gf.g.resize(n);
    gf.clamped.assign(n, false);

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = geom.sigma[i] - geom.sigma[i - 1];
        const double h2 = geom.sigma[i + 1] - geom.sigma[i];
        const double d2 = stencil::second_derivative(h1, h2, front.rays[i - 1].amp_R,
                                                     front.rays[i].amp_R, front.rays[i + 1].amp_R);
        double denom = front.rays[i].amp_R;
        if (denom < floor_val) {
            denom = floor_val;
            gf.clamped[i] = true;
        }
        gf.g[i] = d2 / denom;
    }
    // Endpoints: second derivative of the nearest interior triple over the
    // endpoint's own amplitude (exact for quadratic amplitude profiles).
    {
        auto d2_at = [&](std::size_t i) {
            const double h1 = geom.sigma[i] - geom.sigma[i - 1];
            const double h2 = geom.sigma[i + 1] - geom.sigma[i];
            return stencil::second_derivative(h1, h2, front.rays[i - 1].amp_R,
                                              front.rays[i].amp_R, front.rays[i + 1].amp_R);
        };
        auto denom_at = [&](std::size_t i) {
            double d = front.rays[i].amp_R;
            if (d < floor_val) {
                d = floor_val;
                gf.clamped[i] = true;
            }
            return d;
        };
        gf.g[0] = d2_at(1) / denom_at(0);
        gf.g[n - 1] = d2_at(n - 2) / denom_at(n - 1);
    }

    if (prev != nullptr && g_blend > 0.0 && prev->g.size() == n) {
        for (std::size_t i = 0; i < n; ++i)
            gf.g[i] = (1.0 - g_blend) * gf.g[i] + g_blend * prev->g[i];
        gf.blended = true;
    }
    return gf;
}

// dG/dsigma by the 3-point Lagrange first derivative; endpoints one-sided.
inline void transverse_gradient(GField& gf, const FrontGeometry& geom) {
    const std::size_t n = gf.g.size();
    gf.dg_dsigma.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = geom.sigma[i] - geom.sigma[i - 1];
        const double h2 = geom.sigma[i + 1] - geom.sigma[i];
        gf.dg_dsigma[i] =
            stencil::first_derivative(h1, h2, gf.g[i - 1], gf.g[i], gf.g[i + 1], 0.0);
    }
    // The two edge slopes on each side are extrapolated from the interior
    // values rather than differenced through the endpoint g, which carries the
    // low-amplitude bias of the copied interior second derivative; differencing
    // it would feed that bias straight into the edge forces.
    if (n >= 5) {
        auto extrap = [&](std::size_t i, std::size_t a, std::size_t b) {
            const double da = geom.sigma[i] - geom.sigma[a];
            const double dab = geom.sigma[b] - geom.sigma[a];
            gf.dg_dsigma[i] = gf.dg_dsigma[a] + (gf.dg_dsigma[b] - gf.dg_dsigma[a]) * da / dab;
        };
        extrap(1, 2, 3);
        extrap(0, 2, 3);
        extrap(n - 2, n - 3, n - 4);
        extrap(n - 1, n - 3, n - 4);
    } else {
        const double h1 = geom.sigma[1] - geom.sigma[0];
        const double h2 = geom.sigma[2] - geom.sigma[1];
        gf.dg_dsigma[0] = stencil::first_derivative(h1, h2, gf.g[0], gf.g[1], gf.g[2], -h1);
        const double k1 = geom.sigma[n - 2] - geom.sigma[n - 3];
        const double k2 = geom.sigma[n - 1] - geom.sigma[n - 2];
        gf.dg_dsigma[n - 1] =
            stencil::first_derivative(k1, k2, gf.g[n - 3], gf.g[n - 2], gf.g[n - 1], k2);
    }
}

}  // namespace beamtrace

#endif
