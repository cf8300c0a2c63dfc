#ifndef BEAMTRACE_ORACLES_HPP
#define BEAMTRACE_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "beamtrace/model.hpp"
#include "beamtrace/profiles.hpp"

namespace beamtrace {

// Self-similar spreading law for a collimated Gaussian beam: the ray launched
// at xi0 sits at xi0 * sqrt(1 + (zeta/zeta_R)^2) with zeta_R = pi / eps^2.
inline double gaussian_envelope(double xi0, double zeta, double epsilon) {
    const double zr = M_PI / (epsilon * epsilon);
    const double s = zeta / zr;
    return xi0 * std::sqrt(1.0 + s * s);
}

struct FieldSlice {
    double zeta = 0.0;
    double xi_lo = 0.0;
    double d_xi = 0.0;
    std::vector<std::complex<double>> psi;
    std::vector<double> intensity;
    double norm = 0.0;  // sum |psi|^2 * d_xi

    double xi_at(std::size_t i) const { return xi_lo + d_xi * static_cast<double>(i); }
};

struct ParaxialGrid {
    double xi_half_width = 300.0;
    int n_points = 4096;
};

namespace detail {

// Cyclic complex tridiagonal solve (Thomas + Sherman-Morrison).
// Matrix: diag b, off-diagonals a, periodic corners a.
inline void solve_cyclic(std::complex<double> a, std::complex<double> b,
                         std::vector<std::complex<double>>& x,
                         const std::vector<std::complex<double>>& rhs) {
    using C = std::complex<double>;
    const std::size_t n = rhs.size();
    const C gamma = -b;
    std::vector<C> bb(n, b), u(n, C{0.0}), z(n), y(n);
    bb[0] = b - gamma;
    bb[n - 1] = b - a * a / gamma;
    u[0] = gamma;
    u[n - 1] = a;

    auto thomas = [&](const std::vector<C>& d, const std::vector<C>& r, std::vector<C>& out) {
        std::vector<C> cp(n), dp(n);
        cp[0] = a / d[0];
        dp[0] = r[0] / d[0];
        for (std::size_t i = 1; i < n; ++i) {
            const C m = d[i] - a * cp[i - 1];
            cp[i] = a / m;
            dp[i] = (r[i] - a * dp[i - 1]) / m;
        }
        out.resize(n);
        out[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) out[i] = dp[i] - cp[i] * out[i + 1];
    };

    thomas(bb, rhs, y);
    thomas(bb, u, z);
    const C v_dot_y = y[0] + (a / gamma) * y[n - 1];
    const C v_dot_z = z[0] + (a / gamma) * z[n - 1];
    const C fact = v_dot_y / (1.0 + v_dot_z);
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - fact * z[i];
}

}  // namespace detail

// Propagates psi(xi, 0) = R(xi, 0) under the dimensionless paraxial equation
//   i dpsi/dzeta = -(1/4pi) d^2psi/dxi^2
// with Crank-Nicolson stepping on a periodic grid (exactly norm conserving).
// Emits one slice per requested station, in ascending zeta order.
inline std::vector<FieldSlice> paraxial_propagate(const LaunchProfile& profile,
                                                  const ParaxialGrid& grid,
                                                  std::vector<double> stations,
                                                  double d_zeta = 0.1) {
    using C = std::complex<double>;
    if (grid.n_points < 16) throw std::invalid_argument("paraxial: grid too coarse");
    if (!(d_zeta > 0.0)) throw std::invalid_argument("paraxial: d_zeta must be positive");
    std::sort(stations.begin(), stations.end());
    for (double s : stations)
        if (s < 0.0) throw std::invalid_argument("paraxial: negative station");

    const std::size_t n = static_cast<std::size_t>(grid.n_points);
    const double d_xi = 2.0 * grid.xi_half_width / static_cast<double>(n);
    const double xi_lo = -grid.xi_half_width;

    std::vector<C> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = C{eval_R(profile, xi_lo + d_xi * i), 0.0};

    // The aliasing guard only makes sense for beams that launch confined; a
    // field that legitimately fills the periodic domain (e.g. a flat test
    // field) is exempt.
    double launch_boundary = 0.0, launch_peak = 0.0;
    {
        const std::size_t edge = std::max<std::size_t>(1, n / 50);
        for (std::size_t i = 0; i < n; ++i) launch_peak = std::max(launch_peak, std::norm(psi[i]));
        for (std::size_t i = 0; i < edge; ++i) {
            launch_boundary = std::max(launch_boundary, std::norm(psi[i]));
            launch_boundary = std::max(launch_boundary, std::norm(psi[n - 1 - i]));
        }
    }
    const bool guard_active = launch_boundary <= 1e-4 * launch_peak;

    auto make_slice = [&](double zeta) {
        FieldSlice sl;
        sl.zeta = zeta;
        sl.xi_lo = xi_lo;
        sl.d_xi = d_xi;
        sl.psi = psi;
        sl.intensity.resize(n);
        double norm = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sl.intensity[i] = std::norm(psi[i]);
            norm += sl.intensity[i];
            peak = std::max(peak, sl.intensity[i]);
        }
        sl.norm = norm * d_xi;
        // aliasing guard: significant intensity in the outer 2% of the domain
        const std::size_t edge = std::max<std::size_t>(1, n / 50);
        double boundary = 0.0;
        for (std::size_t i = 0; i < edge; ++i) {
            boundary = std::max(boundary, sl.intensity[i]);
            boundary = std::max(boundary, sl.intensity[n - 1 - i]);
        }
        if (guard_active && boundary > 1e-4 * peak)
            throw std::domain_error("paraxial: domain too small, boundary intensity above threshold");
        return sl;
    };

    std::vector<FieldSlice> out;
    double zeta = 0.0;
    for (double station : stations) {
        const double dist = station - zeta;
        if (dist > 0.0) {
            const long steps = std::max<long>(1, static_cast<long>(std::ceil(dist / d_zeta - 1e-12)));
            const double h = dist / static_cast<double>(steps);
            const C beta = C{0.0, 1.0} * h / (8.0 * M_PI * d_xi * d_xi);
            const C a = -beta;
            const C b = 1.0 + 2.0 * beta;
            std::vector<C> rhs(n), next;
            for (long s = 0; s < steps; ++s) {
                for (std::size_t i = 0; i < n; ++i) {
                    const C left = psi[(i + n - 1) % n];
                    const C right = psi[(i + 1) % n];
                    rhs[i] = (1.0 - 2.0 * beta) * psi[i] + beta * (left + right);
                }
                detail::solve_cyclic(a, b, next, rhs);
                psi.swap(next);
            }
            zeta = station;
        }
        out.push_back(make_slice(station));
    }
    return out;
}

struct DensityHistogram {
    double xi_lo = 0.0;
    double bin_width = 0.0;
    std::vector<double> density;  // normalized to unit sum

    double center(std::size_t i) const { return xi_lo + bin_width * (static_cast<double>(i) + 0.5); }
};

// Ray density at a longitudinal station. Each ray carries the launch-interval
// measure R^2(xi0) * dxi0, so the histogram estimates the |psi|^2 flux.
inline DensityHistogram density_histogram(const TrajectorySet& traj, double zeta_station,
                                          int bins) {
    if (bins < 2) throw std::invalid_argument("density_histogram: need >= 2 bins");
    std::vector<std::pair<double, double>> hits;  // (xi, weight)
    for (const auto& series : traj.samples) {
        if (series.size() < 2) continue;
        for (std::size_t k = 0; k + 1 < series.size(); ++k) {
            const auto& a = series[k];
            const auto& b = series[k + 1];
            if (a.zeta <= zeta_station && zeta_station <= b.zeta && b.zeta > a.zeta) {
                const double t = (zeta_station - a.zeta) / (b.zeta - a.zeta);
                const double xi = a.xi + t * (b.xi - a.xi);
                hits.emplace_back(xi, a.amp_R * a.amp_R);
                break;
            }
        }
    }
    if (hits.empty()) throw std::out_of_range("density_histogram: station beyond run extent");

    double lo = hits[0].first, hi = hits[0].first;
    for (const auto& h : hits) {
        lo = std::min(lo, h.first);
        hi = std::max(hi, h.first);
    }
    if (!(hi > lo)) hi = lo + 1.0;

    DensityHistogram out;
    out.xi_lo = lo;
    out.bin_width = (hi - lo) / bins;
    out.density.assign(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (const auto& h : hits) {
        int b = static_cast<int>((h.first - lo) / out.bin_width);
        b = std::clamp(b, 0, bins - 1);
        out.density[static_cast<std::size_t>(b)] += h.second;
        total += h.second;
    }
    for (auto& d : out.density) d /= total;
    return out;
}

// Strict local maxima with prominence above threshold_rel * global max,
// refined by a 3-point parabolic fit. x_i = x0 + i * dx.
inline std::vector<double> fringe_positions(const std::vector<double>& y, double x0, double dx,
                                            double threshold_rel = 0.05) {
    const std::size_t n = y.size();
    if (n < 5) throw std::invalid_argument("fringe_positions: need >= 5 samples");
    double y_max = y[0];
    for (double v : y) y_max = std::max(y_max, v);
    const double threshold = threshold_rel * y_max;

    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
        // prominence: drop to the lowest saddle before a higher sample
        double left_min = y[i];
        for (std::size_t j = i; j-- > 0;) {
            left_min = std::min(left_min, y[j]);
            if (y[j] > y[i]) break;
        }
        double right_min = y[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            right_min = std::min(right_min, y[j]);
            if (y[j] > y[i]) break;
        }
        const double prominence = y[i] - std::max(left_min, right_min);
        if (prominence < threshold) continue;

        const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
        double offset = 0.0;
        if (denom != 0.0) offset = 0.5 * (y[i - 1] - y[i + 1]) / denom;
        peaks.push_back(x0 + dx * (static_cast<double>(i) + offset));
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

}  // namespace beamtrace

#endif
