#ifndef BEAMTRACE_COMPARE_HPP
#define BEAMTRACE_COMPARE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "beamtrace/config.hpp"
#include "beamtrace/integrator.hpp"
#include "beamtrace/oracles.hpp"

namespace beamtrace {

struct StationComparison {
    double zeta = 0.0;
    double bin_width = 0.0;
    std::vector<double> traj_peaks;
    std::vector<double> oracle_peaks;
    bool peak_count_match = false;
    double max_peak_offset = 0.0;  // in bin widths, over matched pairs
    bool positions_match = false;
};

struct CompareReport {
    std::vector<StationComparison> stations;
    double envelope_max_rel_err = 0.0;  // Gaussian profiles only, |xi0| <= 2/3 span
    bool all_pass = false;
};

// Interpolated transverse position of one ray where its trajectory crosses a
// zeta station; NaN when the samples do not bracket it.
inline double xi_at_station(const std::vector<RayState>& series, double zeta_station) {
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const auto& a = series[k];
        const auto& b = series[k + 1];
        if (a.zeta <= zeta_station && zeta_station <= b.zeta && b.zeta > a.zeta) {
            const double t = (zeta_station - a.zeta) / (b.zeta - a.zeta);
            return a.xi + t * (b.xi - a.xi);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Bins a paraxial intensity slice onto the histogram's grid for a like-for-like
// peak comparison.
inline std::vector<double> rebin_intensity(const FieldSlice& slice, const DensityHistogram& hist) {
    std::vector<double> out(hist.density.size(), 0.0);
    const double hi = hist.xi_lo + hist.bin_width * static_cast<double>(out.size());
    double total = 0.0;
    for (std::size_t i = 0; i < slice.intensity.size(); ++i) {
        const double xi = slice.xi_at(i);
        if (xi < hist.xi_lo || xi >= hi) continue;
        const int b = static_cast<int>((xi - hist.xi_lo) / hist.bin_width);
        out[static_cast<std::size_t>(std::clamp(b, 0, static_cast<int>(out.size()) - 1))] +=
            slice.intensity[i];
        total += slice.intensity[i];
    }
    if (total > 0.0)
        for (auto& v : out) v /= total;
    return out;
}

inline double first_gathering_zeta(const TrajectorySet& ts) {
    double z = std::numeric_limits<double>::infinity();
    for (const auto& g : ts.gatherings) z = std::min(z, g.zeta);
    for (const auto& c : ts.crossings) z = std::min(z, c.zeta);
    return z;
}

// Cross-method check: fringe positions from trajectory density vs from the
// paraxial oracle intensity, same bins, match within tol_bins bin widths.
inline CompareReport compare_methods(const AppConfig& app, const TrajectorySet& ts,
                                     const std::vector<FieldSlice>& slices,
                                     double tol_bins = 2.0) {
    CompareReport rep;
    rep.all_pass = true;

    for (const auto& slice : slices) {
        StationComparison sc;
        sc.zeta = slice.zeta;
        const DensityHistogram hist = density_histogram(ts, slice.zeta, app.bins);
        sc.bin_width = hist.bin_width;
        sc.traj_peaks =
            fringe_positions(hist.density, hist.center(0), hist.bin_width, app.fringe_threshold);
        const std::vector<double> oracle_binned = rebin_intensity(slice, hist);
        sc.oracle_peaks =
            fringe_positions(oracle_binned, hist.center(0), hist.bin_width, app.fringe_threshold);

        sc.peak_count_match = sc.traj_peaks.size() == sc.oracle_peaks.size();
        sc.positions_match = sc.peak_count_match;
        if (sc.peak_count_match) {
            for (std::size_t i = 0; i < sc.traj_peaks.size(); ++i) {
                const double off = std::fabs(sc.traj_peaks[i] - sc.oracle_peaks[i]) / hist.bin_width;
                sc.max_peak_offset = std::max(sc.max_peak_offset, off);
            }
            sc.positions_match = sc.max_peak_offset <= tol_bins;
        }
        rep.all_pass = rep.all_pass && sc.positions_match;
        rep.stations.push_back(std::move(sc));
    }

    if (app.sim.profile.kind == LaunchProfile::Kind::Gaussian) {
        const double xi0_lim = app.sim.span * 2.0 / 3.0;
        const double station = app.sim.zeta_max;
        for (const auto& series : ts.samples) {
            if (series.empty()) continue;
            const double xi0 = series.front().xi0;
            if (std::fabs(xi0) > xi0_lim || std::fabs(xi0) < 1e-9) continue;
            const double xi = xi_at_station(series, station);
            if (!std::isfinite(xi)) continue;
            const double pred = gaussian_envelope(xi0, station, app.sim.profile.epsilon);
            rep.envelope_max_rel_err =
                std::max(rep.envelope_max_rel_err, std::fabs(xi - pred) / std::fabs(pred));
        }
        rep.all_pass = rep.all_pass && rep.envelope_max_rel_err <= 0.03;
    }
    return rep;
}

struct SweepPoint {
    double epsilon = 0.0;
    double first_gathering = 0.0;  // +inf when none observed
    long crossings = 0;
    bool collapsed = false;
};

inline SimConfig sweep_point_config(const AppConfig& app, double epsilon) {
    SimConfig cfg = app.sim;
    if (cfg.profile.kind == LaunchProfile::Kind::Gaussian)
        cfg.profile = LaunchProfile::gaussian(epsilon);
    else if (cfg.profile.kind == LaunchProfile::Kind::Algebraic)
        cfg.profile = LaunchProfile::algebraic(epsilon, cfg.profile.n_exp);
    else
        throw std::invalid_argument("sweep: only gaussian/algebraic profiles are sweepable");
    cfg.span = 3.0 / epsilon;
    if (app.sweep_zeta_max) cfg.zeta_max = *app.sweep_zeta_max;
    return cfg;
}

inline SweepPoint run_sweep_point(const AppConfig& app, double epsilon) {
    const SimConfig cfg = sweep_point_config(app, epsilon);
    const TrajectorySet ts = run(cfg);
    SweepPoint pt;
    pt.epsilon = epsilon;
    pt.first_gathering = first_gathering_zeta(ts);
    pt.crossings = static_cast<long>(ts.crossings.size());
    pt.collapsed = ts.collapsed;
    return pt;
}

}  // namespace beamtrace

#endif
