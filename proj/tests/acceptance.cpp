// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "beamtrace/compare.hpp"
#include "beamtrace/config.hpp"
#include "beamtrace/integrator.hpp"
#include "beamtrace/oracles.hpp"
#include "beamtrace/wavefront.hpp"

using namespace beamtrace;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

SimConfig base_gaussian() {
    SimConfig cfg;
    cfg.profile = LaunchProfile::gaussian(0.1);
    cfg.n_rays = 101;
    cfg.span = 30.0;
    cfg.d_tau = 0.1;
    cfg.zeta_max = 700.0;
    return cfg;
}

double max_report(const TrajectorySet& ts, double StepReport::* field) {
    double v = 0.0;
    for (const auto& d : ts.drift) v = std::max(v, d.*field);
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BEAMSIM_BIN) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

// C1: Gaussian launch spreads along the analytic envelope, no ray crossings.
void gaussian_spreading() {
    const TrajectorySet ts = run(base_gaussian());
    double max_rel = 0.0;
    int checked = 0;
    for (const auto& series : ts.samples) {
        if (series.empty()) continue;
        const double xi0 = series.front().xi0;
        if (std::fabs(xi0) < 2.0 || std::fabs(xi0) > 20.0) continue;
        const double xi = xi_at_station(series, 700.0);
        if (!std::isfinite(xi)) continue;
        const double pred = gaussian_envelope(xi0, 700.0, 0.1);
        max_rel = std::max(max_rel, std::fabs(std::fabs(xi) - pred) / pred);
        ++checked;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "crossings=%zu envelope_err=%.3e rays=%d",
                  ts.crossings.size(), max_rel, checked);
    report("gaussian-spreading", ts.crossings.empty() && checked >= 40 && max_rel <= 0.03, buf);
}

// C2: with the wave term off the model degenerates to classical mechanics.
void classical_limit() {
    SimConfig straight = base_gaussian();
    straight.g_mode = GMode::Off;
    straight.zeta_max = 200.0;
    const TrajectorySet ts = run(straight);
    double dev = 0.0;
    for (const auto& series : ts.samples)
        for (const auto& s : series) dev = std::max(dev, std::fabs(s.xi - s.xi0));

    SimConfig osc = base_gaussian();
    osc.g_mode = GMode::Off;
    osc.force_mode = ForceMode::Cartesian;
    osc.medium.kind = Medium::Kind::Harmonic;
    osc.medium.omega = 0.1;
    osc.d_tau = 0.01;
    osc.span = 10.0;
    osc.zeta_max = 120.0;
    const TrajectorySet to = run(osc);
    double osc_err = 0.0;
    for (std::size_t i = 0; i < to.samples.size(); ++i)
        for (std::size_t k = 0; k < to.samples[i].size(); ++k) {
            const auto& s = to.samples[i][k];
            osc_err = std::max(osc_err, std::fabs(s.xi - s.xi0 * std::cos(0.1 * to.sample_taus[k])));
        }

    char buf[120];
    std::snprintf(buf, sizeof buf, "straight_dev=%.3e oscillator_err=%.3e", dev, osc_err);
    report("classical-limit", dev <= 1e-12 && osc_err <= 1e-8, buf);
}

// C3: algebraic (slit-like) launch gathers rays into fringes.
void fringe_formation() {
    SimConfig cfg = base_gaussian();
    cfg.profile = LaunchProfile::algebraic(0.1, 1);
    cfg.n_rays = 301;
    const TrajectorySet ts = run(cfg);
    const double zg = first_gathering_zeta(ts);

    // look for a recorded gathering station whose density is multi-peaked
    std::vector<double> stations;
    for (const auto& g : ts.gatherings)
        if (g.zeta <= 700.0) stations.push_back(g.zeta);
    std::sort(stations.begin(), stations.end());
    bool have_peaks = false;
    double z_found = 0.0;
    std::size_t n_peaks = 0;
    for (double z : stations) {
        try {
            const DensityHistogram h = density_histogram(ts, z, 64);
            const auto peaks = fringe_positions(h.density, h.center(0), h.bin_width);
            if (peaks.size() >= 2) {
                have_peaks = true;
                z_found = z;
                n_peaks = peaks.size();
                break;
            }
        } catch (const std::exception&) {
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "first_gathering=%.1f peaks=%zu at z=%.1f", zg, n_peaks,
                  z_found);
    report("fringe-formation", zg <= 700.0 && have_peaks, buf);
}

// C4: trajectory-density fringes match the paraxial oracle within 2 bin widths.
void cross_method_agreement() {
    const AppConfig app = load_config(std::string(CONFIG_DIR) + "/compare_algebraic.cfg");
    const TrajectorySet ts = run(app.sim);
    const ParaxialGrid grid{app.oracle_half_width, app.oracle_points};
    const std::vector<FieldSlice> slices =
        paraxial_propagate(app.sim.profile, grid, app.stations, app.oracle_d_zeta);
    const CompareReport rep = compare_methods(app, ts, slices);
    std::string detail;
    for (const auto& st : rep.stations) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "z=%.0f:%zu/%zu off=%.2f ", st.zeta, st.traj_peaks.size(),
                      st.oracle_peaks.size(), st.max_peak_offset);
        detail += buf;
    }
    report("cross-method-agreement", rep.all_pass, detail);
}

// C5: the first gathering distance falls monotonically as epsilon grows.
void focusing_sweep() {
    const AppConfig app = load_config(std::string(CONFIG_DIR) + "/sweep_eps.cfg");
    std::vector<SweepPoint> pts;
    for (double eps : app.sweep_epsilon) pts.push_back(run_sweep_point(app, eps));
    bool ok = pts.size() >= 3;
    std::string detail;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ok = ok && std::isfinite(pts[i].first_gathering);
        if (i > 0) ok = ok && pts[i].first_gathering < pts[i - 1].first_gathering;
        char buf[64];
        std::snprintf(buf, sizeof buf, "eps=%.2f:zg=%.1f ", pts[i].epsilon, pts[i].first_gathering);
        detail += buf;
    }
    report("focusing-sweep", ok, detail);
}

// C6: momentum-norm and Hamiltonian conservation at the stated tolerances.
void conservation() {
    SimConfig rot = base_gaussian();
    rot.g_mode = GMode::Off;  // classical vacuum: |rho| = 1 exactly
    const TrajectorySet tn = run(rot);
    const double norm_drift = max_report(tn, &StepReport::max_norm_drift);

    const TrajectorySet tr = run(base_gaussian());
    const double sc_drift = max_report(tr, &StepReport::max_h_drift);

    SimConfig frozen = base_gaussian();
    frozen.g_mode = GMode::FrozenLaunch;
    frozen.force_mode = ForceMode::Cartesian;
    const TrajectorySet tf = run(frozen);
    const double h_drift = max_report(tf, &StepReport::max_h_drift);

    char buf[140];
    std::snprintf(buf, sizeof buf, "norm=%.2e frozen_H=%.2e self_consistent_H=%.2e", norm_drift,
                  h_drift, sc_drift);
    report("conservation", norm_drift <= 1e-14 && h_drift <= 1e-8 && sc_drift <= 1e-3, buf);
}

// C7: the transverse stencil is second order, the stepper fourth order.
void convergence_orders() {
    // exactness on quadratics over non-uniform spacing
    double quad_err = 0.0;
    for (double h1 : {0.3, 0.7})
        for (double h2 : {0.4, 1.1}) {
            auto f = [](double x) { return 2.5 * x * x - 1.25 * x + 0.5; };
            const double d2 = stencil::second_derivative(h1, h2, f(-h1), f(0.0), f(h2));
            quad_err = std::max(quad_err, std::fabs(d2 - 5.0));
        }

    // launch-front G against the closed form, halving the ray spacing
    auto launch_g_err = [](double spacing) {
        const LaunchProfile p = LaunchProfile::gaussian(0.1);
        const int n = static_cast<int>(std::lround(60.0 / spacing)) + 1;
        const BeamFront front = make_front(p, n, 30.0);
        const FrontGeometry geom = front_geometry(front, spacing);
        GField gf = estimate_G(front, geom, 1e-6, 0.0, nullptr);
        double err = 0.0;
        for (std::size_t i = 0; i < front.rays.size(); ++i) {
            if (std::fabs(front.rays[i].xi) > 10.0) continue;
            err = std::max(err, std::fabs(gf.g[i] - eval_G0(p, front.rays[i].xi)));
        }
        return err;
    };
    const double eg1 = launch_g_err(0.5);
    const double eg2 = launch_g_err(0.25);
    const double spatial_order = std::log2(eg1 / eg2);

    auto osc_err = [](double d_tau) {
        SimConfig cfg = base_gaussian();
        cfg.medium.kind = Medium::Kind::Harmonic;
        cfg.medium.omega = 0.1;
        cfg.g_mode = GMode::Off;
        cfg.force_mode = ForceMode::Cartesian;
        cfg.d_tau = d_tau;
        cfg.zeta_max = 50.0;
        cfg.span = 10.0;
        cfg.output_stride = 1000000;
        const TrajectorySet ts = run(cfg);
        double err = 0.0;
        for (const auto& series : ts.samples) {
            const auto& last = series.back();
            err = std::max(err, std::fabs(last.xi - last.xi0 * std::cos(0.1 * last.zeta)));
        }
        return err;
    };
    const double temporal_order = std::log2(osc_err(0.2) / osc_err(0.1));

    char buf[160];
    std::snprintf(buf, sizeof buf, "quad=%.1e launchG=%.1e spatial=%.2f temporal=%.2f", quad_err,
                  eg1, spatial_order, temporal_order);
    report("convergence-orders",
           quad_err <= 1e-13 && eg1 <= 1e-4 && spatial_order >= 1.9 && temporal_order >= 3.5, buf);
}

// C8: the standard figures regenerate byte-identically.
void figure_stability() {
    const fs::path dir = fs::temp_directory_path() / "beamtrace_acceptance_figs";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cdir = CONFIG_DIR;
    bool ok = true;
    std::string detail;

    auto check_pair = [&](const std::string& name, const std::string& args) {
        const fs::path a = dir / (name + "_a.svg");
        const fs::path b = dir / (name + "_b.svg");
        ok = ok && run_cli(args + " --out " + a.string()) == 0;
        ok = ok && run_cli(args + " --out " + b.string()) == 0;
        const bool same = !slurp(a).empty() && slurp(a) == slurp(b);
        ok = ok && same;
        detail += name + (same ? ":stable " : ":DIFFERS ");
    };

    check_pair("figure1", "plot --artifact " + cdir + "/figure1.cfg --kind profiles");
    check_pair("figure2", "plot --artifact " + cdir + "/figure2.cfg --kind launchG");

    for (const std::string name : {"figure3", "figure4"}) {
        const fs::path out = dir / name;
        if (run_cli("simulate --config " + cdir + "/" + name + ".cfg --out " + out.string()) != 0) {
            ok = false;
            detail += name + ":sim_failed ";
            continue;
        }
        check_pair(name, "plot --artifact " + (out / "trajectories.csv").string() +
                             " --kind trajectories");
    }
    report("figure-stability", ok, detail);
}

}  // namespace

int main() {
    gaussian_spreading();
    classical_limit();
    fringe_formation();
    cross_method_agreement();
    focusing_sweep();
    conservation();
    convergence_orders();
    figure_stability();
    std::printf("%d of 8 criteria passed\n", 8 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
