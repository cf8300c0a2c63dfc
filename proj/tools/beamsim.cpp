// beamsim: deterministic Hamiltonian beam-trajectory simulator CLI.
// Subcommands: simulate | plot | compare | sweep.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beamtrace/compare.hpp"
#include "beamtrace/config.hpp"
#include "beamtrace/integrator.hpp"
#include "beamtrace/io.hpp"
#include "beamtrace/oracles.hpp"
#include "beamtrace/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace beamtrace;

namespace {

constexpr const char* kToolVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCollapse = 3;
constexpr int kExitTolerance = 4;

json run_report_json(const TrajectorySet& ts) {
    double max_h_err = 0.0, max_h_drift = 0.0, max_norm_drift = 0.0, max_flux_drift = 0.0;
    int retired = 0;
    for (const auto& d : ts.drift) {
        max_h_err = std::max(max_h_err, d.max_h_err);
        max_h_drift = std::max(max_h_drift, d.max_h_drift);
        max_norm_drift = std::max(max_norm_drift, d.max_norm_drift);
        retired += d.retired;
    }
    for (double f : ts.flux_drift) max_flux_drift = std::max(max_flux_drift, f);

    json rep;
    rep["final_tau"] = ts.final_tau;
    rep["collapsed"] = ts.collapsed;
    rep["max_h_err"] = max_h_err;
    rep["max_h_drift"] = max_h_drift;
    rep["max_norm_drift"] = max_norm_drift;
    rep["max_flux_drift"] = max_flux_drift;
    rep["retired"] = retired;
    rep["crossings"] = ts.crossings.size();
    rep["gatherings"] = ts.gatherings.size();
    const double fg = first_gathering_zeta(ts);
    if (std::isfinite(fg))
        rep["first_gathering_zeta"] = fg;
    else
        rep["first_gathering_zeta"] = nullptr;
    json xs = json::array();
    for (const auto& c : ts.crossings)
        xs.push_back({{"step", c.step}, {"zeta", c.zeta}, {"ray_lo", c.ray_lo}, {"ray_hi", c.ray_hi}});
    rep["crossing_events"] = xs;
    return rep;
}

void write_manifest(const fs::path& out_dir, const AppConfig& app,
                    const std::vector<std::pair<std::string, std::string>>& outputs,
                    double wall_ms) {
    json m;
    m["config_hash"] = hash_hex(app.resolved);
    m["tool_version"] = kToolVersion;
    json files = json::array();
    for (const auto& [role, name] : outputs) files.push_back({{"role", role}, {"path", name}});
    m["outputs"] = files;
    m["wall_time_ms"] = wall_ms;  // excluded from determinism guarantees
    atomic_write(out_dir / "manifest.json", m.dump(2) + "\n");
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir_s) {
    const auto t0 = std::chrono::steady_clock::now();
    AppConfig app;
    try {
        app = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    const fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);

    const TrajectorySet ts = run(app.sim);

    std::vector<std::pair<std::string, std::string>> outputs;
    atomic_write(out_dir / "trajectories.csv", trajectories_csv(ts));
    outputs.emplace_back("trajectories", "trajectories.csv");

    std::vector<std::pair<double, DensityHistogram>> densities;
    for (double st : app.stations) {
        try {
            densities.emplace_back(st, density_histogram(ts, st, app.bins));
        } catch (const std::out_of_range&) {
            // station beyond a collapsed run's extent; skip
        }
    }
    atomic_write(out_dir / "density.csv", density_csv(densities));
    outputs.emplace_back("density", "density.csv");

    atomic_write(out_dir / "report.json", run_report_json(ts).dump(2) + "\n");
    outputs.emplace_back("report", "report.json");

    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_dir, app, outputs, wall);

    if (ts.collapsed) {
        std::cerr << "front collapsed at tau=" << ts.final_tau << "; partial artifacts kept\n";
        return kExitCollapse;
    }
    return kExitOk;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::string& header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            header = line;
            first = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!cells.empty()) rows.push_back(std::move(cells));
    }
    return rows;
}

int cmd_plot(const std::string& artifact, const std::string& kind, const std::string& out_file) {
    try {
        if (kind == "profiles" || kind == "launchG") {
            AppConfig app;
            try {
                app = load_config(artifact);
            } catch (const ConfigError& e) {
                std::cerr << "plot " << kind << " expects a config file: " << e.what() << "\n";
                return kExitConfig;
            }
            const double eps = app.sim.profile.epsilon;
            const int n_exp = app.sim.profile.n_exp;
            const LaunchProfile g1 = LaunchProfile::gaussian(eps);
            const LaunchProfile g2 = LaunchProfile::algebraic(eps, n_exp);
            const double span = app.sim.span;
            std::vector<double> xs, y1, y2;
            const int n = 1201;
            for (int i = 0; i < n; ++i) {
                const double xi = -span + 2.0 * span * i / (n - 1);
                xs.push_back(xi);
                y1.push_back(kind == "profiles" ? eval_R(g1, xi) : eval_G0(g1, xi));
                y2.push_back(kind == "profiles" ? eval_R(g2, xi) : eval_G0(g2, xi));
            }
            SvgPlot plot(kind == "profiles" ? "Launch amplitude R(xi)" : "Launch G(xi) = R''/R",
                         "xi", kind == "profiles" ? "R" : "G");
            plot.add_curve(xs, y1, "black");
            plot.add_curve(xs, y2, "black", "6,4");
            atomic_write(out_file, plot.render());
            return kExitOk;
        }
        std::string header;
        const auto rows = read_csv(artifact, header);
        if (kind == "trajectories") {
            if (header.rfind("ray_id,", 0) != 0) {
                std::cerr << "plot trajectories expects trajectories.csv\n";
                return kExitConfig;
            }
            std::map<int, std::pair<std::vector<double>, std::vector<double>>> per_ray;
            for (const auto& r : rows) {
                const int id = std::stoi(r[0]);
                per_ray[id].first.push_back(std::stod(r[3]));   // zeta
                per_ray[id].second.push_back(std::stod(r[2]));  // xi
            }
            SvgPlot plot("Trajectory pattern", "zeta", "xi");
            for (const auto& [id, xy] : per_ray) {
                (void)id;
                plot.add_curve(xy.first, xy.second, "black");
            }
            atomic_write(out_file, plot.render());
            return kExitOk;
        }
        if (kind == "density") {
            if (header != "zeta,xi,density") {
                std::cerr << "plot density expects density.csv\n";
                return kExitConfig;
            }
            std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_station;
            for (const auto& r : rows) {
                per_station[r[0]].first.push_back(std::stod(r[1]));
                per_station[r[0]].second.push_back(std::stod(r[2]));
            }
            SvgPlot plot("Trajectory density", "xi", "density");
            int i = 0;
            const char* colors[] = {"black", "blue", "red", "green", "orange"};
            for (const auto& [st, xy] : per_station)
                plot.add_curve(xy.first, xy.second, colors[i++ % 5]);
            atomic_write(out_file, plot.render());
            return kExitOk;
        }
        std::cerr << "unknown plot kind: " << kind << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "plot failed: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_compare(const std::string& config_path, const std::string& out_dir_s) {
    AppConfig app;
    try {
        app = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    const fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);

    const TrajectorySet ts = run(app.sim);
    const auto slices = paraxial_propagate(app.sim.profile,
                                           {app.oracle_half_width, app.oracle_points},
                                           app.stations, app.oracle_d_zeta);
    const CompareReport rep = compare_methods(app, ts, slices);

    json j;
    j["config_hash"] = hash_hex(app.resolved);
    j["envelope_max_rel_err"] = rep.envelope_max_rel_err;
    j["all_pass"] = rep.all_pass;
    json sts = json::array();
    for (const auto& sc : rep.stations) {
        json s;
        s["zeta"] = sc.zeta;
        s["bin_width"] = sc.bin_width;
        s["trajectory_peaks"] = sc.traj_peaks;
        s["oracle_peaks"] = sc.oracle_peaks;
        s["peak_count_match"] = sc.peak_count_match;
        s["max_peak_offset_bins"] = sc.max_peak_offset;
        s["positions_match"] = sc.positions_match;
        sts.push_back(s);
    }
    j["stations"] = sts;
    atomic_write(out_dir / "compare.json", j.dump(2) + "\n");
    atomic_write(out_dir / "slices.csv", slices_csv(slices));

    std::vector<std::pair<double, DensityHistogram>> densities;
    for (double st : app.stations) densities.emplace_back(st, density_histogram(ts, st, app.bins));
    atomic_write(out_dir / "density.csv", density_csv(densities));

    if (!rep.all_pass) {
        std::cerr << "comparison tolerances failed (see compare.json)\n";
        return kExitTolerance;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir_s, int jobs) {
    AppConfig app;
    try {
        app = load_config(config_path);
        if (app.sweep_epsilon.empty())
            throw ConfigError("config: sweep requires [sweep] epsilon_list");
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    const fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);

    std::vector<double> eps = app.sweep_epsilon;
    std::sort(eps.begin(), eps.end());
    std::vector<SweepPoint> points(eps.size());
    std::vector<std::string> errors(eps.size());

    std::size_t next = 0;
    std::mutex mtx;
    auto worker = [&]() {
        while (true) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mtx);
                if (next >= eps.size()) return;
                i = next++;
            }
            try {
                points[i] = run_sweep_point(app, eps[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int width = std::max(1, std::min<int>(jobs, static_cast<int>(eps.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::string csv = "epsilon,first_gathering_zeta,crossings,collapsed,error\n";
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    bool any_error = false;
    // eps ascending; focusing claim: first gathering moves toward the launch
    // plane as epsilon grows
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const auto& p = points[i];
        csv += fmt_double(eps[i]);
        csv += ',';
        csv += std::isfinite(p.first_gathering) ? fmt_double(p.first_gathering) : "inf";
        csv += ',';
        csv += std::to_string(p.crossings);
        csv += ',';
        csv += p.collapsed ? '1' : '0';
        csv += ',';
        csv += errors[i];
        csv += '\n';
        if (!errors[i].empty()) any_error = true;
        if (i > 0 && !(p.first_gathering < prev)) monotone = false;
        prev = p.first_gathering;
    }
    atomic_write(out_dir / "summary.csv", csv);

    json j;
    j["config_hash"] = hash_hex(app.resolved);
    j["monotone_decreasing"] = monotone;
    atomic_write(out_dir / "sweep.json", j.dump(2) + "\n");

    std::cout << "first-gathering zeta " << (monotone ? "strictly decreasing" : "NOT monotone")
              << " in epsilon\n";
    return any_error ? kExitConfig : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Hamiltonian beam-trajectory simulator"};
    cli.require_subcommand(1);

    bool seedless = false;
    cli.add_flag("--seedless", seedless,
                 "reserved: the simulator has no randomness; passing this flag is an error");

    std::string config_path, out_dir = "out", artifact, kind, out_file;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    auto* sim = cli.add_subcommand("simulate", "run a trajectory simulation");
    sim->add_option("--config", config_path, "config file")->required();
    sim->add_option("--out", out_dir, "output directory");

    auto* plot = cli.add_subcommand("plot", "render an artifact as SVG");
    plot->add_option("--artifact", artifact, "config or CSV artifact")->required();
    plot->add_option("--kind", kind, "profiles|launchG|trajectories|density")->required();
    plot->add_option("--out", out_file, "output SVG path")->required();

    auto* cmp = cli.add_subcommand("compare", "trajectory run vs paraxial oracle");
    cmp->add_option("--config", config_path, "config file")->required();
    cmp->add_option("--out", out_dir, "output directory");

    auto* swp = cli.add_subcommand("sweep", "epsilon sweep");
    swp->add_option("--config", config_path, "config file")->required();
    swp->add_option("--out", out_dir, "output directory");
    swp->add_option("--jobs", jobs, "worker pool width");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) ? kExitConfig : kExitOk;
    }

    if (seedless) {
        std::cerr << "--seedless is reserved: this simulator has no randomness\n";
        return kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (plot->parsed()) return cmd_plot(artifact, kind, out_file);
        if (cmp->parsed()) return cmd_compare(config_path, out_dir);
        if (swp->parsed()) return cmd_sweep(config_path, out_dir, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
