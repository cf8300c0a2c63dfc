#ifndef BEAMTRACE_CONFIG_HPP
#define BEAMTRACE_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamtrace/model.hpp"

namespace beamtrace {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct AppConfig {
    SimConfig sim;
    std::vector<double> stations{200.0, 400.0, 700.0};
    int bins = 64;
    double fringe_threshold = 0.05;  // relative prominence for peak detection
    double oracle_half_width = 300.0;
    int oracle_points = 4096;
    double oracle_d_zeta = 0.1;
    std::vector<double> sweep_epsilon;   // empty unless [sweep] present
    std::optional<double> sweep_zeta_max;
    std::string resolved;                // canonical key=value dump, hash input
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

inline int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

inline std::vector<std::pair<double, double>> read_knots(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read knot table " + path.string());
    std::vector<std::pair<double, double>> knots;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::stringstream ss(t);
        double x, r;
        if (!(ss >> x >> r)) throw ConfigError("config: bad knot line: " + line);
        knots.emplace_back(x, r);
    }
    return knots;
}

}  // namespace detail

// Flat sectioned key=value text. '#' starts a comment; unknown sections or
// keys are errors.
inline AppConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = ".") {
    std::map<std::string, std::map<std::string, std::string>> kv;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section at line " + std::to_string(lineno));
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
        if (section.empty())
            throw ConfigError("config: key outside any section at line " + std::to_string(lineno));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (kv[section].count(key))
            throw ConfigError("config: duplicate key '" + section + "." + key + "'");
        kv[section][key] = val;
    }

    static const std::map<std::string, std::vector<std::string>> schema = {
        {"profile", {"kind", "epsilon", "n_exp", "offset", "base_kind", "knots"}},
        {"medium", {"kind", "omega", "alpha"}},
        {"numerics",
         {"n_rays", "span", "d_tau", "zeta_max", "force_mode", "g_mode", "g_blend", "r_floor",
          "output_stride"}},
        {"outputs", {"stations", "bins", "fringe_threshold"}},
        {"oracle", {"xi_half_width", "n_points", "d_zeta"}},
        {"sweep", {"epsilon_list", "zeta_max"}},
    };
    for (const auto& [sec, keys] : kv) {
        auto it = schema.find(sec);
        if (it == schema.end()) throw ConfigError("config: unknown section [" + sec + "]");
        for (const auto& [k, v] : keys) {
            (void)v;
            if (std::find(it->second.begin(), it->second.end(), k) == it->second.end())
                throw ConfigError("config: unknown key '" + sec + "." + k + "'");
        }
    }

    auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
        auto s = kv.find(sec);
        if (s == kv.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    };

    AppConfig app;

    // profile
    const std::string kind = get("profile", "kind").value_or("gaussian");
    const double epsilon = detail::to_double("epsilon", get("profile", "epsilon").value_or("0.1"));
    const int n_exp = detail::to_int("n_exp", get("profile", "n_exp").value_or("1"));
    try {
        if (kind == "gaussian") {
            app.sim.profile = LaunchProfile::gaussian(epsilon);
        } else if (kind == "algebraic") {
            app.sim.profile = LaunchProfile::algebraic(epsilon, n_exp);
        } else if (kind == "dualbeam") {
            const double offset = detail::to_double("offset", get("profile", "offset").value_or("0"));
            const std::string base_kind = get("profile", "base_kind").value_or("gaussian");
            LaunchProfile base;
            if (base_kind == "gaussian")
                base = LaunchProfile::gaussian(epsilon);
            else if (base_kind == "algebraic")
                base = LaunchProfile::algebraic(epsilon, n_exp);
            else
                throw ConfigError("config: unknown profile.base_kind '" + base_kind + "'");
            app.sim.profile = LaunchProfile::dual_beam(offset, std::move(base));
        } else if (kind == "tabulated") {
            const auto knots_path = get("profile", "knots");
            if (!knots_path) throw ConfigError("config: tabulated profile needs profile.knots");
            app.sim.profile = LaunchProfile::tabulated(detail::read_knots(base_dir / *knots_path));
        } else {
            throw ConfigError("config: unknown profile.kind '" + kind + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    // medium
    const std::string med = get("medium", "kind").value_or("vacuum");
    if (med == "vacuum") {
        app.sim.medium.kind = Medium::Kind::Vacuum;
    } else if (med == "harmonic") {
        app.sim.medium.kind = Medium::Kind::Harmonic;
        app.sim.medium.omega = detail::to_double("omega", get("medium", "omega").value_or("0.1"));
    } else if (med == "linear_gradient") {
        app.sim.medium.kind = Medium::Kind::LinearGradient;
        app.sim.medium.alpha = detail::to_double("alpha", get("medium", "alpha").value_or("0.0"));
    } else {
        throw ConfigError("config: unknown medium.kind '" + med + "'");
    }

    // numerics
    app.sim.n_rays = detail::to_int("n_rays", get("numerics", "n_rays").value_or("101"));
    if (auto v = get("numerics", "span"))
        app.sim.span = detail::to_double("span", *v);
    else
        app.sim.span = 3.0 / epsilon;  // three beam widths, ray on axis for odd counts
    app.sim.d_tau = detail::to_double("d_tau", get("numerics", "d_tau").value_or("0.1"));
    app.sim.zeta_max = detail::to_double("zeta_max", get("numerics", "zeta_max").value_or("700"));
    const std::string fm = get("numerics", "force_mode").value_or("transverse_rotation");
    if (fm == "transverse_rotation")
        app.sim.force_mode = ForceMode::TransverseRotation;
    else if (fm == "cartesian")
        app.sim.force_mode = ForceMode::Cartesian;
    else
        throw ConfigError("config: unknown numerics.force_mode '" + fm + "'");
    const std::string gm = get("numerics", "g_mode").value_or("self_consistent");
    if (gm == "self_consistent")
        app.sim.g_mode = GMode::SelfConsistent;
    else if (gm == "frozen_launch")
        app.sim.g_mode = GMode::FrozenLaunch;
    else if (gm == "off")
        app.sim.g_mode = GMode::Off;
    else
        throw ConfigError("config: unknown numerics.g_mode '" + gm + "'");
    app.sim.g_blend = detail::to_double("g_blend", get("numerics", "g_blend").value_or("0"));
    app.sim.r_floor = detail::to_double("r_floor", get("numerics", "r_floor").value_or("1e-6"));
    app.sim.output_stride =
        detail::to_int("output_stride", get("numerics", "output_stride").value_or("10"));

    // outputs
    if (auto v = get("outputs", "stations")) app.stations = detail::to_list("stations", *v);
    if (auto v = get("outputs", "bins")) app.bins = detail::to_int("bins", *v);
    if (app.bins < 2) throw ConfigError("config: outputs.bins must be >= 2");
    if (auto v = get("outputs", "fringe_threshold"))
        app.fringe_threshold = detail::to_double("fringe_threshold", *v);
    if (app.fringe_threshold <= 0.0 || app.fringe_threshold >= 1.0)
        throw ConfigError("config: outputs.fringe_threshold must be in (0, 1)");

    // oracle
    if (auto v = get("oracle", "xi_half_width")) app.oracle_half_width = detail::to_double("xi_half_width", *v);
    if (auto v = get("oracle", "n_points")) app.oracle_points = detail::to_int("n_points", *v);
    if (auto v = get("oracle", "d_zeta")) app.oracle_d_zeta = detail::to_double("d_zeta", *v);

    // sweep
    if (auto v = get("sweep", "epsilon_list")) app.sweep_epsilon = detail::to_list("epsilon_list", *v);
    if (auto v = get("sweep", "zeta_max")) app.sweep_zeta_max = detail::to_double("zeta_max", *v);

    try {
        app.sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    // canonical resolved dump, used for hashing and determinism checks
    std::ostringstream res;
    res.precision(17);
    res << "profile.kind=" << kind << "\nprofile.epsilon=" << epsilon
        << "\nprofile.n_exp=" << n_exp << "\nprofile.offset=" << app.sim.profile.offset
        << "\nmedium.kind=" << med << "\nmedium.omega=" << app.sim.medium.omega
        << "\nmedium.alpha=" << app.sim.medium.alpha << "\nnumerics.n_rays=" << app.sim.n_rays
        << "\nnumerics.span=" << app.sim.span << "\nnumerics.d_tau=" << app.sim.d_tau
        << "\nnumerics.zeta_max=" << app.sim.zeta_max << "\nnumerics.force_mode=" << fm
        << "\nnumerics.g_mode=" << gm << "\nnumerics.g_blend=" << app.sim.g_blend
        << "\nnumerics.r_floor=" << app.sim.r_floor
        << "\nnumerics.output_stride=" << app.sim.output_stride << "\noutputs.bins=" << app.bins
        << "\noutputs.fringe_threshold=" << app.fringe_threshold << "\noutputs.stations=";
    for (std::size_t i = 0; i < app.stations.size(); ++i)
        res << (i ? "," : "") << app.stations[i];
    res << "\noracle.xi_half_width=" << app.oracle_half_width
        << "\noracle.n_points=" << app.oracle_points << "\noracle.d_zeta=" << app.oracle_d_zeta;
    if (!app.sweep_epsilon.empty()) {
        res << "\nsweep.epsilon_list=";
        for (std::size_t i = 0; i < app.sweep_epsilon.size(); ++i)
            res << (i ? "," : "") << app.sweep_epsilon[i];
        if (app.sweep_zeta_max) res << "\nsweep.zeta_max=" << *app.sweep_zeta_max;
    }
    res << "\n";
    app.resolved = res.str();
    return app;
}

inline AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

}  // namespace beamtrace

#endif
