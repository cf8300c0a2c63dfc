#ifndef BEAMTRACE_IO_HPP
#define BEAMTRACE_IO_HPP

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamtrace/model.hpp"
#include "beamtrace/oracles.hpp"

namespace beamtrace {

// Shortest decimal representation that round-trips the double exactly.
inline std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(data)));
    return buf;
}

// write-temp-then-rename
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string trajectories_csv(const TrajectorySet& ts) {
    std::string out = "ray_id,tau,xi,zeta,rho_x,rho_z,amp_R,g_val,phase,clamped\n";
    for (const auto& series : ts.samples) {
        for (std::size_t k = 0; k < series.size(); ++k) {
            const auto& r = series[k];
            const double tau = k < ts.sample_taus.size() ? ts.sample_taus[k] : 0.0;
            out += std::to_string(r.ray_id);
            out += ',';
            out += fmt_double(tau);
            out += ',';
            out += fmt_double(r.xi);
            out += ',';
            out += fmt_double(r.zeta);
            out += ',';
            out += fmt_double(r.rho_x);
            out += ',';
            out += fmt_double(r.rho_z);
            out += ',';
            out += fmt_double(r.amp_R);
            out += ',';
            out += fmt_double(r.g_val);
            out += ',';
            out += fmt_double(r.phase);
            out += ',';
            out += r.clamped ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

inline std::string density_csv(const std::vector<std::pair<double, DensityHistogram>>& stations) {
    std::string out = "zeta,xi,density\n";
    for (const auto& [zeta, h] : stations) {
        for (std::size_t i = 0; i < h.density.size(); ++i) {
            out += fmt_double(zeta);
            out += ',';
            out += fmt_double(h.center(i));
            out += ',';
            out += fmt_double(h.density[i]);
            out += '\n';
        }
    }
    return out;
}

inline std::string slices_csv(const std::vector<FieldSlice>& slices) {
    std::string out = "zeta,xi,intensity\n";
    for (const auto& sl : slices) {
        for (std::size_t i = 0; i < sl.intensity.size(); ++i) {
            out += fmt_double(sl.zeta);
            out += ',';
            out += fmt_double(sl.xi_at(i));
            out += ',';
            out += fmt_double(sl.intensity[i]);
            out += '\n';
        }
    }
    return out;
}

}  // namespace beamtrace

#endif
