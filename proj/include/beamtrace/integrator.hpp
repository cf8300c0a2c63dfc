#ifndef BEAMTRACE_INTEGRATOR_HPP
#define BEAMTRACE_INTEGRATOR_HPP

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "beamtrace/launch.hpp"
#include "beamtrace/model.hpp"
#include "beamtrace/wavefront.hpp"

namespace beamtrace {

inline constexpr double g_coupling = 1.0 / (8.0 * M_PI * M_PI);

// Classical slot of the dimensionless force: -d/dxi [V/2E], which in the
// electromagnetic mapping is -d/dxi [(1 - n^2)/2].
inline std::array<double, 2> classical_force(const Medium& medium, double xi, double zeta) {
    (void)zeta;
    switch (medium.kind) {
        case Medium::Kind::Vacuum:
            return {0.0, 0.0};
        case Medium::Kind::Harmonic:
            return {-medium.omega * medium.omega * xi, 0.0};
        case Medium::Kind::LinearGradient:
            return {0.0, -0.5 * medium.alpha};
    }
    return {0.0, 0.0};
}

namespace detail {

// Total force on one ray as a function of position. The wave-potential part is
// either the per-step frozen front reconstruction (constant over substeps) or
// the closed-form launch G evaluated at the current xi.
struct RayForce {
    const SimConfig* cfg;
    double fg_xi = 0.0;    // self-consistent mode: frozen per-step G force
    double fg_zeta = 0.0;

    std::array<double, 2> operator()(double xi, double zeta) const {
        std::array<double, 2> f = classical_force(cfg->medium, xi, zeta);
        switch (cfg->g_mode) {
            case GMode::SelfConsistent:
                f[0] += fg_xi;
                f[1] += fg_zeta;
                break;
            case GMode::FrozenLaunch:
                f[0] += g_coupling * eval_dG0(cfg->profile, xi);
                break;
            case GMode::Off:
                break;
        }
        return f;
    }
};

inline bool finite_state(const RayState& r) {
    return std::isfinite(r.xi) && std::isfinite(r.zeta) && std::isfinite(r.rho_x) &&
           std::isfinite(r.rho_z);
}

// Classic RK4 on (xi, zeta, rho_x, rho_z).
inline void rk4_cartesian(RayState& r, const RayForce& force, double d_tau) {
    struct S { double xi, zeta, px, pz; };
    const S y0{r.xi, r.zeta, r.rho_x, r.rho_z};
    auto deriv = [&](const S& y) {
        const auto f = force(y.xi, y.zeta);
        return S{y.px, y.pz, f[0], f[1]};
    };
    auto advance = [](const S& y, const S& k, double h) {
        return S{y.xi + h * k.xi, y.zeta + h * k.zeta, y.px + h * k.px, y.pz + h * k.pz};
    };
    const S k1 = deriv(y0);
    const S k2 = deriv(advance(y0, k1, 0.5 * d_tau));
    const S k3 = deriv(advance(y0, k2, 0.5 * d_tau));
    const S k4 = deriv(advance(y0, k3, d_tau));
    r.xi = y0.xi + d_tau / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
    r.zeta = y0.zeta + d_tau / 6.0 * (k1.zeta + 2.0 * k2.zeta + 2.0 * k3.zeta + k4.zeta);
    r.rho_x = y0.px + d_tau / 6.0 * (k1.px + 2.0 * k2.px + 2.0 * k3.px + k4.px);
    r.rho_z = y0.pz + d_tau / 6.0 * (k1.pz + 2.0 * k2.pz + 2.0 * k3.pz + k4.pz);
    r.phase += 2.0 * M_PI * 0.5 *
               ((y0.px * y0.px + y0.pz * y0.pz) + (r.rho_x * r.rho_x + r.rho_z * r.rho_z)) *
               d_tau;
}

// Momentum rotated in-plane at the rate set by the transverse force component;
// |rho| comes from the energy relation rho^2 = 1 - V/E + G/4pi^2 (the exact
// dispersion relation, which keeps H = E identically), never from integrating
// the force. g is the wave potential held for this step.
inline void rotate_step(RayState& r, const RayForce& force, const Medium& medium, double g,
                        double d_tau) {
    const double theta0 = std::atan2(r.rho_x, r.rho_z);
    const double mag2 = 1.0 - medium.v_over_e(r.xi, r.zeta) + 2.0 * g_coupling * g;
    if (!(mag2 > 0.0)) {
        r.rho_z = -1.0;  // mark as turned back; caller retires
        return;
    }
    const double mag = std::sqrt(mag2);
    const auto f = force(r.xi, r.zeta);
    // e_perp = (rho_z, -rho_x)/|rho|: force along +e_perp increases theta
    const double omega = (f[0] * std::cos(theta0) - f[1] * std::sin(theta0)) / mag;
    const double theta1 = theta0 + omega * d_tau;

    // position update: Simpson quadrature of the rotating velocity
    auto vel = [&](double th) { return std::array<double, 2>{mag * std::sin(th), mag * std::cos(th)}; };
    const auto v0 = vel(theta0);
    const auto vm = vel(0.5 * (theta0 + theta1));
    const auto v1 = vel(theta1);
    r.xi += d_tau / 6.0 * (v0[0] + 4.0 * vm[0] + v1[0]);
    r.zeta += d_tau / 6.0 * (v0[1] + 4.0 * vm[1] + v1[1]);

    const double mag2_new = 1.0 - medium.v_over_e(r.xi, r.zeta) + 2.0 * g_coupling * g;
    if (!(mag2_new > 0.0)) {
        r.rho_z = -1.0;
        return;
    }
    const double mag_new = std::sqrt(mag2_new);
    r.rho_x = mag_new * std::sin(theta1);
    r.rho_z = mag_new * std::cos(theta1);
    r.phase += 2.0 * M_PI * 0.5 * (mag2 + mag2_new) * d_tau;
}

}  // namespace detail

// Advances the whole front by one step of d_tau. The G field was evaluated on
// the pre-step front and is held across RK4 substeps. Rays that leave the
// forward-propagating domain or go non-finite are retired in place (flagged by
// rho_z <= 0 or NaN); the caller removes them.
inline StepReport step(BeamFront& front, const FrontGeometry& geom, const GField& gfield,
                       const SimConfig& cfg) {
    StepReport rep;
    const std::size_t n = front.rays.size();
    const bool have_g = cfg.g_mode == GMode::SelfConsistent && gfield.g.size() == n;

    for (std::size_t i = 0; i < n; ++i) {
        RayState& r = front.rays[i];
        detail::RayForce force{&cfg};
        if (have_g) {
            const double fg = g_coupling * gfield.dg_dsigma[i];
            force.fg_xi = fg * geom.tangent_xi[i];
            force.fg_zeta = fg * geom.tangent_zeta[i];
        }
        double g_here = 0.0;
        switch (cfg.g_mode) {
            case GMode::SelfConsistent: g_here = have_g ? gfield.g[i] : 0.0; break;
            case GMode::FrozenLaunch: g_here = eval_G0(cfg.profile, r.xi); break;
            case GMode::Off: break;
        }
        if (cfg.force_mode == ForceMode::TransverseRotation) {
            detail::rotate_step(r, force, cfg.medium, g_here, cfg.d_tau);
        } else {
            detail::rk4_cartesian(r, force, cfg.d_tau);
            if (cfg.g_mode == GMode::SelfConsistent) {
                // re-impose the energy relation after the step
                const double target2 =
                    1.0 - cfg.medium.v_over_e(r.xi, r.zeta) + 2.0 * g_coupling * g_here;
                const double pz2 = target2 - r.rho_x * r.rho_x;
                if (pz2 > 0.0)
                    r.rho_z = std::sqrt(pz2);
                else
                    r.rho_z = -1.0;
            }
        }
    }

    front.tau += cfg.d_tau;
    rep.tau = front.tau;

    const bool vacuum = cfg.medium.kind == Medium::Kind::Vacuum;
    for (const auto& r : front.rays) {
        if (!detail::finite_state(r) || r.rho_z <= 0.0) {
            ++rep.retired;
            continue;
        }
        if (vacuum) {
            const double drift = std::fabs(std::hypot(r.rho_x, r.rho_z) - 1.0);
            rep.max_norm_drift = std::max(rep.max_norm_drift, drift);
        }
    }
    return rep;
}

namespace detail {

struct RunScratch {
    std::vector<double> h_launch;          // per ray_id, H at launch
    std::vector<bool> pair_crossed;        // per lower ray_id of a pair
    std::vector<bool> pair_gathered;
    std::vector<double> flux0;             // per lower ray_id of a pair
};

inline double hamiltonian(const RayState& r, const Medium& medium, double g) {
    return 0.5 * (r.rho_x * r.rho_x + r.rho_z * r.rho_z) +
           0.5 * medium.v_over_e(r.xi, r.zeta) - g_coupling * g;
}

}  // namespace detail

// Full run: loop { geometry -> G -> gradient -> step } until every alive ray
// has reached zeta_max, recording samples, drift and crossing diagnostics.
inline TrajectorySet run(const SimConfig& cfg, BeamFront front) {
    cfg.validate();
    const double launch_spacing = 2.0 * cfg.span / (cfg.n_rays - 1);

    TrajectorySet ts;
    ts.samples.resize(static_cast<std::size_t>(cfg.n_rays));

    detail::RunScratch sc;
    sc.h_launch.assign(static_cast<std::size_t>(cfg.n_rays), 0.5);
    sc.pair_crossed.assign(static_cast<std::size_t>(cfg.n_rays), false);
    sc.pair_gathered.assign(static_cast<std::size_t>(cfg.n_rays), false);
    sc.flux0.assign(static_cast<std::size_t>(cfg.n_rays), 0.0);

    GField gf, prev_gf;
    bool have_prev = false;

    auto record = [&](const BeamFront& f) {
        ts.sample_taus.push_back(f.tau);
        for (const auto& r : f.rays) ts.samples[static_cast<std::size_t>(r.ray_id)].push_back(r);
    };

    long step_idx = 0;
    bool first = true;
    while (true) {
        FrontGeometry geom;
        try {
            geom = front_geometry(front, launch_spacing);
        } catch (const FrontCollapse&) {
            ts.collapsed = true;
            break;
        }

        switch (cfg.g_mode) {
            case GMode::SelfConsistent:
                gf = estimate_G(front, geom, cfg.r_floor, cfg.g_blend,
                                have_prev ? &prev_gf : nullptr);
                transverse_gradient(gf, geom);
                break;
            case GMode::FrozenLaunch:
                gf.g.resize(front.rays.size());
                gf.dg_dsigma.assign(front.rays.size(), 0.0);
                gf.clamped.assign(front.rays.size(), false);
                for (std::size_t i = 0; i < front.rays.size(); ++i)
                    gf.g[i] = eval_G0(cfg.profile, front.rays[i].xi);
                break;
            case GMode::Off:
                gf.g.assign(front.rays.size(), 0.0);
                gf.dg_dsigma.assign(front.rays.size(), 0.0);
                gf.clamped.assign(front.rays.size(), false);
                break;
        }
        for (std::size_t i = 0; i < front.rays.size(); ++i) {
            front.rays[i].g_val = gf.g[i];
            front.rays[i].clamped = gf.clamped.empty() ? false : bool(gf.clamped[i]);
        }

        if (first) {
            // Project the launch momenta onto the energy shell
            // |rho|^2 = 1 - V/E + G/4pi^2 (directions kept). A collimated
            // front with |rho| = 1 exactly is off shell wherever G != 0.
            // Classical runs (G off) keep their given initial conditions.
            for (std::size_t i = 0; cfg.g_mode != GMode::Off && i < front.rays.size(); ++i) {
                RayState& r = front.rays[i];
                const double target2 =
                    1.0 - cfg.medium.v_over_e(r.xi, r.zeta) + 2.0 * g_coupling * gf.g[i];
                const double mag = std::hypot(r.rho_x, r.rho_z);
                if (target2 > 0.0 && mag > 0.0) {
                    const double s = std::sqrt(target2) / mag;
                    r.rho_x *= s;
                    r.rho_z *= s;
                }
            }
            for (std::size_t i = 0; i < front.rays.size(); ++i)
                sc.h_launch[static_cast<std::size_t>(front.rays[i].ray_id)] =
                    detail::hamiltonian(front.rays[i], cfg.medium, gf.g[i]);
            // launch flux per adjacent pair: mean-amplitude^2 * spacing * |rho|
            for (std::size_t i = 0; i + 1 < front.rays.size(); ++i) {
                const auto& a = front.rays[i];
                const auto& b = front.rays[i + 1];
                const double rbar = 0.5 * (a.amp_R + b.amp_R);
                sc.flux0[static_cast<std::size_t>(a.ray_id)] =
                    rbar * rbar * (geom.sigma[i + 1] - geom.sigma[i]);
            }
            record(front);
            first = false;
        }

        // crossings discovered on the current front
        StepReport pre;
        for (int pair : geom.crossed_pairs) {
            const int id = front.rays[static_cast<std::size_t>(pair)].ray_id;
            if (!sc.pair_crossed[static_cast<std::size_t>(id)]) {
                sc.pair_crossed[static_cast<std::size_t>(id)] = true;
                const auto& a = front.rays[static_cast<std::size_t>(pair)];
                const auto& b = front.rays[static_cast<std::size_t>(pair) + 1];
                ts.crossings.push_back({step_idx, front.tau, 0.5 * (a.zeta + b.zeta), a.ray_id, b.ray_id});
                ++pre.crossed;
            }
        }

        StepReport rep = step(front, geom, gf, cfg);
        ++step_idx;
        rep.crossed = pre.crossed;

        // retire rays flagged during the step
        for (auto it = front.rays.begin(); it != front.rays.end();) {
            if (!detail::finite_state(*it) || it->rho_z <= 0.0)
                it = front.rays.erase(it);
            else
                ++it;
        }

        // energy diagnostics against the ray's launch Hamiltonian
        for (std::size_t i = 0; i < front.rays.size(); ++i) {
            const auto& r = front.rays[i];
            double g_here = 0.0;
            switch (cfg.g_mode) {
                case GMode::SelfConsistent: g_here = r.g_val; break;
                case GMode::FrozenLaunch: g_here = eval_G0(cfg.profile, r.xi); break;
                case GMode::Off: g_here = 0.0; break;
            }
            const double h = detail::hamiltonian(r, cfg.medium, g_here);
            rep.max_h_err = std::max(rep.max_h_err, std::fabs(h - 0.5) / 0.5);
            rep.max_h_drift = std::max(
                rep.max_h_drift,
                std::fabs(h - sc.h_launch[static_cast<std::size_t>(r.ray_id)]) / 0.5);
        }

        // gathering = adjacent pair compressed to <= half its launch spacing
        double flux_drift = 0.0;
        for (std::size_t i = 0; i + 1 < front.rays.size(); ++i) {
            const auto& a = front.rays[i];
            const auto& b = front.rays[i + 1];
            if (b.ray_id != a.ray_id + 1) continue;
            const double dxi = b.xi - a.xi;
            const double spacing = std::fabs(dxi);
            const std::size_t id = static_cast<std::size_t>(a.ray_id);
            if (!sc.pair_gathered[id] &&
                (dxi <= 0.0 || spacing * 2.0 <= launch_spacing)) {
                sc.pair_gathered[id] = true;
                const double comp = spacing > 0.0
                                        ? launch_spacing / spacing
                                        : std::numeric_limits<double>::infinity();
                ts.gatherings.push_back({step_idx, 0.5 * (a.zeta + b.zeta), a.ray_id, b.ray_id, comp});
            }
            if (sc.flux0[id] > 0.0) {
                const double rbar = 0.5 * (a.amp_R + b.amp_R);
                const double sig = std::hypot(dxi, b.zeta - a.zeta);
                const double mag = 0.5 * (std::hypot(a.rho_x, a.rho_z) + std::hypot(b.rho_x, b.rho_z));
                const double flux = rbar * rbar * sig * mag;
                flux_drift = std::max(flux_drift, std::fabs(flux / sc.flux0[id] - 1.0));
            }
        }
        ts.flux_drift.push_back(flux_drift);
        ts.drift.push_back(rep);

        if (step_idx % cfg.output_stride == 0) record(front);

        prev_gf = gf;
        have_prev = true;

        if (front.rays.size() < 3) {
            ts.collapsed = true;
            break;
        }
        double min_zeta = std::numeric_limits<double>::infinity();
        for (const auto& r : front.rays) min_zeta = std::min(min_zeta, r.zeta);
        if (min_zeta >= cfg.zeta_max) break;
    }

    if (step_idx % cfg.output_stride != 0 && !front.rays.empty()) record(front);
    ts.final_tau = front.tau;
    return ts;
}

inline TrajectorySet run(const SimConfig& cfg) {
    cfg.validate();
    return run(cfg, make_front(cfg.profile, cfg.n_rays, cfg.span));
}

}  // namespace beamtrace

#endif
