#ifndef BEAMTRACE_MODEL_HPP
#define BEAMTRACE_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamtrace/profiles.hpp"

namespace beamtrace {

// All quantities are dimensionless: lengths in lambda0, momenta in p0,
// time in lambda0/(p0/m).

struct RayState {
    int ray_id = 0;
    double xi0 = 0.0;    // launch transverse coordinate
    double xi = 0.0;
    double zeta = 0.0;
    double rho_x = 0.0;
    double rho_z = 1.0;
    double amp_R = 1.0;  // transported amplitude, fixed at launch
    double phase = 0.0;  // accumulated S/hbar
    double g_val = 0.0;  // last evaluated G at this ray
    bool clamped = false;
};

struct BeamFront {
    double tau = 0.0;
    std::vector<RayState> rays;          // alive rays, launch order
    std::vector<double> sigma;           // arc length along the front, per ray
};

struct Medium {
    enum class Kind {
        Vacuum,
        Harmonic,        // V/2E = 0.5 * omega^2 * xi^2
        LinearGradient,  // n^2 = 1 - alpha * zeta
    };
    Kind kind = Kind::Vacuum;
    double omega = 0.0;
    double alpha = 0.0;

    // V(xi,zeta)/E; in refractive form this is 1 - n^2.
    double v_over_e(double xi, double zeta) const {
        switch (kind) {
            case Kind::Vacuum: return 0.0;
            case Kind::Harmonic: return omega * omega * xi * xi;
            case Kind::LinearGradient: return alpha * zeta;
        }
        return 0.0;
    }
};

enum class ForceMode { TransverseRotation, Cartesian };

// How G enters the dynamics.
//   SelfConsistent: reconstructed from the advancing front each step
//   FrozenLaunch:   closed-form launch G evaluated at the current xi (test mode)
//   Off:            G disabled, classical dynamics only
enum class GMode { SelfConsistent, FrozenLaunch, Off };

struct SimConfig {
    LaunchProfile profile;
    Medium medium;
    int n_rays = 101;
    double span = 30.0;       // half width of the launch interval
    double d_tau = 0.1;
    double zeta_max = 700.0;
    ForceMode force_mode = ForceMode::TransverseRotation;
    GMode g_mode = GMode::SelfConsistent;
    double g_blend = 0.0;     // step-to-step G relaxation, [0,1)
    double r_floor = 1e-6;    // relative amplitude floor for G = R''/R
    int output_stride = 10;

    void validate() const {
        profile.validate();
        if (n_rays < 5) throw std::invalid_argument("config: n_rays must be >= 5");
        if (!(span > 0.0)) throw std::invalid_argument("config: span must be positive");
        if (!(d_tau > 0.0)) throw std::invalid_argument("config: d_tau must be positive");
        if (!(zeta_max > 0.0)) throw std::invalid_argument("config: zeta_max must be positive");
        if (!(g_blend >= 0.0 && g_blend < 1.0))
            throw std::invalid_argument("config: g_blend must be in [0, 1)");
        if (!(r_floor > 0.0 && r_floor < 1.0))
            throw std::invalid_argument("config: r_floor must be in (0, 1)");
        if (output_stride < 1) throw std::invalid_argument("config: output_stride must be >= 1");
    }
};

struct StepReport {
    double tau = 0.0;
    double max_h_err = 0.0;     // max |H - E| / E against E = 1/2
    double max_h_drift = 0.0;   // max |H - H_launch| / E
    double max_norm_drift = 0.0;
    int retired = 0;
    int crossed = 0;
};

struct CrossingEvent {
    long step = 0;
    double tau = 0.0;
    double zeta = 0.0;
    int ray_lo = 0;
    int ray_hi = 0;
};

struct GatheringEvent {
    long step = 0;
    double zeta = 0.0;
    int ray_lo = 0;
    int ray_hi = 0;
    double compression = 0.0;   // launch spacing / current spacing
};

struct TrajectorySet {
    // samples[i] is the time series for launch ray i (may end early if retired)
    std::vector<std::vector<RayState>> samples;
    std::vector<double> sample_taus;            // tau of each recorded step
    std::vector<StepReport> drift;
    std::vector<CrossingEvent> crossings;
    std::vector<GatheringEvent> gatherings;
    std::vector<double> flux_drift;             // per step, max relative pair-flux change
    bool collapsed = false;                     // front fell below 3 rays
    double final_tau = 0.0;
};

}  // namespace beamtrace

#endif
