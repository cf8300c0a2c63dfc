#ifndef BEAMTRACE_LAUNCH_HPP
#define BEAMTRACE_LAUNCH_HPP

#include <stdexcept>

#include "beamtrace/model.hpp"
#include "beamtrace/profiles.hpp"

namespace beamtrace {

// Collimated launch front: rays uniformly spaced on [-span, +span] at zeta = 0
// with rho = (0, 1), carrying amp_R = R(xi0).
inline BeamFront make_front(const LaunchProfile& profile, int n_rays, double span) {
    if (n_rays < 3) throw std::invalid_argument("make_front: n_rays must be >= 3");
    if (!(span > 0.0)) throw std::invalid_argument("make_front: span must be positive");
    BeamFront front;
    front.tau = 0.0;
    front.rays.reserve(static_cast<std::size_t>(n_rays));
    front.sigma.reserve(static_cast<std::size_t>(n_rays));
    const double h = 2.0 * span / (n_rays - 1);
    for (int i = 0; i < n_rays; ++i) {
        RayState r;
        r.ray_id = i;
        r.xi0 = -span + h * i;
        r.xi = r.xi0;
        r.zeta = 0.0;
        r.rho_x = 0.0;
        r.rho_z = 1.0;
        r.amp_R = eval_R(profile, r.xi0);
        front.rays.push_back(r);
        front.sigma.push_back(h * i);
    }
    return front;
}

}  // namespace beamtrace

#endif
