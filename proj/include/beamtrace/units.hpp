#ifndef BEAMTRACE_UNITS_HPP
#define BEAMTRACE_UNITS_HPP

#include <cmath>
#include <stdexcept>

namespace beamtrace {

// CGS value of the reduced Planck constant, erg*s.
inline constexpr double hbar_cgs = 1.0546e-27;

struct DimensionlessState {
    double xi;   // x / lambda0
    double rho;  // p / p0
    double tau;  // t * (p0/m) / lambda0
};

struct BeamScales {
    double lambda0;  // 2*pi*hbar / p0, cm
    double p0;       // sqrt(2 m E), g*cm/s
    double t0;       // lambda0 / (p0/m), s
};

inline BeamScales beam_scales(double mass_g, double energy_erg) {
    if (!(mass_g > 0.0)) throw std::domain_error("beam_scales: mass must be positive");
    if (!(energy_erg > 0.0)) throw std::domain_error("beam_scales: energy must be positive");
    BeamScales s;
    s.p0 = std::sqrt(2.0 * mass_g * energy_erg);
    s.lambda0 = 2.0 * M_PI * hbar_cgs / s.p0;
    s.t0 = s.lambda0 / (s.p0 / mass_g);
    return s;
}

inline DimensionlessState dimensionless_from_physical(double mass_g, double energy_erg,
                                                      double x_cm, double p_cgs, double t_s) {
    const BeamScales s = beam_scales(mass_g, energy_erg);
    return {x_cm / s.lambda0, p_cgs / s.p0, t_s / s.t0};
}

inline void physical_from_dimensionless(double mass_g, double energy_erg,
                                        const DimensionlessState& d,
                                        double& x_cm, double& p_cgs, double& t_s) {
    const BeamScales s = beam_scales(mass_g, energy_erg);
    x_cm = d.xi * s.lambda0;
    p_cgs = d.rho * s.p0;
    t_s = d.tau * s.t0;
}

}  // namespace beamtrace

#endif
