#pragma once

#include <cmath>
#include <stdexcept>

namespace aerocap {

/// Planetary constants: point-mass gravity plus the second zonal harmonic.
struct PlanetModel {
    double mu;     // gravitational parameter [m^3/s^2]
    double Re;     // equatorial radius [m]
    double J2;     // second zonal harmonic [-]
    double Omega;  // rotation rate [rad/s]

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("PlanetModel: mu must be > 0");
        if (!(Re > 0.0)) throw std::invalid_argument("PlanetModel: Re must be > 0");
        if (Omega < 0.0) throw std::invalid_argument("PlanetModel: Omega must be >= 0");
        if (J2 < 0.0) throw std::invalid_argument("PlanetModel: J2 must be >= 0");
    }

    /// Surface gravity mu/Re^2, the reference acceleration for nondimensional
    /// guidance quantities.
    double g0() const { return mu / (Re * Re); }

    /// Velocity scale sqrt(Re * g0) = sqrt(mu / Re).
    double v_scale() const { return std::sqrt(mu / Re); }
};

struct GravityComponents {
    double g_r;    // radial, positive toward planet center [m/s^2]
    double g_phi;  // latitudinal [m/s^2]
};

/// Radial and latitudinal gravity of an oblate planet.
inline GravityComponents gravity(const PlanetModel& p, double r, double phi) {
    if (!(r > 0.0)) throw std::domain_error("gravity: radius must be > 0");
    const double mu_r2 = p.mu / (r * r);
    const double re_r2 = (p.Re / r) * (p.Re / r);
    const double sp = std::sin(phi);
    const double g_r = mu_r2 * (1.0 + p.J2 * re_r2 * (1.5 - 4.5 * sp * sp));
    const double g_phi = 3.0 * mu_r2 * p.J2 * re_r2 * sp * std::cos(phi);
    return {g_r, g_phi};
}

}  // namespace aerocap
