#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aerocap/planet.hpp"

namespace aerocap {

/// Seven-component flight state over the rotating planet, planet-relative.
struct SimState {
    double t = 0.0;      // [s]
    double r = 0.0;      // radius from planet center [m]
    double theta = 0.0;  // longitude [rad]
    double phi = 0.0;    // latitude [rad]
    double V = 0.0;      // planet-relative velocity [m/s]
    double gamma = 0.0;  // relative flight-path angle, positive above horizon [rad]
    double psi = 0.0;    // heading, measured from east toward north [rad]
    double sigma = 0.0;  // bank angle [rad]

    void validate() const {
        if (!(r > 0.0)) throw std::invalid_argument("SimState: r must be > 0");
        if (!(V > 0.0)) throw std::invalid_argument("SimState: V must be > 0");
        if (!(std::abs(gamma) < M_PI_2)) throw std::invalid_argument("SimState: |gamma| must be < pi/2");
        if (!(std::abs(sigma) <= M_PI + 1e-12)) throw std::invalid_argument("SimState: |sigma| must be <= pi");
    }
};

struct VehicleParams {
    double beta = 145.0;            // ballistic coefficient m/(Cd*Aref) [kg/m^2]
    double LD = 0.25;               // lift-to-drag ratio [-]
    double mass = 2847.068;         // [kg]
    double zeta = 2.0;              // bank time constant [s]
    double sigma_rate_max = 20.0 * M_PI / 180.0;  // bank rate limit [rad/s]

    void validate() const {
        if (!(beta > 0.0)) throw std::invalid_argument("VehicleParams: beta must be > 0");
        if (!(zeta > 0.0)) throw std::invalid_argument("VehicleParams: zeta must be > 0");
        if (!(sigma_rate_max > 0.0))
            throw std::invalid_argument("VehicleParams: sigma_rate_max must be > 0");
    }
};

/// Entry interface state as delivered by mission design: velocity and
/// flight-path angle in the inertial frame.
struct EntryInterface {
    double h0 = 0.0;              // altitude [m]
    double theta0 = 0.0;          // longitude [rad]
    double phi0 = 0.0;            // latitude [rad]
    double V0_inertial = 0.0;     // [m/s]
    double gamma0_inertial = 0.0; // [rad]
    double psi0 = 0.0;            // heading [rad], treated as planet-relative
};

struct AeroAccels {
    double F_T;  // tangential (drag), <= 0 [m/s^2]
    double F_N;  // normal (lift), >= 0 for LD >= 0 [m/s^2]
};

/// Drag and lift accelerations from density, speed, and vehicle parameters.
inline AeroAccels aero_accels(double rho, double V, const VehicleParams& veh) {
    const double q_over_beta = rho * V * V / (2.0 * veh.beta);
    return {-q_over_beta, q_over_beta * veh.LD};
}

// ---------------------------------------------------------------------------
// Equations of motion
// ---------------------------------------------------------------------------

using StateVector = std::array<double, 7>;  // r, theta, phi, V, gamma, psi, sigma

inline StateVector to_vector(const SimState& s) {
    return {s.r, s.theta, s.phi, s.V, s.gamma, s.psi, s.sigma};
}

inline SimState from_vector(const StateVector& y, double t) {
    return {t, y[0], y[1], y[2], y[3], y[4], y[5], y[6]};
}

/// Per-call options for the equations of motion. Truth propagation uses the
/// lagged, rate-limited bank channel; guidance-internal predictions freeze the
/// bank (sigma_dot = 0) and scale lift/drag by the fading-filter estimates.
struct EomOptions {
    double sigma_cmd = 0.0;
    bool bank_lag = true;
    double lift_scale = 1.0;
    double drag_scale = 1.0;
};

template <class Atm>
StateVector eom(const StateVector& y, const PlanetModel& p, const Atm& atm,
                const VehicleParams& veh, const EomOptions& opt) {
    const double r = y[0], phi = y[2], V = y[3], gamma = y[4], psi = y[5], sigma = y[6];
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double cpsi = std::cos(psi), spsi = std::sin(psi);
    if (std::abs(cg) < 1e-12 || std::abs(cp) < 1e-12)
        throw std::domain_error("eom: cos(gamma) or cos(phi) singular");

    const double h = r - p.Re;
    const double rho = atm.density_at(h);
    const AeroAccels aero = aero_accels(rho, V, veh);
    const double F_T = aero.F_T * opt.drag_scale;
    const double F_N = aero.F_N * opt.lift_scale;
    const GravityComponents g = gravity(p, r, phi);
    const double W = p.Omega;
    const double tphi = sp / cp;

    StateVector dy;
    dy[0] = V * sg;
    dy[1] = V * cg * cpsi / (r * cp);
    dy[2] = V * cg * spsi / r;
    dy[3] = F_T - g.g_r * sg - g.g_phi * cg * spsi +
            W * W * r * cp * (sg * cp - cg * sp * spsi);
    dy[4] = (F_N * std::cos(sigma) - g.g_r * cg + (V * V / r) * cg + g.g_phi * sg * spsi +
             2.0 * W * V * cp * cpsi +
             W * W * r * cp * (cg * cp + sg * sp * spsi)) / V;
    dy[5] = (F_N * std::sin(sigma) / cg - (V * V / r) * cg * cpsi * tphi -
             g.g_phi * cpsi / cg + 2.0 * W * V * ((sg / cg) * cp * spsi - sp) -
             W * W * r * sp * cp * cpsi / cg) / V;
    if (opt.bank_lag) {
        const double rate = (opt.sigma_cmd - sigma) / veh.zeta;
        dy[6] = std::clamp(rate, -veh.sigma_rate_max, veh.sigma_rate_max);
    } else {
        dy[6] = 0.0;
    }
    return dy;
}

template <class Atm>
StateVector rk4_step(const StateVector& y, double dt, const PlanetModel& p,
                     const Atm& atm, const VehicleParams& veh, const EomOptions& opt) {
    const StateVector k1 = eom(y, p, atm, veh, opt);
    StateVector y2;
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * dt * k1[i];
    const StateVector k2 = eom(y2, p, atm, veh, opt);
    StateVector y3;
    for (std::size_t i = 0; i < y.size(); ++i) y3[i] = y[i] + 0.5 * dt * k2[i];
    const StateVector k3 = eom(y3, p, atm, veh, opt);
    StateVector y4;
    for (std::size_t i = 0; i < y.size(); ++i) y4[i] = y[i] + dt * k3[i];
    const StateVector k4 = eom(y4, p, atm, veh, opt);
    StateVector out;
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Frame conversions
// ---------------------------------------------------------------------------

namespace detail {
struct Vec3 {
    double x, y, z;
};
inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

struct LocalBasis {
    Vec3 up, east, north;
};
inline LocalBasis local_basis(double theta, double phi) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    return {{cp * ct, cp * st, sp}, {-st, ct, 0.0}, {-sp * ct, -sp * st, cp}};
}
inline Vec3 velocity_vector(double V, double gamma, double psi, const LocalBasis& b) {
    const double cg = std::cos(gamma);
    return V * cg * std::cos(psi) * b.east + V * cg * std::sin(psi) * b.north +
           V * std::sin(gamma) * b.up;
}
}  // namespace detail

struct VelocityTriad {
    double V;      // [m/s]
    double gamma;  // [rad]
    double psi;    // [rad]
};

/// Rotating-frame (V, gamma, psi) of an inertial velocity at (r, theta, phi).
inline VelocityTriad inertial_to_relative_triad(double r, double theta, double phi,
                                                const VelocityTriad& inertial,
                                                const PlanetModel& p) {
    using namespace detail;
    const LocalBasis b = local_basis(theta, phi);
    const Vec3 v_i = velocity_vector(inertial.V, inertial.gamma, inertial.psi, b);
    const Vec3 v_r = v_i - (p.Omega * r * std::cos(phi)) * b.east;
    const double V = norm(v_r);
    if (!(V > 1e-9))
        throw std::domain_error("inertial_to_relative: degenerate zero relative velocity");
    const double sg = std::clamp(dot(v_r, b.up) / V, -1.0, 1.0);
    return {V, std::asin(sg), std::atan2(dot(v_r, b.north), dot(v_r, b.east))};
}

inline VelocityTriad relative_to_inertial_triad(double r, double theta, double phi,
                                                const VelocityTriad& relative,
                                                const PlanetModel& p) {
    using namespace detail;
    const LocalBasis b = local_basis(theta, phi);
    const Vec3 v_r = velocity_vector(relative.V, relative.gamma, relative.psi, b);
    const Vec3 v_i = v_r + (p.Omega * r * std::cos(phi)) * b.east;
    const double V = norm(v_i);
    if (!(V > 1e-9))
        throw std::domain_error("relative_to_inertial: degenerate zero inertial velocity");
    const double sg = std::clamp(dot(v_i, b.up) / V, -1.0, 1.0);
    return {V, std::asin(sg), std::atan2(dot(v_i, b.north), dot(v_i, b.east))};
}

/// Builds the initial planet-relative state from the inertial entry interface.
inline SimState inertial_to_relative(const EntryInterface& e, const PlanetModel& p,
                                     double sigma0 = 0.0) {
    const double r = p.Re + e.h0;
    const VelocityTriad rel = inertial_to_relative_triad(
        r, e.theta0, e.phi0, {e.V0_inertial, e.gamma0_inertial, e.psi0}, p);
    SimState s{0.0, r, e.theta0, e.phi0, rel.V, rel.gamma, rel.psi, sigma0};
    s.validate();
    return s;
}

/// Instantaneous orbital inclination of the state's inertial velocity.
inline double inertial_inclination(const SimState& s, const PlanetModel& p) {
    const VelocityTriad in =
        relative_to_inertial_triad(s.r, s.theta, s.phi, {s.V, s.gamma, s.psi}, p);
    const double ci = std::clamp(std::cos(s.phi) * std::cos(in.psi), -1.0, 1.0);
    return std::acos(ci);
}

// ---------------------------------------------------------------------------
// Terminal orbit quantities and trajectory classification
// ---------------------------------------------------------------------------

struct OrbitalQuantities {
    double a;    // semimajor axis [m], negative for hyperbolic exits
    double r_a;  // apoapsis radius [m], negative for hyperbolic exits
    double r_p;  // periapsis radius [m]
    double eps;  // inertial specific energy [m^2/s^2]
};

/// Apoapsis/periapsis/semimajor axis from an exit state. Orbit apsides are
/// inertial-frame quantities, so the relative state is converted first.
inline OrbitalQuantities orbital_quantities(const SimState& exit_state, const PlanetModel& p) {
    if (!(exit_state.V > 0.0)) throw std::invalid_argument("orbital_quantities: V must be > 0");
    const VelocityTriad in = relative_to_inertial_triad(
        exit_state.r, exit_state.theta, exit_state.phi,
        {exit_state.V, exit_state.gamma, exit_state.psi}, p);
    const double r = exit_state.r, V = in.V, cg = std::cos(in.gamma);
    const double eps = 0.5 * V * V - p.mu / r;
    const double scale = 2.0 * p.mu / r;
    const double denom = scale - V * V;
    OrbitalQuantities q{};
    q.eps = eps;
    if (denom >= 0.0 && denom <= 1e-12 * scale) {
        // parabolic boundary band: the semimajor axis diverges; flag the
        // apoapsis negative (escape) and take the parabolic-limit periapsis
        q.a = (denom > 0.0) ? p.mu / denom : std::numeric_limits<double>::infinity();
        q.r_a = -std::numeric_limits<double>::infinity();
        q.r_p = (r * V * cg) * (r * V * cg) / (2.0 * p.mu);
        return q;
    }
    q.a = p.mu / denom;
    double radicand = 1.0 - V * V * r * r * cg * cg / (p.mu * q.a);
    if (radicand < 0.0) radicand = 0.0;  // circular limit within tolerance
    const double e = std::sqrt(radicand);
    q.r_a = q.a * (1.0 + e);
    q.r_p = q.a * (1.0 - e);
    return q;
}

enum class TrajectoryMode { Capture, Escape, Impact };

inline const char* to_string(TrajectoryMode m) {
    switch (m) {
        case TrajectoryMode::Capture: return "capture";
        case TrajectoryMode::Escape: return "escape";
        case TrajectoryMode::Impact: return "impact";
    }
    return "?";
}

/// Time-stamped state history with terminal orbital quantities.
struct Trajectory {
    std::vector<SimState> states;
    TrajectoryMode mode = TrajectoryMode::Capture;
    OrbitalQuantities terminal{};
    std::vector<double> energy_series;  // eps(t) = V^2/2 - mu/r, relative V [m^2/s^2]
};

inline double specific_energy(const SimState& s, const PlanetModel& p) {
    return 0.5 * s.V * s.V - p.mu / s.r;
}

/// Terminal-mode classification: escape on negative apoapsis, impact on low
/// periapsis or terminal descent, else capture. Escape is tested first.
inline TrajectoryMode classify_mode(const std::vector<SimState>& states, const PlanetModel& p,
                                    double impact_periapsis_alt = 100e3) {
    if (states.empty()) throw std::invalid_argument("classify_mode: empty trajectory");
    const OrbitalQuantities q = orbital_quantities(states.back(), p);
    if (q.r_a < 0.0) return TrajectoryMode::Escape;
    if (q.r_p - p.Re < impact_periapsis_alt) return TrajectoryMode::Impact;
    if (states.size() >= 2) {
        const double h_last = states.back().r - p.Re;
        const double h_prev = states[states.size() - 2].r - p.Re;
        if (h_last < h_prev) return TrajectoryMode::Impact;
    }
    return TrajectoryMode::Capture;
}

inline Trajectory finalize_trajectory(std::vector<SimState> states, const PlanetModel& p,
                                      double impact_periapsis_alt = 100e3) {
    Trajectory traj;
    traj.mode = classify_mode(states, p, impact_periapsis_alt);
    traj.terminal = orbital_quantities(states.back(), p);
    traj.energy_series.reserve(states.size());
    for (const SimState& s : states) traj.energy_series.push_back(specific_energy(s, p));
    traj.states = std::move(states);
    return traj;
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

/// Fixed-step RK4 truth propagation. The controller is polled once per step
/// with the pre-step state; propagation stops early when the vehicle reaches
/// the impact floor.
template <class Atm, class Controller>
std::vector<SimState> propagate(const SimState& initial, Controller&& controller,
                                const PlanetModel& p, const Atm& atm,
                                const VehicleParams& veh, double t_f, double dt,
                                double impact_floor_alt = 0.0) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
    if (!(t_f > initial.t)) throw std::invalid_argument("propagate: t_f must exceed initial time");
    initial.validate();
    std::vector<SimState> states;
    states.reserve(static_cast<std::size_t>((t_f - initial.t) / dt) + 2);
    states.push_back(initial);
    SimState s = initial;
    while (s.t < t_f - 1e-9) {
        EomOptions opt;
        opt.sigma_cmd = controller(s);
        opt.bank_lag = true;
        const StateVector y = rk4_step(to_vector(s), dt, p, atm, veh, opt);
        s = from_vector(y, s.t + dt);
        states.push_back(s);
        if (s.r - p.Re <= impact_floor_alt) break;
    }
    return states;
}

}  // namespace aerocap
