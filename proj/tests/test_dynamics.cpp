#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "aerocap/atmosphere.hpp"
#include "aerocap/dynamics.hpp"
#include "aerocap/rng.hpp"

using namespace aerocap;

namespace {

PlanetModel uranus() { return {5.7939513e15, 25559e3, 3.34343e-3, 1.012376e-4}; }

PlanetModel point_mass_uranus() {
    PlanetModel p = uranus();
    p.J2 = 0.0;
    p.Omega = 0.0;
    return p;
}

struct VacuumAtm {
    double density_at(double) const { return 0.0; }
};

EntryInterface near_escape_entry() {
    EntryInterface e;
    e.h0 = 1000e3;
    e.theta0 = 190.045 * M_PI / 180.0;
    e.phi0 = -9.764 * M_PI / 180.0;
    e.V0_inertial = 24.936e3;
    e.gamma0_inertial = -10.572 * M_PI / 180.0;
    e.psi0 = 45.0 * M_PI / 180.0;
    return e;
}

double angular_momentum(const SimState& s) { return s.r * s.V * std::cos(s.gamma); }

}  // namespace

TEST_CASE("aero accelerations") {
    VehicleParams veh;
    SECTION("vacuum gives zero") {
        const AeroAccels a = aero_accels(0.0, 2e4, veh);
        REQUIRE(a.F_T == 0.0);
        REQUIRE(a.F_N == 0.0);
    }
    SECTION("zero lift-to-drag gives zero lift") {
        veh.LD = 0.0;
        const AeroAccels a = aero_accels(1e-3, 1e4, veh);
        REQUIRE(a.F_N == 0.0);
        REQUIRE(a.F_T < 0.0);
    }
    SECTION("drag formula arithmetic") {
        veh.beta = 145.0;
        const AeroAccels a = aero_accels(1e-4, 2e4, veh);
        REQUIRE(a.F_T == Catch::Approx(-137.93103448275863).epsilon(1e-12));
        REQUIRE(a.F_N == Catch::Approx(137.93103448275863 * veh.LD).epsilon(1e-12));
    }
}

TEST_CASE("eom basics") {
    const PlanetModel p = point_mass_uranus();
    VacuumAtm vac;
    VehicleParams veh;
    SECTION("gamma = 0 gives dr/dt = 0") {
        SimState s{0, p.Re + 500e3, 0.2, 0.1, 2e4, 0.0, 0.3, 0.0};
        const StateVector dy = eom(to_vector(s), p, vac, veh, {});
        REQUIRE(dy[0] == 0.0);
    }
    SECTION("circular Kepler orbit is a flight-path-angle equilibrium") {
        const double r = p.Re + 800e3;
        SimState s{0, r, 0.0, 0.05, std::sqrt(p.mu / r), 0.0, 0.7, 0.0};
        const StateVector dy = eom(to_vector(s), p, vac, veh, {});
        REQUIRE(std::abs(dy[4]) < 1e-15);
    }
    SECTION("singular geometry is rejected") {
        SimState s{0, p.Re + 500e3, 0.0, M_PI_2, 2e4, 0.0, 0.0, 0.0};
        REQUIRE_THROWS_AS(eom(to_vector(s), p, vac, veh, {}), std::domain_error);
        s.phi = 0.0;
        s.gamma = M_PI_2;
        REQUIRE_THROWS_AS(eom(to_vector(s), p, vac, veh, {}), std::domain_error);
    }
}

TEST_CASE("vacuum propagation conserves energy and angular momentum") {
    const PlanetModel p = point_mass_uranus();
    const SimState s0 = inertial_to_relative(near_escape_entry(), p);
    auto hold = [&](const SimState&) { return s0.sigma; };
    const std::vector<SimState> states =
        propagate(s0, hold, p, VacuumAtm{}, VehicleParams{}, 1500.0, 1.0, -1e12);
    REQUIRE(states.size() == 1501);
    const double eps0 = specific_energy(s0, p);
    const double h0 = angular_momentum(s0);
    for (const SimState& s : states) {
        REQUIRE(std::abs(specific_energy(s, p) - eps0) <= 1e-9 * std::abs(eps0));
        REQUIRE(std::abs(angular_momentum(s) - h0) <= 1e-9 * h0);
    }
}

TEST_CASE("rk4 terminal error falls ~16x when the step is halved") {
    // smooth captured atmospheric pass at constant bank
    const PlanetModel p = uranus();
    const PolyAtmosphere atm = uranus_poly_atmosphere();
    VehicleParams veh;
    const double sig = M_PI / 2;
    const SimState s0 = inertial_to_relative(near_escape_entry(), p, sig);
    auto hold = [&](const SimState&) { return sig; };
    auto terminal_r = [&](double dt) {
        return propagate(s0, hold, p, atm, veh, 900.0, dt).back().r;
    };
    const double ref = terminal_r(0.125);
    const double e4 = std::abs(terminal_r(4.0) - ref);
    const double e2 = std::abs(terminal_r(2.0) - ref);
    REQUIRE(e2 < 1e-3 * std::abs(ref));
    const double ratio = e4 / e2;
    REQUIRE(ratio > 8.0);
    REQUIRE(ratio < 32.0);
}

TEST_CASE("drag never increases relative energy on a non-rotating spherical planet") {
    PlanetModel p = point_mass_uranus();
    const PolyAtmosphere atm = uranus_poly_atmosphere();
    SimState s0 = inertial_to_relative(near_escape_entry(), p);
    auto hold = [&](const SimState&) { return 90.0 * M_PI / 180.0; };
    const std::vector<SimState> states =
        propagate(s0, hold, p, atm, VehicleParams{}, 900.0, 1.0);
    double prev = specific_energy(states.front(), p);
    for (const SimState& s : states) {
        const double e = specific_energy(s, p);
        REQUIRE(e <= prev + 1e-9 * std::abs(prev));
        prev = e;
    }
}

TEST_CASE("bank channel follows commands") {
    const PlanetModel p = uranus();
    const PolyAtmosphere atm = uranus_poly_atmosphere();
    VehicleParams veh;
    SimState s0 = inertial_to_relative(near_escape_entry(), p, 10.0 * M_PI / 180.0);
    SECTION("command equal to the current bank keeps it constant") {
        auto hold = [&](const SimState&) { return s0.sigma; };
        for (const SimState& s : propagate(s0, hold, p, atm, veh, 200.0, 1.0))
            REQUIRE(s.sigma == Catch::Approx(s0.sigma).margin(1e-12));
    }
    SECTION("a 180 deg step is rate limited") {
        veh.zeta = 0.5;  // aggressive lag so the clip is active
        auto step = [&](const SimState&) { return M_PI; };
        const double dt = 1.0;
        const std::vector<SimState> states = propagate(s0, step, p, atm, veh, 60.0, dt);
        for (std::size_t i = 1; i < states.size(); ++i) {
            const double dsig = std::abs(states[i].sigma - states[i - 1].sigma);
            REQUIRE(dsig <= veh.sigma_rate_max * dt + 1e-12);
        }
        REQUIRE(states.back().sigma == Catch::Approx(M_PI).margin(1e-9));
    }
}

TEST_CASE("propagation step refinement converges on an atmospheric pass") {
    const PlanetModel p = uranus();
    const PolyAtmosphere atm = uranus_poly_atmosphere();
    VehicleParams veh;
    const SimState s0 = inertial_to_relative(near_escape_entry(), p, M_PI / 2);
    auto hold = [&](const SimState&) { return M_PI / 2; };
    const double r1 = propagate(s0, hold, p, atm, veh, 1500.0, 1.0).back().r;
    const double r05 = propagate(s0, hold, p, atm, veh, 1500.0, 0.5).back().r;
    REQUIRE(std::abs(r05 - r1) < 1e-3 * r1);
}

TEST_CASE("orbital quantities") {
    const PlanetModel p = point_mass_uranus();
    SECTION("circular orbit") {
        const double r = p.Re + 2000e3;
        const SimState s{0, r, 0.1, 0.0, std::sqrt(p.mu / r), 0.0, 0.2, 0.0};
        const OrbitalQuantities q = orbital_quantities(s, p);
        REQUIRE(q.r_a == Catch::Approx(r).epsilon(1e-10));
        REQUIRE(q.r_p == Catch::Approx(r).epsilon(1e-10));
        REQUIRE(q.eps == Catch::Approx(-p.mu / (2.0 * r)).epsilon(1e-12));
    }
    SECTION("parabolic boundary flags as escape") {
        const double r = p.Re + 1000e3;
        const SimState s{0, r, 0.0, 0.0, std::sqrt(2.0 * p.mu / r), 0.1, 0.0, 0.0};
        const OrbitalQuantities q = orbital_quantities(s, p);
        REQUIRE(std::abs(q.eps) < 1e-3 * p.mu / r);
        REQUIRE(q.r_a < 0.0);
    }
    SECTION("hyperbolic exit has negative apoapsis, positive periapsis") {
        const double r = p.Re + 1000e3;
        const SimState s{0, r, 0.0, 0.0, 1.2 * std::sqrt(2.0 * p.mu / r), 0.1, 0.0, 0.0};
        const OrbitalQuantities q = orbital_quantities(s, p);
        REQUIRE(q.a < 0.0);
        REQUIRE(q.r_a < 0.0);
        REQUIRE(q.r_p > 0.0);
        REQUIRE(q.r_p < r);
    }
}

TEST_CASE("apsides agree with a vacuum propagation oracle") {
    const PlanetModel p = point_mass_uranus();
    VacuumAtm vac;
    VehicleParams veh;
    RandomStream rng(99);
    for (int k = 0; k < 10; ++k) {
        const double r = p.Re * rng.uniform(1.05, 1.5);
        const double a_orbit = r * rng.uniform(1.2, 3.0);
        const double V = std::sqrt(p.mu * (2.0 / r - 1.0 / a_orbit));
        const SimState s{0, r, rng.uniform(0.0, 6.28), rng.uniform(-0.3, 0.3), V,
                         rng.uniform(-0.35, 0.35), rng.uniform(0.3, 1.2), 0.0};
        const OrbitalQuantities q = orbital_quantities(s, p);
        if (q.r_p <= 0.0) continue;
        const double T = 2.0 * M_PI * std::sqrt(q.a * q.a * q.a / p.mu);
        auto hold = [&](const SimState&) { return 0.0; };
        const std::vector<SimState> orbit =
            propagate(s, hold, p, vac, veh, 1.05 * T, T / 20000.0, -1e12);
        double r_min = orbit.front().r, r_max = r_min;
        for (const SimState& st : orbit) {
            r_min = std::min(r_min, st.r);
            r_max = std::max(r_max, st.r);
        }
        REQUIRE(r_max == Catch::Approx(q.r_a).epsilon(1e-3));
        REQUIRE(r_min == Catch::Approx(q.r_p).epsilon(1e-3));
    }
}

TEST_CASE("mode classification") {
    const PlanetModel p = point_mass_uranus();
    const double r = p.Re + 500e3;
    SECTION("positive terminal energy classifies as escape") {
        const SimState s{100, r, 0, 0, 1.1 * std::sqrt(2.0 * p.mu / r), 0.2, 0.1, 0.0};
        REQUIRE(classify_mode({s}, p) == TrajectoryMode::Escape);
    }
    SECTION("descending terminal altitude classifies as impact") {
        // near-circular but slightly descending pair of states
        const double V = std::sqrt(p.mu / r);
        const SimState s1{0, r + 1000.0, 0, 0, V, -0.001, 0.1, 0.0};
        const SimState s2{1, r, 0, 0, V, -0.001, 0.1, 0.0};
        REQUIRE(classify_mode({s1, s2}, p) == TrajectoryMode::Impact);
    }
    SECTION("periapsis threshold is a strict inequality") {
        auto state_with_periapsis = [&](double rp) {
            // apoapsis state of an ellipse with the requested periapsis
            const double ra = p.Re + 4000e3;
            const double a = 0.5 * (ra + rp);
            const double V = std::sqrt(p.mu * (2.0 / ra - 1.0 / a));
            return SimState{0, ra, 0, 0, V, 0.0, 0.2, 0.0};
        };
        const SimState above = state_with_periapsis(p.Re + 100e3 + 1.0);
        const SimState below = state_with_periapsis(p.Re + 100e3 - 1.0);
        const SimState prior{0, p.Re + 3999e3, 0, 0, 1e3, 0.1, 0.2, 0.0};
        REQUIRE(classify_mode({prior, above}, p) == TrajectoryMode::Capture);
        REQUIRE(classify_mode({prior, below}, p) == TrajectoryMode::Impact);
    }
    SECTION("classification is pure") {
        const SimState s{100, r, 0, 0, 1.1 * std::sqrt(2.0 * p.mu / r), 0.2, 0.1, 0.0};
        REQUIRE(classify_mode({s}, p) == classify_mode({s}, p));
    }
}

TEST_CASE("frame conversions") {
    const PlanetModel p = uranus();
    SECTION("non-rotating planet keeps the state unchanged") {
        PlanetModel p0 = p;
        p0.Omega = 0.0;
        const EntryInterface e = near_escape_entry();
        const SimState s = inertial_to_relative(e, p0);
        REQUIRE(s.V == Catch::Approx(e.V0_inertial).epsilon(1e-13));
        REQUIRE(s.gamma == Catch::Approx(e.gamma0_inertial).epsilon(1e-13));
        REQUIRE(s.psi == Catch::Approx(e.psi0).epsilon(1e-13));
    }
    SECTION("equatorial eastward flight subtracts the rotation speed") {
        EntryInterface e;
        e.h0 = 1000e3;
        e.phi0 = 0.0;
        e.V0_inertial = 20e3;
        e.gamma0_inertial = 0.0;
        e.psi0 = 0.0;
        const SimState s = inertial_to_relative(e, p);
        REQUIRE(s.V == Catch::Approx(e.V0_inertial - p.Omega * (p.Re + e.h0)).epsilon(1e-12));
    }
    SECTION("round trip reproduces the inertial triad to 1e-10") {
        RandomStream rng(5);
        for (int i = 0; i < 100; ++i) {
            const double r = p.Re * rng.uniform(1.0, 1.2);
            const double theta = rng.uniform(0.0, 6.28);
            const double phi = rng.uniform(-1.2, 1.2);
            const VelocityTriad in{rng.uniform(5e3, 30e3), rng.uniform(-1.2, 1.2),
                                   rng.uniform(-3.1, 3.1)};
            const VelocityTriad rel = inertial_to_relative_triad(r, theta, phi, in, p);
            const VelocityTriad back = relative_to_inertial_triad(r, theta, phi, rel, p);
            REQUIRE(back.V == Catch::Approx(in.V).epsilon(1e-10));
            REQUIRE(back.gamma == Catch::Approx(in.gamma).margin(1e-10));
            const double dpsi = std::remainder(back.psi - in.psi, 2.0 * M_PI);
            REQUIRE(std::abs(dpsi) < 1e-10);
        }
    }
}

TEST_CASE("finalize_trajectory records energies and mode consistently") {
    const PlanetModel p = point_mass_uranus();
    const SimState s0 = inertial_to_relative(near_escape_entry(), p);
    auto hold = [&](const SimState&) { return 0.0; };
    std::vector<SimState> states =
        propagate(s0, hold, p, VacuumAtm{}, VehicleParams{}, 300.0, 1.0, -1e12);
    const Trajectory traj = finalize_trajectory(states, p);
    REQUIRE(traj.energy_series.size() == traj.states.size());
    REQUIRE(traj.mode == classify_mode(traj.states, p));
    REQUIRE(traj.energy_series.front() ==
            Catch::Approx(specific_energy(traj.states.front(), p)));
    for (std::size_t i = 1; i < traj.states.size(); ++i)
        REQUIRE(traj.states[i].t > traj.states[i - 1].t);
}
