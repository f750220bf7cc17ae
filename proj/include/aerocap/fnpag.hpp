#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aerocap/atmosphere.hpp"
#include "aerocap/brent.hpp"
#include "aerocap/dynamics.hpp"

namespace aerocap {

inline constexpr double kEarthG = 9.80665;  // guidance-enable reference [m/s^2]

// ---------------------------------------------------------------------------
// Energy-error objective
// ---------------------------------------------------------------------------

/// Nondimensional exit-energy error: specific energy at atmospheric exit minus
/// the energy of the orbit through (r_f, gamma_f) whose apoapsis is the
/// target. Positive err means an apoapsis undershoot. Positions are scaled by
/// Re, velocities by sqrt(Re g0); arguments are inertial-frame quantities.
inline double energy_error_nd(double r, double V_inertial, double gamma_inertial,
                              double ra_target, const PlanetModel& p) {
    const double rb = r / p.Re;
    const double vb = V_inertial / p.v_scale();
    const double rab = ra_target / p.Re;
    const double cg = std::cos(gamma_inertial);
    return (1.0 / rb - 0.5 * vb * vb) -
           (1.0 / rab - rb * rb * vb * vb * cg * cg / (2.0 * rab * rab));
}

inline double energy_error(const SimState& exit_state, double ra_target, const PlanetModel& p) {
    const VelocityTriad in = relative_to_inertial_triad(
        exit_state.r, exit_state.theta, exit_state.phi,
        {exit_state.V, exit_state.gamma, exit_state.psi}, p);
    return energy_error_nd(exit_state.r, in.V, in.gamma, ra_target, p);
}

// ---------------------------------------------------------------------------
// Fading-memory filters
// ---------------------------------------------------------------------------

/// First-order fading-memory estimates of the true-to-modeled lift and drag
/// ratios, used to scale the onboard aerodynamic accelerations.
struct FadingFilter {
    double rho_L = 1.0;
    double rho_D = 1.0;
    double chi = std::exp(-1.0 / 6.0);

    void validate() const {
        if (!(chi > 0.0 && chi < 1.0)) throw std::invalid_argument("FadingFilter: chi in (0,1)");
    }

    /// One measurement update; channels with a vanishing modeled force are
    /// skipped for that cycle.
    void update(double lift_measured, double drag_measured, double lift_modeled,
                double drag_modeled, double model_floor = 1e-12) {
        if (lift_modeled > model_floor)
            rho_L += (1.0 - chi) * (lift_measured / lift_modeled - rho_L);
        if (drag_modeled > model_floor)
            rho_D += (1.0 - chi) * (drag_measured / drag_modeled - rho_D);
    }
};

// ---------------------------------------------------------------------------
// Onboard prediction
// ---------------------------------------------------------------------------

struct TimedEnergy {
    double t;    // [s]
    double eps;  // V^2/2 - mu/r with relative V [m^2/s^2]
};

/// Bang-bang bank profile: sigma_a until t_switch, sigma_b afterwards.
/// A constant profile uses t_switch <= start time.
struct BankProfile {
    double sigma_a;
    double sigma_b;
    double t_switch;

    static BankProfile constant(double sigma) {
        return {sigma, sigma, -std::numeric_limits<double>::infinity()};
    }
    double at(double t) const { return t < t_switch ? sigma_a : sigma_b; }
};

struct FnpagConfig {
    double sigma0 = 10.0 * M_PI / 180.0;    // phase-1 bank magnitude [rad]
    double sigmaf = 90.0 * M_PI / 180.0;    // initial phase-2 bank magnitude [rad]
    double t_switch_init = 300.0;           // [s]
    double g_limit = 0.1;                   // guidance-enable threshold [Earth g]
    double ra_target = 0.0;                 // [m]
    double guidance_period = 1.0;           // [s]
    double t_final = 1500.0;                // [s]
    double predict_dt = 2.0;                // onboard integration step [s]
    double h_exit = 1000e3;                 // atmosphere interface altitude [m]
    double impact_floor = 0.0;              // prediction termination altitude [m]
    double brent_xtol_t = 0.05;             // switch-time tolerance [s]
    double brent_xtol_sigma = 1e-4;         // bank tolerance [rad]
    double brent_ftol = 1e-9;               // nondimensional energy-error tolerance
    int brent_max_iter = 100;
    bool use_fading_filter = true;
    // lateral logic
    double target_inclination = 0.0;        // [rad]
    double lateral_deadband = 0.25 * M_PI / 180.0;
    int max_reversals = 6;
    int initial_bank_sign = +1;

    void validate() const {
        if (!(sigma0 >= 0.0 && sigma0 < sigmaf && sigmaf <= M_PI))
            throw std::invalid_argument("FnpagConfig: need 0 <= sigma0 < sigmaf <= pi");
        if (!(g_limit > 0.0)) throw std::invalid_argument("FnpagConfig: g_limit must be > 0");
        if (!(ra_target > 0.0)) throw std::invalid_argument("FnpagConfig: ra_target must be > 0");
    }
};

struct PredictOutcome {
    SimState exit_state;
    bool impacted = false;
    std::vector<TimedEnergy> energy_samples;  // filled only when requested
};

/// Integrates the onboard model (polynomial atmosphere, nominal vehicle,
/// filter-scaled lift/drag, instantaneous bank switching) until atmospheric
/// exit, surface impact, or t_final. Exit means h >= h_exit while ascending.
inline PredictOutcome predict_to_exit(const SimState& current, const BankProfile& profile,
                                      const PlanetModel& planet, const PolyAtmosphere& onboard_atm,
                                      const VehicleParams& veh, const FadingFilter& filters,
                                      const FnpagConfig& cfg, bool collect_samples = false) {
    PredictOutcome out;
    SimState s = current;
    auto exited = [&](const SimState& st) {
        return st.r - planet.Re >= cfg.h_exit && st.gamma > 0.0;
    };
    if (collect_samples) out.energy_samples.push_back({s.t, specific_energy(s, planet)});
    EomOptions opt;
    opt.bank_lag = false;
    opt.lift_scale = filters.rho_L;
    opt.drag_scale = filters.rho_D;
    while (s.t < cfg.t_final - 1e-9 && !exited(s)) {
        double dt = std::min(cfg.predict_dt, cfg.t_final - s.t);
        // split the step at the bank switch so err is continuous in t_switch
        if (s.t < profile.t_switch && profile.t_switch < s.t + dt) {
            const double dt1 = profile.t_switch - s.t;
            if (dt1 > 1e-12) {
                StateVector y = to_vector(s);
                y[6] = profile.sigma_a;
                y = rk4_step(y, dt1, planet, onboard_atm, veh, opt);
                s = from_vector(y, s.t + dt1);
            } else {
                s.t = profile.t_switch;
            }
            dt = std::min(cfg.predict_dt, cfg.t_final - s.t);
        }
        StateVector y = to_vector(s);
        y[6] = profile.at(s.t);
        y = rk4_step(y, dt, planet, onboard_atm, veh, opt);
        s = from_vector(y, s.t + dt);
        if (collect_samples) out.energy_samples.push_back({s.t, specific_energy(s, planet)});
        if (s.r - planet.Re <= cfg.impact_floor) {
            out.impacted = true;
            break;
        }
    }
    out.exit_state = s;
    return out;
}

// ---------------------------------------------------------------------------
// Phase solves
// ---------------------------------------------------------------------------

struct SolveResult {
    double value = 0.0;  // t_switch [s] or sigma magnitude [rad]
    double err = 0.0;    // nondimensional energy error at the solution
};

/// Endpoint-first bracketed solve shared by both phases: Brent runs only when
/// the energy error changes sign across the bracket, otherwise the endpoint
/// with the smaller |err| is returned (saturated command).
template <class ErrFn>
SolveResult bracketed_solve(ErrFn&& err_of, double lo, double hi, double xtol, double ftol,
                            int max_iter) {
    const double f_lo = err_of(lo);
    const double f_hi = err_of(hi);
    if (f_lo == 0.0) return {lo, 0.0};
    if (f_hi == 0.0) return {hi, 0.0};
    if (f_lo * f_hi > 0.0)
        return (std::abs(f_lo) <= std::abs(f_hi)) ? SolveResult{lo, f_lo} : SolveResult{hi, f_hi};
    const RootResult r = brent_root(err_of, lo, hi, xtol, ftol, max_iter);
    return {r.x, r.fx};
}

inline SolveResult solve_phase1(const SimState& current, const FnpagConfig& cfg,
                                const PlanetModel& planet, const PolyAtmosphere& onboard_atm,
                                const VehicleParams& veh, const FadingFilter& filters) {
    auto err_of = [&](double ts) {
        const BankProfile prof{cfg.sigma0, cfg.sigmaf, ts};
        return energy_error(predict_to_exit(current, prof, planet, onboard_atm, veh, filters, cfg).exit_state,
                            cfg.ra_target, planet);
    };
    try {
        return bracketed_solve(err_of, current.t, cfg.t_final, cfg.brent_xtol_t, cfg.brent_ftol,
                               cfg.brent_max_iter);
    } catch (const std::domain_error& e) {
        throw std::runtime_error(std::string("solve_phase1: prediction failed: ") + e.what());
    }
}

inline SolveResult solve_phase2(const SimState& current, const FnpagConfig& cfg,
                                const PlanetModel& planet, const PolyAtmosphere& onboard_atm,
                                const VehicleParams& veh, const FadingFilter& filters) {
    auto err_of = [&](double sigma) {
        return energy_error(predict_to_exit(current, BankProfile::constant(sigma), planet,
                                            onboard_atm, veh, filters, cfg).exit_state,
                            cfg.ra_target, planet);
    };
    try {
        return bracketed_solve(err_of, 0.0, M_PI, cfg.brent_xtol_sigma, cfg.brent_ftol,
                               cfg.brent_max_iter);
    } catch (const std::domain_error& e) {
        throw std::runtime_error(std::string("solve_phase2: prediction failed: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Lateral logic
// ---------------------------------------------------------------------------

/// Deadband logic on the instantaneous-inclination error: the sign flips only
/// when the error is outside the deadband and the current sign pushes it
/// further out.
inline int lateral_logic(const SimState& s, const PlanetModel& p, double target_inclination,
                         double deadband, int bank_sign) {
    const double err = inertial_inclination(s, p) - target_inclination;
    if (std::abs(err) <= deadband) return bank_sign;
    // positive bank raises inclination when flying with a northward component
    const double incl_rate_sign = (std::sin(s.psi) >= 0.0 ? 1.0 : -1.0) * bank_sign;
    if (incl_rate_sign * err > 0.0) return -bank_sign;
    return bank_sign;
}

// ---------------------------------------------------------------------------
// Guidance controller
// ---------------------------------------------------------------------------

struct FnpagState {
    int phase = 1;
    double t_switch = 300.0;
    double sigma_star = M_PI_2;  // [rad], magnitude
    bool guid_enabled = false;
    int bank_sign = +1;
};

struct GuidanceTelemetry {
    double t;
    int phase;
    double sigma_command;  // signed [rad]
    double t_switch;
    double err;  // nondimensional, NaN before first solve
    double rho_L;
    double rho_D;
    bool guid_enabled;
};

/// Post-solve command adjustment hook (the probabilistic-indicator layer).
/// Receives the flown and predicted energy histories and may shift the bank
/// magnitude or force the switch to phase 2.
struct CorrectionOutcome {
    double sigma_mag;
    bool force_phase2 = false;
};
using CorrectionHook = std::function<CorrectionOutcome(
    double t, int phase, double sigma_mag, const std::vector<TimedEnergy>& history,
    const std::vector<TimedEnergy>& prediction)>;

/// Per-trajectory FNPAG state machine. Call `command(state)` once per truth
/// step; it runs one guidance cycle per guidance period and returns the signed
/// bank command.
template <class TruthAtm>
class FnpagController {
public:
    FnpagController(FnpagConfig cfg, PlanetModel planet, PolyAtmosphere onboard_atm,
                    VehicleParams onboard_veh, const TruthAtm& truth_atm,
                    VehicleParams truth_veh)
        : cfg_(cfg),
          planet_(planet),
          onboard_atm_(onboard_atm),
          onboard_veh_(onboard_veh),
          truth_atm_(&truth_atm),
          truth_veh_(truth_veh) {
        cfg_.validate();
        state_.t_switch = cfg_.t_switch_init;
        state_.sigma_star = cfg_.sigmaf;
        state_.bank_sign = cfg_.initial_bank_sign;
        next_cycle_t_ = -std::numeric_limits<double>::infinity();
        last_command_ = state_.bank_sign * cfg_.sigma0;
    }

    void set_correction_hook(CorrectionHook hook) { hook_ = std::move(hook); }

    double command(const SimState& s) {
        history_.push_back({s.t, specific_energy(s, planet_)});
        if (s.t + 1e-9 < next_cycle_t_) return last_command_;
        next_cycle_t_ = s.t + cfg_.guidance_period;
        run_cycle(s);
        return last_command_;
    }

    const FnpagState& state() const { return state_; }
    const FadingFilter& filters() const { return filters_; }
    const std::vector<GuidanceTelemetry>& telemetry() const { return telemetry_; }
    const std::vector<TimedEnergy>& history() const { return history_; }
    double enable_time() const { return enable_time_; }
    int reversal_count() const { return reversals_; }

private:
    void run_cycle(const SimState& s) {
        // phase switch check from the end of the previous cycle
        if (state_.phase == 1 && s.t > state_.t_switch) state_.phase = 2;

        // simulated IMU: aerodynamic acceleration under the truth models
        const double h = s.r - planet_.Re;
        const AeroAccels meas = aero_accels(truth_atm_->density_at(h), s.V, truth_veh_);
        const double g_sensed = std::hypot(meas.F_T, meas.F_N);
        state_.guid_enabled = g_sensed >= cfg_.g_limit * kEarthG;

        double err = std::numeric_limits<double>::quiet_NaN();
        if (state_.guid_enabled) {
            if (cfg_.use_fading_filter) {
                const AeroAccels model = aero_accels(onboard_atm_.density_at(h), s.V, onboard_veh_);
                filters_.update(meas.F_N, -meas.F_T, model.F_N, -model.F_T);
            }
            if (enable_time_ < 0.0) enable_time_ = s.t;

            try {
                if (state_.phase == 1) {
                    const SolveResult r =
                        solve_phase1(s, cfg_, planet_, onboard_atm_, onboard_veh_, filters_);
                    state_.t_switch = r.value;
                    state_.sigma_star = cfg_.sigmaf;
                    err = r.err;
                } else {
                    const SolveResult r =
                        solve_phase2(s, cfg_, planet_, onboard_atm_, onboard_veh_, filters_);
                    state_.sigma_star = r.value;
                    err = r.err;
                }
            } catch (const std::exception&) {
                // solver failure: hold the previous command state for this cycle
            }

            if (hook_) {
                const BankProfile prof = (state_.phase == 1)
                                             ? BankProfile{cfg_.sigma0, cfg_.sigmaf, state_.t_switch}
                                             : BankProfile::constant(state_.sigma_star);
                const PredictOutcome pred = predict_to_exit(s, prof, planet_, onboard_atm_,
                                                            onboard_veh_, filters_, cfg_, true);
                const CorrectionOutcome c =
                    hook_(s.t, state_.phase, state_.sigma_star, history_, pred.energy_samples);
                if (c.force_phase2 && state_.phase == 1) {
                    state_.phase = 2;
                    state_.t_switch = s.t;
                } else {
                    state_.sigma_star = c.sigma_mag;
                }
            }

            const int want = lateral_logic(s, planet_, cfg_.target_inclination,
                                           cfg_.lateral_deadband, state_.bank_sign);
            if (want != state_.bank_sign && reversals_ < cfg_.max_reversals) {
                state_.bank_sign = want;
                ++reversals_;
            }
        }

        const double mag = (s.t < state_.t_switch) ? cfg_.sigma0 : state_.sigma_star;
        last_command_ = state_.bank_sign * mag;
        telemetry_.push_back({s.t, state_.phase, last_command_, state_.t_switch, err,
                              filters_.rho_L, filters_.rho_D, state_.guid_enabled});
    }

    FnpagConfig cfg_;
    PlanetModel planet_;
    PolyAtmosphere onboard_atm_;
    VehicleParams onboard_veh_;
    const TruthAtm* truth_atm_;
    VehicleParams truth_veh_;

    FnpagState state_;
    FadingFilter filters_;
    CorrectionHook hook_;
    std::vector<GuidanceTelemetry> telemetry_;
    std::vector<TimedEnergy> history_;
    double next_cycle_t_ = 0.0;
    double last_command_ = 0.0;
    double enable_time_ = -1.0;
    int reversals_ = 0;
};

}  // namespace aerocap
