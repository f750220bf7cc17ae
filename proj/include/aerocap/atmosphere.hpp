#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aerocap/rng.hpp"

namespace aerocap {

/// Onboard mean-atmosphere model: ln(rho) as a rational quartic in altitude.
///
/// The published coefficient table pairs with two possible polynomial layouts.
/// The default ("odd/even") puts the odd-indexed coefficients in the numerator
/// and the even-indexed ones in the denominator:
///
///   ln rho = (c1 + c3 h + c5 h^2 + c7 h^3 + c9 h^4)
///          / (1 + c2 h + c4 h^2 + c6 h^3 + c8 h^4),  h in meters.
///
/// The literal printed layout (c2 repeated in the numerator, c5 unused) is
/// kept behind `printed_form` for comparison; it fails the positivity and
/// monotonicity sweep that the default passes.
struct PolyAtmosphere {
    std::array<double, 9> c{};  // c1..c9 in c[0]..c[8]
    double h_min = 200e3;       // fit validity bound [m]
    double h_max = 2000e3;      // fit validity bound [m]
    bool printed_form = false;

    void validate() const {
        if (!(h_min < h_max)) throw std::invalid_argument("PolyAtmosphere: h_min must be < h_max");
    }

    /// ln(rho) at altitude h [m]; queries outside the fit range clamp to the
    /// boundary (a rational polynomial is untrustworthy outside its fit).
    double log_density(double h, bool* clamped = nullptr) const {
        const double hc = std::clamp(h, h_min, h_max);
        if (clamped) *clamped = (hc != h);
        double num, den;
        if (printed_form) {
            num = c[0] + c[2] * hc + c[1] * hc * hc + c[6] * hc * hc * hc +
                  c[8] * hc * hc * hc * hc;
            den = 1.0 + c[1] * hc + c[3] * hc * hc + c[5] * hc * hc * hc +
                  c[7] * hc * hc * hc * hc;
        } else {
            num = c[0] + c[2] * hc + c[4] * hc * hc + c[6] * hc * hc * hc +
                  c[8] * hc * hc * hc * hc;
            den = 1.0 + c[1] * hc + c[3] * hc * hc + c[5] * hc * hc * hc +
                  c[7] * hc * hc * hc * hc;
        }
        if (std::abs(den) < 1e-12)
            throw std::runtime_error("PolyAtmosphere: rational denominator vanished");
        return num / den;
    }

    double density_at(double h) const { return std::exp(log_density(h)); }
};

/// Table 3 coefficients for the Uranus mean-atmosphere fit, h in meters.
inline PolyAtmosphere uranus_poly_atmosphere() {
    PolyAtmosphere atm;
    atm.c = {-1.01e+00, 1.18e+07, -8.47e+07, -3.61e+01, 1.81e+02,
             4.10e-05,  -4.78e-05, 1.86e-11, -7.03e-10};
    atm.h_min = 200e3;
    atm.h_max = 2000e3;
    return atm;
}

/// Truth-side density profile on a fixed altitude grid, linearly interpolated.
struct TabulatedAtmosphere {
    std::vector<double> altitude;  // strictly increasing [m]
    std::vector<double> density;   // [kg/m^3]
    std::uint64_t seed = 0;        // generator seed, 0 when handmade

    void validate() const {
        if (altitude.empty() || density.empty())
            throw std::invalid_argument("TabulatedAtmosphere: empty table");
        if (altitude.size() != density.size())
            throw std::invalid_argument("TabulatedAtmosphere: grid/density size mismatch");
        for (std::size_t i = 1; i < altitude.size(); ++i)
            if (!(altitude[i] > altitude[i - 1]))
                throw std::invalid_argument("TabulatedAtmosphere: grid not strictly increasing");
        for (double rho : density)
            if (!(rho > 0.0))
                throw std::invalid_argument("TabulatedAtmosphere: densities must be > 0");
    }

    /// Linear interpolation; clamps to the endpoint density outside the grid.
    double density_at(double h) const {
        if (altitude.empty()) throw std::runtime_error("TabulatedAtmosphere: empty table");
        if (h <= altitude.front()) return density.front();
        if (h >= altitude.back()) return density.back();
        const auto it = std::upper_bound(altitude.begin(), altitude.end(), h);
        const std::size_t i = static_cast<std::size_t>(it - altitude.begin());
        const double h0 = altitude[i - 1], h1 = altitude[i];
        const double w = (h - h0) / (h1 - h0);
        return density[i - 1] * (1.0 - w) + density[i] * w;
    }
};

/// Knobs for the synthetic perturbed-atmosphere generator that stands in for
/// GRAM sampling. The perturbation is a stationary AR(1) sequence in altitude
/// applied to log-density.
struct PerturbationSpec {
    double delta_p = 2.0;              // perturbation scale [-]
    double correlation_length = 60e3;  // altitude correlation of log-density noise [m]
    double sigma_base = 0.15;          // log-density std at delta_p = 1 [-]
    double altitude_lo = 0.0;          // grid start [m]
    double altitude_hi = 5000e3;       // grid end [m]
    double grid_step = 1e3;            // [m]

    void validate() const {
        if (delta_p < 0.0) throw std::invalid_argument("PerturbationSpec: delta_p must be >= 0");
        if (!(correlation_length > 0.0))
            throw std::invalid_argument("PerturbationSpec: correlation_length must be > 0");
        if (!(grid_step > 0.0)) throw std::invalid_argument("PerturbationSpec: grid_step must be > 0");
        if (!(altitude_lo < altitude_hi))
            throw std::invalid_argument("PerturbationSpec: altitude range must be increasing");
    }
};

/// Draws one truth profile: the polynomial mean warped by exponentially
/// correlated zero-mean Gaussian log-density noise. Pure function of
/// (mean, spec, seed).
inline TabulatedAtmosphere generate_truth_atmosphere(const PolyAtmosphere& mean,
                                                     const PerturbationSpec& spec,
                                                     std::uint64_t seed) {
    spec.validate();
    TabulatedAtmosphere out;
    out.seed = seed;
    const std::size_t n =
        static_cast<std::size_t>(std::floor((spec.altitude_hi - spec.altitude_lo) / spec.grid_step)) + 1;
    out.altitude.reserve(n);
    out.density.reserve(n);

    RandomStream rng(derive_seed(seed, SeedStream::Atmosphere));
    const double phi = std::exp(-spec.grid_step / spec.correlation_length);
    const double innovation = spec.sigma_base * std::sqrt(1.0 - phi * phi);
    double x = spec.sigma_base * rng.gaussian();  // stationary start
    for (std::size_t i = 0; i < n; ++i) {
        const double h = spec.altitude_lo + static_cast<double>(i) * spec.grid_step;
        out.altitude.push_back(h);
        out.density.push_back(std::exp(mean.log_density(h) + spec.delta_p * x));
        x = phi * x + innovation * rng.gaussian();
    }
    return out;
}

}  // namespace aerocap
