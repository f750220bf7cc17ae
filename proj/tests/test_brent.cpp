#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "aerocap/brent.hpp"
#include "aerocap/rng.hpp"

using namespace aerocap;

namespace {

// Plain bisection, the independent oracle for root locations.
template <class F>
double bisect(F&& f, double a, double b, int iters = 80) {
    double fa = f(a);
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("brent finds the textbook root of x^2 - 4") {
    const RootResult r = brent_root([](double x) { return x * x - 4.0; }, 0.0, 3.0, 1e-12);
    REQUIRE(r.converged);
    REQUIRE(r.x == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("brent returns an exact endpoint root immediately") {
    const RootResult r = brent_root([](double x) { return x - 1.0; }, 1.0, 5.0);
    REQUIRE(r.converged);
    REQUIRE(r.x == 1.0);
    REQUIRE(r.iterations == 0);
}

TEST_CASE("brent matches the bisection oracle on cos x = x") {
    auto f = [](double x) { return std::cos(x) - x; };
    const double oracle = bisect(f, 0.0, 1.0);
    const RootResult r = brent_root(f, 0.0, 1.0, 1e-12);
    REQUIRE(r.converged);
    REQUIRE(r.x == Catch::Approx(oracle).margin(1e-9));
    REQUIRE(r.x == Catch::Approx(0.7390851332151607).margin(1e-9));
}

TEST_CASE("brent rejects non-bracketing intervals") {
    REQUIRE_THROWS_AS(brent_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                      std::invalid_argument);
}

TEST_CASE("brent never evaluates outside the bracket") {
    const double lo = 0.0, hi = 5.0;
    auto f = [&](double x) {
        REQUIRE(x >= lo);
        REQUIRE(x <= hi);
        return (x - 4.9) * (x + 1.9) * (x - 10.0);
    };
    const RootResult r = brent_root(f, lo, hi, 1e-12);
    REQUIRE(r.converged);
}

TEST_CASE("brent converges on randomized bracketed functions within 100 iterations") {
    RandomStream rng(2024);
    for (int k = 0; k < 1000; ++k) {
        const double root = rng.uniform(-5.0, 5.0);
        const double width = rng.uniform(0.5, 20.0);
        const double a = root - rng.uniform(0.05, 1.0) * width;
        const double b = root + rng.uniform(0.05, 1.0) * width;
        const int kind = static_cast<int>(rng.uniform_int(0, 3));
        const double scale = rng.uniform(0.2, 50.0);
        auto f = [&](double x) -> double {
            switch (kind) {
                case 0: return scale * (x - root);
                case 1: return scale * (x - root) * ((x - root) * (x - root) + 0.3);
                case 2: return scale * std::sinh(0.3 * (x - root));
                default: return scale * (std::exp(0.2 * (x - root)) - 1.0);
            }
        };
        const RootResult r = brent_root(f, a, b, 1e-10, 0.0, 100);
        REQUIRE(r.converged);
        REQUIRE(r.iterations <= 100);
        REQUIRE(std::abs(r.x - root) < 1e-8 * std::max(1.0, std::abs(root)) + 1e-9);
    }
}
