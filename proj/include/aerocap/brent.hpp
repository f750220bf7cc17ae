#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aerocap {

struct RootResult {
    double x = std::numeric_limits<double>::quiet_NaN();
    double fx = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = false;
};

/// Brent-Dekker scalar root finder on a sign-changing bracket [a, b].
/// Never evaluates f outside [a, b]. Converges when the bracket shrinks below
/// xtol (plus machine slack) or |f| drops below ftol.
template <class F>
RootResult brent_root(F&& f, double a, double b, double xtol = 1e-12,
                      double ftol = 0.0, int max_iter = 100) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return {a, fa, 0, true};
    if (fb == 0.0) return {b, fb, 0, true};
    if (fa * fb > 0.0)
        throw std::invalid_argument("brent_root: bracket does not change sign");

    double c = a, fc = fa;
    double d = b - a, e = d;
    RootResult res;
    for (int iter = 1; iter <= max_iter; ++iter) {
        res.iterations = iter;
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0 || std::abs(fb) <= ftol) {
            res.x = b;
            res.fx = fb;
            res.converged = true;
            return res;
        }
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;  // bisection
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;  // accept interpolation
            } else {
                d = m; e = m;  // fall back to bisection
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    res.x = b;
    res.fx = fb;
    res.converged = false;
    return res;
}

}  // namespace aerocap
