#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "fkcell/errors.hpp"

// Self-contained special functions and scalar root finding. Everything here
// is a pure function of its arguments and safe to call concurrently.
namespace fkcell::specfun {

// Parameter of the elliptic integrals in the algebraic convention: it
// multiplies s^2 inside the square root, not sin^2(theta) under a modulus.
// (So EllipticParam{p} corresponds to modulus k = sqrt(p).)
struct EllipticParam {
    double p;

    explicit EllipticParam(double p_) : p(p_) {
        if (!(p > 0.0 && p < 1.0))
            throw std::domain_error("EllipticParam: p must lie in (0,1), got " +
                                    std::to_string(p_));
    }
};

// Gamma function for positive arguments via the Lanczos rational
// approximation (g = 7, 9 coefficients), with one recurrence step
// below x = 0.5 to stay on the accurate branch.
template <class Scalar>
Scalar gamma(Scalar x) {
    if (!(x > Scalar(0)))
        throw std::domain_error("gamma: argument must be positive");
    if (x < Scalar(0.5)) return gamma(x + Scalar(1)) / x;

    static const double g = 7.0;
    static const double coef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,    12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

    const Scalar z = x - Scalar(1);
    Scalar series = Scalar(coef[0]);
    for (int i = 1; i < 9; ++i) series += Scalar(coef[i]) / (z + Scalar(i));

    const Scalar t = z + Scalar(g) + Scalar(0.5);
    const Scalar sqrt_two_pi = Scalar(2.5066282746310005024);
    return sqrt_two_pi * std::pow(t, z + Scalar(0.5)) * std::exp(-t) * series;
}

// Carlson symmetric integral R_F(x,y,z) by the duplication algorithm.
// At most one argument may be zero.
template <class Scalar>
Scalar carlson_rf(Scalar x, Scalar y, Scalar z) {
    if (x < Scalar(0) || y < Scalar(0) || z < Scalar(0))
        throw std::domain_error("carlson_rf: arguments must be non-negative");
    if (x + y == Scalar(0) || y + z == Scalar(0) || z + x == Scalar(0))
        throw std::domain_error("carlson_rf: at most one argument may be zero");

    const Scalar tol = std::pow(Scalar(4) * std::numeric_limits<Scalar>::epsilon(),
                                Scalar(1) / Scalar(6));
    Scalar mu, dx, dy, dz;
    do {
        const Scalar lam = std::sqrt(x) * std::sqrt(y) + std::sqrt(y) * std::sqrt(z) +
                           std::sqrt(z) * std::sqrt(x);
        x = (x + lam) / Scalar(4);
        y = (y + lam) / Scalar(4);
        z = (z + lam) / Scalar(4);
        mu = (x + y + z) / Scalar(3);
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
    } while (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) > tol);

    const Scalar e2 = dx * dy - dz * dz;
    const Scalar e3 = dx * dy * dz;
    // Fifth-order Carlson series in the symmetric invariants.
    const Scalar series = Scalar(1) - e2 / Scalar(10) + e3 / Scalar(14) +
                          e2 * e2 / Scalar(24) - Scalar(3) * e2 * e3 / Scalar(44);
    return series / std::sqrt(mu);
}

// Incomplete elliptic integral of the first kind in algebraic form,
//   F(x | p) = int_0^x ds / sqrt((1-s^2)(1-p s^2)),  0 <= x <= 1.
inline double elliptic_f(double x, EllipticParam p) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("elliptic_f: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    return x * carlson_rf(1.0 - x * x, 1.0 - p.p * x * x, 1.0);
}

// Complete integral K(p) = F(1 | p) through the arithmetic-geometric mean.
inline double elliptic_k(EllipticParam p) {
    double a = 1.0;
    double b = std::sqrt(1.0 - p.p);
    while (std::abs(a - b) > std::numeric_limits<double>::epsilon() * a) {
        const double am = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = am;
    }
    const double pi = 3.14159265358979323846;
    return pi / (2.0 * a);
}

// Bracketed scalar root finding: bisection with a secant acceleration.
// Requires a sign change on [lo, hi]; stops when the bracket is narrower
// than tol. Deterministic; at most 200 iterations.
template <class F>
double find_root(F&& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("find_root: need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("find_root: need tol > 0");

    double fl = f(lo);
    double fh = f(hi);
    if (fl == 0.0) return lo;
    if (fh == 0.0) return hi;
    if ((fl > 0.0) == (fh > 0.0))
        throw NoBracketError("find_root: f(lo) and f(hi) have the same sign");

    constexpr int max_iter = 200;
    for (int it = 0; it < max_iter; ++it) {
        if (hi - lo <= tol) return 0.5 * (lo + hi);

        // Secant proposal from the bracket endpoints; fall back to bisection
        // when it lands outside or fails to shrink the bracket enough.
        double x = lo - fl * (hi - lo) / (fh - fl);
        const double mid = 0.5 * (lo + hi);
        const double safety = 0.01 * (hi - lo);
        if (!(x > lo + safety && x < hi - safety)) x = mid;

        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (fl > 0.0)) {
            lo = x;
            fl = fx;
        } else {
            hi = x;
            fh = fx;
        }
    }
    throw NonConvergenceError("find_root: bracket not reduced to tol in 200 iterations");
}

}  // namespace fkcell::specfun
