#pragma once
//
// Test-only oracles, independent of the library's computation paths:
// Richardson-extrapolated central differences, a closed-form (trigonometric /
// Cardano) cubic solver, and a deterministic RNG helper.
//
#include <array>
#include <cmath>
#include <complex>
#include <random>

namespace oracle {

// Central difference with one Richardson step: (4 D_h/2 - D_h) / 3.
template <class F>
double derivative(F&& f, double x, double h = 1e-6) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

// Roots of x^3 + a x^2 + b x + c via the trigonometric/Cardano formulas.
inline std::array<std::complex<double>, 3> cubic_roots(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    std::array<std::complex<double>, 3> r;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + s);
        const double v = std::cbrt(-q / 2.0 - s);
        r[0] = shift + u + v;
        const std::complex<double> im(0.0, std::sqrt(3.0) / 2.0 * (u - v));
        r[1] = shift - (u + v) / 2.0 + im;
        r[2] = shift - (u + v) / 2.0 - im;
    } else {
        // three real roots
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double theta = std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
        for (int k = 0; k < 3; ++k)
            r[k] = shift + m * std::cos(theta - 2.0 * M_PI * k / 3.0);
    }
    return r;
}

inline std::mt19937& rng() {
    static std::mt19937 gen(20240811u);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace oracle
