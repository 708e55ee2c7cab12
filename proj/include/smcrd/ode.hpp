#pragma once
//
// Adaptive explicit Runge-Kutta integrator (Dormand-Prince 5(4), FSAL) for
// the small nonstiff systems in this project: the two-variable cell dynamics
// and the three-variable travelling-wave system. State dimension is a compile
// time constant; the right-hand side is any callable
//
//   rhs(double t, const std::array<double,N>& y, std::array<double,N>& dydt)
//
// Accepted steps (with derivatives, for cubic Hermite interpolation) are
// recorded in the returned trajectory. An optional stop predicate terminates
// integration early (used for escape boxes in shooting).
//
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace smcrd {

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t_reached)
        : std::runtime_error(what + " (time reached: " + std::to_string(t_reached) + ")"),
          time_reached(t_reached) {}
    double time_reached;
};

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0.0;   // 0 -> automatic
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 100000000L;
};

template <int N>
struct Trajectory {
    std::vector<double> t;
    std::vector<std::array<double, N>> y;
    std::vector<std::array<double, N>> dy;  // rhs at each accepted point
    bool stopped_early = false;             // stop predicate fired

    size_t size() const { return t.size(); }
    const std::array<double, N>& back() const { return y.back(); }

    // Cubic Hermite interpolation within the step that contains time tt.
    std::array<double, N> at(double tt) const {
        size_t lo = 0, hi = t.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (t[mid] <= tt ? lo : hi) = mid;
        }
        const double h = t[hi] - t[lo];
        if (h == 0) return y[lo];
        const double s = (tt - t[lo]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        std::array<double, N> out;
        for (int i = 0; i < N; ++i)
            out[i] = h00 * y[lo][i] + h10 * h * dy[lo][i] + h01 * y[hi][i] + h11 * h * dy[hi][i];
        return out;
    }
};

namespace detail {
inline bool never_stop_3(double, const std::array<double, 3>&) { return false; }
}

template <int N, class RHS, class Stop>
Trajectory<N> integrate_ode(RHS&& rhs, std::array<double, N> y0, double t0, double t1,
                            const OdeOptions& opt, Stop&& stop) {
    // Dormand-Prince 5(4) tableau
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    using Vec = std::array<double, N>;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    Trajectory<N> out;
    Vec y = y0, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double t = t0;
    rhs(t, y, k1);
    out.t.push_back(t);
    out.y.push_back(y);
    out.dy.push_back(k1);

    double h = opt.h_init > 0 ? opt.h_init : std::min(span / 100.0, 1.0);
    h = std::min(h, opt.h_max);

    long steps = 0;
    while (dir * (t1 - t) > 0) {
        if (++steps > opt.max_steps)
            throw IntegrationError("step limit exceeded", t);
        if (h > std::abs(t1 - t)) h = std::abs(t1 - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationError("step size underflow", t);
        const double hs = dir * h;

        for (int i = 0; i < N; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        rhs(t + c2 * hs, ytmp, k2);
        for (int i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * hs, ytmp, k3);
        for (int i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * hs, ytmp, k4);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * hs, ytmp, k5);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + hs, ytmp, k6);
        for (int i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + hs, ynew, k7);

        double err = 0.0;
        bool finite = true;
        for (int i = 0; i < N; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i]
                                    + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
            if (!std::isfinite(ynew[i])) finite = false;
        }
        err = std::sqrt(err / N);

        if (finite && err <= 1.0) {
            t += hs;
            y = ynew;
            k1 = k7;  // FSAL
            out.t.push_back(t);
            out.y.push_back(y);
            out.dy.push_back(k1);
            if (stop(t, y)) {
                out.stopped_early = true;
                break;
            }
        }
        double fac = finite ? 0.9 * std::pow(std::max(err, 1e-10), -0.2) : 0.1;
        fac = std::min(5.0, std::max(0.2, fac));
        h = std::min(h * fac, opt.h_max);
    }
    return out;
}

template <int N, class RHS>
Trajectory<N> integrate_ode(RHS&& rhs, std::array<double, N> y0, double t0, double t1,
                            const OdeOptions& opt = {}) {
    return integrate_ode<N>(static_cast<RHS&&>(rhs), y0, t0, t1, opt,
                            [](double, const std::array<double, N>&) { return false; });
}

}  // namespace smcrd
