//
// Heuristic pattern classification from snapshots, and level-set wave-speed
// estimation.
//
// Classification order:
//   1. machine-flat late-time snapshots -> HomogeneousSteady/Oscillation
//   2. a linear rightmost-level-crossing trajectory with a quiet wake ->
//      TravellingPulse or TravellingFront (wake state vs ahead state)
//   3. coherent domain-wide oscillation (uniform node amplitudes, regular
//      crossing intervals at probes with matching periods) ->
//      HomogeneousOscillation
//   4. otherwise Complex
//
#include "smcrd/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace smcrd {
namespace {

double spatial_variance(const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    return var / double(v.size());
}

double temporal_variance(const std::vector<Field>& snaps, size_t from, int node) {
    double mean = 0;
    size_t m = snaps.size() - from;
    for (size_t i = from; i < snaps.size(); ++i) mean += snaps[i].V[node];
    mean /= double(m);
    double var = 0;
    for (size_t i = from; i < snaps.size(); ++i) {
        const double d = snaps[i].V[node] - mean;
        var += d * d;
    }
    return var / double(m);
}

// Rightmost level crossing in the right half-domain, or NaN.
double rightmost_crossing(const Field& f, const Grid& g, double level) {
    const int n = g.n_points;
    for (int i = n - 2; i >= (n - 1) / 2; --i) {
        const double a = f.V[i] - level, b = f.V[i + 1] - level;
        if (a == 0.0) return g.x(i);
        if (a * b < 0.0) return g.x(i) + g.dx() * a / (a - b);
    }
    return NAN;
}

struct LineFit {
    double slope = 0, stderr_slope = 0, r2 = 0;
    int n = 0;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& x) {
    LineFit f;
    f.n = int(t.size());
    if (f.n < 3) return f;
    double tm = 0, xm = 0;
    for (int i = 0; i < f.n; ++i) {
        tm += t[i];
        xm += x[i];
    }
    tm /= f.n;
    xm /= f.n;
    double stt = 0, stx = 0, sxx = 0;
    for (int i = 0; i < f.n; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        stx += (t[i] - tm) * (x[i] - xm);
        sxx += (x[i] - xm) * (x[i] - xm);
    }
    if (stt == 0) return f;
    f.slope = stx / stt;
    double ss_res = 0;
    for (int i = 0; i < f.n; ++i) {
        const double r = x[i] - xm - f.slope * (t[i] - tm);
        ss_res += r * r;
    }
    f.r2 = (sxx > 0) ? 1.0 - ss_res / sxx : 1.0;
    f.stderr_slope = (f.n > 2) ? std::sqrt(ss_res / (f.n - 2) / stt) : 0.0;
    return f;
}

// Longest run of consecutive snapshots with a valid interior crossing.
struct CrossingRun {
    std::vector<double> t, x;
    size_t first = 0, last = 0;
};

CrossingRun longest_crossing_run(const std::vector<Field>& snaps, const Grid& g, double level) {
    const double x_hi = 0.98 * g.L;
    std::vector<double> xc(snaps.size());
    for (size_t i = 0; i < snaps.size(); ++i) xc[i] = rightmost_crossing(snaps[i], g, level);
    size_t best_a = 0, best_b = 0;
    size_t a = 0;
    bool in = false;
    for (size_t i = 0; i <= snaps.size(); ++i) {
        const bool good = i < snaps.size() && std::isfinite(xc[i]) && xc[i] > 0.0 && xc[i] < x_hi;
        if (good && !in) {
            a = i;
            in = true;
        }
        if (!good && in) {
            if (i - a > best_b - best_a) {
                best_a = a;
                best_b = i;
            }
            in = false;
        }
    }
    CrossingRun run;
    run.first = best_a;
    run.last = best_b;
    for (size_t i = best_a; i < best_b; ++i) {
        run.t.push_back(snaps[i].time);
        run.x.push_back(xc[i]);
    }
    return run;
}

// Upward crossing times of a probe series through its midrange.
std::vector<double> probe_crossings(const std::vector<Field>& snaps, size_t from, int node) {
    double vmin = 1e300, vmax = -1e300;
    for (size_t i = from; i < snaps.size(); ++i) {
        vmin = std::min(vmin, snaps[i].V[node]);
        vmax = std::max(vmax, snaps[i].V[node]);
    }
    const double level = 0.5 * (vmin + vmax);
    std::vector<double> out;
    for (size_t i = from; i + 1 < snaps.size(); ++i) {
        const double a = snaps[i].V[node] - level, b = snaps[i + 1].V[node] - level;
        if (a < 0 && b >= 0)
            out.push_back(snaps[i].time + (snaps[i + 1].time - snaps[i].time) * a / (a - b));
    }
    return out;
}

}  // namespace

double default_wave_level(const std::vector<Field>& snaps) {
    double vmin = 1e300, vmax = -1e300;
    for (size_t i = snaps.size() / 2; i < snaps.size(); ++i)
        for (double v : snaps[i].V) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    return 0.5 * (vmin + vmax);
}

WaveSpeedEstimate estimate_wave_speed(const std::vector<Field>& snaps, const Grid& g,
                                      double level) {
    CrossingRun run = longest_crossing_run(snaps, g, level);
    if (run.t.size() < 5)
        throw SpeedEstimationError("estimate_wave_speed: no usable crossing window at this level");
    // drop the leading quarter (wave formation)
    const size_t skip = run.t.size() / 4;
    std::vector<double> t(run.t.begin() + skip, run.t.end());
    std::vector<double> x(run.x.begin() + skip, run.x.end());
    LineFit f = fit_line(t, x);
    WaveSpeedEstimate est;
    est.speed = f.slope;
    est.stderr_speed = f.stderr_slope;
    est.level = level;
    est.t_first = t.front();
    est.t_last = t.back();
    est.n_points = f.n;
    est.r2 = f.r2;
    return est;
}

PatternClass classify_pattern(const std::vector<Field>& snaps, const Grid& g,
                              const ClassifyOptions& opt) {
    if (snaps.size() < 10)
        throw std::invalid_argument("classify_pattern: need at least 10 snapshots");

    const double t_end = snaps.back().time;
    const double w_begin = t_end - std::max(0.25 * t_end, 120.0);
    size_t w_from = 0;
    while (w_from + 10 < snaps.size() && snaps[w_from].time < w_begin) ++w_from;

    const int n = g.n_points;
    const int probes[3] = {n / 4, n / 2, 3 * n / 4};

    // 1. machine-flat profiles
    double max_svar = 0;
    for (size_t i = w_from; i < snaps.size(); ++i)
        max_svar = std::max(max_svar, spatial_variance(snaps[i].V));
    if (max_svar < opt.homog_var) {
        double max_tvar = 0;
        for (int pr : probes) max_tvar = std::max(max_tvar, temporal_variance(snaps, w_from, pr));
        return max_tvar < opt.steady_var ? PatternClass::HomogeneousSteady
                                         : PatternClass::HomogeneousOscillation;
    }

    // 2. travelling wave
    const double level = default_wave_level(snaps);
    CrossingRun run = longest_crossing_run(snaps, g, level);
    if (run.t.size() >= 15) {
        const size_t skip = run.t.size() / 4;
        std::vector<double> t(run.t.begin() + skip, run.t.end());
        std::vector<double> x(run.x.begin() + skip, run.x.end());
        LineFit f = fit_line(t, x);
        const double displacement = std::abs(x.back() - x.front());
        if (f.r2 > opt.travel_r2 && displacement > 10.0 * g.dx()) {
            // wake behaviour at the domain centre over the last third of
            // the travel window (the earlier part still holds the recovery
            // tail of the wave itself)
            const size_t wake_from = run.first + 2 * (run.last - run.first) / 3;
            double mean = 0, var = 0;
            size_t m = 0;
            for (size_t i = wake_from; i < run.last; ++i, ++m) mean += snaps[i].V[n / 2];
            mean /= double(std::max<size_t>(m, 1));
            m = 0;
            for (size_t i = wake_from; i < run.last; ++i, ++m) {
                const double d = snaps[i].V[n / 2] - mean;
                var += d * d;
            }
            const double wake_sd = std::sqrt(var / double(std::max<size_t>(m, 1)));
            if (std::getenv("SMCRD_CLASSIFY_DEBUG"))
                std::fprintf(stderr,
                             "classify: travel r2=%.6f disp=%.4g wake_sd=%.4g run=[%zu,%zu)\n",
                             f.r2, displacement, wake_sd, run.first, run.last);
            if (wake_sd < opt.wake_std) {
                // sample wake and ahead states while the wave is still well
                // inside the domain (2/3 through the run), the ahead point a
                // little beyond the crossing
                const size_t j = run.first + 2 * (run.last - run.first) / 3;
                const double xc = run.x[j - run.first];
                const int i_ahead = std::min(n - 1, int((std::min(xc + 0.1 * g.L, 0.99 * g.L) + g.L) / g.dx()));
                const double ahead = snaps[j].V[i_ahead];
                const double wake = snaps[j].V[n / 2];
                return (std::abs(wake - ahead) > opt.front_gap) ? PatternClass::TravellingFront
                                                                : PatternClass::TravellingPulse;
            }
        }
    }

    // 3. coherent domain-wide oscillation
    {
        double amp_mean = 0, amp_m2 = 0;
        double amp_min = 1e300;
        for (int i = 0; i < n; ++i) {
            double vmin = 1e300, vmax = -1e300;
            for (size_t k = w_from; k < snaps.size(); ++k) {
                vmin = std::min(vmin, snaps[k].V[i]);
                vmax = std::max(vmax, snaps[k].V[i]);
            }
            const double a = vmax - vmin;
            amp_mean += a;
            amp_m2 += a * a;
            amp_min = std::min(amp_min, a);
        }
        amp_mean /= n;
        const double amp_sd = std::sqrt(std::max(0.0, amp_m2 / n - amp_mean * amp_mean));
        if (amp_mean > 1e-3 && amp_min > 0.5 * amp_mean && amp_sd / amp_mean < opt.amp_cv) {
            bool coherent = true;
            double period_lo = 1e300, period_hi = 0;
            for (int pr : probes) {
                auto cr = probe_crossings(snaps, w_from, pr);
                if (cr.size() < 4) {
                    coherent = false;
                    break;
                }
                std::vector<double> gaps;
                for (size_t i = 1; i < cr.size(); ++i) gaps.push_back(cr[i] - cr[i - 1]);
                double gm = 0;
                for (double gp : gaps) gm += gp;
                gm /= double(gaps.size());
                double gv = 0;
                for (double gp : gaps) gv += (gp - gm) * (gp - gm);
                const double gsd = std::sqrt(gv / double(gaps.size()));
                if (gsd / gm > opt.period_cv) {
                    coherent = false;
                    break;
                }
                period_lo = std::min(period_lo, gm);
                period_hi = std::max(period_hi, gm);
            }
            if (coherent && period_hi / period_lo < 1.2) return PatternClass::HomogeneousOscillation;
        }
    }

    return PatternClass::Complex;
}

}  // namespace smcrd
