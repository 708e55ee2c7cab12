//
// One-parameter bifurcation scan: uniform grid sweep with branch tracking,
// fold localization by bisection on the equilibrium count, Hopf localization
// by bisection on the real part of a complex eigenvalue pair, and a cycle
// sweep (forward continuation plus a backward hysteresis pass) that feeds the
// SNIC / homoclinic / SNC classification of cycle-interval edges.
//
#include "smcrd/singlecell.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>

namespace smcrd {
namespace {

ModelParams at(const ModelParams& base, const std::string& name, double value) {
    ModelParams q = base;
    set_param(q, name, value);
    return q;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Track one equilibrium from param a to param b in small continuation steps.
std::optional<Equilibrium> continue_eq(const ModelParams& base, const std::string& name,
                                       double a, double b, const Equilibrium& eq_a,
                                       int substeps = 4) {
    CellState s = eq_a.state;
    std::optional<Equilibrium> cur;
    for (int k = 1; k <= substeps; ++k) {
        const double v = a + (b - a) * k / double(substeps);
        cur = refine_equilibrium(s, at(base, name, v));
        if (!cur) return std::nullopt;
        s = cur->state;
    }
    return cur;
}

struct CycleHit {
    LimitCycleMeasurement m;
    CellState sample;  // a state on the cycle, for continuation
};

std::optional<CycleHit> probe_cycle(const ModelParams& p, const CellState& s0,
                                    double t_transient, double t_measure, double amp_thresh) {
    CycleOptions copt;
    copt.amp_threshold = amp_thresh;
    auto m = measure_limit_cycle(p, s0, t_transient, t_measure, copt);
    if (!m) return std::nullopt;
    // A sample on the attractor: the end of a fresh settle run.
    auto tr = integrate_cell(s0, p, t_transient + t_measure, copt.ode);
    return CycleHit{*m, {tr.back()[0], tr.back()[1]}};
}

// Cycle candidates at one parameter value: continuation state first, then
// perturbations of every unstable equilibrium.
std::optional<CycleHit> find_cycle(const ModelParams& p, const std::vector<Equilibrium>& eqs,
                                   const std::optional<CellState>& continuation,
                                   const ScanOptions& opt) {
    if (continuation) {
        auto hit = probe_cycle(p, *continuation, opt.t_transient, opt.t_measure,
                               opt.cycle_amp_threshold);
        if (hit) return hit;
    }
    std::vector<const Equilibrium*> unstable;
    for (const auto& e : eqs)
        if (!e.is_stable() && e.stability != Stability::Saddle) unstable.push_back(&e);
    std::sort(unstable.begin(), unstable.end(), [](const Equilibrium* a, const Equilibrium* b) {
        return a->lambda1.real() > b->lambda1.real();
    });
    for (const auto* e : unstable) {
        CellState s0{e->state.V + 0.02, e->state.N};
        auto hit = probe_cycle(p, s0, opt.t_transient, opt.t_measure, opt.cycle_amp_threshold);
        if (hit) return hit;
    }
    return std::nullopt;
}

}  // namespace

BifurcationScan scan_bifurcations(const ModelParams& base, const std::string& param_name,
                                  double from, double to, int steps, const ScanOptions& opt) {
    if (steps < 100) throw std::invalid_argument("scan_bifurcations: steps must be >= 100");
    BifurcationScan scan;
    scan.param_name = param_name;

    const int n = steps + 1;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = from + (to - from) * i / double(steps);
    const double dg = (to - from) / double(steps);

    // --- equilibria on the grid (parallel) ---
    std::vector<std::vector<Equilibrium>> cols(n);
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) cols[i] = find_equilibria(at(base, param_name, grid[i]));
    } else {
        std::vector<std::future<void>> fs;
        std::atomic<int> next{0};
        for (int w = 0; w < jobs; ++w)
            fs.push_back(std::async(std::launch::async, [&] {
                for (int i = next++; i < n; i = next++)
                    cols[i] = find_equilibria(at(base, param_name, grid[i]));
            }));
        for (auto& f : fs) f.get();
    }

    // --- branch tracking (nearest-neighbour) ---
    int next_id = 0;
    std::vector<std::vector<int>> ids(n);
    ids[0].resize(cols[0].size());
    for (size_t j = 0; j < cols[0].size(); ++j) ids[0][j] = next_id++;
    constexpr double kMatchRadius = 0.08;
    for (int i = 1; i < n; ++i) {
        ids[i].assign(cols[i].size(), -1);
        std::vector<bool> claimed(cols[i - 1].size(), false);
        for (size_t j = 0; j < cols[i].size(); ++j) {
            int bestk = -1;
            double bestd = kMatchRadius;
            for (size_t k = 0; k < cols[i - 1].size(); ++k) {
                if (claimed[k]) continue;
                const double d = std::hypot(cols[i][j].state.V - cols[i - 1][k].state.V,
                                            cols[i][j].state.N - cols[i - 1][k].state.N);
                if (d < bestd) {
                    bestd = d;
                    bestk = int(k);
                }
            }
            if (bestk >= 0) {
                ids[i][j] = ids[i - 1][bestk];
                claimed[bestk] = true;
            } else {
                ids[i][j] = next_id++;
            }
        }
        for (size_t j = 0; j + 1 < cols[i].size(); ++j) {
            const double d = std::hypot(cols[i][j].state.V - cols[i][j + 1].state.V,
                                        cols[i][j].state.N - cols[i][j + 1].state.N);
            if (d < kMergeTol)
                scan.notes.push_back(fmt("branch-matching ambiguity at %.10g: two branches %.3g apart",
                                         grid[i], d));
        }
    }
    for (int i = 0; i < n; ++i)
        for (size_t j = 0; j < cols[i].size(); ++j)
            scan.points.push_back({grid[i], ids[i][j], cols[i][j]});

    // --- fold events: bisection on equilibrium count ---
    std::vector<double> folds;
    for (int i = 0; i + 1 < n; ++i) {
        const size_t ca = cols[i].size(), cb = cols[i + 1].size();
        if (ca == cb) continue;
        double lo = grid[i], hi = grid[i + 1];
        for (int it = 0; it < 60 && std::abs(hi - lo) > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (find_equilibria(at(base, param_name, mid)).size() == ca ? lo : hi) = mid;
        }
        const double p_sn = 0.5 * (lo + hi);
        // locate the colliding pair on the many-equilibria side
        const auto& many = (ca > cb) ? cols[i] : cols[i + 1];
        double vpair = 0, dmin = 1e9;
        for (size_t j = 0; j + 1 < many.size(); ++j) {
            const double d = std::abs(many[j].state.V - many[j + 1].state.V);
            if (d < dmin) {
                dmin = d;
                vpair = 0.5 * (many[j].state.V + many[j + 1].state.V);
            }
        }
        folds.push_back(p_sn);
        scan.events.push_back({p_sn, EventKind::SN,
                               fmt("equilibrium count %g -> %g near V = %.4g", double(ca), double(cb), vpair)});
    }

    // --- Hopf events: Re of a complex pair changes sign along a branch ---
    for (int i = 0; i + 1 < n; ++i) {
        for (size_t j = 0; j < cols[i].size(); ++j) {
            const int id = ids[i][j];
            int j2 = -1;
            for (size_t k = 0; k < cols[i + 1].size(); ++k)
                if (ids[i + 1][k] == id) j2 = int(k);
            if (j2 < 0) continue;
            const auto& ea = cols[i][j];
            const auto& eb = cols[i + 1][size_t(j2)];
            const bool osc = std::abs(ea.lambda1.imag()) > 1e-8 && std::abs(eb.lambda1.imag()) > 1e-8;
            if (!osc) continue;
            const double ra = ea.lambda1.real(), rb = eb.lambda1.real();
            if (ra == 0.0 || ra * rb >= 0.0) continue;
            double lo = grid[i], hi = grid[i + 1];
            Equilibrium elo = ea;
            std::complex<double> lam_cross = ea.lambda1;
            for (int it = 0; it < 50; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto em = continue_eq(base, param_name, lo, mid, elo, 2);
                if (!em) break;
                lam_cross = em->lambda1;
                if (em->lambda1.real() * ra > 0.0) {
                    lo = mid;
                    elo = *em;
                } else {
                    hi = mid;
                }
                if (std::abs(hi - lo) < 1e-12 * std::max(1.0, std::abs(hi))) break;
            }
            const double p_hb = 0.5 * (lo + hi);
            if (std::abs(lam_cross.imag()) > 1e-8)
                scan.events.push_back({p_hb, EventKind::Hopf,
                                       fmt("complex pair crosses axis, Im lambda = %.6g (branch V = %.4g)",
                                           lam_cross.imag(), elo.state.V)});
        }
    }

    if (opt.measure_cycles) {
        // --- cycle sweep: forward with continuation, then backward extension ---
        std::vector<std::optional<CycleHit>> hits(n);
        std::optional<CellState> cont;
        for (int i = 0; i < n; ++i) {
            hits[i] = find_cycle(at(base, param_name, grid[i]), cols[i], cont, opt);
            cont = hits[i] ? std::optional<CellState>(hits[i]->sample) : std::nullopt;
        }
        for (int i = n - 1; i > 0; --i) {
            if (hits[i] && !hits[i - 1]) {
                auto ext = probe_cycle(at(base, param_name, grid[i - 1]), hits[i]->sample,
                                       opt.t_transient, opt.t_measure, opt.cycle_amp_threshold);
                if (ext) hits[i - 1] = ext;
            }
        }
        for (int i = 0; i < n; ++i)
            if (hits[i])
                scan.cycles.push_back({grid[i], hits[i]->m.period, hits[i]->m.v_min, hits[i]->m.v_max});

        // --- classify the edges of each maximal cycle interval ---
        struct ProbeTable {
            std::vector<double> delta, period;
            double maxP = 0, amp = 0;
        };
        auto probe_periods = [&](double edge, double side_sign, const CellState& seed) {
            ProbeTable t;
            CellState s0 = seed;
            for (double frac : {0.5, 0.15, 0.045, 0.0135, 0.004, 0.0012}) {
                const double q = edge + side_sign * frac * std::abs(dg);
                // crossings are counted on the second half of the run, so
                // leave room for ~3 periods beyond the blow-up threshold
                const double tm = std::max(opt.t_measure, 10.0 * opt.snic_period_threshold);
                auto hit = probe_cycle(at(base, param_name, q), s0, opt.t_transient, tm,
                                       opt.cycle_amp_threshold);
                if (!hit) break;
                t.delta.push_back(frac * std::abs(dg));
                t.period.push_back(hit->m.period);
                t.maxP = std::max(t.maxP, hit->m.period);
                t.amp = hit->m.v_max - hit->m.v_min;
                s0 = hit->sample;
                if (t.maxP > opt.snic_period_threshold) break;
            }
            return t;
        };

        int i = 0;
        while (i < n) {
            if (!hits[i]) {
                ++i;
                continue;
            }
            int a = i;
            while (i < n && hits[i]) ++i;
            int b = i - 1;  // cycles on [a, b]
            for (int edge_idx : {a, b}) {
                const bool left = (edge_idx == a);
                if ((left && a == 0) || (!left && b == n - 1)) continue;  // runs off the grid
                const double g_in = grid[edge_idx];
                const double side = left ? +1.0 : -1.0;  // direction from outside into the run
                // Fold candidates get a wide window: the sweep loses track of
                // the cycle once the period outgrows its measurement window,
                // several cells before a SNIC fold. The period-blow-up probe
                // below still decides whether the fold is on the cycle.
                double fold_near = NAN;
                for (double f : folds)
                    if (std::abs(f - g_in) <= 12.0 * std::abs(dg)) fold_near = f;
                double hopf_near = NAN;
                for (const auto& e : scan.events)
                    if (e.kind == EventKind::Hopf && std::abs(e.param_value - g_in) <= 2.0 * std::abs(dg))
                        hopf_near = e.param_value;

                const CellState seed = hits[size_t(edge_idx)]->sample;
                if (!std::isnan(fold_near)) {
                    ProbeTable t = probe_periods(fold_near, side, seed);
                    if (t.maxP > opt.snic_period_threshold)
                        scan.events.push_back({fold_near, EventKind::SNIC,
                                               fmt("cycle period %.4g exceeds threshold approaching fold at %.8g",
                                                   t.maxP, fold_near)});
                    continue;
                }
                // refine the cycle-existence boundary by bisection
                double lo = g_in, hi = grid[edge_idx - int(side)];
                CellState s0 = seed;
                for (int it = 0; it < 22; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    auto hit = probe_cycle(at(base, param_name, mid), s0, opt.t_transient,
                                           opt.t_measure, opt.cycle_amp_threshold);
                    if (hit) {
                        lo = mid;
                        s0 = hit->sample;
                    } else {
                        hi = mid;
                    }
                }
                const double edge = 0.5 * (lo + hi);
                ProbeTable t = probe_periods(edge, side, s0);
                if (std::getenv("SMCRD_SCAN_DEBUG")) {
                    std::string msg = fmt("edge %.8g probes:", edge);
                    for (size_t k = 0; k < t.period.size(); ++k)
                        msg += fmt(" (d=%.3g, P=%.5g)", t.delta[k], t.period[k]);
                    scan.notes.push_back(msg);
                }
                const auto eqs_edge = find_equilibria(at(base, param_name, edge));
                const Equilibrium* saddle = nullptr;
                for (const auto& e : eqs_edge)
                    if (e.stability == Stability::Saddle) saddle = &e;
                const bool has_stable = std::any_of(eqs_edge.begin(), eqs_edge.end(),
                                                    [](const Equilibrium& e) { return e.is_stable(); });

                // Homoclinic signature: the period diverges like
                // ln(1/delta) / lambda_u as the saddle connection is
                // approached, so successive probe increments stay roughly
                // constant instead of dying out (SNC) or exploding (SNIC).
                bool homoclinic = false;
                double slope = 0;
                if (saddle && t.period.size() >= 4) {
                    const size_t m = t.period.size();
                    const double d1 = t.period[m - 1] - t.period[m - 2];
                    const double d2 = t.period[m - 2] - t.period[m - 3];
                    const double lr1 = std::log(t.delta[m - 2] / t.delta[m - 1]);
                    const double lr2 = std::log(t.delta[m - 3] / t.delta[m - 2]);
                    slope = 0.5 * (d1 / lr1 + d2 / lr2);
                    const double lam_u = saddle->lambda1.real();
                    homoclinic = d1 > 0.02 * t.period[m - 1] && d2 > 0.02 * t.period[m - 1] &&
                                 d1 / lr1 > 0.5 * (d2 / lr2) && d1 / lr1 < 2.0 * (d2 / lr2) &&
                                 lam_u > 0 && slope * lam_u > 0.4 && slope * lam_u < 2.5;
                }

                if ((t.maxP > opt.snic_period_threshold || homoclinic) && saddle) {
                    scan.events.push_back(
                        {edge, EventKind::Homoclinic,
                         fmt("period grows ~ %.4g ln(1/d) towards %.8g; saddle unstable eigenvalue %.4g",
                             slope, edge, saddle ? saddle->lambda1.real() : 0.0)});
                } else if (!std::isnan(hopf_near) && t.amp < 0.05) {
                    // amplitude shrinks into the Hopf already recorded
                } else if (t.amp > 10.0 * opt.cycle_amp_threshold && has_stable) {
                    scan.events.push_back({edge, EventKind::SNC,
                                           fmt("stable cycle of amplitude %.3g vanishes at %.8g while a stable equilibrium coexists",
                                               t.amp, edge)});
                } else {
                    scan.notes.push_back(fmt("unclassified cycle boundary at %.8g (max period %.4g, amplitude %.4g)",
                                             edge, t.maxP, t.amp));
                }
            }
        }
    }

    std::sort(scan.events.begin(), scan.events.end(),
              [](const ScanEvent& x, const ScanEvent& y) { return x.param_value < y.param_value; });
    return scan;
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::SN: return "SN";
        case EventKind::Hopf: return "Hopf";
        case EventKind::SNIC: return "SNIC";
        case EventKind::Homoclinic: return "Homoclinic";
        case EventKind::SNC: return "SNC";
    }
    return "?";
}

}  // namespace smcrd
