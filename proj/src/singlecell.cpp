#include "smcrd/singlecell.hpp"

#include <algorithm>
#include <cmath>

namespace smcrd {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::StableNode: return "StableNode";
        case Stability::StableFocus: return "StableFocus";
        case Stability::UnstableNode: return "UnstableNode";
        case Stability::UnstableFocus: return "UnstableFocus";
        case Stability::Saddle: return "Saddle";
    }
    return "?";
}

Equilibrium classify_equilibrium(const CellState& s, const ModelParams& p) {
    Equilibrium e;
    e.state = s;
    e.jac = jacobian_cell(s, p);
    const Rates r = reaction(s, p);
    e.residual = std::max(std::abs(r.dV), std::abs(r.dN));

    const double tr = e.jac.trace();
    const double det = e.jac.det();
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        e.lambda1 = {0.5 * (tr + sq), 0.0};
        e.lambda2 = {0.5 * (tr - sq), 0.0};
    } else {
        const double im = 0.5 * std::sqrt(-disc);
        e.lambda1 = {0.5 * tr, im};
        e.lambda2 = {0.5 * tr, -im};
    }

    if (det < 0.0)
        e.stability = Stability::Saddle;
    else if (disc >= 0.0)
        e.stability = (tr < 0.0) ? Stability::StableNode : Stability::UnstableNode;
    else
        e.stability = (tr < 0.0) ? Stability::StableFocus : Stability::UnstableFocus;
    return e;
}

std::optional<Equilibrium> refine_equilibrium(const CellState& guess, const ModelParams& p) {
    CellState s = guess;
    for (int it = 0; it < 60; ++it) {
        const Rates r = reaction(s, p);
        const double res = std::max(std::abs(r.dV), std::abs(r.dN));
        if (res < kNewtonTol) return classify_equilibrium(s, p);
        const CellJacobian j = jacobian_cell(s, p);
        const double det = j.det();
        if (std::abs(det) < 1e-14) return std::nullopt;
        // solve J * delta = -r
        const double dV = (-r.dV * j.gN + r.dN * j.fN) / det;
        const double dN = (-j.fV * r.dN + j.gV * r.dV) / det;
        s.V += dV;
        s.N += dN;
        if (!std::isfinite(s.V) || !std::isfinite(s.N)) return std::nullopt;
        if (std::abs(s.V) > 50 || std::abs(s.N) > 50) return std::nullopt;
    }
    return std::nullopt;
}

std::vector<Equilibrium> find_equilibria(const ModelParams& p, double v_lo, double v_hi,
                                         int n_seeds) {
    std::vector<Equilibrium> found;
    for (int i = 0; i < n_seeds; ++i) {
        const double V = v_lo + (v_hi - v_lo) * i / double(n_seeds - 1);
        auto eq = refine_equilibrium({V, n_inf(V, p)}, p);
        if (!eq) continue;
        bool dup = false;
        for (const auto& e : found) {
            const double d = std::hypot(e.state.V - eq->state.V, e.state.N - eq->state.N);
            if (d < kMergeTol) {
                dup = true;
                break;
            }
        }
        if (!dup) found.push_back(*eq);
    }
    std::sort(found.begin(), found.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return a.state.V < b.state.V; });
    return found;
}

Trajectory<2> integrate_cell(const CellState& s0, const ModelParams& p, double t_end,
                             const OdeOptions& opt) {
    auto rhs = [&p](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        const Rates r = reaction({y[0], y[1]}, p);
        dy[0] = r.dV;
        dy[1] = r.dN;
    };
    return integrate_ode<2>(rhs, {s0.V, s0.N}, 0.0, t_end, opt);
}

std::optional<LimitCycleMeasurement> measure_limit_cycle(const ModelParams& p,
                                                         const CellState& s0,
                                                         double t_transient, double t_measure,
                                                         const CycleOptions& copt) {
    Trajectory<2> tr = integrate_cell(s0, p, t_transient, copt.ode);
    const auto y1 = tr.back();
    Trajectory<2> m = integrate_cell({y1[0], y1[1]}, p, t_measure, copt.ode);

    double vmin = m.y[0][0], vmax = m.y[0][0];
    double vmin2 = m.y.back()[0], vmax2 = vmin2;  // second half only
    for (size_t i = 0; i < m.size(); ++i) {
        vmin = std::min(vmin, m.y[i][0]);
        vmax = std::max(vmax, m.y[i][0]);
        if (m.t[i] >= 0.5 * t_measure) {
            vmin2 = std::min(vmin2, m.y[i][0]);
            vmax2 = std::max(vmax2, m.y[i][0]);
        }
    }
    if (vmax - vmin < copt.amp_threshold) return std::nullopt;
    // a slowly decaying spiral transient is not a cycle
    if (vmax2 - vmin2 < 0.8 * (vmax - vmin)) return std::nullopt;

    // Upward crossings of the midrange on the second half of the run (the
    // first half absorbs any residual convergence), refined on the Hermite
    // interpolant.
    const double level = 0.5 * (vmin2 + vmax2);
    std::vector<double> crossings;
    for (size_t i = 0; i + 1 < m.size(); ++i) {
        if (m.t[i] < 0.5 * t_measure) continue;
        const double a = m.y[i][0] - level, b = m.y[i + 1][0] - level;
        if (a < 0.0 && b >= 0.0) {
            double lo = m.t[i], hi = m.t[i + 1];
            for (int k = 0; k < 60; ++k) {
                const double mid = 0.5 * (lo + hi);
                (m.at(mid)[0] - level < 0.0 ? lo : hi) = mid;
                if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) break;
            }
            crossings.push_back(0.5 * (lo + hi));
        }
    }
    if (crossings.size() < 3) return std::nullopt;

    LimitCycleMeasurement out;
    out.period = (crossings.back() - crossings.front()) / double(crossings.size() - 1);
    out.v_min = vmin2;
    out.v_max = vmax2;
    out.stable = true;
    return out;
}

std::vector<ScanEvent> BifurcationScan::events_of(EventKind k) const {
    std::vector<ScanEvent> out;
    for (const auto& e : events)
        if (e.kind == k) out.push_back(e);
    return out;
}

}  // namespace smcrd
