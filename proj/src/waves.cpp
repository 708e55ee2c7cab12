#include "smcrd/waves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <cstdlib>
#include <sstream>

namespace smcrd {

WaveState wave_rhs(const WaveState& s, double c, const ModelParams& p) {
    if (c == 0.0 || !(p.D > 0.0))
        throw std::invalid_argument("wave_rhs: requires c != 0 and D > 0");
    const Rates r = reaction({s.V, s.N}, p);
    WaveState d;
    d.V = s.W;
    d.W = -(c * s.W + r.dV) / p.D;
    d.N = -r.dN / c;
    return d;
}

std::array<double, 3> wave_cubic_coeffs(const CellJacobian& j, double c, const ModelParams& p) {
    return {(j.gN * p.D + c * c) / (c * p.D),   // P2
            (j.gN + j.fV) / p.D,                // P1
            (j.fV * j.gN - j.fN * j.gV) / (c * p.D)};  // P0
}

namespace {

double scaled_cubic_residual(const std::complex<double>& lam, const std::array<double, 3>& P) {
    const std::complex<double> r = ((lam + P[0]) * lam + P[1]) * lam + P[2];
    const double scale = std::max({std::abs(lam * lam * lam), std::abs(P[0] * lam * lam),
                                   std::abs(P[1] * lam), std::abs(P[2]), 1.0});
    return std::abs(r) / scale;
}

}  // namespace

WaveEquilibrium wave_jacobian(const Equilibrium& eq, double c, const ModelParams& p) {
    if (c == 0.0 || !(p.D > 0.0))
        throw std::invalid_argument("wave_jacobian: requires c != 0 and D > 0");
    const CellJacobian j = eq.jac;

    WaveEquilibrium w;
    w.state = {eq.state.V, 0.0, eq.state.N};
    w.cell_residual = eq.residual;
    w.c = c;
    w.jacobian << 0.0, 1.0, 0.0,
                  -j.fV / p.D, -c / p.D, -j.fN / p.D,
                  -j.gV / c, 0.0, -j.gN / c;

    Eigen::EigenSolver<Eigen::Matrix3d> es(w.jacobian);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("wave_jacobian: eigen-decomposition failed");

    // order by real part, descending
    std::array<int, 3> idx = {0, 1, 2};
    auto ev = es.eigenvalues();
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return ev[a].real() > ev[b].real(); });
    for (int k = 0; k < 3; ++k) {
        w.eigenvalues[k] = ev[idx[k]];
        w.eigenvectors.col(k) = es.eigenvectors().col(idx[k]);
    }

    const auto P = wave_cubic_coeffs(j, c, p);
    w.cubic_residual = 0.0;
    for (const auto& lam : w.eigenvalues)
        w.cubic_residual = std::max(w.cubic_residual, scaled_cubic_residual(lam, P));

    for (const auto& lam : w.eigenvalues) {
        if (lam.real() > 0) ++w.unstable_dim;
        if (lam.real() < 0) ++w.stable_dim;
    }
    return w;
}

namespace {

// Real unit eigenvector for shooting: the largest real positive eigenvalue
// (forward) or the most negative real one (backward). Sign-normalized so the
// V component is nonnegative.
std::optional<Eigen::Vector3d> seed_direction(const WaveEquilibrium& eq, ShootDirection dir) {
    int best = -1;
    for (int k = 0; k < 3; ++k) {
        const auto lam = eq.eigenvalues[k];
        if (std::abs(lam.imag()) > 1e-9 * std::max(1.0, std::abs(lam))) continue;
        const bool ok = (dir == ShootDirection::Forward) ? lam.real() > 0 : lam.real() < 0;
        if (!ok) continue;
        if (best < 0 || std::abs(lam.real()) > std::abs(eq.eigenvalues[best].real())) best = k;
    }
    if (best < 0) return std::nullopt;
    Eigen::Vector3d v = eq.eigenvectors.col(best).real();
    const double nrm = v.norm();
    if (nrm < 1e-12) return std::nullopt;
    v /= nrm;
    if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) v = -v;
    return v;
}

ShotRecord shoot_signed(const WaveEquilibrium& eq_from, const WaveEquilibrium& eq_to, double c,
                        const ModelParams& p, ShootDirection dir, int sign,
                        const Eigen::Vector3d& v, const ShootOptions& opt) {
    const double flip = (dir == ShootDirection::Backward) ? -1.0 : 1.0;
    auto rhs = [&p, c, flip](double, const std::array<double, 3>& y, std::array<double, 3>& dy) {
        const WaveState d = wave_rhs({y[0], y[1], y[2]}, c, p);
        dy[0] = flip * d.V;
        dy[1] = flip * d.W;
        dy[2] = flip * d.N;
    };
    auto outside = [&opt](const std::array<double, 3>& y) {
        return y[0] < opt.v_min || y[0] > opt.v_max || std::abs(y[1]) > opt.w_abs ||
               y[2] < opt.n_min || y[2] > opt.n_max;
    };

    std::array<double, 3> y0 = {eq_from.state.V + sign * opt.seed_eps * v[0],
                                eq_from.state.W + sign * opt.seed_eps * v[1],
                                eq_from.state.N + sign * opt.seed_eps * v[2]};
    auto traj = integrate_ode<3>(rhs, y0, 0.0, opt.zeta_span, opt.ode,
                                 [&](double, const std::array<double, 3>& y) { return outside(y); });

    ShotRecord rec;
    rec.c = c;
    rec.seed_sign = sign;
    const std::array<double, 3> from = {eq_from.state.V, eq_from.state.W, eq_from.state.N};
    const std::array<double, 3> to = {eq_to.state.V, eq_to.state.W, eq_to.state.N};
    bool left = false;
    for (size_t i = 0; i < traj.size(); ++i) {
        const auto& y = traj.y[i];
        if (!left) {
            const double dfrom = std::hypot(y[0] - from[0], y[1] - from[1], y[2] - from[2]);
            if (dfrom > opt.leave_radius) left = true;
        }
        if (left) {
            const double d = std::hypot(y[0] - to[0], y[1] - to[1], y[2] - to[2]);
            if (d < rec.min_distance) {
                rec.min_distance = d;
                rec.state_at_min = {y[0], y[1], y[2]};
            }
        }
    }
    const auto& yf = traj.y.back();
    rec.final_state = {yf[0], yf[1], yf[2]};
    rec.escaped = traj.stopped_early;
    rec.exit_side = rec.escaped ? (yf[1] < 0.0 ? -1 : +1) : 0;

    rec.trajectory.reserve(traj.size());
    if (dir == ShootDirection::Backward) {
        // present the orbit in increasing zeta (the shot ran zeta downward)
        for (size_t i = traj.size(); i-- > 0;)
            rec.trajectory.push_back({-traj.t[i], {traj.y[i][0], traj.y[i][1], traj.y[i][2]}});
    } else {
        for (size_t i = 0; i < traj.size(); ++i)
            rec.trajectory.push_back({traj.t[i], {traj.y[i][0], traj.y[i][1], traj.y[i][2]}});
    }
    return rec;
}

}  // namespace

ShotRecord shoot(const WaveEquilibrium& eq_from, const WaveEquilibrium& eq_to, double c,
                 const ModelParams& p, ShootDirection dir, const ShootOptions& opt) {
    auto v = seed_direction(eq_from, dir);
    if (!v)
        throw std::invalid_argument(
            dir == ShootDirection::Forward
                ? "shoot: eq_from has no real unstable eigenvalue"
                : "shoot: eq_from has no real stable eigenvalue for backward integration");
    ShotRecord a = shoot_signed(eq_from, eq_to, c, p, dir, +1, *v, opt);
    ShotRecord b = shoot_signed(eq_from, eq_to, c, p, dir, -1, *v, opt);
    return (a.min_distance <= b.min_distance) ? a : b;
}

const char* to_string(OrbitKind k) {
    return k == OrbitKind::Homoclinic ? "Homoclinic" : "Heteroclinic";
}

TravellingWaveOrbit find_wave_speed(const Equilibrium& eq_from, const Equilibrium& eq_to,
                                    const ModelParams& p, double c_min, double c_max,
                                    ShootDirection dir, const ShootOptions& opt) {
    if (!(c_min > 0) || !(c_max > c_min))
        throw std::invalid_argument("find_wave_speed: need 0 < c_min < c_max");

    auto make_pair_at = [&](double c) {
        return std::pair<WaveEquilibrium, WaveEquilibrium>{wave_jacobian(eq_from, c, p),
                                                           wave_jacobian(eq_to, c, p)};
    };
    auto shot_at = [&](double c, int sign) {
        auto [wf, wt] = make_pair_at(c);
        auto v = seed_direction(wf, dir);
        if (!v)
            throw std::invalid_argument("find_wave_speed: missing real eigenvalue for seeding");
        return shoot_signed(wf, wt, c, p, dir, sign, *v, opt);
    };

    // Initial scan, both seed signs. The useful branch is the one whose exit
    // side flips somewhere in the bracket (or failing that, the one with an
    // interior minimum of the approach distance); the other branch leaves the
    // equilibrium in the opposite direction and never returns.
    constexpr int kScan = 17;
    auto scan_quality = [&](const std::vector<ShotRecord>& recs, double& dmin) {
        dmin = 1e300;
        int imin = 0;
        bool flip = false;
        for (int i = 0; i < kScan; ++i) {
            if (recs[i].min_distance < dmin) {
                dmin = recs[i].min_distance;
                imin = i;
            }
            if (i > 0 && recs[i - 1].exit_side != 0 && recs[i].exit_side != 0 &&
                recs[i - 1].exit_side != recs[i].exit_side)
                flip = true;
        }
        if (flip) return 2;
        if (imin > 0 && imin < kScan - 1) return 1;
        return 0;
    };

    std::vector<ShotRecord> scan_best;
    int best_sign = 0, best_quality = -1;
    double best_dmin = 1e300;
    for (int s : {+1, -1}) {
        std::vector<ShotRecord> recs;
        for (int i = 0; i < kScan; ++i) {
            const double c = c_min + (c_max - c_min) * i / double(kScan - 1);
            recs.push_back(shot_at(c, s));
        }
        double dmin = 0;
        const int q = scan_quality(recs, dmin);
        if (q > best_quality || (q == best_quality && dmin < best_dmin)) {
            best_quality = q;
            best_dmin = dmin;
            best_sign = s;
            scan_best = std::move(recs);
        }
    }

    if (std::getenv("SMCRD_SHOOT_DEBUG")) {
        std::fprintf(stderr, "shoot scan (sign %+d, quality %d):\n", best_sign, best_quality);
        for (const auto& r : scan_best)
            std::fprintf(stderr, "  c=%.8g d=%.6g side=%+d final=(%.3g,%.3g,%.3g)\n", r.c,
                         r.min_distance, r.exit_side, r.final_state.V, r.final_state.W,
                         r.final_state.N);
    }

    std::optional<std::pair<double, double>> bracket;  // side flip
    for (int i = 0; i + 1 < kScan; ++i) {
        if (scan_best[i].exit_side != 0 && scan_best[i + 1].exit_side != 0 &&
            scan_best[i].exit_side != scan_best[i + 1].exit_side) {
            bracket = {scan_best[i].c, scan_best[i + 1].c};
            break;
        }
    }

    // Refine well below c_tol: the closure quality improves with the c
    // resolution until the double-precision floor, and the shots are cheap.
    const double width_goal = std::min(opt.c_tol, 1e-12 * std::max(1.0, std::abs(c_max)));

    ShotRecord best;
    if (bracket) {
        auto [lo, hi] = *bracket;
        int side_lo = 0;
        for (const auto& r : scan_best)
            if (r.c == lo) side_lo = r.exit_side;
        best = shot_at(lo, best_sign);
        while (hi - lo > width_goal && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            const double mid = 0.5 * (lo + hi);
            ShotRecord rm = shot_at(mid, best_sign);
            if (rm.min_distance < best.min_distance) best = rm;
            if (rm.exit_side == side_lo || rm.exit_side == 0)
                lo = mid;
            else
                hi = mid;
        }
    } else {
        // golden-section on min distance, needs an interior minimum
        int imin = 0;
        for (int i = 0; i < kScan; ++i)
            if (scan_best[i].min_distance < scan_best[imin].min_distance) imin = i;
        if (imin == 0 || imin == kScan - 1) {
            std::ostringstream os;
            os << "find_wave_speed: no bracketing behaviour on the initial c scan\n"
               << "  c, min_distance, exit_side\n";
            for (const auto& r : scan_best) {
                char line[96];
                std::snprintf(line, sizeof line, "  %.8g, %.6g, %+d\n", r.c, r.min_distance,
                              r.exit_side);
                os << line;
            }
            throw SearchError(os.str());
        }
        double a = scan_best[imin - 1].c, b = scan_best[imin + 1].c;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        ShotRecord r1 = shot_at(x1, best_sign), r2 = shot_at(x2, best_sign);
        best = (r1.min_distance < r2.min_distance) ? r1 : r2;
        while (b - a > width_goal && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b) {
            if (r1.min_distance < r2.min_distance) {
                b = x2;
                x2 = x1;
                r2 = r1;
                x1 = b - gr * (b - a);
                r1 = shot_at(x1, best_sign);
            } else {
                a = x1;
                x1 = x2;
                r1 = r2;
                x2 = a + gr * (b - a);
                r2 = shot_at(x2, best_sign);
            }
            if (r1.min_distance < best.min_distance) best = r1;
            if (r2.min_distance < best.min_distance) best = r2;
        }
    }

    TravellingWaveOrbit orbit;
    orbit.c = best.c;
    auto [wf, wt] = make_pair_at(best.c);
    // source/target are the zeta -> -inf / +inf equilibria; a backward shot
    // starts at the +inf end, so the roles swap.
    orbit.source = (dir == ShootDirection::Backward) ? wt : wf;
    orbit.target = (dir == ShootDirection::Backward) ? wf : wt;
    orbit.closure_distance = best.min_distance;
    const double eq_gap = std::hypot(eq_from.state.V - eq_to.state.V,
                                     eq_from.state.N - eq_to.state.N);
    orbit.kind = (eq_gap < kMergeTol) ? OrbitKind::Homoclinic : OrbitKind::Heteroclinic;

    // keep the orbit up to the closest approach; drop the post-miss escape
    size_t cut = best.trajectory.size();
    for (size_t i = 0; i < best.trajectory.size(); ++i) {
        const auto& s = best.trajectory[i].second;
        const double d = std::hypot(s.V - best.state_at_min.V, s.W - best.state_at_min.W,
                                    s.N - best.state_at_min.N);
        if (d == 0.0) {
            cut = (dir == ShootDirection::Backward) ? best.trajectory.size() : i + 1;
            if (dir == ShootDirection::Backward) {
                orbit.trajectory.assign(best.trajectory.begin() + long(i), best.trajectory.end());
                return orbit;
            }
            break;
        }
    }
    orbit.trajectory.assign(best.trajectory.begin(), best.trajectory.begin() + long(cut));
    return orbit;
}

}  // namespace smcrd
