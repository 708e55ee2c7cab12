#include "smcrd/repro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <limits>
#include <sstream>

#include "smcrd/output.hpp"
#include "smcrd/singlecell.hpp"
#include "smcrd/waves.hpp"

namespace smcrd {
namespace {

enum class BranchSel { Lower, Upper };

struct PanelSpec {
    const char* id;
    const char* param;  // overridden parameter
    double value;
    double v1_base;     // NaN -> stock value
    InitialCondition::Kind ic;
    BranchSel branch;
    double t_end;
};

// Space-time panels. The psi panels run at the wave operating point (three
// equilibria); their perturbation sits on the stable bottom state. The v1 and
// v3 panels run on the upper/unique branch at the stock parameter values.
// t_end is chosen so the pattern class is established while travelling waves
// are still inside the domain.
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const PanelSpec kPanels[] = {
    {"5.1a", "v1", -0.325, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 300},
    {"5.1b", "v1", -0.265, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.1c", "v1", -0.25, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.1d", "v1", -0.248, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.1e", "v1", -0.240, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.1f", "v1", -0.230, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.3a", "v3", -0.3462, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 300},
    {"5.3b", "v3", -0.3019, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.3c", "v3", -0.2813, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.3d", "v3", -0.23842, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 600},
    {"5.3e", "v3", -0.1725, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 500},
    {"5.3f", "v3", -0.05565, kNaN, InitialCondition::Kind::Gaussian, BranchSel::Upper, 400},
    {"5.4a", "psi", 0.1, kWaveOperatingV1, InitialCondition::Kind::Gaussian, BranchSel::Lower, 150},
    {"5.4b", "psi", 0.12, kWaveOperatingV1, InitialCondition::Kind::Gaussian, BranchSel::Lower, 400},
    {"5.4c", "psi", 0.13, kWaveOperatingV1, InitialCondition::Kind::Gaussian, BranchSel::Lower, 500},
    {"5.4d", "psi", 0.2, kWaveOperatingV1, InitialCondition::Kind::Gaussian, BranchSel::Lower, 500},
    {"5.4e", "psi", 0.3, kWaveOperatingV1, InitialCondition::Kind::Gaussian, BranchSel::Lower, 400},
    {"5.4f", "psi", 0.5, kWaveOperatingV1, InitialCondition::Kind::Gaussian, BranchSel::Lower, 220},
    {"5.6a", "v1", -0.325, kNaN, InitialCondition::Kind::Linear, BranchSel::Upper, 300},
    {"5.6b", "v1", -0.265, kNaN, InitialCondition::Kind::Linear, BranchSel::Upper, 500},
    {"5.6c", "v1", -0.25, kNaN, InitialCondition::Kind::Linear, BranchSel::Upper, 500},
    {"5.6d", "v1", -0.248, kNaN, InitialCondition::Kind::Linear, BranchSel::Upper, 500},
    {"5.6e", "v1", -0.240, kNaN, InitialCondition::Kind::Linear, BranchSel::Upper, 500},
    {"5.6f", "v1", -0.230, kNaN, InitialCondition::Kind::Linear, BranchSel::Upper, 500},
};

const Equilibrium& pick_branch(const std::vector<Equilibrium>& eqs, BranchSel sel) {
    if (eqs.empty()) throw std::runtime_error("repro: no equilibrium found");
    return sel == BranchSel::Lower ? eqs.front() : eqs.back();
}

std::string out_root_or_default(const std::string& out_root) {
    if (!out_root.empty()) return out_root;
    if (const char* env = std::getenv("SMCRD_OUT_ROOT")) return env;
    return "out";
}

ReproResult run_panel(const PanelSpec& spec, const std::string& root) {
    ModelParams p;
    if (!std::isnan(spec.v1_base)) p.v1 = spec.v1_base;
    set_param(p, spec.param, spec.value);

    const Grid g = Grid::make(1.0, 1000);
    auto eqs = find_equilibria(p);
    const Equilibrium& eq = pick_branch(eqs, spec.branch);

    InitialCondition ic;
    ic.kind = spec.ic;
    ic.base = eq.state;

    auto snaps = simulate(ic, p, g, spec.t_end, {});
    const PatternClass cls = classify_pattern(snaps, g);

    ReproResult r;
    r.figure_id = spec.id;
    r.out_dir = root + "/" + spec.id;
    r.pattern = cls;
    ensure_dir(r.out_dir);
    write_spacetime_csv(r.out_dir + "/spacetime_V.csv", snaps, g, 'V');
    write_spacetime_csv(r.out_dir + "/spacetime_N.csv", snaps, g, 'N');

    std::ostringstream sum;
    sum << "figure: " << spec.id << "\n"
        << "classification: " << to_string(cls) << "\n";
    if (cls == PatternClass::TravellingPulse || cls == PatternClass::TravellingFront) {
        auto est = estimate_wave_speed(snaps, g, default_wave_level(snaps));
        r.wave_speed = est.speed;
        sum << "wave_speed: " << num17(est.speed) << "\n"
            << "wave_speed_stderr: " << num17(est.stderr_speed) << "\n"
            << "level: " << num17(est.level) << "\n";
    }
    r.summary = sum.str();
    write_text(r.out_dir + "/summary.txt", r.summary);

    std::ostringstream meta;
    meta << render_config({p, g.L}) << "n_per_unit = " << g.n_per_unit << "\n"
         << "ic = " << (spec.ic == InitialCondition::Kind::Gaussian ? "gaussian:A0=0.3,sigma=0.1"
                                                                    : "linear:eps=0.025")
         << "\nbranch = " << (spec.branch == BranchSel::Lower ? "lower" : "upper")
         << "\nbase_V = " << num17(eq.state.V) << "\nbase_N = " << num17(eq.state.N)
         << "\nt_end = " << spec.t_end << "\nsave_every = 1\n";
    write_text(r.out_dir + "/meta.txt", meta.str());
    return r;
}

ReproResult run_bifurcation(const std::string& id, const std::string& root, int jobs) {
    ModelParams p;
    std::string param;
    double from = 0, to = 0;
    if (id == "3.1a") {
        param = "v1";
        from = -0.35;
        to = -0.20;
    } else if (id == "3.1b") {
        param = "v3";
        from = -0.40;
        to = -0.02;
    } else {
        param = "psi";
        from = 0.05;
        to = 0.6;
        p.v1 = kWaveOperatingV1;
    }
    ScanOptions so;
    so.jobs = jobs;
    auto scan = scan_bifurcations(p, param, from, to, 600, so);

    ReproResult r;
    r.figure_id = id;
    r.out_dir = root + "/" + id;
    ensure_dir(r.out_dir);
    write_branches_csv(r.out_dir + "/branches.csv", scan);
    write_events_csv(r.out_dir + "/events.csv", scan);
    write_cycles_csv(r.out_dir + "/cycles.csv", scan);

    std::ostringstream sum;
    sum << "figure: " << id << "\nparam: " << param << "\n";
    for (const auto& e : scan.events)
        sum << to_string(e.kind) << " at " << num17(e.param_value) << " (" << e.evidence << ")\n";
    r.summary = sum.str();
    write_text(r.out_dir + "/summary.txt", r.summary);

    std::ostringstream meta;
    meta << render_config({p, 1.0}) << "scan_param = " << param << "\nfrom = " << from
         << "\nto = " << to << "\nsteps = 600\n";
    for (const auto& note : scan.notes) meta << "note: " << note << "\n";
    write_text(r.out_dir + "/meta.txt", meta.str());
    return r;
}

// Travelling-wave studies: shooting plus the matching simulation, with an
// aligned profile overlay of the orbit against the simulated wave.
ReproResult run_wave_study(const std::string& id, const std::string& root) {
    const bool pulse = (id == "6.3");
    ModelParams p;
    p.v1 = kWaveOperatingV1;
    p.psi = pulse ? 0.1 : 0.5;

    auto eqs = find_equilibria(p);
    const Equilibrium& lower = eqs.front();
    const Equilibrium& upper = eqs.back();

    ShootOptions so;
    auto orbit = pulse
                     ? find_wave_speed(lower, lower, p, 0.004, 0.008, ShootDirection::Backward, so)
                     : find_wave_speed(lower, upper, p, 0.003, 0.006, ShootDirection::Backward, so);

    const Grid g = Grid::make(1.0, 1000);
    InitialCondition ic;
    ic.base = lower.state;
    auto snaps = simulate(ic, p, g, pulse ? 150.0 : 220.0, {});
    auto est = estimate_wave_speed(snaps, g, default_wave_level(snaps));

    ReproResult r;
    r.figure_id = id;
    r.out_dir = root + "/" + id;
    r.wave_speed = est.speed;
    ensure_dir(r.out_dir);
    write_orbit_csv(r.out_dir + "/orbit.csv", orbit);
    write_eigen_csv(r.out_dir + "/eigen.csv", orbit.source, orbit.target);
    write_spacetime_csv(r.out_dir + "/spacetime_V.csv", snaps, g, 'V');

    // Align the orbit with the simulated right-moving wave at 3/4 of the run:
    // matched at the V peak (pulse) or the level crossing (front).
    double profile_maxdiff = 0.0;
    {
        const Field& fld = snaps[3 * (snaps.size() - 1) / 4];
        int i_feat = g.n_points / 2;
        if (pulse) {
            for (int i = g.n_points / 2; i < g.n_points; ++i)
                if (fld.V[i] > fld.V[i_feat]) i_feat = i;
        } else {
            for (int i = g.n_points - 2; i >= g.n_points / 2; --i)
                if ((fld.V[i] - est.level) * (fld.V[i + 1] - est.level) <= 0) {
                    i_feat = i;
                    break;
                }
        }
        size_t k_feat = 0;
        if (pulse) {
            for (size_t k = 0; k < orbit.trajectory.size(); ++k)
                if (orbit.trajectory[k].second.V > orbit.trajectory[k_feat].second.V) k_feat = k;
        } else {
            for (size_t k = 0; k + 1 < orbit.trajectory.size(); ++k)
                if ((orbit.trajectory[k].second.V - est.level) *
                        (orbit.trajectory[k + 1].second.V - est.level) <=
                    0)
                    k_feat = k;
        }
        const double zeta0 = orbit.trajectory[k_feat].first;
        const double x0 = g.x(i_feat);

        std::ostringstream prof;
        prof << "zeta,V_orbit,V_sim\n";
        for (const auto& [z, s] : orbit.trajectory) {
            const double x = x0 + (z - zeta0);
            if (x < -g.L || x > g.L) continue;
            const int i = std::clamp(int(std::lround((x + g.L) / g.dx())), 0, g.n_points - 1);
            profile_maxdiff = std::max(profile_maxdiff, std::abs(s.V - fld.V[i]));
            prof << num17(z - zeta0) << ',' << num17(s.V) << ',' << num17(fld.V[i]) << '\n';
        }
        write_text(r.out_dir + "/profile.csv", prof.str());
    }

    char speed_txt[256];
    std::snprintf(speed_txt, sizeof speed_txt, "c = %.17g\nclosure_distance = %.17g\nkind = %s\n",
                  orbit.c, orbit.closure_distance, to_string(orbit.kind));
    write_text(r.out_dir + "/speed.txt", speed_txt);

    std::ostringstream sum;
    sum << "figure: " << id << "\nshooting_c: " << num17(orbit.c)
        << "\nclosure_distance: " << num17(orbit.closure_distance)
        << "\nkind: " << to_string(orbit.kind) << "\npde_speed: " << num17(est.speed)
        << "\nprofile_max_diff: " << num17(profile_maxdiff) << "\n";
    r.summary = sum.str();
    write_text(r.out_dir + "/summary.txt", r.summary);
    write_text(r.out_dir + "/meta.txt", render_config({p, g.L}));
    return r;
}

}  // namespace

std::vector<std::string> repro_figure_ids() {
    std::vector<std::string> ids = {"3.1a", "3.1b", "3.1c"};
    for (const auto& s : kPanels) ids.push_back(s.id);
    ids.push_back("6.3");
    ids.push_back("6.4");
    return ids;
}

ReproResult repro(const std::string& figure_id, const std::string& out_root, int jobs) {
    const std::string root = out_root_or_default(out_root);
    ensure_dir(root);

    if (figure_id == "3.1a" || figure_id == "3.1b" || figure_id == "3.1c")
        return run_bifurcation(figure_id, root, jobs);
    if (figure_id == "6.3" || figure_id == "6.4") return run_wave_study(figure_id, root);

    for (const auto& spec : kPanels)
        if (figure_id == spec.id) return run_panel(spec, root);

    // group ids ("5.1", "5.4", ...) run every panel of the figure
    std::vector<const PanelSpec*> group;
    for (const auto& spec : kPanels)
        if (std::string(spec.id).rfind(figure_id, 0) == 0) group.push_back(&spec);
    if (!group.empty()) {
        std::vector<ReproResult> results(group.size());
        if (jobs <= 1) {
            for (size_t i = 0; i < group.size(); ++i) results[i] = run_panel(*group[i], root);
        } else {
            std::vector<std::future<ReproResult>> fs;
            fs.reserve(group.size());
            for (const auto* spec : group)
                fs.push_back(std::async(std::launch::async,
                                        [spec, &root] { return run_panel(*spec, root); }));
            for (size_t i = 0; i < fs.size(); ++i) results[i] = fs[i].get();
        }
        ReproResult agg;
        agg.figure_id = figure_id;
        agg.out_dir = root;
        std::ostringstream sum;
        for (const auto& rr : results)
            sum << rr.figure_id << ": " << to_string(rr.pattern)
                << (rr.wave_speed != 0.0 ? " speed " + num17(rr.wave_speed) : "") << "\n";
        agg.summary = sum.str();
        return agg;
    }

    std::string known;
    for (const auto& fid : repro_figure_ids()) known += fid + " ";
    throw std::invalid_argument("unknown figure id '" + figure_id + "'; valid: " + known);
}

}  // namespace smcrd
