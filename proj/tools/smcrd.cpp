//
// smcrd: simulation and analysis of the coupled smooth-muscle-cell membrane
// model. Subcommands: bifurcate, turing-check, simulate, shoot, wavespeed,
// repro, validate-config.
//
// Exit codes: 0 success, 2 usage / config error, 3 numerical failure.
//
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "smcrd/output.hpp"
#include "smcrd/repro.hpp"
#include "smcrd/singlecell.hpp"
#include "smcrd/turing.hpp"
#include "smcrd/waves.hpp"

using namespace smcrd;

namespace {

RunConfig config_from(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return load_config(path);
}

// "gaussian:A0=0.3,sigma=0.1" | "linear:eps=0.025"
InitialCondition parse_ic(const std::string& text) {
    InitialCondition ic;
    std::string kind = text, args;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        kind = text.substr(0, colon);
        args = text.substr(colon + 1);
    }
    if (kind == "gaussian")
        ic.kind = InitialCondition::Kind::Gaussian;
    else if (kind == "linear")
        ic.kind = InitialCondition::Kind::Linear;
    else
        throw ConfigError("unknown ic kind '" + kind + "' (use gaussian|linear)");
    std::istringstream as(args);
    std::string kv;
    while (std::getline(as, kv, ',')) {
        if (kv.empty()) continue;
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("bad ic argument '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const double val = std::strtod(kv.c_str() + eq + 1, nullptr);
        if (key == "A0")
            ic.A0 = val;
        else if (key == "sigma")
            ic.sigma = val;
        else if (key == "eps")
            ic.eps = val;
        else
            throw ConfigError("unknown ic argument '" + key + "'");
    }
    return ic;
}

const Equilibrium& pick_branch(const std::vector<Equilibrium>& eqs, const std::string& sel) {
    if (eqs.empty()) throw SearchError("no equilibrium found for these parameters");
    if (sel == "lower") return eqs.front();
    if (sel == "upper") return eqs.back();
    char* end = nullptr;
    const long k = std::strtol(sel.c_str(), &end, 10);
    if (end != sel.c_str() && *end == '\0' && k >= 0 && size_t(k) < eqs.size())
        return eqs[size_t(k)];
    throw ConfigError("bad branch selector '" + sel + "' (use lower|upper|index)");
}

std::string resolve_out(const std::string& out) {
    if (!out.empty()) return out;
    if (const char* env = std::getenv("SMCRD_OUT_ROOT")) return env;
    return ".";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled smooth-muscle-cell membrane model toolkit"};
    app.require_subcommand(1);

    // ---- bifurcate ----
    auto* bif = app.add_subcommand("bifurcate", "one-parameter bifurcation scan");
    std::string bif_param, bif_config, bif_out = "";
    double bif_from = 0, bif_to = 0;
    int bif_steps = 500, bif_jobs = 1;
    bif->add_option("--param", bif_param, "v1|v3|psi")->required();
    bif->add_option("--from", bif_from)->required();
    bif->add_option("--to", bif_to)->required();
    bif->add_option("--steps", bif_steps);
    bif->add_option("--config", bif_config);
    bif->add_option("--out", bif_out, "output directory");
    bif->add_option("--jobs", bif_jobs);

    // ---- turing-check ----
    auto* tur = app.add_subcommand("turing-check", "dispersion relation at a stable state");
    std::string tur_config, tur_out = "dispersion.csv", tur_branch = "upper";
    std::vector<std::string> tur_at;
    double tur_kmax = 100.0;
    int tur_nk = 2001;
    tur->add_option("--config", tur_config);
    tur->add_option("--param-at", tur_at, "override, e.g. v1=-0.325 (repeatable)");
    tur->add_option("--branch", tur_branch, "lower|upper|index (default: the stable one)");
    tur->add_option("--k-max", tur_kmax);
    tur->add_option("--n-k", tur_nk);
    tur->add_option("--out", tur_out, "dispersion CSV path");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "method-of-lines run");
    std::string sim_config, sim_ic = "gaussian:A0=0.3,sigma=0.1", sim_branch = "upper",
                sim_out = "";
    double sim_tend = 500, sim_save = 1.0;
    int sim_npu = 1000;
    sim->add_option("--config", sim_config);
    sim->add_option("--ic", sim_ic, "gaussian:A0=..,sigma=.. | linear:eps=..");
    sim->add_option("--branch", sim_branch, "lower|upper|index");
    sim->add_option("--t-end", sim_tend);
    sim->add_option("--save-every", sim_save);
    sim->add_option("--n-per-unit", sim_npu);
    sim->add_option("--out", sim_out, "output directory");

    // ---- shoot ----
    auto* sht = app.add_subcommand("shoot", "travelling-wave search over c");
    std::string sht_config, sht_from = "lower", sht_to = "lower", sht_dir = "backward",
                sht_out = "";
    double sht_cmin = 0.004, sht_cmax = 0.008;
    sht->add_option("--config", sht_config);
    sht->add_option("--from", sht_from, "lower|upper (shot start)");
    sht->add_option("--to", sht_to, "lower|upper (target)");
    sht->add_option("--c-min", sht_cmin);
    sht->add_option("--c-max", sht_cmax);
    sht->add_option("--direction", sht_dir, "forward|backward");
    sht->add_option("--out", sht_out, "output directory");

    // ---- wavespeed ----
    auto* wsp = app.add_subcommand("wavespeed", "estimate speed from a space-time CSV");
    std::string wsp_file;
    double wsp_level = std::numeric_limits<double>::quiet_NaN();
    wsp->add_option("--spacetime", wsp_file, "spacetime_V.csv")->required();
    wsp->add_option("--level", wsp_level, "crossing level (default: midrange)");

    // ---- repro ----
    auto* rep = app.add_subcommand("repro", "rerun a study figure pipeline");
    std::string rep_fig, rep_out = "";
    int rep_jobs = 1;
    rep->add_option("--figure", rep_fig, "e.g. 3.1a, 5.1a..5.6f, 6.3, 6.4")->required();
    rep->add_option("--out", rep_out, "output root");
    rep->add_option("--jobs", rep_jobs);

    // ---- validate-config ----
    auto* val = app.add_subcommand("validate-config", "resolve and echo a config file");
    std::string val_path;
    val->add_option("path", val_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*bif) {
            RunConfig cfg = config_from(bif_config);
            ScanOptions so;
            so.jobs = bif_jobs;
            auto scan = scan_bifurcations(cfg.params, bif_param, bif_from, bif_to, bif_steps, so);
            const std::string dir = resolve_out(bif_out);
            ensure_dir(dir);
            write_branches_csv(dir + "/branches.csv", scan);
            write_events_csv(dir + "/events.csv", scan);
            write_cycles_csv(dir + "/cycles.csv", scan);
            std::ostringstream meta;
            meta << render_config(cfg) << "scan_param = " << bif_param << "\nfrom = " << bif_from
                 << "\nto = " << bif_to << "\nsteps = " << bif_steps << "\n";
            for (const auto& note : scan.notes) meta << "note: " << note << "\n";
            write_text(dir + "/meta.txt", meta.str());
            for (const auto& e : scan.events)
                std::printf("%-10s at %.10g  %s\n", to_string(e.kind), e.param_value,
                            e.evidence.c_str());
        } else if (*tur) {
            RunConfig cfg = config_from(tur_config);
            for (const auto& kv : tur_at) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("--param-at expects key=value, got '" + kv + "'");
                set_param(cfg.params, kv.substr(0, eq), std::strtod(kv.c_str() + eq + 1, nullptr));
            }
            auto eqs = find_equilibria(cfg.params);
            const Equilibrium* eq = nullptr;
            if (tur->count("--branch")) {
                eq = &pick_branch(eqs, tur_branch);
            } else {
                for (const auto& e : eqs)
                    if (e.is_stable()) eq = &e;
                if (!eq) throw SearchError("no stable equilibrium at these parameters");
            }
            auto cert = turing_test(*eq, cfg.params, std::max(tur_kmax, 1.0), 2001);
            auto disp = dispersion(*eq, cfg.params, tur_kmax, tur_nk);
            write_dispersion_csv(tur_out, disp);
            std::printf("verdict: %s\n%s\n",
                        cert.verdict == TuringVerdict::NoTuring ? "NoTuring" : "TuringPossible",
                        cert.summary.c_str());
        } else if (*sim) {
            RunConfig cfg = config_from(sim_config);
            InitialCondition ic = parse_ic(sim_ic);
            auto eqs = find_equilibria(cfg.params);
            const Equilibrium& eq = pick_branch(eqs, sim_branch);
            ic.base = eq.state;
            const Grid g = Grid::make(cfg.L, sim_npu);
            SimOptions so;
            so.save_every = sim_save;
            auto snaps = simulate(ic, cfg.params, g, sim_tend, so);
            const std::string dir = resolve_out(sim_out);
            ensure_dir(dir);
            write_spacetime_csv(dir + "/spacetime_V.csv", snaps, g, 'V');
            write_spacetime_csv(dir + "/spacetime_N.csv", snaps, g, 'N');
            const PatternClass cls = classify_pattern(snaps, g);
            std::ostringstream sum;
            sum << "classification: " << to_string(cls) << "\n";
            if (cls == PatternClass::TravellingPulse || cls == PatternClass::TravellingFront) {
                auto est = estimate_wave_speed(snaps, g, default_wave_level(snaps));
                sum << "wave_speed: " << num17(est.speed) << "\nwave_speed_stderr: "
                    << num17(est.stderr_speed) << "\nlevel: " << num17(est.level) << "\n";
            }
            write_text(dir + "/summary.txt", sum.str());
            std::ostringstream meta;
            meta << render_config(cfg) << "n_per_unit = " << sim_npu << "\nic = " << sim_ic
                 << "\nbranch = " << sim_branch << "\nbase_V = " << num17(eq.state.V)
                 << "\nbase_N = " << num17(eq.state.N) << "\nt_end = " << sim_tend
                 << "\nsave_every = " << sim_save << "\n";
            write_text(dir + "/meta.txt", meta.str());
            std::fputs(sum.str().c_str(), stdout);
        } else if (*sht) {
            RunConfig cfg = config_from(sht_config);
            auto eqs = find_equilibria(cfg.params);
            const Equilibrium& efrom = pick_branch(eqs, sht_from);
            const Equilibrium& eto = pick_branch(eqs, sht_to);
            const ShootDirection dir = (sht_dir == "forward") ? ShootDirection::Forward
                                                              : ShootDirection::Backward;
            auto orbit = find_wave_speed(efrom, eto, cfg.params, sht_cmin, sht_cmax, dir, {});
            const std::string out = resolve_out(sht_out);
            ensure_dir(out);
            write_orbit_csv(out + "/orbit.csv", orbit);
            write_eigen_csv(out + "/eigen.csv", orbit.source, orbit.target);
            char buf[256];
            std::snprintf(buf, sizeof buf, "c = %.17g\nclosure_distance = %.17g\nkind = %s\n",
                          orbit.c, orbit.closure_distance, to_string(orbit.kind));
            write_text(out + "/speed.txt", buf);
            write_text(out + "/meta.txt", render_config(cfg));
            std::fputs(buf, stdout);
        } else if (*wsp) {
            auto data = read_spacetime_csv(wsp_file);
            const double level =
                std::isnan(wsp_level) ? default_wave_level(data.snaps) : wsp_level;
            auto est = estimate_wave_speed(data.snaps, data.grid, level);
            std::printf("speed = %.10g +- %.3g (level %.6g, window [%g, %g], n=%d, r2=%.6f)\n",
                        est.speed, est.stderr_speed, est.level, est.t_first, est.t_last,
                        est.n_points, est.r2);
        } else if (*rep) {
            auto r = repro(rep_fig, rep_out, rep_jobs);
            std::printf("%s", r.summary.c_str());
            if (!r.out_dir.empty()) std::printf("output: %s\n", r.out_dir.c_str());
        } else if (*val) {
            RunConfig cfg = load_config(val_path);
            std::fputs(render_config(cfg).c_str(), stdout);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
