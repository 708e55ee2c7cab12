#pragma once
//
// Analysis of the diffusion-free cell: time integration, equilibrium finding
// and stability classification, limit-cycle measurement by simulation, and
// one-parameter bifurcation scans with SN / Hopf / SNIC / homoclinic / SNC
// event detection.
//
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "smcrd/model.hpp"
#include "smcrd/ode.hpp"
#include "smcrd/params.hpp"

namespace smcrd {

enum class Stability { StableNode, StableFocus, UnstableNode, UnstableFocus, Saddle };

const char* to_string(Stability s);

struct Equilibrium {
    CellState state;
    CellJacobian jac;
    std::complex<double> lambda1, lambda2;  // lambda1 has the larger real part
    Stability stability = Stability::StableNode;
    double residual = 0.0;  // max-norm of the reaction at state

    bool is_stable() const {
        return stability == Stability::StableNode || stability == Stability::StableFocus;
    }
};

// Newton tolerance on the max-norm of the reaction, and the state-space
// distance below which two equilibria are considered the same.
inline constexpr double kNewtonTol = 1e-10;
inline constexpr double kMergeTol = 1e-6;

// Default integration tolerances for analysis runs.
inline OdeOptions analysis_ode_options() { return OdeOptions{1e-8, 1e-10}; }

// Classify the equilibrium at the given state (no Newton step; the caller is
// responsible for the residual).
Equilibrium classify_equilibrium(const CellState& s, const ModelParams& p);

// Newton iteration on reaction = 0 from n_seeds initial guesses with V spread
// over [v_lo, v_hi] and N seeded at n_inf(V). Non-convergent seeds are
// dropped; duplicates are merged. Results are sorted by V ascending.
std::vector<Equilibrium> find_equilibria(const ModelParams& p, double v_lo = -1.5,
                                         double v_hi = 1.0, int n_seeds = 50);

// Refine an equilibrium near a guessed state; returns std::nullopt if Newton
// does not converge.
std::optional<Equilibrium> refine_equilibrium(const CellState& guess, const ModelParams& p);

Trajectory<2> integrate_cell(const CellState& s0, const ModelParams& p, double t_end,
                             const OdeOptions& opt = analysis_ode_options());

struct LimitCycleMeasurement {
    double param_value = 0.0;
    double period = 0.0;
    double v_min = 0.0, v_max = 0.0;
    bool stable = true;
};

struct CycleOptions {
    double amp_threshold = 1e-3;  // below this V amplitude: no cycle
    OdeOptions ode = analysis_ode_options();
};

// Integrate past the transient, then detect periodicity from upward crossings
// of V through its midrange. Returns std::nullopt when fewer than 3 crossings
// occur or the amplitude is below the threshold.
std::optional<LimitCycleMeasurement> measure_limit_cycle(const ModelParams& p,
                                                         const CellState& s0,
                                                         double t_transient, double t_measure,
                                                         const CycleOptions& copt = {});

// ---------------------------------------------------------------------------
// One-parameter bifurcation scan
// ---------------------------------------------------------------------------

enum class EventKind { SN, Hopf, SNIC, Homoclinic, SNC };
const char* to_string(EventKind k);

struct BranchPoint {
    double param_value = 0.0;
    int branch_id = 0;
    Equilibrium eq;
};

struct ScanEvent {
    double param_value = 0.0;
    EventKind kind = EventKind::SN;
    std::string evidence;
};

struct CyclePoint {
    double param_value = 0.0;
    double period = 0.0;
    double v_min = 0.0, v_max = 0.0;
};

struct BifurcationScan {
    std::string param_name;
    std::vector<BranchPoint> points;   // ordered by param, then branch id
    std::vector<ScanEvent> events;     // sorted by param_value
    std::vector<CyclePoint> cycles;    // grid points where a stable cycle was found
    std::vector<std::string> notes;    // diagnostics (branch-matching ambiguity etc.)

    std::vector<ScanEvent> events_of(EventKind k) const;
};

struct ScanOptions {
    double snic_period_threshold = 500.0;
    double cycle_amp_threshold = 1e-3;
    double t_transient = 400.0;
    double t_measure = 900.0;
    int jobs = 1;                 // grid evaluation parallelism
    bool measure_cycles = true;   // cycle sweep + SNIC/HC/SNC classification
};

// Uniform-grid sweep with nearest-neighbour branch tracking. steps >= 100 is
// required (the folds are localized afterwards by bisection, so the grid only
// needs to resolve the branch topology).
BifurcationScan scan_bifurcations(const ModelParams& p, const std::string& param_name,
                                  double from, double to, int steps,
                                  const ScanOptions& opt = {});

}  // namespace smcrd
