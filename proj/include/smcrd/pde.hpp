#pragma once
//
// Method-of-lines solver for the reaction-diffusion system on [-L, L] with
// no-flux boundaries: second-order central differences in space (ghost-node
// reflection at the ends) and an adaptive L-stable Rosenbrock step in time
// with a banded analytic Jacobian.
//
#include <optional>
#include <string>
#include <vector>

#include "smcrd/model.hpp"
#include "smcrd/ode.hpp"
#include "smcrd/params.hpp"
#include "smcrd/singlecell.hpp"

namespace smcrd {

struct Grid {
    double L = 1.0;
    int n_per_unit = 1000;
    int n_points = 2001;

    static Grid make(double L, int n_per_unit);
    double dx() const { return 2.0 * L / double(n_points - 1); }
    double x(int i) const { return -L + dx() * i; }
    std::vector<double> coords() const;
};

struct Field {
    double time = 0.0;
    std::vector<double> V, N;
};

struct InitialCondition {
    enum class Kind { Gaussian, Linear, Custom };
    Kind kind = Kind::Gaussian;
    double A0 = 0.3, sigma = 0.1;  // Gaussian bump amplitude / width
    double eps = 0.025;            // linear ramp slope
    CellState base;                // homogeneous steady state (V*, N*)
    std::vector<double> v_custom, n_custom;
};

Field make_initial(const InitialCondition& ic, const Grid& g);

// Time derivative of a field under the semidiscrete system.
Field semidiscretize(const Field& f, const ModelParams& p, const Grid& g);

struct SimOptions {
    double rtol = 1e-6;
    double atol = 1e-9;
    double save_every = 1.0;
};

// Integrate to t_end; snapshots at t=0, every multiple of save_every, and
// t_end. Throws IntegrationError on stepper failure and reports the offending
// node on non-finite states.
std::vector<Field> simulate(const InitialCondition& ic, const ModelParams& p, const Grid& g,
                            double t_end, const SimOptions& opt = {});

// ---------------------------------------------------------------------------
// Pattern classification and wave-speed estimation from snapshots
// ---------------------------------------------------------------------------

enum class PatternClass {
    HomogeneousSteady,
    HomogeneousOscillation,
    TravellingPulse,
    TravellingFront,
    Complex
};
const char* to_string(PatternClass c);

struct ClassifyOptions {
    double homog_var = 1e-8;    // spatial variance below this: homogeneous
    double steady_var = 1e-8;   // probe temporal variance below this: steady
    double travel_r2 = 0.999;   // level-set trajectory linearity
    double wake_std = 5e-3;     // temporal std behind a travelling wave
    double front_gap = 0.05;    // |V_wake - V_ahead| separating front from pulse
    double amp_cv = 0.05;       // node-amplitude spread for coherent oscillation
    double period_cv = 0.08;    // crossing-interval spread at probes
};

PatternClass classify_pattern(const std::vector<Field>& snaps, const Grid& g,
                              const ClassifyOptions& opt = {});

struct WaveSpeedEstimate {
    double speed = 0.0;
    double stderr_speed = 0.0;
    double level = 0.0;
    double t_first = 0.0, t_last = 0.0;  // fitting window
    int n_points = 0;
    double r2 = 0.0;
};

class SpeedEstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tracks the rightmost crossing of V through `level` in the right half-domain
// (linear interpolation between nodes) and fits X(tau) by least squares over
// the longest window of consecutive snapshots with a valid crossing. The
// leading quarter of the window is dropped as formation transient.
WaveSpeedEstimate estimate_wave_speed(const std::vector<Field>& snaps, const Grid& g,
                                      double level);

// Midrange of V over the trailing half of the snapshots; the default
// level for speed estimation (midpoint of front plateaus, half pulse height).
double default_wave_level(const std::vector<Field>& snaps);

}  // namespace smcrd
