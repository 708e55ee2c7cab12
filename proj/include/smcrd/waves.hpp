#pragma once
//
// Travelling-wave construction. In the wave coordinate zeta = X - c tau a
// profile satisfies
//
//   V' = W,   W' = -(c W + f(V,N)) / D,   N' = -g(V,N) / c,
//
// whose equilibria are the cell equilibria with W = 0. Pulses are homoclinic
// orbits, fronts heteroclinic ones; both are found by shooting from an
// eigenvector-seeded perturbation of an equilibrium and bisecting the wave
// speed c on the side the trajectory exits.
//
#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "smcrd/ode.hpp"
#include "smcrd/singlecell.hpp"

namespace smcrd {

struct WaveState {
    double V = 0, W = 0, N = 0;
};

struct WaveEquilibrium {
    WaveState state;                                // W = 0
    Eigen::Matrix3d jacobian;
    std::array<std::complex<double>, 3> eigenvalues;
    Eigen::Matrix3cd eigenvectors;                  // columns match eigenvalues
    int unstable_dim = 0, stable_dim = 0;
    double cubic_residual = 0.0;  // worst scaled residual of the characteristic cubic
    double cell_residual = 0.0;   // max-norm of the reaction at (V, N)
    double c = 0.0;               // wave speed the linearization was built at
};

// Right-hand side; throws std::invalid_argument when c == 0 or D <= 0.
WaveState wave_rhs(const WaveState& s, double c, const ModelParams& p);

// Jacobian (rows: V', W', N' partials), its eigen-decomposition, and the
// verification against the characteristic cubic
// lambda^3 + P2 lambda^2 + P1 lambda + P0 with
// P2 = (gN D + c^2)/(c D), P1 = (gN + fV)/D, P0 = (fV gN - fN gV)/(c D).
WaveEquilibrium wave_jacobian(const Equilibrium& eq, double c, const ModelParams& p);

// Cubic coefficients alone (shared with tests and residual checks).
std::array<double, 3> wave_cubic_coeffs(const CellJacobian& j, double c, const ModelParams& p);

enum class ShootDirection { Forward, Backward };

struct ShootOptions {
    double seed_eps = 1e-6;
    double zeta_span = 5000.0;
    double shoot_tol = 1e-3;     // closure distance for an accepted connection
    double c_tol = 1e-6;         // bisection bracket width
    double v_min = -2.0, v_max = 1.5;
    double n_min = -0.5, n_max = 1.5;
    double w_abs = 300.0;        // the steep downstroke of a front passes |W| ~ 100
    OdeOptions ode{1e-10, 1e-12};
    double leave_radius = 0.05;  // distance that counts as having left the seed equilibrium
};

struct ShotRecord {
    double c = 0.0;
    double min_distance = 1e300;     // min Euclidean distance to the target after leaving
    WaveState state_at_min;
    WaveState final_state;
    int exit_side = 0;               // +1 / -1 for the two escape classes, 0 = no escape
    bool escaped = false;
    int seed_sign = 0;
    std::vector<std::pair<double, WaveState>> trajectory;  // (zeta, state)
};

// Integrate from eq_from.state +/- seed_eps * (unit eigenvector): forward
// along a real unstable eigenvector, backward (negated zeta) along a real
// stable one. Both seed signs are tried; the record of the sign coming closer
// to eq_to is returned. Throws std::invalid_argument when no real eigenvalue
// of the required kind exists.
ShotRecord shoot(const WaveEquilibrium& eq_from, const WaveEquilibrium& eq_to, double c,
                 const ModelParams& p, ShootDirection dir, const ShootOptions& opt = {});

enum class OrbitKind { Homoclinic, Heteroclinic };
const char* to_string(OrbitKind k);

struct TravellingWaveOrbit {
    double c = 0.0;
    std::vector<std::pair<double, WaveState>> trajectory;
    OrbitKind kind = OrbitKind::Homoclinic;
    WaveEquilibrium source, target;
    double closure_distance = 1e300;
};

class SearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scan c over the bracket, find a sign change of the exit side, and bisect to
// c_tol; falls back to golden-section on the minimum distance when the scan
// shows a distance minimum without a side flip. Throws SearchError (with the
// scan table in the message) when neither structure is present.
TravellingWaveOrbit find_wave_speed(const Equilibrium& eq_from, const Equilibrium& eq_to,
                                    const ModelParams& p, double c_min, double c_max,
                                    ShootDirection dir, const ShootOptions& opt = {});

}  // namespace smcrd
