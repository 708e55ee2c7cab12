#pragma once
//
// Linear stability of a spatially homogeneous steady state under diffusion.
// Perturbations ~ exp(lambda t + i k X) of the linearised system give
//
//   lambda^2 - T(k) lambda + Delta(k) = 0,
//   T(k)     = -k^2 D + fV + gN,
//   Delta(k) = -k^2 D gN + fV gN - gV fN.
//
// Since gN < 0 always (psi > 0), a state stable without diffusion has
// T(k) < 0 and Delta(k) > 0 for every k, so no Turing instability exists.
//
#include <complex>
#include <string>
#include <vector>

#include "smcrd/singlecell.hpp"

namespace smcrd {

struct DispersionResult {
    std::vector<double> k;
    std::vector<double> trace, det;
    std::vector<std::complex<double>> lambda_plus, lambda_minus;

    double max_re_lambda() const;
};

// Evaluate T, Delta and both growth rates on a uniform k grid including k=0.
DispersionResult dispersion(const Equilibrium& eq, const ModelParams& p, double k_max,
                            int n_k);

// Wavenumbers admitted by a no-flux domain of half-length L (k = m pi / (2L)),
// as an optional evaluation grid.
std::vector<double> no_flux_wavenumbers(double L, int m_max);

enum class TuringVerdict { NoTuring, TuringPossible };

struct TuringCertificate {
    TuringVerdict verdict = TuringVerdict::NoTuring;
    double trace0 = 0.0;      // fV + gN at the state
    double det0 = 0.0;        // fV gN - fN gV
    double gN = 0.0;          // always <= -psi
    double max_re_lambda = 0.0;
    double k_at_max = 0.0;
    std::string summary;
};

// Requires eq stable without diffusion (trace0 < 0 and det0 > 0); throws
// std::invalid_argument otherwise. Checks the analytic sign argument and
// cross-checks max Re lambda on a sampled k grid.
TuringCertificate turing_test(const Equilibrium& eq, const ModelParams& p,
                              double k_max = 1000.0, int n_k = 20001);

}  // namespace smcrd
