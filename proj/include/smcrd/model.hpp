#pragma once
//
// Reaction terms of the membrane model and their closed-form partial
// derivatives.
//
//   dV/dt = f(V,N) = -gL (V - vL) - gK N (V - vK) - gCa m_inf(V) (V - vCa)
//   dN/dt = g(V,N) = lambda(V) (n_inf(V) - N)
//
// with m_inf, n_inf the usual tanh steady-state activations and
// lambda(V) = psi cosh((V - v3)/(2 v4)).
//
#include "smcrd/params.hpp"

namespace smcrd {

double m_inf(double V, const ModelParams& p);
double n_inf(double V, const ModelParams& p);
double lambda_rate(double V, const ModelParams& p);

struct Rates {
    double dV = 0.0;
    double dN = 0.0;
};

Rates reaction(const CellState& s, const ModelParams& p);

// The four partials of (f, g) with respect to (V, N).
struct CellJacobian {
    double fV = 0.0, fN = 0.0;
    double gV = 0.0, gN = 0.0;
    double trace() const { return fV + gN; }
    double det() const { return fV * gN - fN * gV; }
};

CellJacobian jacobian_cell(const CellState& s, const ModelParams& p);

}  // namespace smcrd
