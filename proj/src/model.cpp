#include "smcrd/model.hpp"

#include <cmath>

namespace smcrd {

double m_inf(double V, const ModelParams& p) {
    return 0.5 * (1.0 + std::tanh((V - p.v1) / p.v2));
}

double n_inf(double V, const ModelParams& p) {
    return 0.5 * (1.0 + std::tanh((V - p.v3) / p.v4));
}

double lambda_rate(double V, const ModelParams& p) {
    return p.psi * std::cosh((V - p.v3) / (2.0 * p.v4));
}

Rates reaction(const CellState& s, const ModelParams& p) {
    Rates r;
    r.dV = -p.gL * (s.V - p.vL) - p.gK * s.N * (s.V - p.vK)
           - p.gCa * m_inf(s.V, p) * (s.V - p.vCa);
    r.dN = lambda_rate(s.V, p) * (n_inf(s.V, p) - s.N);
    return r;
}

CellJacobian jacobian_cell(const CellState& s, const ModelParams& p) {
    const double th1 = std::tanh((s.V - p.v1) / p.v2);
    const double th3 = std::tanh((s.V - p.v3) / p.v4);
    const double ch = std::cosh((s.V - p.v3) / (2.0 * p.v4));
    const double sh = std::sinh((s.V - p.v3) / (2.0 * p.v4));

    CellJacobian j;
    j.fV = -p.gL - p.gK * s.N
           - p.gCa / (2.0 * p.v2) * (1.0 - th1 * th1) * (s.V - p.vCa)
           - 0.5 * p.gCa * (1.0 + th1);
    j.fN = -p.gK * (s.V - p.vK);
    j.gV = p.psi / (2.0 * p.v4)
           * ((0.5 * (1.0 + th3) - s.N) * sh + ch * (1.0 - th3 * th3));
    j.gN = -p.psi * ch;
    return j;
}

}  // namespace smcrd
