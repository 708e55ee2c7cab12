#include "smcrd/turing.hpp"

#include <cmath>
#include <cstdio>

namespace smcrd {

double DispersionResult::max_re_lambda() const {
    double m = -1e300;
    for (size_t i = 0; i < k.size(); ++i)
        m = std::max(m, std::max(lambda_plus[i].real(), lambda_minus[i].real()));
    return m;
}

DispersionResult dispersion(const Equilibrium& eq, const ModelParams& p, double k_max,
                            int n_k) {
    if (n_k < 2 || !(k_max > 0)) throw std::invalid_argument("dispersion: need n_k >= 2, k_max > 0");
    const CellJacobian j = eq.jac;
    DispersionResult r;
    r.k.resize(n_k);
    r.trace.resize(n_k);
    r.det.resize(n_k);
    r.lambda_plus.resize(n_k);
    r.lambda_minus.resize(n_k);
    for (int i = 0; i < n_k; ++i) {
        const double k = k_max * i / double(n_k - 1);
        const double T = -k * k * p.D + j.fV + j.gN;
        const double Dlt = -k * k * p.D * j.gN + j.fV * j.gN - j.gV * j.fN;
        const std::complex<double> s = std::sqrt(std::complex<double>(T * T - 4.0 * Dlt, 0.0));
        r.k[i] = k;
        r.trace[i] = T;
        r.det[i] = Dlt;
        r.lambda_plus[i] = 0.5 * (T + s);
        r.lambda_minus[i] = 0.5 * (T - s);
    }
    return r;
}

std::vector<double> no_flux_wavenumbers(double L, int m_max) {
    std::vector<double> ks;
    ks.reserve(size_t(m_max) + 1);
    for (int m = 0; m <= m_max; ++m) ks.push_back(m * M_PI / (2.0 * L));
    return ks;
}

TuringCertificate turing_test(const Equilibrium& eq, const ModelParams& p, double k_max,
                              int n_k) {
    const CellJacobian j = eq.jac;
    TuringCertificate c;
    c.trace0 = j.trace();
    c.det0 = j.det();
    c.gN = j.gN;
    if (!(c.trace0 < 0.0 && c.det0 > 0.0))
        throw std::invalid_argument(
            "turing_test: state is not stable without diffusion (trace >= 0 or det <= 0)");

    // gN < 0 makes T(k) strictly decreasing and Delta(k) strictly increasing
    // in k^2, so both stability conditions only improve with k. The sampled
    // grid is a numerical cross-check; a positive growth rate here means a bug.
    DispersionResult d = dispersion(eq, p, k_max, n_k);
    c.max_re_lambda = -1e300;
    for (size_t i = 0; i < d.k.size(); ++i) {
        const double re = std::max(d.lambda_plus[i].real(), d.lambda_minus[i].real());
        if (re > c.max_re_lambda) {
            c.max_re_lambda = re;
            c.k_at_max = d.k[i];
        }
    }
    c.verdict = (c.max_re_lambda < 0.0) ? TuringVerdict::NoTuring : TuringVerdict::TuringPossible;

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "fV+gN = %.6g < 0, fV gN - fN gV = %.6g > 0, gN = %.6g <= -psi = %.6g; "
                  "max Re lambda over k in [0, %g] is %.6g at k = %.4g",
                  c.trace0, c.det0, c.gN, -p.psi, k_max, c.max_re_lambda, c.k_at_max);
    c.summary = buf;
    return c;
}

}  // namespace smcrd
