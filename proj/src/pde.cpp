//
// Semidiscretization and time integration. The spatial operator is the
// standard second-order stencil with ghost-node reflection at the ends; the
// time stepper is a Rosenbrock W-method of order 2 with a third-order error
// estimate (the classic one-Jacobian-per-step scheme with d = 1/(2+sqrt(2)),
// e32 = 6+sqrt(2)), L-stable, using a banded LU factorization (kl = ku = 2
// with V and N interleaved) via LAPACK.
//
#include "smcrd/pde.hpp"

#include <lapacke.h>

#include <cmath>
#include <cstdio>
#include <cstring>

namespace smcrd {

Grid Grid::make(double L, int n_per_unit) {
    if (!(L > 0) || n_per_unit < 1) throw std::invalid_argument("Grid: need L > 0, n_per_unit >= 1");
    Grid g;
    g.L = L;
    g.n_per_unit = n_per_unit;
    g.n_points = int(std::lround(2.0 * L * n_per_unit)) + 1;
    if (g.n_points < 3) throw std::invalid_argument("Grid: fewer than 3 points");
    return g;
}

std::vector<double> Grid::coords() const {
    std::vector<double> x(n_points);
    for (int i = 0; i < n_points; ++i) x[i] = this->x(i);
    return x;
}

Field make_initial(const InitialCondition& ic, const Grid& g) {
    Field f;
    f.time = 0.0;
    f.V.resize(g.n_points);
    f.N.resize(g.n_points);
    switch (ic.kind) {
        case InitialCondition::Kind::Gaussian:
            if (!(ic.sigma > 0)) throw std::invalid_argument("Gaussian IC: sigma must be > 0");
            for (int i = 0; i < g.n_points; ++i) {
                const double x = g.x(i);
                f.V[i] = ic.base.V + ic.A0 * std::exp(-x * x / (2.0 * ic.sigma * ic.sigma));
                f.N[i] = ic.base.N;
            }
            break;
        case InitialCondition::Kind::Linear:
            for (int i = 0; i < g.n_points; ++i) {
                f.V[i] = ic.base.V + ic.eps * g.x(i);
                f.N[i] = ic.base.N;
            }
            break;
        case InitialCondition::Kind::Custom:
            if (int(ic.v_custom.size()) != g.n_points || int(ic.n_custom.size()) != g.n_points)
                throw std::invalid_argument("Custom IC: tabulated arrays must match the grid");
            f.V = ic.v_custom;
            f.N = ic.n_custom;
            break;
    }
    return f;
}

namespace {

// Reaction terms and all four partials at one node, sharing the
// transcendental evaluations. Matches model.cpp to rounding.
inline void node_rates(double V, double N, const ModelParams& p, double& f, double& g,
                       double& fV, double& fN, double& gV, double& gN) {
    const double a1 = (V - p.v1) / p.v2;
    const double th1 = std::tanh(a1);
    const double minf = 0.5 * (1.0 + th1);
    const double a3 = (V - p.v3) / p.v4;
    const double eh = std::exp(0.5 * a3);
    const double em = std::expm1(a3);
    const double ch = 0.5 * (eh + 1.0 / eh);  // cosh(a3/2)
    const double sh = 0.5 * em / eh;          // sinh(a3/2)
    const double th3 = (a3 > 19.0) ? 1.0
                       : (a3 < -19.0)
                           ? -1.0
                           : em * (em + 2.0) / (em * em + 2.0 * em + 2.0);  // tanh(a3)
    const double ninf = 0.5 * (1.0 + th3);
    const double lam = p.psi * ch;
    f = -p.gL * (V - p.vL) - p.gK * N * (V - p.vK) - p.gCa * minf * (V - p.vCa);
    g = lam * (ninf - N);
    fV = -p.gL - p.gK * N - p.gCa / (2.0 * p.v2) * (1.0 - th1 * th1) * (V - p.vCa)
         - 0.5 * p.gCa * (1.0 + th1);
    fN = -p.gK * (V - p.vK);
    gV = p.psi / (2.0 * p.v4) * ((ninf - N) * sh + ch * (1.0 - th3 * th3));
    gN = -lam;
}

// Interleaved semidiscrete system: y = [V0, N0, V1, N1, ...].
class MolSystem {
public:
    MolSystem(const ModelParams& p, const Grid& g)
        : p_(p), n_(g.n_points), dd_(p.D / (g.dx() * g.dx())) {}

    int dim() const { return 2 * n_; }

    void rhs(const double* y, double* out) const {
        for (int i = 0; i < n_; ++i) {
            const double V = y[2 * i], N = y[2 * i + 1];
            double f, g, fV, fN, gV, gN;
            node_rates(V, N, p_, f, g, fV, fN, gV, gN);
            double lap;
            if (i == 0)
                lap = 2.0 * (y[2] - V);
            else if (i == n_ - 1)
                lap = 2.0 * (y[2 * (n_ - 2)] - V);
            else
                lap = y[2 * (i - 1)] - 2.0 * V + y[2 * (i + 1)];
            out[2 * i] = dd_ * lap + f;
            out[2 * i + 1] = g;
        }
    }

    // W = I - h d J in LAPACK banded storage (kl = ku = 2, ldab = 7,
    // column-major). Also returns the rhs in `fy` to share the node pass.
    void assemble_w(const double* y, double hd, double* ab, double* fy) const {
        const int ldab = 7, kl = 2, ku = 2;
        std::memset(ab, 0, sizeof(double) * size_t(ldab) * size_t(dim()));
        auto put = [&](int i, int j, double v) { ab[size_t(j) * ldab + (kl + ku + i - j)] = v; };
        for (int i = 0; i < n_; ++i) {
            const double V = y[2 * i], N = y[2 * i + 1];
            double f, g, fV, fN, gV, gN;
            node_rates(V, N, p_, f, g, fV, fN, gV, gN);
            double lap;
            const int r = 2 * i;
            if (i == 0) {
                lap = 2.0 * (y[2] - V);
                put(r, r, 1.0 - hd * (fV - 2.0 * dd_));
                put(r, r + 2, -hd * 2.0 * dd_);
            } else if (i == n_ - 1) {
                lap = 2.0 * (y[2 * (n_ - 2)] - V);
                put(r, r, 1.0 - hd * (fV - 2.0 * dd_));
                put(r, r - 2, -hd * 2.0 * dd_);
            } else {
                lap = y[2 * (i - 1)] - 2.0 * V + y[2 * (i + 1)];
                put(r, r, 1.0 - hd * (fV - 2.0 * dd_));
                put(r, r - 2, -hd * dd_);
                put(r, r + 2, -hd * dd_);
            }
            put(r, r + 1, -hd * fN);
            put(r + 1, r, -hd * gV);
            put(r + 1, r + 1, 1.0 - hd * gN);
            fy[r] = dd_ * lap + f;
            fy[r + 1] = g;
        }
    }

private:
    ModelParams p_;
    int n_;
    double dd_;
};

struct RosenbrockStepper {
    explicit RosenbrockStepper(const MolSystem& sys) : sys(sys), n(sys.dim()) {
        ab.resize(7 * size_t(n));
        ipiv.resize(n);
        f0.resize(n);
        f1.resize(n);
        f2.resize(n);
        k1.resize(n);
        k2.resize(n);
        k3.resize(n);
        ytmp.resize(n);
    }

    const MolSystem& sys;
    int n;
    std::vector<double> ab, f0, f1, f2, k1, k2, k3, ytmp;
    std::vector<lapack_int> ipiv;

    // One attempted step from y (modified in place on acceptance).
    // Returns the scaled error norm, or a negative value on factorization
    // failure / non-finite results.
    double try_step(std::vector<double>& y, double h, double rtol, double atol) {
        static const double d = 1.0 / (2.0 + std::sqrt(2.0));
        static const double e32 = 6.0 + std::sqrt(2.0);

        sys.assemble_w(y.data(), h * d, ab.data(), f0.data());
        lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, 2, 2, ab.data(), 7, ipiv.data());
        if (info != 0) return -1.0;
        auto solve = [&](std::vector<double>& x) {
            return LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, 2, 2, 1, ab.data(), 7, ipiv.data(),
                                  x.data(), n) == 0;
        };

        k1 = f0;
        if (!solve(k1)) return -1.0;
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
        sys.rhs(ytmp.data(), f1.data());
        for (int i = 0; i < n; ++i) k2[i] = f1[i] - k1[i];
        if (!solve(k2)) return -1.0;
        for (int i = 0; i < n; ++i) k2[i] += k1[i];
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * k2[i];
        sys.rhs(ytmp.data(), f2.data());
        for (int i = 0; i < n; ++i)
            k3[i] = f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]);
        if (!solve(k3)) return -1.0;

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            const double e = (h / 6.0) * (k1[i] - 2.0 * k2[i] + k3[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ytmp[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err)) return -1.0;
        if (err <= 1.0) y = ytmp;  // ytmp holds y + h k2
        return err;
    }
};

void check_finite(const std::vector<double>& y, double t) {
    for (size_t i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i])) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "non-finite %s at node %zu",
                          (i % 2 == 0) ? "V" : "N", i / 2);
            throw IntegrationError(buf, t);
        }
}

}  // namespace

Field semidiscretize(const Field& f, const ModelParams& p, const Grid& g) {
    if (int(f.V.size()) != g.n_points || int(f.N.size()) != g.n_points)
        throw std::invalid_argument("semidiscretize: field does not conform to grid");
    MolSystem sys(p, g);
    std::vector<double> y(size_t(2) * g.n_points), dy(size_t(2) * g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
        y[2 * i] = f.V[i];
        y[2 * i + 1] = f.N[i];
    }
    sys.rhs(y.data(), dy.data());
    Field out;
    out.time = f.time;
    out.V.resize(g.n_points);
    out.N.resize(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
        out.V[i] = dy[2 * i];
        out.N[i] = dy[2 * i + 1];
    }
    return out;
}

std::vector<Field> simulate(const InitialCondition& ic, const ModelParams& p, const Grid& g,
                            double t_end, const SimOptions& opt) {
    if (!(t_end > 0) || !(opt.save_every > 0))
        throw std::invalid_argument("simulate: t_end and save_every must be > 0");

    Field f0 = make_initial(ic, g);
    MolSystem sys(p, g);
    RosenbrockStepper step(sys);

    const int n = sys.dim();
    std::vector<double> y(n);
    for (int i = 0; i < g.n_points; ++i) {
        y[2 * i] = f0.V[i];
        y[2 * i + 1] = f0.N[i];
    }

    std::vector<double> save_times;
    for (double ts = opt.save_every; ts < t_end - 1e-12; ts += opt.save_every)
        save_times.push_back(ts);
    save_times.push_back(t_end);

    std::vector<Field> snaps;
    snaps.reserve(save_times.size() + 1);
    snaps.push_back(f0);

    auto snapshot = [&](double t) {
        Field f;
        f.time = t;
        f.V.resize(g.n_points);
        f.N.resize(g.n_points);
        for (int i = 0; i < g.n_points; ++i) {
            f.V[i] = y[2 * i];
            f.N[i] = y[2 * i + 1];
        }
        snaps.push_back(std::move(f));
    };

    double t = 0.0;
    double h = 1e-4;
    int consecutive_failures = 0;
    for (double t_next : save_times) {
        while (t < t_next - 1e-12 * std::max(1.0, t_next)) {
            const double hs = std::min(h, t_next - t);
            if (hs < 1e-14 * std::max(1.0, t))
                throw IntegrationError("stepper underflow", t);
            const double err = step.try_step(y, hs, opt.rtol, opt.atol);
            if (err < 0.0) {
                if (++consecutive_failures > 25)
                    throw IntegrationError("repeated factorization/step failures", t);
                h = hs * 0.25;
                continue;
            }
            static const bool trace = std::getenv("SMCRD_TRACE") != nullptr;
            if (trace)
                std::fprintf(stderr, "t=%.6g hs=%.3g err=%.3g y0=(%.6f,%.6f)\n", t, hs, err,
                             y[0], y[1]);
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -1.0 / 3.0);
            fac = std::min(5.0, std::max(0.2, fac));
            if (err <= 1.0) {
                t += hs;
                consecutive_failures = 0;
                check_finite(y, t);
                // keep the unclipped step size when this step was shortened
                // only to land on a snapshot time
                if (hs >= h) h = hs * fac;
            } else {
                if (++consecutive_failures > 200)
                    throw IntegrationError("step control failed to converge", t);
                h = hs * fac;
            }
        }
        snapshot(t_next);
    }
    return snaps;
}

const char* to_string(PatternClass c) {
    switch (c) {
        case PatternClass::HomogeneousSteady: return "HomogeneousSteady";
        case PatternClass::HomogeneousOscillation: return "HomogeneousOscillation";
        case PatternClass::TravellingPulse: return "TravellingPulse";
        case PatternClass::TravellingFront: return "TravellingFront";
        case PatternClass::Complex: return "Complex";
    }
    return "?";
}

}  // namespace smcrd
