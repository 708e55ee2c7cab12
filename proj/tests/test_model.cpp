#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smcrd/model.hpp"

using namespace smcrd;

// Reference values below were computed with 50-digit arithmetic,
// independently of this library.

TEST_CASE("gating functions at anchor points") {
    ModelParams p;
    CHECK(m_inf(p.v1, p) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(n_inf(p.v3, p) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m_inf(p.v1 + p.v2, p) ==
          doctest::Approx(0.88079707797788244).epsilon(1e-14));
    CHECK(n_inf(p.v3 + p.v4, p) ==
          doctest::Approx(0.88079707797788244).epsilon(1e-14));
    CHECK(lambda_rate(p.v3, p) == doctest::Approx(p.psi).epsilon(1e-14));
    CHECK(lambda_rate(p.v3 + 2.0 * p.v4, p) ==
          doctest::Approx(0.25692292569673809).epsilon(1e-14));

    // saturation
    CHECK(m_inf(50.0, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m_inf(-50.0, p) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gating functions: range and monotonicity") {
    // strictness holds in double precision on the physical state range; far
    // outside it tanh saturates to exactly +-1
    ModelParams p;
    double prev_m = -1, prev_n = -1;
    for (int i = 0; i <= 250; ++i) {
        const double V = -1.5 + i * 0.01;
        const double m = m_inf(V, p), nn = n_inf(V, p);
        CHECK(m > 0.0);
        CHECK(m < 1.0);
        CHECK(nn > 0.0);
        CHECK(nn < 1.0);
        CHECK(m > prev_m);
        CHECK(nn > prev_n);
        prev_m = m;
        prev_n = nn;
        CHECK(lambda_rate(V, p) >= p.psi);
    }
    // lambda is even about v3
    for (double a : {0.05, 0.3, 1.0})
        CHECK(lambda_rate(p.v3 + a, p) ==
              doctest::Approx(lambda_rate(p.v3 - a, p)).epsilon(1e-14));
}

TEST_CASE("reaction term identities and anchor value") {
    ModelParams p;
    for (double V : {-1.0, -0.5, -0.2, 0.0, 0.4}) {
        const Rates r = reaction({V, n_inf(V, p)}, p);
        CHECK(std::abs(r.dN) < 1e-15);  // dN vanishes on the N-nullcline
    }
    // with N = 0 the K+ conductance drops out of dV
    ModelParams p2 = p;
    p2.gK = 17.0;
    CHECK(reaction({-0.3, 0.0}, p).dV ==
          doctest::Approx(reaction({-0.3, 0.0}, p2).dV).epsilon(1e-15));

    const Rates r0 = reaction({0.0, 0.5}, p);
    CHECK(r0.dV == doctest::Approx(-0.35241351435309396).epsilon(1e-14));
    CHECK(r0.dN == doctest::Approx(0.057369635624674865).epsilon(1e-14));

    for (double V = -10.0; V <= 10.0; V += 0.5) {
        const Rates r = reaction({V, 0.3}, p);
        CHECK(std::isfinite(r.dV));
        CHECK(std::isfinite(r.dN));
    }
}

TEST_CASE("jacobian closed forms at anchor points") {
    ModelParams p;
    CHECK(jacobian_cell({p.vK, 0.2}, p).fN == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(jacobian_cell({p.v3, 0.2}, p).gN == doctest::Approx(-p.psi).epsilon(1e-14));

    const CellJacobian j = jacobian_cell({0.0, 0.5}, p);
    CHECK(j.fV == doctest::Approx(-0.78962554524881251).epsilon(1e-14));
    CHECK(j.fN == doctest::Approx(-1.125).epsilon(1e-15));
    CHECK(j.gV == doctest::Approx(0.34741218639012368).epsilon(1e-14));
    CHECK(j.gN == doctest::Approx(-0.17871821046411004).epsilon(1e-14));
}

TEST_CASE("jacobian matches finite differences of the reaction") {
    ModelParams p;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double V = oracle::uniform(-1.5, 1.0);
        const double N = oracle::uniform(0.0, 1.0);
        const CellJacobian j = jacobian_cell({V, N}, p);
        const double fV = oracle::derivative([&](double x) { return reaction({x, N}, p).dV; }, V);
        const double fN = oracle::derivative([&](double x) { return reaction({V, x}, p).dV; }, N);
        const double gV = oracle::derivative([&](double x) { return reaction({x, N}, p).dN; }, V);
        const double gN = oracle::derivative([&](double x) { return reaction({V, x}, p).dN; }, N);
        auto rel = [](double a, double b) {
            return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
        };
        worst = std::max({worst, rel(j.fV, fV), rel(j.fN, fN), rel(j.gV, gV), rel(j.gN, gN)});
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("gN stays at or below -psi") {
    ModelParams p;
    for (int k = 0; k < 200; ++k) {
        const double V = oracle::uniform(-3.0, 2.0);
        const double N = oracle::uniform(-0.5, 1.5);
        CHECK(jacobian_cell({V, N}, p).gN <= -p.psi + 1e-15);
    }
}
