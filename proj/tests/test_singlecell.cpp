#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "oracles.hpp"
#include "smcrd/singlecell.hpp"

using namespace smcrd;

namespace {
constexpr double kThreeEqV1 = -0.2465;  // three-equilibrium regime
}

TEST_CASE("equilibria at stock parameters: one unstable focus") {
    ModelParams p;
    auto eqs = find_equilibria(p);
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].state.V == doctest::Approx(-0.25700144128980299).epsilon(1e-9));
    CHECK(eqs[0].state.N == doctest::Approx(0.21190481429377260).epsilon(1e-9));
    CHECK(eqs[0].stability == Stability::UnstableFocus);
    CHECK(eqs[0].residual < kNewtonTol);
    // the equilibrium set does not depend on psi (it only scales dN)
    ModelParams p2 = p;
    p2.psi = 0.3;
    auto eqs2 = find_equilibria(p2);
    REQUIRE(eqs2.size() == 1);
    CHECK(eqs2[0].state.V == doctest::Approx(eqs[0].state.V).epsilon(1e-10));
    CHECK(eqs2[0].stability == Stability::StableFocus);  // but stability does
}

TEST_CASE("equilibria: unique stable state at v1 = -0.325") {
    ModelParams p;
    p.v1 = -0.325;
    auto eqs = find_equilibria(p);
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].state.V == doctest::Approx(-0.23068624552484430).epsilon(1e-9));
    CHECK(eqs[0].is_stable());
}

TEST_CASE("equilibria: three states in the wave regime, saddle in the middle") {
    ModelParams p;
    p.v1 = kThreeEqV1;
    auto eqs = find_equilibria(p);
    REQUIRE(eqs.size() == 3);
    CHECK(eqs[0].state.V == doctest::Approx(-0.71489860159444140).epsilon(1e-9));
    CHECK(eqs[1].state.V == doctest::Approx(-0.65088505259251093).epsilon(1e-9));
    CHECK(eqs[2].state.V == doctest::Approx(-0.28993975829627366).epsilon(1e-9));
    CHECK(eqs[0].is_stable());
    CHECK(eqs[1].stability == Stability::Saddle);
    for (const auto& e : eqs) CHECK(e.residual < kNewtonTol);
}

TEST_CASE("integrate_cell holds an equilibrium and keeps N in its funnel") {
    ModelParams p;
    p.v1 = -0.325;
    auto eq = find_equilibria(p).at(0);
    auto tr = integrate_cell(eq.state, p, 200.0);
    for (const auto& y : tr.y) {
        CHECK(std::abs(y[0] - eq.state.V) < 1e-7);
        CHECK(std::abs(y[1] - eq.state.N) < 1e-7);
    }

    // N launched outside [0,1] stays within [min(N0,0), max(N0,1)]
    auto tr2 = integrate_cell({-0.4, 1.2}, p, 300.0);
    for (const auto& y : tr2.y) {
        CHECK(y[1] <= 1.2 + 1e-9);
        CHECK(y[1] >= -1e-9);
    }
    CHECK(tr2.back()[1] < 1.0);
}

TEST_CASE("stock parameters: trajectory settles onto the pacemaker cycle") {
    ModelParams p;
    auto tr = integrate_cell({-0.4, 0.3}, p, 500.0);
    double vmin = 1e300, vmax = -1e300;
    for (size_t i = 0; i < tr.size(); ++i) {
        if (tr.t[i] < 400.0) continue;  // trailing window only
        vmin = std::min(vmin, tr.y[i][0]);
        vmax = std::max(vmax, tr.y[i][0]);
    }
    // attractor pinned by a tight-tolerance reference run
    CHECK(vmin == doctest::Approx(-0.68973881).epsilon(2e-3));
    CHECK(vmax == doctest::Approx(-0.02952053).epsilon(2e-2));
}

TEST_CASE("measure_limit_cycle: none at a stable equilibrium") {
    ModelParams p;
    p.v1 = -0.325;
    auto eq = find_equilibria(p).at(0);
    CHECK(!measure_limit_cycle(p, {eq.state.V + 1e-3, eq.state.N}, 200.0, 400.0));
}

TEST_CASE("measure_limit_cycle: reference periods") {
    ModelParams p;
    auto m = measure_limit_cycle(p, {-0.4, 0.3}, 600.0, 900.0);
    REQUIRE(m.has_value());
    CHECK(m->period == doctest::Approx(28.55871245).epsilon(2e-4));

    ModelParams p2;
    p2.v1 = -0.265;
    auto m2 = measure_limit_cycle(p2, {-0.4, 0.3}, 600.0, 900.0);
    REQUIRE(m2.has_value());
    CHECK(m2->period == doctest::Approx(45.22143375).epsilon(2e-4));
    CHECK(m2->v_min < m2->v_max);
}

TEST_CASE("stability classification agrees with long-time integration") {
    ModelParams p;
    p.v1 = -0.325;
    auto stable = find_equilibria(p).at(0);
    REQUIRE(stable.is_stable());
    auto tr = integrate_cell({stable.state.V + 1e-3, stable.state.N}, p, 600.0);
    CHECK(std::hypot(tr.back()[0] - stable.state.V, tr.back()[1] - stable.state.N) < 1e-4);

    ModelParams q;  // stock: unstable focus
    auto unstable = find_equilibria(q).at(0);
    REQUIRE(!unstable.is_stable());
    auto tr2 = integrate_cell({unstable.state.V + 1e-3, unstable.state.N}, q, 600.0);
    double maxdist = 0;
    for (const auto& y : tr2.y)
        maxdist = std::max(maxdist,
                           std::hypot(y[0] - unstable.state.V, y[1] - unstable.state.N));
    CHECK(maxdist > 1e-2);
}

TEST_CASE("v1 scan: fold pair, Hopf before SNIC, period blow-up") {
    ModelParams p;
    auto scan = scan_bifurcations(p, "v1", -0.35, -0.20, 500);

    auto sns = scan.events_of(EventKind::SN);
    auto hbs = scan.events_of(EventKind::Hopf);
    auto snics = scan.events_of(EventKind::SNIC);
    REQUIRE(sns.size() == 2);
    REQUIRE(hbs.size() == 1);
    REQUIRE(snics.size() == 1);
    CHECK(hbs[0].param_value < snics[0].param_value);
    CHECK(snics[0].param_value == doctest::Approx(sns[0].param_value).epsilon(1e-6));

    // equilibrium count: 1 outside [SN1, SN2], 3 strictly inside
    const double sn1 = sns[0].param_value, sn2 = sns[1].param_value;
    std::map<double, int> counts;
    for (const auto& bp : scan.points) counts[bp.param_value]++;
    for (const auto& [v, cnt] : counts) {
        if (v < sn1 - 1e-4 || v > sn2 + 1e-4)
            CHECK(cnt == 1);
        else if (v > sn1 + 1e-4 && v < sn2 - 1e-4)
            CHECK(cnt == 3);
    }

    // Type I signature: the SNIC evidence holds a period beyond the threshold
    CHECK(snics[0].evidence.find("period") != std::string::npos);

    // Hopf crossing has a genuinely complex pair
    ModelParams ph = p;
    set_param(ph, "v1", hbs[0].param_value);
    bool found = false;
    for (const auto& e : find_equilibria(ph))
        if (std::abs(e.lambda1.imag()) > 1e-8 && std::abs(e.lambda1.real()) < 1e-3) found = true;
    CHECK(found);
}

TEST_CASE("v3 scan: two Hopf points with finite onset period (Type II)") {
    ModelParams p;
    auto scan = scan_bifurcations(p, "v3", -0.40, -0.02, 500);
    auto hbs = scan.events_of(EventKind::Hopf);
    REQUIRE(hbs.size() == 2);

    // onset period just inside the first Hopf is finite and small
    const double hb1 = hbs[0].param_value;
    double onset_period = 1e300;
    for (const auto& c : scan.cycles)
        if (c.param_value > hb1 && c.param_value < hb1 + 0.02)
            onset_period = std::min(onset_period, c.period);
    CHECK(onset_period < 100.0);
}

TEST_CASE("psi scan: cycle dies in a Hopf with a bistability window") {
    ModelParams p;
    p.v1 = kThreeEqV1;
    auto scan = scan_bifurcations(p, "psi", 0.05, 0.6, 500);
    auto hbs = scan.events_of(EventKind::Hopf);
    REQUIRE(hbs.size() == 1);
    REQUIRE(!scan.cycles.empty());
    const double cyc_lo = scan.cycles.front().param_value;
    const double cyc_hi = scan.cycles.back().param_value;
    CHECK(cyc_hi == doctest::Approx(hbs[0].param_value).epsilon(5e-3));

    // stable cycle coexists with the stable bottom equilibrium: bistable
    ModelParams q = p;
    set_param(q, "psi", 0.5 * (cyc_lo + cyc_hi));
    auto eqs = find_equilibria(q);
    CHECK(std::any_of(eqs.begin(), eqs.end(), [](const Equilibrium& e) { return e.is_stable(); }));

    // the low-psi end of the cycle branch is a cycle fold or a saddle
    // connection, not a Hopf: an SNC or homoclinic event is recorded there
    bool low_end_event = false;
    for (const auto& e : scan.events)
        if ((e.kind == EventKind::SNC || e.kind == EventKind::Homoclinic) &&
            std::abs(e.param_value - cyc_lo) < 0.02)
            low_end_event = true;
    CHECK(low_end_event);
}
