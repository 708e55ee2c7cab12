#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "smcrd/pde.hpp"

using namespace smcrd;

TEST_CASE("grid construction") {
    Grid g = Grid::make(1.0, 1000);
    CHECK(g.n_points == 2001);
    CHECK(g.dx() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(g.x(0) == doctest::Approx(-1.0));
    CHECK(g.x(g.n_points - 1) == doctest::Approx(1.0));
    CHECK_THROWS(Grid::make(-1.0, 100));
}

TEST_CASE("semidiscretize: equilibrium field is stationary") {
    ModelParams p;
    p.v1 = -0.325;
    auto eq = find_equilibria(p).at(0);
    Grid g = Grid::make(0.5, 200);
    InitialCondition ic;
    ic.A0 = 0.0;
    ic.base = eq.state;
    Field f = make_initial(ic, g);
    Field d = semidiscretize(f, p, g);
    for (int i = 0; i < g.n_points; ++i) {
        CHECK(std::abs(d.V[i]) < 1e-9);
        CHECK(std::abs(d.N[i]) < 1e-9);
    }
}

TEST_CASE("semidiscretize: a uniform field reduces to the pointwise reaction") {
    ModelParams p;
    Grid g = Grid::make(0.5, 200);
    Field f;
    f.V.assign(g.n_points, -0.42);
    f.N.assign(g.n_points, 0.37);
    Field d = semidiscretize(f, p, g);
    const Rates r = reaction({-0.42, 0.37}, p);
    for (int i = 0; i < g.n_points; ++i) {
        CHECK(d.V[i] == doctest::Approx(r.dV).epsilon(1e-13));
        CHECK(d.N[i] == doctest::Approx(r.dN).epsilon(1e-13));
    }
}

TEST_CASE("discrete Laplacian: second-order convergence on a cosine mode") {
    // V(x) = cos(pi x / (2L)) has Laplacian -(pi/(2L))^2 V and satisfies the
    // no-flux condition at x = +-L, so the ghost-node ends converge too.
    ModelParams p;
    p.gL = p.gK = p.gCa = 0.0;  // isolate the diffusion term
    const double L = 1.0;
    double prev_err = 0;
    std::vector<double> errs;
    for (int npu : {50, 100, 200}) {
        Grid g = Grid::make(L, npu);
        Field f;
        f.V.resize(g.n_points);
        f.N.assign(g.n_points, 0.2);
        for (int i = 0; i < g.n_points; ++i) f.V[i] = std::cos(M_PI * g.x(i) / (2.0 * L));
        Field d = semidiscretize(f, p, g);
        const double kk = std::pow(M_PI / (2.0 * L), 2);
        double err = 0;
        for (int i = 0; i < g.n_points; ++i)
            err = std::max(err, std::abs(d.V[i] - (-p.D * kk * f.V[i])));
        errs.push_back(err);
        prev_err = err;
    }
    (void)prev_err;
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("simulate: zero perturbation stays at the homogeneous state") {
    ModelParams p;
    p.v1 = -0.325;
    auto eq = find_equilibria(p).at(0);
    Grid g = Grid::make(0.5, 100);
    InitialCondition ic;
    ic.A0 = 0.0;
    ic.base = eq.state;
    auto snaps = simulate(ic, p, g, 50.0, {});
    for (const auto& f : snaps)
        for (int i = 0; i < g.n_points; ++i) CHECK(std::abs(f.V[i] - eq.state.V) < 1e-5);
}

TEST_CASE("simulate: uniform data stays uniform (no-flux Laplacian kills constants)") {
    ModelParams p;
    p.v1 = -0.325;
    auto eq = find_equilibria(p).at(0);
    Grid g = Grid::make(1.0, 200);
    InitialCondition ic;
    ic.A0 = 0.0;
    ic.base = {eq.state.V + 0.1, eq.state.N};
    auto snaps = simulate(ic, p, g, 100.0, {});
    for (const auto& f : snaps) {
        const auto [lo, hi] = std::minmax_element(f.V.begin(), f.V.end());
        CHECK(*hi - *lo < 1e-8);
    }
}

TEST_CASE("simulate: N stays in [0,1] up to solver slack when started inside") {
    ModelParams p;
    p.v1 = -0.2465;
    p.psi = 0.1;
    auto eqs = find_equilibria(p);
    Grid g = Grid::make(1.0, 250);
    InitialCondition ic;
    ic.base = eqs.front().state;
    auto snaps = simulate(ic, p, g, 120.0, {});
    for (const auto& f : snaps)
        for (double nv : f.N) {
            CHECK(nv >= -1e-9);
            CHECK(nv <= 1.0 + 1e-9);
        }
}

TEST_CASE("simulate: even initial data stays even") {
    ModelParams p;
    p.v1 = -0.2465;
    p.psi = 0.1;
    auto eqs = find_equilibria(p);
    Grid g = Grid::make(1.0, 250);
    InitialCondition ic;
    ic.base = eqs.front().state;
    auto snaps = simulate(ic, p, g, 120.0, {});
    double worst = 0;
    for (const auto& f : snaps)
        for (int i = 0; i < g.n_points; ++i)
            worst = std::max(worst, std::abs(f.V[i] - f.V[g.n_points - 1 - i]));
    CHECK(worst < 1e-4);  // 100 x rtol
}

TEST_CASE("simulate: rescaling (D, L) -> (4D, 2L) maps fields by x -> 2x") {
    ModelParams p;
    p.v1 = -0.325;
    auto eq = find_equilibria(p).at(0);

    InitialCondition ic;
    ic.base = eq.state;
    ic.sigma = 0.1;
    Grid g1 = Grid::make(1.0, 400);
    auto s1 = simulate(ic, p, g1, 50.0, {});

    ModelParams p2 = p;
    p2.D = 4.0 * p.D;
    InitialCondition ic2 = ic;
    ic2.sigma = 0.2;
    Grid g2 = Grid::make(2.0, 200);  // same node count, nodes at 2x
    auto s2 = simulate(ic2, p2, g2, 50.0, {});

    REQUIRE(g1.n_points == g2.n_points);
    double worst = 0;
    for (size_t k = 0; k < s1.size(); ++k)
        for (int i = 0; i < g1.n_points; ++i)
            worst = std::max(worst, std::abs(s1[k].V[i] - s2[k].V[i]));
    CHECK(worst < 1e-9);  // identical discrete systems
}

TEST_CASE("simulate: second-order spatial convergence on a smooth decay run") {
    ModelParams p;
    p.v1 = -0.325;
    auto eq = find_equilibria(p).at(0);
    InitialCondition ic;
    ic.base = eq.state;
    SimOptions so;
    so.rtol = 1e-9;
    so.atol = 1e-12;
    so.save_every = 20.0;

    auto run = [&](int npu) {
        Grid g = Grid::make(1.0, npu);
        return simulate(ic, p, g, 20.0, so).back();
    };
    Field ref = run(1000);
    auto err_vs_ref = [&](const Field& f, int stride_ref, int stride_f) {
        double e = 0;
        for (size_t i = 0; i * stride_ref < ref.V.size(); ++i)
            e = std::max(e, std::abs(f.V[i * stride_f] - ref.V[i * stride_ref]));
        return e;
    };
    const double e125 = err_vs_ref(run(125), 8, 1);
    const double e250 = err_vs_ref(run(250), 4, 1);
    const double e500 = err_vs_ref(run(500), 2, 1);
    CHECK(e125 / e250 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e250 / e500 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("estimate_wave_speed: synthetic rigid translation") {
    Grid g = Grid::make(1.0, 500);
    std::vector<Field> snaps;
    const double c = 0.005;
    for (int k = 0; k <= 120; ++k) {
        Field f;
        f.time = k * 1.0;
        f.V.resize(g.n_points);
        f.N.assign(g.n_points, 0.0);
        for (int i = 0; i < g.n_points; ++i) {
            const double z = g.x(i) - 0.2 - c * f.time;
            f.V[i] = 1.0 / (1.0 + std::exp(z / 0.02));  // front moving right
        }
        snaps.push_back(std::move(f));
    }
    auto est = estimate_wave_speed(snaps, g, 0.5);
    CHECK(est.speed == doctest::Approx(c).epsilon(2e-2 * 1e-2));
    CHECK(std::abs(est.speed - c) < 1e-4);
    CHECK(est.r2 > 0.99999);

    CHECK_THROWS_AS(estimate_wave_speed(snaps, g, 5.0), SpeedEstimationError);
}

TEST_CASE("classify_pattern: synthetic archetypes") {
    Grid g = Grid::make(1.0, 200);
    auto field_of = [&](double t, auto&& fn) {
        Field f;
        f.time = t;
        f.V.resize(g.n_points);
        f.N.assign(g.n_points, 0.1);
        for (int i = 0; i < g.n_points; ++i) f.V[i] = fn(g.x(i), t);
        return f;
    };
    auto series = [&](auto&& fn) {
        std::vector<Field> s;
        for (int k = 0; k <= 200; ++k) s.push_back(field_of(k, fn));
        return s;
    };

    auto steady = series([](double, double) { return -0.3; });
    CHECK(classify_pattern(steady, g) == PatternClass::HomogeneousSteady);

    auto osc = series([](double, double t) { return -0.3 + 0.2 * std::sin(0.3 * t); });
    CHECK(classify_pattern(osc, g) == PatternClass::HomogeneousOscillation);

    auto front = series([](double x, double t) {
        return -0.7 + 0.4 / (1.0 + std::exp((x - 0.1 - 0.004 * t) / 0.02));
    });
    CHECK(classify_pattern(front, g) == PatternClass::TravellingFront);

    auto pulse = series([](double x, double t) {
        const double z = x - 0.1 - 0.004 * t;
        return -0.7 + 0.6 * std::exp(-z * z / (2.0 * 0.03 * 0.03));
    });
    CHECK(classify_pattern(pulse, g) == PatternClass::TravellingPulse);

    auto chaos = series([](double x, double t) {
        return 0.4 * std::sin(12.7 * x + 0.9 * t) * std::cos(5.3 * x - 1.7 * t) +
               0.3 * std::sin(3.1 * x * x + 0.31 * t);
    });
    CHECK(classify_pattern(chaos, g) == PatternClass::Complex);
}

TEST_CASE("simulate input validation") {
    ModelParams p;
    Grid g = Grid::make(0.5, 50);
    InitialCondition ic;
    ic.base = {-0.4, 0.1};
    CHECK_THROWS_AS(simulate(ic, p, g, -1.0, {}), std::invalid_argument);
    InitialCondition bad;
    bad.sigma = -0.1;
    bad.base = {-0.4, 0.1};
    CHECK_THROWS_AS(make_initial(bad, g), std::invalid_argument);
}
