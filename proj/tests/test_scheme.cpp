#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "r2ch/experiments.hpp"
#include "r2ch/invariants.hpp"
#include "r2ch/scheme.hpp"

using namespace r2ch;

namespace {

State constant_state(const GridSpec& g, double u_val, double rho_val) {
    return State{GridFn(g, u_val), GridFn(g, rho_val), 0.0};
}

State smooth_state(const GridSpec& g) {
    GridFn u(g), rho(g);
    for (int j = 0; j < g.M; ++j) {
        double x = g.node(j);
        u[j] = 0.3 * std::sin(2.0 * M_PI * x / g.L) + 0.1;
        rho[j] = 1.0 + 0.2 * std::cos(2.0 * M_PI * x / g.L);
    }
    return State{std::move(u), std::move(rho), 0.0};
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double state_distance(const State& a, const State& b) {
    double m = 0.0;
    for (int j = 0; j < a.u.size(); ++j) {
        m = std::max(m, std::abs(a.u[j] - b.u[j]));
        m = std::max(m, std::abs(a.rho[j] - b.rho[j]));
    }
    return m;
}

}  // namespace

TEST_CASE("parameter validation", "[scheme]") {
    CHECK_THROWS_AS(PhysParams(0.0, 0.0, 0.0, 0.0), std::invalid_argument);   // sigma
    CHECK_THROWS_AS(PhysParams(0.0, 1.0, 0.0, 0.25), std::invalid_argument);  // omega cap
    CHECK_THROWS_AS(PhysParams(0.0, 1.0, 0.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(PhysParams(2.5, 1.0, 0.0, 0.2), std::invalid_argument);   // weight <= 0
    PhysParams p(1.0, 1.0, 1.0, 73e-6);
    CHECK(p.rho_weight() == Catch::Approx(1.0 - 2.0 * 73e-6));

    CHECK(TimeGrid::with_tau(10.0, 1.0 / 256.0).N == 2560);
    CHECK(TimeGrid::with_steps(1.0, 4).tau == 0.25);
    CHECK_THROWS_AS(TimeGrid::with_steps(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::with_steps(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::with_tau(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("linear stencil of one sweep, checked by hand", "[scheme]") {
    // Zero lagged velocity kills every nonlinear coefficient; a constant
    // lagged elevation leaves hand-sized couplings. h = 0.5, tau = 0.1.
    auto g = GridSpec::with_count(0.0, 8.0, 16);
    PhysParams p(0.3, 1.5, 0.7, 0.05);
    State prev = constant_state(g, 0.0, 1.0);
    CyclicBandSystem sys = assemble_picard_system(prev, prev, p, 0.1);

    REQUIRE(sys.n == 32);
    REQUIRE(sys.kl == 4);
    REQUIRE(sys.ku == 4);

    const double a = 1.0, b = 4.0, r2 = 20.0;
    const double crho = 1.0 - 2.0 * 0.05 * 0.3;
    const int ru = 2 * 5, rr = 2 * 5 + 1;  // node 5, interior either way

    CHECK(sys.at(ru, 0) == Catch::Approx(r2 * (1.0 + 2.0 * b)));
    CHECK(sys.at(ru, +2) == Catch::Approx(-r2 * b - 0.3 * a - 2.0 * 0.7 * a * b - 2.0 * 0.05 * a));
    CHECK(sys.at(ru, -2) == Catch::Approx(-r2 * b + 0.3 * a + 2.0 * 0.7 * a * b + 2.0 * 0.05 * a));
    CHECK(sys.at(ru, +4) == Catch::Approx(0.7 * a * b));
    CHECK(sys.at(ru, -4) == Catch::Approx(-0.7 * a * b));
    CHECK(sys.at(ru, +3) == Catch::Approx(crho * a));
    CHECK(sys.at(ru, -1) == Catch::Approx(-crho * a));
    CHECK(sys.rhs[ru] == 0.0);

    CHECK(sys.at(rr, 0) == Catch::Approx(r2));
    CHECK(sys.at(rr, +1) == Catch::Approx(a));
    CHECK(sys.at(rr, -3) == Catch::Approx(-a));
    CHECK(sys.rhs[rr] == Catch::Approx(r2));

    CHECK_THROWS_AS(assemble_picard_system(prev, prev, p, 0.0), std::invalid_argument);
}

TEST_CASE("rest and uniform columns are fixed points", "[scheme]") {
    auto g = GridSpec::with_count(-2.0, 4.0, 16);
    SolverCfg cfg;

    PicardResult zero = picard_step(constant_state(g, 0.0, 0.0), PhysParams(0.0, 1.0, 0.0, 0.0),
                                    0.05, cfg);
    CHECK(zero.iters == 1);
    for (int j = 0; j < g.M; ++j) {
        CHECK(zero.next.u[j] == 0.0);
        CHECK(zero.next.rho[j] == 0.0);
    }

    // A still column of any height is steady for every parameter choice.
    PhysParams p(0.5, 1.0, 0.2, 0.1);
    State column = constant_state(g, 0.0, 2.0);
    PicardResult r = picard_step(column, p, 0.05, cfg);
    CHECK(state_distance(r.next, column) <= 1e-13);
}

TEST_CASE("converged sweep satisfies the nonlinear midpoint equations", "[scheme]") {
    auto g = GridSpec::with_count(-4.0, 8.0, 32);
    PhysParams p(0.5, 1.2, 0.3, 0.08);
    State prev = smooth_state(g);
    const double tau = 0.05;
    SolverCfg cfg;

    PicardResult r = picard_step(prev, p, tau, cfg);
    GridFn u_mid(g), rho_mid(g);
    for (int j = 0; j < g.M; ++j) {
        u_mid[j] = 0.5 * (prev.u[j] + r.next.u[j]);
        rho_mid[j] = 0.5 * (prev.rho[j] + r.next.rho[j]);
    }
    double res = max_abs(midpoint_residual(prev, u_mid, rho_mid, p, tau));
    CHECK(res <= 1e-9 * (2.0 / tau));
    CHECK(r.iters >= 2);
    CHECK(r.next.t == Catch::Approx(tau));
}

TEST_CASE("analytic Jacobian matches central differences", "[scheme]") {
    auto g = GridSpec::with_count(-3.0, 6.0, 12);
    PhysParams p(0.5, 1.2, 0.3, 0.08);
    State prev = smooth_state(g);
    const double tau = 0.05;

    // Evaluate away from the previous level so no term sits at zero.
    GridFn u_mid = prev.u, rho_mid = prev.rho;
    for (int j = 0; j < g.M; ++j) {
        u_mid[j] += 0.05 * std::cos(3.0 * j);
        rho_mid[j] += 0.04 * std::sin(2.0 * j + 1.0);
    }

    const int n = 2 * g.M;
    std::vector<double> jac = midpoint_jacobian(prev, u_mid, rho_mid, p, tau).to_dense();

    for (int c = 0; c < n; ++c) {
        GridFn up = u_mid, um = u_mid, rp = rho_mid, rm = rho_mid;
        double base = (c % 2 == 0) ? u_mid[c / 2] : rho_mid[c / 2];
        double eps = 1e-7 * std::max(1.0, std::abs(base));
        if (c % 2 == 0) {
            up[c / 2] += eps;
            um[c / 2] -= eps;
        } else {
            rp[c / 2] += eps;
            rm[c / 2] -= eps;
        }
        std::vector<double> fp = midpoint_residual(prev, up, rp, p, tau);
        std::vector<double> fm = midpoint_residual(prev, um, rm, p, tau);
        for (int r = 0; r < n; ++r) {
            double fd = (fp[static_cast<size_t>(r)] - fm[static_cast<size_t>(r)]) / (2.0 * eps);
            double an = jac[static_cast<size_t>(r) * n + static_cast<size_t>(c)];
            CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST_CASE("fixed-point and Newton steps agree", "[scheme]") {
    const CasePreset* cs = find_case("exA51");
    REQUIRE(cs != nullptr);
    auto g = GridSpec::with_spacing(cs->x_left, cs->L, cs->default_h);
    State init = initial_state(*cs, g);
    SolverCfg cfg;
    const double tau = 1.0 / 256.0;

    PicardResult pr = picard_step(init, cs->params, tau, cfg);
    State ns = newton_step(init, cs->params, tau, cfg);
    CHECK(state_distance(pr.next, ns) <= 1e-10);

    // And the Newton answer satisfies the midpoint equations tightly.
    GridFn u_mid(g), rho_mid(g);
    for (int j = 0; j < g.M; ++j) {
        u_mid[j] = 0.5 * (init.u[j] + ns.u[j]);
        rho_mid[j] = 0.5 * (init.rho[j] + ns.rho[j]);
    }
    CHECK(max_abs(midpoint_residual(init, u_mid, rho_mid, cs->params, tau)) <=
          1e-9 * (2.0 / tau));
}

TEST_CASE("stepping backward undoes stepping forward", "[scheme]") {
    const CasePreset* cs = find_case("exA51");
    REQUIRE(cs != nullptr);
    auto g = GridSpec::with_spacing(cs->x_left, cs->L, cs->default_h);
    State init = initial_state(*cs, g);
    SolverCfg cfg;
    const double tau = 1.0 / 128.0;

    State s = init;
    for (int k = 0; k < 5; ++k) s = picard_step(s, cs->params, tau, cfg).next;
    for (int k = 0; k < 5; ++k) s = picard_step(s, cs->params, -tau, cfg).next;
    CHECK(state_distance(s, init) <= 1e-8);
}

TEST_CASE("each step conserves the three functionals", "[scheme]") {
    const CasePreset* cs = find_case("exD51");
    REQUIRE(cs != nullptr);
    auto g = GridSpec::with_spacing(cs->x_left, cs->L, 0.2);
    State s = initial_state(*cs, g);
    SolverCfg cfg;

    InvariantSample before = sample_invariants(s, cs->params);
    for (int k = 0; k < 5; ++k) {
        s = picard_step(s, cs->params, 0.01, cfg).next;
        InvariantSample now = sample_invariants(s, cs->params);
        CHECK(std::abs(now.E - before.E) <= 1e-10 * std::max(1.0, std::abs(before.E)));
        CHECK(std::abs(now.H - before.H) <= 1e-10 * std::max(1.0, std::abs(before.H)));
        CHECK(std::abs(now.I - before.I) <= 1e-10 * std::max(1.0, std::abs(before.I)));
    }
}

TEST_CASE("solvability margin guard", "[scheme]") {
    auto g = GridSpec::with_count(0.0, 8.0, 8);  // h = 1
    GridFn u(g, 1.0);
    auto warn = uniqueness_guard(u, 2.0);
    REQUIRE(warn.has_value());
    CHECK(warn->ratio == Catch::Approx(1.0));
    CHECK_FALSE(uniqueness_guard(u, 1.9).has_value());
    CHECK_FALSE(uniqueness_guard(GridFn(g), 100.0).has_value());
}

TEST_CASE("iteration budget failures carry diagnostics", "[scheme]") {
    auto g = GridSpec::with_count(-4.0, 8.0, 32);
    State jump = init_dam_break(1.0, g);
    PhysParams p(0.0, 1.0, 0.0, 0.0);
    SolverCfg strangled;
    strangled.max_picard_iters = 1;

    try {
        picard_step(jump, p, 0.1, strangled);
        FAIL("one sweep cannot converge from a dam break");
    } catch (const StepError& e) {
        CHECK(e.last_increment > 0.0);
    }

    try {
        run(jump, p, TimeGrid::with_steps(0.3, 3), strangled);
        FAIL("the run must abort on the first step");
    } catch (const RunError& e) {
        CHECK(e.step_index == 1);
    }
}

TEST_CASE("run bookkeeping: levels, snapshots, observers, time stamps", "[scheme]") {
    auto g = GridSpec::with_count(-4.0, 8.0, 24);
    State init = init_dam_break(0.5, g);
    PhysParams p(0.0, 1.0, 0.0, 0.0);
    SolverCfg cfg;
    TimeGrid tg = TimeGrid::with_steps(0.1, 5);

    RunOptions opts;
    opts.record_history = true;
    opts.snapshot_times = {0.04};
    std::vector<int> seen;
    opts.observers.push_back([&seen](const StepRecord& rec) {
        seen.push_back(rec.step);
        CHECK(rec.picard_iters >= 1);
    });

    Trajectory traj = run(init, p, tg, cfg, opts);
    REQUIRE(traj.invariants.size() == 6u);
    REQUIRE(traj.history.size() == 6u);
    for (int k = 0; k <= 5; ++k) {
        CHECK(traj.invariants[static_cast<size_t>(k)].t == k * tg.tau);
        CHECK(traj.history[static_cast<size_t>(k)].t == k * tg.tau);
    }
    REQUIRE(traj.snapshots.size() == 1u);
    CHECK(traj.snapshots[0].first == 0.04);
    CHECK(traj.snapshots[0].second.t == Catch::Approx(0.04));
    CHECK(seen == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(traj.max_picard_iters >= 1);
    CHECK(traj.total_picard_iters >= 5);
    CHECK(traj.final_state.t == 0.1);
}

TEST_CASE("solvability warnings surface in the trajectory", "[scheme]") {
    auto g = GridSpec::with_count(-2.0, 4.0, 20);  // h = 0.2
    State fast = constant_state(g, 2.5, 1.0);      // steady, so u stays at 2.5
    PhysParams p(0.0, 1.0, 0.0, 0.0);
    SolverCfg cfg;
    TimeGrid tg = TimeGrid::with_steps(0.6, 3);    // tau = 0.2, ratio = 1.25

    Trajectory traj = run(fast, p, tg, cfg);
    REQUIRE_FALSE(traj.warnings.empty());
    CHECK(traj.warnings[0].ratio == Catch::Approx(1.25));

    RunOptions quiet;
    quiet.warn_uniqueness = false;
    CHECK(run(fast, p, tg, cfg, quiet).warnings.empty());
}
