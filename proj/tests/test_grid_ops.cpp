#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "r2ch/grid_ops.hpp"

using namespace r2ch;

namespace {

GridFn random_field(const GridSpec& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    GridFn f(g);
    for (int i = 0; i < g.M; ++i) f[i] = dist(rng);
    return f;
}

GridFn pointwise(const GridFn& a, const GridFn& b) {
    GridFn w(a.grid);
    for (int i = 0; i < a.size(); ++i) w[i] = a[i] * b[i];
    return w;
}

}  // namespace

TEST_CASE("centered difference by hand, wrap included", "[grid_ops]") {
    auto g = GridSpec::with_count(0.0, 4.0, 4);  // h = 1
    GridFn v(g, {0.0, 1.0, 0.0, -1.0});
    GridFn d = centered_diff(v);
    CHECK(d[0] == 1.0);  // (v_1 - v_3)/2 reaches across the seam
    CHECK(d[1] == 0.0);
    CHECK(d[2] == -1.0);
    CHECK(d[3] == 0.0);
}

TEST_CASE("second difference by hand", "[grid_ops]") {
    auto g = GridSpec::with_count(0.0, 4.0, 4);
    GridFn v(g, {0.0, 1.0, 0.0, -1.0});
    GridFn d = second_diff(v);
    CHECK(d[0] == 0.0);  // 1 - 0 + (-1)
    CHECK(d[1] == -2.0);
    CHECK(d[2] == 0.0);
    CHECK(d[3] == 2.0);
}

TEST_CASE("psi by hand against a constant second slot", "[grid_ops]") {
    auto g = GridSpec::with_count(0.0, 4.0, 4);
    GridFn u(g, {0.0, 1.0, 0.0, -1.0});
    GridFn ones(g, 1.0);
    // With v constant the first term drops and psi reduces to (1/3) * u'.
    GridFn w = psi(u, ones);
    CHECK(w[0] == Catch::Approx(1.0 / 3.0));
    CHECK(w[1] == 0.0);
    CHECK(w[2] == Catch::Approx(-1.0 / 3.0));
    CHECK(w[3] == 0.0);
}

TEST_CASE("inner product weights by the spacing", "[grid_ops]") {
    auto g = GridSpec::with_count(0.0, 2.0, 4);  // h = 0.5
    GridFn u(g, {1.0, 2.0, 3.0, 4.0});
    GridFn ones(g, 1.0);
    CHECK(inner(u, ones) == Catch::Approx(5.0));
    CHECK(inner(ones, u) == inner(u, ones));
}

TEST_CASE("norms on hand data", "[grid_ops]") {
    auto g = GridSpec::with_count(0.0, 4.0, 4);  // h = 1
    GridFn v(g, {3.0, 4.0, 0.0, 0.0});
    Norms n = norms(v);
    CHECK(n.l2 == Catch::Approx(5.0));
    CHECK(n.linf == 4.0);

    GridFn spike(g, {1.0, 0.0, 0.0, 0.0});
    CHECK(norms(spike).h1_semi == Catch::Approx(std::sqrt(2.0)));
    CHECK(norm_linf(spike) == 1.0);
}

TEST_CASE("half-grid gradient product matches the seminorm", "[grid_ops]") {
    std::mt19937 rng(42);
    auto g = GridSpec::with_count(-3.0, 6.0, 48);
    GridFn v = random_field(g, rng);
    GridFn w = random_field(g, rng);
    CHECK(inner_grad(v, v) == Catch::Approx(norms(v).h1_semi * norms(v).h1_semi));
    CHECK(inner_grad(v, w) == Catch::Approx(inner_grad(w, v)));
}

TEST_CASE("operator identities hold on random fields", "[grid_ops]") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> len(1.0, 20.0);
    for (int M : {8, 64, 1024}) {
        for (int trial = 0; trial < 200; ++trial) {
            auto g = GridSpec::with_count(-1.0, len(rng), M);
            GridFn u = random_field(g, rng);
            GridFn v = random_field(g, rng);
            Norms nu = norms(u), nv = norms(v);

            // Transport form is skew against its second argument.
            double d1 = std::abs(inner(psi(u, v), v));
            CHECK(d1 <= 1e-12 * (norms(psi(u, v)).l2 * nv.l2 + 1e-300));

            // Centered difference annihilates its own argument in the product.
            double d2 = std::abs(inner(centered_diff(u), u));
            CHECK(d2 <= 1e-12 * (norms(centered_diff(u)).l2 * nu.l2 + 1e-300));

            // Centered difference moves across the product with a sign flip.
            double d3 = std::abs(inner(centered_diff(u), v) + inner(u, centered_diff(v)));
            CHECK(d3 <= 1e-12 * (norms(centered_diff(u)).l2 * nv.l2 +
                                 nu.l2 * norms(centered_diff(v)).l2 + 1e-300));

            // Summation by parts for the second difference.
            double d4 = std::abs(inner(second_diff(u), v) + inner_grad(u, v));
            CHECK(d4 <= 1e-12 * (norms(second_diff(u)).l2 * nv.l2 +
                                 nu.h1_semi * nv.h1_semi + 1e-300));
        }
    }
}

TEST_CASE("psi is bilinear", "[grid_ops]") {
    std::mt19937 rng(99);
    auto g = GridSpec::with_count(0.0, 7.0, 32);
    GridFn u = random_field(g, rng);
    GridFn w = random_field(g, rng);
    GridFn v = random_field(g, rng);
    const double al = 0.7, be = -1.3;

    GridFn mix(g);
    for (int i = 0; i < g.M; ++i) mix[i] = al * u[i] + be * w[i];
    GridFn lhs = psi(mix, v);
    GridFn a = psi(u, v), b = psi(w, v);
    for (int i = 0; i < g.M; ++i)
        CHECK(lhs[i] == Catch::Approx(al * a[i] + be * b[i]).margin(1e-13));

    // Same in the second slot.
    for (int i = 0; i < g.M; ++i) mix[i] = al * v[i] + be * w[i];
    lhs = psi(u, mix);
    a = psi(u, v);
    b = psi(u, w);
    for (int i = 0; i < g.M; ++i)
        CHECK(lhs[i] == Catch::Approx(al * a[i] + be * b[i]).margin(1e-13));
}

TEST_CASE("sup norm embedding into the broken H1 norm", "[grid_ops]") {
    std::mt19937 rng(7);
    auto g = GridSpec::with_count(-2.5, 5.0, 64);
    for (int trial = 0; trial < 25; ++trial) {
        GridFn v = random_field(g, rng);
        Norms n = norms(v);
        for (double eps : {0.1, 1.0, 10.0}) {
            double bound = eps * n.h1_semi * n.h1_semi +
                           (1.0 / eps + 1.0 / g.L) * n.l2 * n.l2;
            CHECK(n.linf * n.linf <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("two-level product rule", "[grid_ops]") {
    // (dt u, mid(u) mid(v)) expands into a telescoping difference of weighted
    // norms plus two correction terms; both sides must agree to rounding.
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> step(0.01, 1.0);
    auto g = GridSpec::with_count(0.0, 3.0, 24);
    for (int trial = 0; trial < 50; ++trial) {
        GridFn u0 = random_field(g, rng), u1 = random_field(g, rng);
        GridFn v0 = random_field(g, rng), v1 = random_field(g, rng);
        const double tau = step(rng);

        GridFn du(g), umid(g), vmid(g), dv(g);
        for (int i = 0; i < g.M; ++i) {
            du[i] = (u1[i] - u0[i]) / tau;
            dv[i] = (v1[i] - v0[i]) / tau;
            umid[i] = 0.5 * (u0[i] + u1[i]);
            vmid[i] = 0.5 * (v0[i] + v1[i]);
        }
        double lhs = inner(du, pointwise(umid, vmid));

        GridFn diff(g), uprod(g);
        for (int i = 0; i < g.M; ++i) {
            diff[i] = u1[i] - u0[i];
            uprod[i] = u1[i] * u0[i];
        }
        double t1 = (inner(u1, pointwise(u1, v1)) - inner(u0, pointwise(u0, v0))) / (2.0 * tau);
        double t2 = -0.25 * inner(diff, pointwise(diff, dv));
        double t3 = -0.5 * inner(uprod, dv);
        double rhs = t1 + t2 + t3;

        double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + 1e-300;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("grid and operand validation", "[grid_ops]") {
    CHECK_THROWS_AS(GridSpec::with_count(0.0, 4.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::with_count(0.0, -1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::with_spacing(0.0, 4.0, 0.0), std::invalid_argument);

    // Spacing requests round to the nearest node count.
    auto g = GridSpec::with_spacing(0.0, 2.0, 0.3);
    CHECK(g.M == 7);
    CHECK(g.h == Catch::Approx(2.0 / 7.0));

    auto g8 = GridSpec::with_count(0.0, 4.0, 8);
    auto g16 = GridSpec::with_count(0.0, 4.0, 16);
    CHECK_THROWS_AS(inner(GridFn(g8), GridFn(g16)), std::invalid_argument);
    CHECK_THROWS_AS(GridFn(g8, {1.0, 2.0}), std::invalid_argument);

    // Node placement: storage index 0 sits one spacing inside the left edge.
    CHECK(g8.node(0) == Catch::Approx(0.5));
    CHECK(g8.node(7) == Catch::Approx(4.0));
    GridFn f(g8);
    for (int i = 0; i < 8; ++i) f[i] = i;
    CHECK(f.wrapped(-1) == 7.0);
    CHECK(f.wrapped(8) == 0.0);
}
