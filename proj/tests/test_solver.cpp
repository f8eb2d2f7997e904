#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qdirac/errors.hpp"
#include "qdirac/qcore.hpp"
#include "qdirac/qtrig.hpp"
#include "qdirac/solver.hpp"
#include "support/generators.hpp"

using namespace qdirac;

namespace {

SolutionAtLambda wrap_spinor(const Problem& pb, double lambda, const Spinor& s) {
    return detail::assemble_solution(pb, lambda, s.y1.values(), s.y2.values(),
                                     s.y2.ext_value().value(),
                                     SolveMethod::Recursion, {});
}

double sup_scale(const Spinor& s) {
    double m = 1.0;
    for (double v : s.y1.values()) m = std::max(m, std::fabs(v));
    for (double v : s.y2.values()) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace

TEST_CASE("boundary rows must be nontrivial") {
    CHECK_THROWS_AS(validate_boundary({0.0, 0.0, 1.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_boundary({1.0, 0.0, 0.0, 0.0}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate_boundary({1.0, 0.0, 0.0, 2.0}));
}

TEST_CASE("free solutions at lambda = 0") {
    auto lat = make_lattice(0.5, 1.0, 32);
    QTrigContext ctx(0.5);
    auto [s1, s2] = free_solutions(lat, ctx, 0.0);
    for (int n = 0; n <= 32; ++n) {
        CHECK(s1.y1.value(n) == 1.0);
        CHECK(s1.y2.value(n) == 0.0);
        CHECK(s2.y1.value(n) == 0.0);
        CHECK(s2.y2.value(n) == 1.0);
    }
}

TEST_CASE("free solutions satisfy the free system") {
    auto lat = make_lattice(0.5, 1.0, 64);
    QTrigContext ctx(0.5);
    Problem pb = zero_potential_problem(lat, {0.0, 1.0, 1.0, 0.0});
    auto [s1, s2] = free_solutions(lat, ctx, 3.0);
    CHECK(wrap_spinor(pb, 3.0, s1).residual <= 1e-11);
    CHECK(wrap_spinor(pb, 3.0, s2).residual <= 1e-11);
}

TEST_CASE("Wronskian of the free pair is one at every node") {
    for (double q : {0.5, 0.7}) {
        auto lat = make_lattice(q, 1.0, 64);
        QTrigContext ctx(q);
        for (double lam : {0.5, 2.0, 8.0}) {
            auto [s1, s2] = free_solutions(lat, ctx, lam);
            for (int n = 0; n <= 64; ++n)
                CHECK(std::fabs(wronskian(s1, s2, n) - 1.0) <= 1e-11);
        }
    }
}

TEST_CASE("Wronskian antisymmetry is exact") {
    auto lat = make_lattice(0.5, 1.0, 16);
    QTrigContext ctx(0.5);
    auto [s1, s2] = free_solutions(lat, ctx, 1.7);
    for (int n : {0, 1, 9}) {
        CHECK(wronskian(s1, s1, n) == 0.0);
        CHECK(wronskian(s2, s1, n) == -wronskian(s1, s2, n));
    }
}

TEST_CASE("propagate: constant solution at lambda = 0") {
    auto lat = make_lattice(0.5, 1.0, 64);
    Problem pb = zero_potential_problem(lat, {-0.75, 2.0, 1.0, 0.0});
    auto sol = propagate(pb, 0.0);
    for (int n = 0; n <= 64; ++n) {
        CHECK(sol.phi.y1.value(n) == 2.0);
        CHECK(sol.phi.y2.value(n) == 0.75);
    }
    CHECK(sol.phi2_ext == 0.75);
    CHECK(sol.residual == 0.0);
}

TEST_CASE("propagate reproduces the free solution") {
    auto lat = make_lattice(0.5, 1.0, 64);
    QTrigContext ctx(0.5);
    Problem pb = zero_potential_problem(lat, {0.0, 1.0, 1.0, 0.0});
    auto sol = propagate(pb, 2.0);
    auto [s1, s2] = free_solutions(lat, ctx, 2.0);
    for (int n = 0; n <= 64; ++n) {
        CHECK(sol.phi.y1.value(n) ==
              doctest::Approx(s1.y1.value(n)).epsilon(1e-10));
        CHECK(sol.phi.y2.value(n) ==
              doctest::Approx(s1.y2.value(n)).epsilon(1e-10));
    }
    CHECK(sol.phi2_ext ==
          doctest::Approx(s1.y2.ext_value().value()).epsilon(1e-10));
}

TEST_CASE("spectral shift: constant potentials cancel against lambda") {
    // dyadic constants keep the subtraction (p - lambda) bit-identical
    auto lat = make_lattice(0.5, 1.0, 64);
    const double c = 0.25;
    auto shifted = sample(lat, [&](double) { return c; }, c);
    Problem pb_shift(lat, shifted, shifted, {0.0, 1.0, 1.0, 0.0});
    Problem pb_zero = zero_potential_problem(lat, {0.0, 1.0, 1.0, 0.0});
    for (double lam : {0.0, 1.0, 2.5}) {
        auto a = propagate(pb_shift, lam + c);
        auto b = propagate(pb_zero, lam);
        for (int n = 0; n <= 64; ++n) {
            CHECK(a.phi.y1.value(n) == b.phi.y1.value(n));
            CHECK(a.phi.y2.value(n) == b.phi.y2.value(n));
        }
        CHECK(a.phi2_ext == b.phi2_ext);
    }
}

TEST_CASE("propagate is linear in the initial data") {
    auto lat = make_lattice(0.5, 1.0, 64);
    std::mt19937 rng(31);
    LatticeFn p = qdirac_test::random_table(lat, rng, 1.0);
    LatticeFn r = qdirac_test::random_table(lat, rng, 1.0);
    Problem base1(lat, p, r, {0.0, 1.0, 1.0, 0.0});  // IC (1, 0)
    Problem base2(lat, p, r, {1.0, 0.0, 1.0, 0.0});  // IC (0, -1)
    std::uniform_real_distribution<double> ks(-2.0, 2.0);
    for (int trial = 0; trial < 8; ++trial) {
        const double k11 = ks(rng), k12 = ks(rng) + 2.5;
        const double lam = ks(rng);
        Problem pb(lat, p, r, {k11, k12, 1.0, 0.0});
        auto s = propagate(pb, lam);
        auto e1 = propagate(base1, lam);
        auto e2 = propagate(base2, lam);
        double worst = 0.0, scale = sup_scale(s.phi);
        for (int n = 0; n <= 64; ++n) {
            worst = std::max(worst, std::fabs(s.phi.y1.value(n) -
                                              (k12 * e1.phi.y1.value(n) +
                                               k11 * e2.phi.y1.value(n))));
            worst = std::max(worst, std::fabs(s.phi.y2.value(n) -
                                              (k12 * e1.phi.y2.value(n) +
                                               k11 * e2.phi.y2.value(n))));
        }
        CHECK(worst <= 1e-12 * scale);
    }
}

TEST_CASE("successive approximation: zero potentials converge in one sweep") {
    auto lat = make_lattice(0.5, 1.0, 64);
    QTrigContext ctx(0.5);
    Problem pb = zero_potential_problem(lat, {-1.5, 2.0, 1.0, 0.0});
    const double lam = 1.3;
    auto sol = successive_approx(pb, ctx, lam, 1e-12, 50);
    CHECK(sol.iterations == 1);
    CHECK(sol.last_change == 0.0);
    const double sq = std::sqrt(0.5);
    for (int n : {0, 5, 40}) {
        const double x = lat->node(n);
        CHECK(sol.phi.y1.value(n) ==
              doctest::Approx(2.0 * q_cos(ctx, lam * x) +
                              1.5 * q_sin(ctx, lam * x))
                  .epsilon(1e-14));
        CHECK(sol.phi.y2.value(n) ==
              doctest::Approx(-2.0 * sq * q_sin(ctx, lam * sq * x) +
                              1.5 * q_cos(ctx, lam * sq * x))
                  .epsilon(1e-14));
    }
}

TEST_CASE("recursion and integral equations agree") {
    auto lat = make_lattice(0.5, 1.0, 64);
    QTrigContext ctx(0.5);
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> lams(-5.0, 5.0);
    for (int trial = 0; trial < 6; ++trial) {
        LatticeFn p = qdirac_test::random_table(lat, rng, 1.0);
        LatticeFn r = qdirac_test::random_table(lat, rng, 1.0);
        Problem pb(lat, p, r, {0.0, 1.0, 1.0, 0.0});
        const double lam = lams(rng);
        auto sa = successive_approx(pb, ctx, lam, 1e-12, 400);
        auto pr = propagate(pb, lam);
        const double scale = sup_scale(pr.phi);
        for (int n = 0; n <= 64; ++n) {
            CHECK(std::fabs(sa.phi.y1.value(n) - pr.phi.y1.value(n)) <=
                  1e-9 * scale);
            CHECK(std::fabs(sa.phi.y2.value(n) - pr.phi.y2.value(n)) <=
                  1e-9 * scale);
        }
        CHECK(sa.residual <= 10.0 * 1e-12);  // defect <= 10 * tol
    }
}

TEST_CASE("small potentials contract in four sweeps") {
    auto lat = make_lattice(0.5, 1.0, 64);
    QTrigContext ctx(0.5);
    auto tiny = sample(lat, [](double) { return 1e-3; }, 1e-3);
    Problem pb(lat, tiny, tiny, {0.0, 1.0, 1.0, 0.0});
    for (double lam : {0.5, 1.0, 3.0}) {
        auto sol = successive_approx(pb, ctx, lam, 1e-12, 50);
        CHECK(sol.iterations <= 4);
    }
}

TEST_CASE("successive approximation reports non-convergence") {
    auto lat = make_lattice(0.5, 1.0, 64);
    QTrigContext ctx(0.5);
    auto big = sample(lat, [](double) { return 1.0; }, 1.0);
    Problem pb(lat, big, big, {0.0, 1.0, 1.0, 0.0});
    CHECK_THROWS_AS(successive_approx(pb, ctx, 2.0, 1e-13, 1), NumericError);
}

TEST_CASE("system defect rejects perturbed solutions") {
    auto lat = make_lattice(0.5, 1.0, 64);
    Problem pb = zero_potential_problem(lat, {0.0, 1.0, 1.0, 0.0});
    auto sol = propagate(pb, 2.0);
    CHECK(sol.residual <= 1e-12);

    auto values = sol.phi.y1.values();
    values[5] += 0.1;
    auto bad = detail::assemble_solution(pb, 2.0, values, sol.phi.y2.values(),
                                         sol.phi2_ext, SolveMethod::Recursion,
                                         {});
    CHECK(bad.residual > 0.01);
}

TEST_CASE("Lagrange identity holds node-wise") {
    auto lat = make_lattice(0.5, 1.0, 64);
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> lams(-5.0, 5.0);
    LatticeFn p = qdirac_test::random_table(lat, rng, 1.0);
    LatticeFn r = qdirac_test::random_table(lat, rng, 1.0);
    Problem pb(lat, p, r, {0.5, 1.0, 1.0, 0.25});
    for (int trial = 0; trial < 5; ++trial) {
        const double l1 = lams(rng), l2 = lams(rng);
        auto sy = propagate(pb, l1);
        auto sz = propagate(pb, l2);
        std::vector<double> bracket(static_cast<std::size_t>(lat->depth) + 1);
        for (int n = 0; n <= lat->depth; ++n) {
            const double z2 = (n == 0) ? sz.phi2_ext : sz.phi.y2.value(n - 1);
            const double y2 = (n == 0) ? sy.phi2_ext : sy.phi.y2.value(n - 1);
            bracket[static_cast<std::size_t>(n)] =
                sy.phi.y1.value(n) * z2 - y2 * sz.phi.y1.value(n);
        }
        LatticeFn bfn(lat, std::move(bracket));
        for (int n = 0; n <= lat->depth - 1; ++n) {
            const double lhs = q_diff(bfn, n);
            const double rhs =
                (l1 - l2) * (sy.phi.y1.value(n) * sz.phi.y1.value(n) +
                             sy.phi.y2.value(n) * sz.phi.y2.value(n));
            // residual on the local quotient scale t_n (1-q)
            CHECK(std::fabs(lhs - rhs) * lat->node(n) * 0.5 <= 1e-10);
        }
    }
}

TEST_CASE("problem validation") {
    auto lat = make_lattice(0.5, 1.0, 8);
    auto other = make_lattice(0.5, 1.0, 9);
    auto zero_on = [](const QLatticePtr& l) {
        return sample(l, [](double) { return 0.0; }, 0.0);
    };
    CHECK_THROWS_AS(
        Problem(lat, zero_on(other), zero_on(lat), {0.0, 1.0, 1.0, 0.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(propagate(Problem(make_lattice(0.5, 1.0, 1),
                                      zero_on(make_lattice(0.5, 1.0, 1)),
                                      zero_on(make_lattice(0.5, 1.0, 1)),
                                      {0.0, 1.0, 1.0, 0.0}),
                              1.0),
                    std::invalid_argument);
}
