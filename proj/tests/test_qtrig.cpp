#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "qdirac/errors.hpp"
#include "qdirac/qtrig.hpp"
#include "support/qseries_oracle.hpp"

using namespace qdirac;

TEST_CASE("pochhammer cache") {
    QTrigContext ctx(0.5);
    CHECK(q_pochhammer(ctx, 0) == 1.0);
    CHECK(q_pochhammer(ctx, 1) == 0.5);
    CHECK(q_pochhammer(ctx, 2) == 0.375);
    double prev = 1.0;
    for (int n = 1; n <= 80; ++n) {
        const double cur = q_pochhammer(ctx, n);
        // strictly decreasing until 1 - q^n rounds to 1
        if (n <= 50)
            CHECK(cur < prev);
        else
            CHECK(cur <= prev);
        CHECK(cur > 0.28);  // (q;q)_inf = 0.28878... at q = 1/2
        prev = cur;
    }
    CHECK_THROWS_AS(q_pochhammer(ctx, -1), std::domain_error);
}

TEST_CASE("context validation") {
    CHECK_THROWS_AS(QTrigContext(1.0), std::domain_error);
    CHECK_THROWS_AS(QTrigContext(0.5, 40), std::domain_error);
    CHECK_THROWS_AS(QTrigContext(0.5, 64, 53), std::domain_error);
    QTrigContext plain = QTrigContext::binary64_only(0.5);
    CHECK_FALSE(plain.escalation_enabled());
}

TEST_CASE("pinned values at z = 1, q = 0.5") {
    // 60-digit reference, computed by direct series summation:
    // cos(1;0.5) = 0.679261252800131822675571086537269784550520135296255328833573
    // sin(1;0.5) = 0.906393862861614055041986872640944751723320200972896998004216
    QTrigContext ctx(0.5);
    CHECK(q_cos(ctx, 1.0) ==
          doctest::Approx(0.67926125280013183).epsilon(1e-14));
    CHECK(q_sin(ctx, 1.0) ==
          doctest::Approx(0.90639386286161405).epsilon(1e-14));
    CHECK(q_cos(ctx, 0.0) == 1.0);
    CHECK(q_sin(ctx, 0.0) == 0.0);
}

TEST_CASE("series evaluation tracks the reference across scales") {
    // below the escalation threshold the double path may spend up to the
    // configured margin on cancellation, so the guarantee is ~1e-12 here
    for (double q : {0.3, 0.5, 0.7}) {
        QTrigContext ctx(q);
        for (double z : {0.1, 0.9, 3.7, 17.0, 240.0, 3100.0}) {
            const double c = q_cos(ctx, z);
            const double cr = qdirac_test::qcos_ref(z, q, 1024);
            CHECK(c == doctest::Approx(cr).epsilon(1e-12));
            const double s = q_sin(ctx, z);
            const double sr = qdirac_test::qsin_ref(z, q, 1024);
            CHECK(s == doctest::Approx(sr).epsilon(1e-12));
        }
    }
}

TEST_CASE("evenness and oddness are exact") {
    QTrigContext ctx(0.42);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> zs(0.0, 50.0);
    for (int i = 0; i < 50; ++i) {
        const double z = zs(rng);
        CHECK(q_cos(ctx, -z) == q_cos(ctx, z));
        CHECK(q_sin(ctx, -z) == -q_sin(ctx, z));
    }
}

TEST_CASE("escalation engages above the threshold and reports bits") {
    QTrigContext ctx(0.5);
    auto small = q_cos_eval(ctx, 10.0);
    CHECK(small.bits_used == 53);
    CHECK_FALSE(small.precision_loss);

    auto large = q_cos_eval(ctx, 2000.0);
    CHECK(large.bits_used == 256);
    CHECK_FALSE(large.precision_loss);
}

TEST_CASE("binary64-only path loses precision near a deep zero") {
    // cancellation is total near zeros of the function, where the result
    // sinks far below the largest series term
    QTrigContext ctx(0.5);
    const double z8 = trig_zeros(ctx, TrigKind::Cos, 8).zeros.back();
    QTrigContext plain = QTrigContext::binary64_only(0.5);
    CHECK(q_cos_eval(plain, z8).precision_loss);
    CHECK_FALSE(q_cos_eval(ctx, z8).precision_loss);
}

TEST_CASE("growth envelope") {
    QTrigContext ctx(0.5);
    CHECK(growth_envelope(ctx, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(growth_envelope(ctx, 4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(growth_envelope(ctx, 0.0), std::domain_error);
    CHECK_THROWS_AS(growth_envelope(ctx, -1.0), std::domain_error);
}

TEST_CASE("envelope bounds the real-line values on the dyadic grid") {
    // observed supremum of max(|cos|,|sin|)/envelope over r = 2^k is 0.748
    QTrigContext ctx(0.5);
    double worst = 0.0;
    for (int k = 2; k <= 20; ++k) {
        const double r = std::pow(2.0, k);
        const double env = growth_envelope(ctx, r);
        const double ratio =
            std::max(std::fabs(q_cos(ctx, r)), std::fabs(q_sin(ctx, r))) / env;
        worst = std::max(worst, ratio);
    }
    CHECK(worst <= 1.0);
}

TEST_CASE("zero table shape and backward error") {
    QTrigContext ctx(0.5);
    ZeroTable t = trig_zeros(ctx, TrigKind::Sin, 9);
    REQUIRE(t.zeros.size() == 9);
    CHECK(t.zeros.front() > 0.0);  // positive zeros only
    for (std::size_t i = 1; i < t.zeros.size(); ++i)
        CHECK(t.zeros[i] > t.zeros[i - 1]);
    for (std::size_t i = 0; i < t.zeros.size(); ++i)
        CHECK(t.residuals[i] <= 8.0 * t.refinement_tol * t.zeros[i]);
    CHECK_THROWS_AS(trig_zeros(ctx, TrigKind::Cos, 0), std::domain_error);
}

TEST_CASE("zeros match the reference series zeros") {
    for (double q : {0.3, 0.7}) {
        QTrigContext ctx(q);
        ZeroTable t = trig_zeros(ctx, TrigKind::Cos, 6);
        auto ref = qdirac_test::qtrig_zeros_ref(0, 6, q);
        for (int m = 0; m < 6; ++m)
            CHECK(t.zeros[static_cast<std::size_t>(m)] ==
                  doctest::Approx(ref[static_cast<std::size_t>(m)])
                      .epsilon(1e-11));
    }
}

TEST_CASE("asymptotic zero law at m = 8") {
    // |x_m (1-q) q^{m-1/2} - 1| <= C q^m with C fitted once; observed
    // deviations at m = 8 sit below 1e-12 for q = 0.5
    QTrigContext ctx(0.5);
    ZeroTable cz = trig_zeros(ctx, TrigKind::Cos, 8);
    ZeroTable sz = trig_zeros(ctx, TrigKind::Sin, 8);
    const double C = 0.01;
    const double devc = std::fabs(cz.zeros[7] * 0.5 * std::pow(0.5, 7.5) - 1.0);
    const double devs = std::fabs(sz.zeros[7] * 0.5 * std::pow(0.5, 8.0) - 1.0);
    CHECK(devc <= C * std::pow(0.5, 8));
    CHECK(devs <= C * std::pow(0.5, 8));
}

TEST_CASE("sign change between consecutive cos zeros") {
    QTrigContext ctx(0.5);
    ZeroTable t = trig_zeros(ctx, TrigKind::Cos, 8);
    for (std::size_t i = 0; i + 1 < t.zeros.size(); ++i) {
        const double mid = std::sqrt(t.zeros[i] * t.zeros[i + 1]);
        const double before = q_cos(ctx, 0.5 * (t.zeros[i] + mid));
        const double after = q_cos(ctx, 0.5 * (mid + t.zeros[i + 1]));
        CHECK(before * after > 0.0);  // same lobe on both sides of the midpoint
        // and the lobes on either side of a zero have opposite sign
        if (i + 2 < t.zeros.size()) {
            const double next_mid = std::sqrt(t.zeros[i + 1] * t.zeros[i + 2]);
            CHECK(q_cos(ctx, mid) * q_cos(ctx, next_mid) < 0.0);
        }
    }
}

TEST_CASE("deviations decay geometrically until the resolution floor") {
    for (double q : {0.3, 0.5, 0.7}) {
        QTrigContext ctx(q);
        ZeroTable t = trig_zeros(ctx, TrigKind::Cos, 12);
        const double floor = 1e-12;
        for (int m = 5; m <= 11; ++m) {
            const double dm = std::fabs(
                t.zeros[static_cast<std::size_t>(m - 1)] * (1.0 - q) *
                    std::pow(q, m - 0.5) -
                1.0);
            const double dn = std::fabs(
                t.zeros[static_cast<std::size_t>(m)] * (1.0 - q) *
                    std::pow(q, m + 0.5) -
                1.0);
            CHECK(dn <= std::max(dm / 2.0, floor));
        }
    }
}

TEST_CASE("bracket or overflow failure without escalation") {
    QTrigContext plain = QTrigContext::binary64_only(0.5);
    CHECK_THROWS_AS(trig_zeros(plain, TrigKind::Cos, 40), NumericError);
}

TEST_CASE("concurrent cache growth and evaluation") {
    QTrigContext ctx(0.5);
    const double reference = q_cos(ctx, 7.3);
    std::vector<std::thread> workers;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 8; ++t) {
        workers.emplace_back([&, t] {
            for (int i = 0; i < 200; ++i) {
                ctx.pochhammer(40 + (i * 7 + t) % 80);
                if (q_cos(ctx, 7.3) != reference) ++mismatches;
            }
        });
    }
    for (auto& w : workers) w.join();
    CHECK(mismatches == 0);
    CHECK(ctx.pochhammer(119) == doctest::Approx(0.2887880951).epsilon(1e-9));
}
