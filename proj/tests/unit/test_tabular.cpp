#include "doctest.h"

#include <cmath>

#include "expected_sim_small.hpp"
#include "rrreg/errors.hpp"
#include "rrreg/rng.hpp"
#include "rrreg/tabular.hpp"

using namespace rrreg;

TEST_CASE("risk ratio on the worked 2x2") {
    const RatioEstimate est = risk_ratio({1, 5, 1, 11});
    CHECK(est.point == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(est.ci_low == doctest::Approx(expected::kKatzLo).epsilon(1e-12));
    CHECK(est.ci_high == doctest::Approx(expected::kKatzHi).epsilon(1e-12));
    CHECK_FALSE(est.degenerate_ci);
}

TEST_CASE("risk ratio basics") {
    CHECK(risk_ratio({3, 7, 3, 7}).point == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(risk_ratio({5, 2, 5, 2}).point == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(risk_ratio({2, 8, 1, 9}).point == doctest::Approx(2.0).epsilon(1e-15));

    SUBCASE("zero a cell gives a flagged zero, no continuity correction") {
        const RatioEstimate est = risk_ratio({0, 5, 1, 11});
        CHECK(est.point == 0.0);
        CHECK(est.degenerate_ci);
    }
    SUBCASE("undefined estimates throw") {
        CHECK_THROWS_AS(risk_ratio({0, 0, 1, 11}), EstimateError);   // empty exposed
        CHECK_THROWS_AS(risk_ratio({1, 5, 0, 0}), EstimateError);    // empty unexposed
        CHECK_THROWS_AS(risk_ratio({1, 5, 0, 11}), EstimateError);   // c = 0
        CHECK_THROWS_AS(risk_ratio({-1, 5, 1, 11}), DomainError);
    }
}

TEST_CASE("odds ratio on the worked 2x2") {
    const RatioEstimate est = odds_ratio({1, 5, 1, 11});
    CHECK(est.point == doctest::Approx(2.2).epsilon(1e-15));
    CHECK(est.ci_low == doctest::Approx(expected::kWoolfLo).epsilon(1e-12));
    CHECK(est.ci_high == doctest::Approx(expected::kWoolfHi).epsilon(1e-12));

    CHECK(odds_ratio({4, 9, 4, 9}).point == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(odds_ratio({2, 8, 1, 9}).point == doctest::Approx(2.25).epsilon(1e-15));
    CHECK_THROWS_AS(odds_ratio({1, 0, 1, 11}), EstimateError);
    CHECK_THROWS_AS(odds_ratio({1, 5, 0, 11}), EstimateError);
}

TEST_CASE("odds ratio exceeds risk ratio above the null") {
    Rng rng(91);
    int above_null = 0;
    for (int k = 0; k < 400; ++k) {
        TwoByTwoTable t{1 + std::floor(rng.uniform(0, 40)), 1 + std::floor(rng.uniform(0, 40)),
                        1 + std::floor(rng.uniform(0, 40)), 1 + std::floor(rng.uniform(0, 40))};
        const double rr = risk_ratio(t).point;
        const double orat = odds_ratio(t).point;
        if (rr > 1.0) {
            ++above_null;
            CHECK(orat > rr);
        }
        // exact identity OR = RR (1-p0)/(1-p1)
        const double p1 = t.a / (t.a + t.b);
        const double p0 = t.c / (t.c + t.d);
        CHECK(orat == doctest::Approx(rr * (1 - p0) / (1 - p1)).epsilon(1e-12));
    }
    CHECK(above_null > 50);  // the property was actually exercised
}

TEST_CASE("mantel-haenszel pooling") {
    SUBCASE("frozen two-stratum example") {
        StratifiedTables st;
        st.strata.push_back({"s1", {12, 18, 8, 22}});
        st.strata.push_back({"s2", {20, 10, 14, 16}});
        const RatioEstimate est = mantel_haenszel_rr(st);
        CHECK(est.point == doctest::Approx(expected::kMhRr).epsilon(1e-12));
        CHECK(est.ci_low == doctest::Approx(expected::kMhLo).epsilon(1e-12));
        CHECK(est.ci_high == doctest::Approx(expected::kMhHi).epsilon(1e-12));
    }
    SUBCASE("one stratum collapses to the crude estimate, interval included") {
        const TwoByTwoTable t{7, 13, 5, 25};
        StratifiedTables st;
        st.strata.push_back({"only", t});
        const RatioEstimate pooled = mantel_haenszel_rr(st);
        const RatioEstimate crude = risk_ratio(t);
        CHECK(pooled.point == doctest::Approx(crude.point).epsilon(1e-14));
        CHECK(pooled.ci_low == doctest::Approx(crude.ci_low).epsilon(1e-12));
        CHECK(pooled.ci_high == doctest::Approx(crude.ci_high).epsilon(1e-12));
    }
    SUBCASE("homogeneous strata preserve the common ratio") {
        StratifiedTables st;
        st.strata.push_back({"a", {1, 5, 1, 11}});
        st.strata.push_back({"b", {1, 5, 1, 11}});
        CHECK(mantel_haenszel_rr(st).point == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("duplicate labels rejected") {
        StratifiedTables st;
        st.strata.push_back({"a", {1, 5, 1, 11}});
        st.strata.push_back({"a", {1, 5, 1, 11}});
        CHECK_THROWS_AS(mantel_haenszel_rr(st), DomainError);
    }
    SUBCASE("empty margins rejected") {
        StratifiedTables st;
        st.strata.push_back({"a", {1, 5, 0, 0}});
        CHECK_THROWS_AS(mantel_haenszel_rr(st), EstimateError);
    }
}

TEST_CASE("exact collapsibility on expected-count strata") {
    // Stratum variable independent of exposure, common within-stratum ratio.
    const double N = 1000.0, w1 = 0.3, pi = 0.4, r = 1.7;
    const double p0k[2] = {0.2, 0.35};
    const double wk[2] = {w1, 1.0 - w1};
    StratifiedTables st;
    TwoByTwoTable crude;
    for (int k = 0; k < 2; ++k) {
        TwoByTwoTable t;
        t.a = N * wk[k] * pi * r * p0k[k];
        t.b = N * wk[k] * pi * (1.0 - r * p0k[k]);
        t.c = N * wk[k] * (1.0 - pi) * p0k[k];
        t.d = N * wk[k] * (1.0 - pi) * (1.0 - p0k[k]);
        st.strata.push_back({k == 0 ? "z0" : "z1", t});
        crude.a += t.a;
        crude.b += t.b;
        crude.c += t.c;
        crude.d += t.d;
    }
    CHECK(mantel_haenszel_rr(st).point == doctest::Approx(r).epsilon(1e-12));
    CHECK(risk_ratio(crude).point == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("or/rr approximation calculus") {
    CHECK(or_rr_ratio({0.001, 10}) == doctest::Approx(0.999 / 0.99).epsilon(1e-15));
    CHECK(or_rr_ratio({0.0001, 5}) == doctest::Approx(0.9999 / 0.9995).epsilon(1e-15));
    CHECK(or_rr_ratio({0.1, 5}) == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(or_rr_ratio({0.37, 1}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(or_rr_ratio({0.5, 2.0000001}), DomainError);
    CHECK_THROWS_AS(or_rr_ratio({0.0, 2}), DomainError);
}

TEST_CASE("rr from or") {
    CHECK(rr_from_or(2.2, 1.0 / 12.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(rr_from_or(1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(rr_from_or(-1.0, 0.3), DomainError);
}

TEST_CASE("or/rr round trip over a grid") {
    for (double p0 : {0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.5}) {
        const double rr_max = 0.99 / p0;
        for (double rr = 0.1; rr <= rr_max; rr += rr_max / 23.0) {
            const double orat = rr * or_rr_ratio({p0, rr});
            CHECK(rr_from_or(orat, p0) == doctest::Approx(rr).epsilon(1e-10));
        }
    }
}

TEST_CASE("feasibility bound") {
    CHECK(feasible(0.5, 2.0));
    CHECK_FALSE(feasible(0.6, 2.0));
    for (double p0 : {0.01, 0.25, 0.8}) CHECK(feasible(p0, 1.0 / p0));
    CHECK_THROWS_AS(feasible(0.0, 1.0), DomainError);
}
