#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fp/common.hpp"
#include "fp/special_functions.hpp"
#include "fp/stats.hpp"

using namespace fp;

TEST_CASE("describe matches hand computations") {
    std::vector<double> v = {1, 2, 3, 4, 5};
    DescriptiveRow r = describe(v);
    CHECK(r.n == 5);
    CHECK(r.mean == 3.0);
    CHECK(std::fabs(r.sd - 1.5811388300841898) < 1e-12);
    CHECK(r.median == 3.0);
    CHECK(r.min == 1.0);
    CHECK(r.max == 5.0);

    std::vector<double> zeros = {0, 0, 0};
    DescriptiveRow z = describe(zeros);
    CHECK(z.mean == 0.0);
    CHECK(z.sd == 0.0);
    CHECK(z.median == 0.0);

    CHECK_THROWS_AS(describe(std::vector<double>{}), ValidationError);
}

TEST_CASE("median equals full-sort median, even and odd n") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {1u, 2u, 5u, 100u, 101u, 1000u}) {
        std::vector<double> v(n);
        for (auto& x : v) x = double(rng() % 1000);
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        double expect = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        CHECK(median_of(v) == expect);
    }
}

TEST_CASE("quantile interpolation convention h = (n-1)p") {
    std::vector<double> sorted = {10, 20, 30, 40};
    CHECK(quantile_sorted(sorted, 0.0) == 10.0);
    CHECK(quantile_sorted(sorted, 1.0) == 40.0);
    CHECK(quantile_sorted(sorted, 0.5) == 25.0);
    CHECK(std::fabs(quantile_sorted(sorted, 0.025) - 10.75) < 1e-12);
}

TEST_CASE("one-way ANOVA worked example {1,2,3},{2,3,4},{3,4,5}") {
    std::vector<std::vector<double>> groups = {{1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
    AnovaResult a = one_way_anova(groups);
    CHECK(a.ss_between == 6.0);
    CHECK(a.ss_within == 6.0);
    CHECK(a.ss_total == 12.0);
    CHECK(a.df_between == 2);
    CHECK(a.df_within == 6);
    CHECK(a.ms_between == 3.0);
    CHECK(a.ms_within == 1.0);
    CHECK(a.f_value == 3.0);
    CHECK(std::fabs(a.p_value - f_sf(3.0, 2, 6)) < 1e-15);
    CHECK(std::fabs(a.p_value - 0.125) < 1e-8);  // exact: I_{x}(3,1) arithmetic gives 1/8
}

TEST_CASE("ANOVA identity SS_total = SS_between + SS_within on random groups") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-5, 5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> groups(2 + trial % 3);
        for (auto& g : groups) {
            g.resize(2 + rng() % 40);
            for (auto& x : g) x = unif(rng);
        }
        AnovaResult a = one_way_anova(groups);
        CHECK(std::fabs(a.ss_total - (a.ss_between + a.ss_within)) <
              1e-9 * (1.0 + a.ss_total));
        CHECK(a.p_value >= 0.0);
        CHECK(a.p_value <= 1.0);
    }
}

TEST_CASE("ANOVA preconditions") {
    CHECK_THROWS_AS(one_way_anova({{1.0, 2.0}}), ValidationError);           // one group
    CHECK_THROWS_AS(one_way_anova({{1.0}, {}}), ValidationError);            // empty group
    CHECK_THROWS_AS(one_way_anova({{1.0}, {2.0}}), ValidationError);         // df_within = 0
    CHECK_NOTHROW(one_way_anova({{1.0, 2.0}, {2.0, 3.0}}));
}

TEST_CASE("identical groups give F = 0 and p = 1") {
    AnovaResult a = one_way_anova({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    CHECK(a.ss_between == 0.0);
    CHECK(a.f_value == 0.0);
    CHECK(a.p_value == 1.0);
}

TEST_CASE("Tukey-Kramer on the worked example") {
    std::vector<std::vector<double>> groups = {{1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
    AnovaResult a = one_way_anova(groups);
    auto pairs = tukey_kramer(groups, a);
    REQUIRE(pairs.size() == 3);

    // SE = sqrt(ms_within/2 * (1/3 + 1/3)) = sqrt(1/3)
    const double se = std::sqrt(1.0 / 3.0);
    for (const auto& c : pairs) {
        CHECK(std::fabs(c.standard_error - se) < 1e-12);
        CHECK(c.p_value >= 0.0);
        CHECK(c.p_value <= 1.0);
        // q = |mean difference| / SE
        CHECK(std::fabs(c.q_statistic - std::fabs(c.mean_difference) / se) < 1e-12);
        // p agrees with the studentized range survival function
        CHECK(std::fabs(c.p_value - studentized_range_sf(c.q_statistic, 3, 6)) < 1e-12);
    }
    CHECK(pairs[0].group_a == 0);
    CHECK(pairs[0].group_b == 1);
    CHECK(pairs[0].mean_difference == -1.0);
    CHECK(pairs[1].group_a == 0);
    CHECK(pairs[1].group_b == 2);
    CHECK(pairs[1].mean_difference == -2.0);
    CHECK(pairs[2].group_a == 1);
    CHECK(pairs[2].group_b == 2);

    // wider separation -> smaller p
    CHECK(pairs[1].p_value < pairs[0].p_value);
}

TEST_CASE("Tukey-Kramer handles unequal group sizes") {
    std::vector<std::vector<double>> groups = {{1, 2, 3, 4}, {2, 3}, {5, 6, 7}};
    AnovaResult a = one_way_anova(groups);
    auto pairs = tukey_kramer(groups, a);
    REQUIRE(pairs.size() == 3);
    const auto& c01 = pairs[0];
    double se01 = std::sqrt(a.ms_within / 2.0 * (1.0 / 4.0 + 1.0 / 2.0));
    CHECK(std::fabs(c01.standard_error - se01) < 1e-12);
}
