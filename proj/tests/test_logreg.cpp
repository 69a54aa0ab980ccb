#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "fp/logreg.hpp"
#include "fp/rng.hpp"
#include "fp/special_functions.hpp"

using namespace fp;

namespace {

// 2x2 design: x=0 has 3/10 positives, x=1 has 6/10. The MLE has the closed
// form beta0 = log(3/7), beta1 = log odds ratio, with Woolf standard errors.
LogitModel fit_two_by_two() {
    Matrix x(20, 1);
    std::vector<char> y(20, 0);
    for (std::size_t i = 0; i < 20; ++i) x.at(i, 0) = i < 10 ? 0.0 : 1.0;
    for (std::size_t i = 0; i < 3; ++i) y[i] = 1;
    for (std::size_t i = 10; i < 16; ++i) y[i] = 1;
    return fit_logit(x, y, {"exposure"});
}

}  // namespace

TEST_CASE("two-by-two fit matches the closed-form solution") {
    LogitModel m = fit_two_by_two();
    CHECK(m.converged);
    CHECK_FALSE(m.separation);
    CHECK(m.iterations >= 2);
    CHECK(m.n == 20);
    REQUIRE(m.coefficients.size() == 2);
    CHECK(m.coefficient_names[0] == "(Intercept)");
    CHECK(m.coefficient_names[1] == "exposure");

    CHECK(m.coefficients[0] == doctest::Approx(std::log(3.0 / 7.0)).epsilon(1e-8));
    CHECK(m.coefficients[1] == doctest::Approx(std::log(3.5)).epsilon(1e-8));

    const double ll = 3 * std::log(0.3) + 7 * std::log(0.7) + 6 * std::log(0.6) + 4 * std::log(0.4);
    const double null_ll = 9 * std::log(0.45) + 11 * std::log(0.55);
    CHECK(m.log_likelihood == doctest::Approx(ll).epsilon(1e-10));
    CHECK(m.null_log_likelihood == doctest::Approx(null_ll).epsilon(1e-10));

    // Woolf variances: var(b0) = 1/3 + 1/7, var(b1) adds 1/6 + 1/4
    CHECK(std::sqrt(m.covariance_at(0, 0)) ==
          doctest::Approx(std::sqrt(1.0 / 3 + 1.0 / 7)).epsilon(1e-6));
    CHECK(std::sqrt(m.covariance_at(1, 1)) ==
          doctest::Approx(std::sqrt(1.0 / 3 + 1.0 / 7 + 1.0 / 6 + 1.0 / 4)).epsilon(1e-6));
    CHECK(m.covariance_at(0, 1) == doctest::Approx(m.covariance_at(1, 0)));

    CHECK(predict_logit(m, {0.0}) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(predict_logit(m, {1.0}) == doctest::Approx(0.6).epsilon(1e-8));
    CHECK_THROWS_AS(predict_logit(m, {1.0, 2.0}), ValidationError);
}

TEST_CASE("Wald table rows derive from the covariance") {
    LogitModel m = fit_two_by_two();
    auto rows = wald_table(m);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].variable == "exposure");
    CHECK(rows[0].beta == m.coefficients[1]);
    CHECK(rows[0].odds_ratio == doctest::Approx(3.5).epsilon(1e-8));
    const double se = std::sqrt(m.covariance_at(1, 1));
    CHECK(rows[0].standard_error == doctest::Approx(se));
    CHECK(rows[0].wald_statistic == doctest::Approx((rows[0].beta / se) * (rows[0].beta / se)));
    CHECK(rows[0].p_value == doctest::Approx(chi2_sf(rows[0].wald_statistic, 1.0)));
    CHECK(rows[0].p_value == doctest::Approx(0.1849).epsilon(1e-3));

    auto with_intercept = wald_table(m, true);
    REQUIRE(with_intercept.size() == 2);
    CHECK(with_intercept[0].variable == "(Intercept)");
}

TEST_CASE("significance stars thresholds are strict") {
    CHECK(std::string(significance_stars(0.0009)) == "***");
    CHECK(std::string(significance_stars(0.001)) == "**");
    CHECK(std::string(significance_stars(0.009)) == "**");
    CHECK(std::string(significance_stars(0.01)) == "*");
    CHECK(std::string(significance_stars(0.049)) == "*");
    CHECK(std::string(significance_stars(0.05)) == "");
    CHECK(std::string(significance_stars(0.9)) == "");
}

TEST_CASE("Nagelkerke R2 follows the likelihood-ratio formula") {
    LogitModel m = fit_two_by_two();
    const double n = double(m.n);
    const double cox_snell = 1.0 - std::exp(2.0 * (m.null_log_likelihood - m.log_likelihood) / n);
    const double ceiling = 1.0 - std::exp(2.0 * m.null_log_likelihood / n);
    CHECK(nagelkerke_r2(m) == doctest::Approx(cox_snell / ceiling));
    CHECK(nagelkerke_r2(m) > 0.0);
    CHECK(nagelkerke_r2(m) < 1.0);
}

TEST_CASE("input validation") {
    Matrix x(20, 1);
    std::vector<char> y(20, 1);
    for (std::size_t i = 0; i < 20; ++i) x.at(i, 0) = double(i);
    CHECK_THROWS_AS(fit_logit(x, y, {"a"}), ValidationError);  // single class
    y[0] = 0;
    CHECK_THROWS_AS(fit_logit(x, std::vector<char>(19, 0), {"a"}), ValidationError);
    CHECK_THROWS_AS(fit_logit(x, y, {"a", "b"}), ValidationError);
    CHECK_THROWS_AS(fit_logit(Matrix(2, 1), {1, 0}, {"a"}), ValidationError);  // too few rows
}

TEST_CASE("rank-deficient designs are refused and name the culprit") {
    Matrix x(12, 2);
    std::vector<char> y(12, 0);
    for (std::size_t i = 0; i < 12; ++i) {
        x.at(i, 0) = double(i % 5);
        x.at(i, 1) = 2.0 * x.at(i, 0);  // exact copy of column 0, scaled
        y[i] = (i % 3) == 0;
    }
    try {
        fit_logit(x, y, {"base", "doubled"});
        FAIL("expected a rank-deficiency error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("rank deficient") != std::string::npos);
        const bool named = msg.find("base") != std::string::npos ||
                           msg.find("doubled") != std::string::npos;
        CHECK(named);
    }
}

TEST_CASE("perfect separation is flagged, not silently reported") {
    Matrix x(12, 1);
    std::vector<char> y(12, 0);
    for (std::size_t i = 0; i < 12; ++i) {
        x.at(i, 0) = double(i) - 5.5;
        y[i] = x.at(i, 0) > 0.0;
    }
    LogitModel m = fit_logit(x, y, {"gap"});
    CHECK(m.separation);
    CHECK_FALSE(m.converged);
    CHECK_THROWS_AS(wald_table(m), ValidationError);
}

TEST_CASE("coefficient recovery on simulated data") {
    const double b0 = -0.4, b1 = 0.9, b2 = -0.6;
    const std::size_t n = 6000;
    Matrix x(n, 2);
    std::vector<char> y(n);
    Rng rng = make_rng(12345, 0);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x.at(i, 0) = uniform01(rng) * 2.0 - 1.0;
        x.at(i, 1) = uniform01(rng) * 2.0 - 1.0;
        const double eta = b0 + b1 * x.at(i, 0) + b2 * x.at(i, 1);
        y[i] = uniform01(rng) < 1.0 / (1.0 + std::exp(-eta));
        pos += y[i];
    }
    REQUIRE(pos > 0);
    LogitModel m = fit_logit(x, y, {"x1", "x2"});
    CHECK(m.converged);
    for (std::size_t i = 0; i < 3; ++i) {
        const double truth = i == 0 ? b0 : (i == 1 ? b1 : b2);
        const double se = std::sqrt(m.covariance_at(i, i));
        CHECK(std::abs(m.coefficients[i] - truth) < 4.0 * se);
    }
    // with an intercept the IRLS score equations force mean(p) = prevalence
    double mean_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_p += predict_logit(m, {x.at(i, 0), x.at(i, 1)});
    mean_p /= double(n);
    CHECK(mean_p == doctest::Approx(double(pos) / double(n)).epsilon(1e-9));
}
