#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fp/common.hpp"
#include "fp/models.hpp"

using namespace fp;

namespace {

Matrix col_matrix(const std::vector<double>& v) {
    Matrix m(0, 1);
    for (double x : v) m.push_row({x});
    return m;
}

double brute_auc(const std::vector<double>& s, const std::vector<char>& y) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                den += 1.0;
                if (s[i] > s[j]) num += 1.0;
                else if (s[i] == s[j]) num += 0.5;
            }
    return num / den;
}

}  // namespace

TEST_CASE("regression stump splits at the midpoint") {
    Matrix x = col_matrix({1, 2, 3, 4});
    Tree t = fit_regression_tree(x, {0, 0, 1, 1}, {1, 1.0, 0});
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == 2.5);
    double r1 = 1.0, r4 = 4.0;
    CHECK(t.predict(&r1) == 0.0);
    CHECK(t.predict(&r4) == 1.0);
}

TEST_CASE("deeper tree recovers a piecewise-constant target exactly") {
    std::vector<double> xs, ts;
    Rng rng = make_rng(7, 0);
    for (int i = 0; i < 200; ++i) {
        double v = uniform01(rng) * 10;
        xs.push_back(v);
        ts.push_back(v > 3 ? (v > 7 ? 2.0 : 1.0) : 0.0);
    }
    Matrix x = col_matrix(xs);
    Tree t = fit_regression_tree(x, ts, {3, 5.0, 0});
    for (int i = 0; i < 200; ++i)
        CHECK(t.predict(&xs[std::size_t(i)]) == doctest::Approx(ts[std::size_t(i)]).epsilon(1e-12));
}

TEST_CASE("single-iteration GBM worked example") {
    Matrix x = col_matrix({1, 2, 3, 4});
    std::vector<char> y = {0, 0, 1, 1};
    GbmModel m = fit_gbm(x, y, {1, 1, 1.0, 1.0});
    CHECK(m.initial_score == 0.0);  // prevalence 0.5 -> log-odds 0
    // one Newton step on a clean split drives each side to logit(+-2)
    double r1 = 1.0;
    CHECK(m.predict(&r1) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));
    double r4 = 4.0;
    CHECK(m.predict(&r4) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));
    REQUIRE(m.train_deviance.size() == 2);
    CHECK(m.train_deviance[1] < m.train_deviance[0]);
}

TEST_CASE("GBM training deviance is non-increasing") {
    Rng rng = make_rng(42, 0);
    Matrix x(0, 3);
    std::vector<char> y;
    for (int i = 0; i < 400; ++i) {
        std::vector<double> row = {uniform01(rng), uniform01(rng), uniform01(rng)};
        x.push_row(row);
        double p = 1.0 / (1.0 + std::exp(-(2.0 * row[0] - 1.5 * row[1] + 0.3)));
        y.push_back(uniform01(rng) < p ? 1 : 0);
    }
    GbmModel m = fit_gbm(x, y, {100, 3, 0.1, 5.0});
    CHECK(m.trees.size() == 100);
    for (std::size_t i = 1; i < m.train_deviance.size(); ++i)
        CHECK(m.train_deviance[i] <= m.train_deviance[i - 1] + 1e-12);
}

TEST_CASE("AUC: worked example and brute-force agreement under ties") {
    CHECK(auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == 0.75);
    CHECK(auc({0.5, 0.5}, {0, 1}) == 0.5);
    Rng rng = make_rng(9, 9);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> s;
        std::vector<char> y;
        for (int i = 0; i < 60; ++i) {
            s.push_back(std::round(uniform01(rng) * 8) / 8.0);  // coarse grid forces ties
            y.push_back(uniform01(rng) < 0.4 ? 1 : 0);
        }
        const auto pos = std::count(y.begin(), y.end(), char(1));
        if (pos == 0 || pos == 60) continue;
        CHECK(auc(s, y) == doctest::Approx(brute_auc(s, y)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), ValidationError);
}

TEST_CASE("random forest is seed-deterministic across thread counts") {
    Rng rng = make_rng(5, 1);
    Matrix x(0, 4);
    std::vector<char> y;
    for (int i = 0; i < 300; ++i) {
        std::vector<double> row = {uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng)};
        x.push_row(row);
        y.push_back(row[1] > 0.5 ? 1 : 0);
    }
    RfModel a = fit_rf(x, y, {60, 2, 2.0, 12}, 77, 1);
    RfModel b = fit_rf(x, y, {60, 2, 2.0, 12}, 77, 4);
    std::vector<double> sa, sb;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        sa.push_back(a.predict(x.row(r)));
        sb.push_back(b.predict(x.row(r)));
    }
    CHECK(sa == sb);
    CHECK(auc(sa, y) > 0.95);
    RfModel c = fit_rf(x, y, {60, 2, 2.0, 12}, 78, 1);
    std::vector<double> sc;
    for (std::size_t r = 0; r < x.rows(); ++r) sc.push_back(c.predict(x.row(r)));
    CHECK(sa != sc);  // a different seed grows different trees
}

TEST_CASE("kNN scores the positive fraction among neighbours") {
    Matrix x(0, 1);
    for (double v : {0.0, 1.0, 2.0, 10.0}) x.push_row({v});
    std::vector<char> y = {1, 0, 1, 0};
    KnnModel m = fit_knn(x, y, 3);
    CHECK(m.predict({0.5}) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    KnnModel m1 = fit_knn(x, y, 1);
    CHECK(m1.predict({1.0}) == 0.0);  // exact hit on the negative row
    CHECK_THROWS_AS(fit_knn(x, y, 0), ValidationError);
    CHECK_THROWS_AS(fit_knn(x, y, 5), ValidationError);  // k > n
}

TEST_CASE("naive Bayes in gaussian and kernel modes") {
    Matrix x(0, 1);
    std::vector<char> y;
    for (double v : {-2.0, -1.0, -1.5}) {
        x.push_row({v});
        y.push_back(0);
    }
    for (double v : {2.0, 1.0, 1.5}) {
        x.push_row({v});
        y.push_back(1);
    }
    NbModel m = fit_nb(x, y, false);
    CHECK(m.predict({0.0}) == doctest::Approx(0.5).epsilon(1e-12));  // symmetric classes
    CHECK(m.predict({1.4}) > 0.9);
    CHECK(m.predict({-1.4}) < 0.1);

    NbModel mk = fit_nb(x, y, true, 1.0);
    CHECK(mk.kernel);
    CHECK(mk.predict({0.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mk.predict({1.4}) > 0.8);
    CHECK(mk.predict({-1.4}) < 0.2);
}

TEST_CASE("stratified folds cover both classes and are deterministic") {
    std::vector<char> y;
    Rng rng = make_rng(3, 3);
    for (int i = 0; i < 137; ++i) y.push_back(uniform01(rng) < 0.3 ? 1 : 0);
    auto folds = stratified_folds(y, 5, 3, 11);
    REQUIRE(folds.size() == 3);
    for (const auto& rep : folds) {
        for (int f = 0; f < 5; ++f) {
            int pos = 0, neg = 0;
            for (std::size_t i = 0; i < y.size(); ++i)
                if (rep[i] == f) (y[i] ? pos : neg)++;
            CHECK(pos > 0);
            CHECK(neg > 0);
        }
    }
    CHECK(folds == stratified_folds(y, 5, 3, 11));
    CHECK(folds != stratified_folds(y, 5, 3, 12));
    CHECK(folds[0] != folds[1]);  // repeats reshuffle
}

TEST_CASE("cross-validation sanity anchors: oracle 1.0, constant 0.5") {
    Rng rng = make_rng(15, 0);
    Matrix x(0, 2);
    std::vector<char> y;
    for (int i = 0; i < 160; ++i) {
        std::vector<double> row = {uniform01(rng), uniform01(rng)};
        x.push_row(row);
        y.push_back(uniform01(rng) < 0.45 ? 1 : 0);
    }
    CvConfig cv{4, 2, 21, 1};
    CvResult oracle = cross_validate({"oracle", {}}, x, y, cv);
    CHECK(oracle.mean_auc == 1.0);
    CvResult constant = cross_validate({"constant", {}}, x, y, cv);
    CHECK(constant.mean_auc == 0.5);
    CHECK(constant.sd_auc == 0.0);
    CHECK(constant.fold_aucs.size() == 8);

    CvConfig cv4{4, 2, 21, 4};
    CHECK(cross_validate({"constant", {}}, x, y, cv4).fold_aucs == constant.fold_aucs);
}

TEST_CASE("grid config parsing expands points with later keys cycling fastest") {
    auto grids = parse_grid_config(
        "# comment\n[gbm]\nn_trees = 10, 20\nmax_depth=2\nshrinkage = 0.1, 0.3\n\n[knn]\nk=5\n",
        "test");
    REQUIRE(grids.size() == 2);
    CHECK(grids[0].family == "gbm");
    REQUIRE(grids[0].points.size() == 4);
    CHECK(grids[0].points[0].at("n_trees") == 10);
    CHECK(grids[0].points[0].at("shrinkage") == 0.1);
    CHECK(grids[0].points[1].at("n_trees") == 10);
    CHECK(grids[0].points[1].at("shrinkage") == 0.3);
    CHECK(grids[0].points[2].at("n_trees") == 20);
    CHECK(grids[1].family == "knn");
    CHECK(grids[1].points.size() == 1);

    CHECK_THROWS_AS(parse_grid_config("[gbm]\nn_trees=1\nn_trees=2\n", "t"), ParseError);
    CHECK_THROWS_AS(parse_grid_config("[mystery]\nk=1\n", "t"), ParseError);
    CHECK_THROWS_AS(parse_grid_config("k=1\n", "t"), ParseError);  // key before any section
    CHECK_THROWS_AS(load_grid_config("/nonexistent.grid"), IoError);
}

TEST_CASE("grid search pairs folds, records failures, prefers simpler ties") {
    Rng rng = make_rng(99, 0);
    Matrix x(0, 2);
    std::vector<char> y;
    for (int i = 0; i < 240; ++i) {
        std::vector<double> row = {uniform01(rng), uniform01(rng)};
        x.push_row(row);
        double p = row[0] > 0.5 ? 0.85 : 0.15;
        y.push_back(uniform01(rng) < p ? 1 : 0);
    }
    auto grids = parse_grid_config(
        "[constant]\n[gbm]\nn_trees=30\nmax_depth=2\nshrinkage=0.2\nmin_leaf=5\n[knn]\nk=25,3000\n",
        "test");
    GridSearchResult res = grid_search(grids, x, y, {4, 2, 5, 2});
    REQUIRE(res.failures.size() == 1);  // k=3000 exceeds every training fold
    CHECK(res.failures[0].family == "knn");
    CHECK_FALSE(res.failures[0].message.empty());
    CHECK(res.evaluated.size() == 3);
    CHECK(res.family_best.size() == 3);
    CHECK(res.best().family != "constant");
    CHECK(res.best().mean_auc > 0.75);

    // identical mean AUCs resolve toward the lower complexity parameter
    auto tie = parse_grid_config("[knn]\nk=160,120\n", "test");
    GridSearchResult t2 = grid_search(tie, x, y, {4, 1, 5, 2});
    if (t2.evaluated.size() == 2 && t2.evaluated[0].mean_auc == t2.evaluated[1].mean_auc)
        CHECK(t2.best().params.at("k") == 120);
}

TEST_CASE("fit_model dispatches by family and validates parameters") {
    Rng rng = make_rng(31, 0);
    Matrix x(0, 2);
    std::vector<char> y;
    for (int i = 0; i < 80; ++i) {
        std::vector<double> row = {uniform01(rng), uniform01(rng)};
        x.push_row(row);
        y.push_back(uniform01(rng) < 0.5 ? 1 : 0);
    }
    FittedModel knn = fit_model({"knn", {{"k", 5}}}, x, y, 1);
    CHECK(family_of(knn) == "knn");
    double row0[2] = {x.at(0, 0), x.at(0, 1)};
    const double s = score_row(knn, row0, 2);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK_THROWS_AS(fit_model({"knn", {}}, x, y, 1), ValidationError);      // k missing
    CHECK_THROWS_AS(fit_model({"martian", {}}, x, y, 1), ValidationError);  // unknown family
    CHECK(family_of(fit_model({"constant", {}}, x, y, 1)) == "constant");
}
