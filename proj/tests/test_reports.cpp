#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "fp/reports.hpp"

using namespace fp;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// collapses space runs so table checks don't depend on column padding
std::string squeeze(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == ' ' && !out.empty() && out.back() == ' ') continue;
        out += c;
    }
    return out;
}

LogitModel two_by_two_model() {
    Matrix x(20, 1);
    std::vector<char> y(20, 0);
    for (std::size_t i = 0; i < 20; ++i) x.at(i, 0) = i < 10 ? 0.0 : 1.0;
    for (std::size_t i = 0; i < 3; ++i) y[i] = 1;
    for (std::size_t i = 10; i < 16; ++i) y[i] = 1;
    return fit_logit(x, y, {"has_url"});
}

}  // namespace

TEST_CASE("p-value and feature-name display conventions") {
    CHECK(format_p(0.0004999) == "0.000");
    CHECK(format_p(0.0005) == "0.001");
    CHECK(format_p(0.125) == "0.125");
    CHECK(format_p(1.0) == "1.000");

    CHECK(display_feature_name("age_in_days") == "Age in Days");
    CHECK(display_feature_name("inactivity_in_days") == "Inactivity in Days");
    CHECK(display_feature_name("description_url_count") == "Description URL Count");
    CHECK(display_feature_name("has_default_profile_image") == "Has Default Profile Image");
    CHECK(display_feature_name("utc_offset") == "UTC Offset");
    CHECK(display_feature_name("has_utc_offset") == "Has UTC Offset");
    CHECK(display_feature_name("impression_upper-class") == "Impression: upper-class");
    CHECK(display_feature_name("is_male") == "Name is Male");
    CHECK(display_feature_name("is_female") == "Name is Female");
    CHECK(display_feature_name("word_fraction") == "Name Contains Words");
    CHECK(display_feature_name("(Intercept)") == "Constant");
}

TEST_CASE("descriptive table rendering") {
    std::vector<double> v = {1, 2, 3, 4, 5};
    std::vector<NamedRow> rows = {{"Age in Days", describe(v)}};
    const std::string text = render_describe_text(rows, "Interval measures");
    CHECK(contains(text, "Interval measures"));
    CHECK(contains(text, "Measure"));
    CHECK(contains(text, "95 % interval"));
    CHECK(contains(text, "Age in Days"));
    CHECK(contains(text, "1.581"));           // sample SD to three decimals
    CHECK(contains(text, "[1.100, 4.900]"));  // 2.5/97.5 percentiles

    const std::string csv = render_describe_csv(rows);
    CHECK(contains(csv, "measure,n,mean,sd,median,p2_5,p97_5,min,max"));
    CHECK(contains(csv, "Age in Days,5,3,"));  // CSV keeps exact values
    CHECK(contains(csv, "1.5811388300841898"));
}

TEST_CASE("change summary rendering") {
    LabeledSet labeled;
    labeled.ctx.crawl_date = parse_date("2014-10-07");
    for (int i = 0; i < 2; ++i) {
        LabeledProfile rec;
        rec.profile.user_id = std::uint64_t(i + 1);
        rec.profile.followers_count = i == 0 ? 100 : 200;
        rec.followers_second = i == 0 ? 150 : 100;
        rec.increased = i == 0;
        rec.absolute_change = rec.followers_second - rec.profile.followers_count;
        rec.relative_change = double(rec.followers_second) / double(rec.profile.followers_count);
        labeled.records.push_back(rec);
    }
    ChangeSummary s = describe_changes(labeled);
    const std::string text = render_changes_text(s);
    CHECK(contains(text, "First Count"));
    CHECK(contains(text, "Relative Change"));
    CHECK(contains(text, "Increased flags: 1 of 2 (50.0 %)"));
    const std::string csv = render_changes_csv(s);
    CHECK(contains(csv, "first_count,2,150,"));
    CHECK(contains(csv, "increased_count,1"));
    CHECK(contains(csv, "increased_percent,50"));
}

TEST_CASE("ANOVA and Tukey rendering on the worked example") {
    std::vector<std::vector<double>> groups = {{1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
    AnovaResult a = one_way_anova(groups);
    const std::string text = render_anova_text(a);
    CHECK(contains(text, "One-way analysis of variance"));
    CHECK(contains(text, "Between Groups"));
    CHECK(contains(text, "Within Groups"));
    CHECK(contains(text, "Total"));
    CHECK(contains(text, "0.125"));  // exact p of F(2,6) = 3

    const std::string csv = render_anova_csv(a);
    CHECK(contains(csv, "source,ss,df,ms,f,p"));
    CHECK(contains(csv, "between_groups,6,2,3,3,0.125"));
    CHECK(contains(csv, "within_groups,6,6,1,,"));
    CHECK(contains(csv, "total,12,8,,,"));

    auto tukey = tukey_kramer(groups, a);
    std::vector<std::string> labels = {"Contains Name", "Contains Words", "Custom Content"};
    const std::string ttext = render_tukey_text(tukey, labels);
    CHECK(contains(ttext, "Tukey-Kramer pairwise comparisons"));
    CHECK(contains(ttext, "Contains Name vs Contains Words"));
    CHECK(contains(ttext, "Sig."));
    const std::string tcsv = render_tukey_csv(tukey, labels);
    CHECK(contains(tcsv, "group_a,group_b,mean_difference,standard_error,q,p"));
    CHECK(contains(tcsv, "Contains Name,Custom Content,-2,"));
}

TEST_CASE("logistic regression rendering") {
    LogitModel m = two_by_two_model();
    const std::string text = render_logit_text(m, "Contains Words");
    CHECK(contains(text, "Binary logistic regression: Contains Words"));
    CHECK(contains(text, "N = 20; converged in"));
    CHECK(contains(text, "Log-likelihood"));
    CHECK(contains(text, "Nagelkerke R^2"));
    CHECK(contains(text, "Variable"));
    CHECK(contains(text, "Exp(B)"));
    CHECK(contains(text, "Constant"));  // intercept row, display name
    CHECK(contains(text, "Has URL"));
    CHECK(contains(text, "3.500"));  // odds ratio of the worked example
    CHECK(contains(text, "Significance: *** p<0.001, ** p<0.01, * p<0.05"));

    const std::string csv = render_logit_csv(m, "contains_words");
    CHECK(contains(csv, "segment,variable,beta,standard_error,wald,p,odds_ratio"));
    CHECK(contains(csv, "contains_words,(Intercept),"));
    CHECK(contains(csv, "contains_words,has_url,"));
    CHECK(contains(csv, "contains_words,(nagelkerke_r2),"));
    const std::string headerless = render_logit_csv(m, "x", false);
    CHECK_FALSE(contains(headerless, "segment,variable"));
}

TEST_CASE("grid search rendering") {
    GridSearchResult res;
    CvResult knn;
    knn.family = "knn";
    knn.params = {{"k", 25}};
    knn.fold_aucs = {0.71, 0.69, 0.7};
    knn.mean_auc = 0.7;
    knn.sd_auc = 0.01;
    CvResult constant;
    constant.family = "constant";
    constant.fold_aucs = {0.5, 0.5, 0.5};
    constant.mean_auc = 0.5;
    constant.sd_auc = 0.0;
    res.evaluated = {knn, constant};
    res.family_best = {knn, constant};
    res.best_index = 0;
    res.failures = {{"knn", {{"k", 9999}}, "k must be in 1..n_train"}};

    const std::string text = render_grid_text(res);
    CHECK(contains(text, "Grid search by mean cross-validated AUC"));
    CHECK(contains(text, "knn *"));  // winner marker
    CHECK(contains(text, "Selected: knn (k: 25), mean AUC 0.700"));
    CHECK(contains(text, "Failed grid points: 1"));

    const std::string csv = render_grid_csv(res);
    CHECK(contains(csv, "family,parameters,fold_aucs,mean_auc,sd_auc"));
    CHECK(contains(csv, "knn,k: 25,0.71;0.69;0.7,0.7,0.01"));
    const std::string fails = render_grid_failures_csv(res);
    CHECK(contains(fails, "family,parameters,error"));
    CHECK(contains(fails, "knn,k: 9999,k must be in 1..n_train"));
}

TEST_CASE("evaluation table rendering, including absent segments") {
    RouterEvaluation ev;
    ev.n = 100;
    ev.has_global = true;
    ev.overall_defined = true;
    ev.routed_overall = 0.8125;
    ev.global_overall = 0.75;
    for (std::size_t g = 0; g < 3; ++g) {
        ev.routed[g].present = g != 1;  // no Contains Words rows in this slice
        ev.routed[g].auc_defined = g != 1;
        ev.routed[g].n = g == 1 ? 0 : 50;
        ev.routed[g].positives = g == 1 ? 0 : 20;
        ev.routed[g].auc = 0.8;
        ev.global[g] = ev.routed[g];
        ev.global[g].auc = 0.7;
    }

    const std::string text = render_evaluation_text(ev);
    CHECK(contains(text, "Classifier evaluation (AUC)"));
    CHECK(contains(squeeze(text), "Contains Name 50 0.800 0.700 0.500"));
    CHECK(contains(squeeze(text), "Contains Words 0 - - 0.500"));  // absent segment: dashes
    CHECK(contains(squeeze(text), "Overall 100 0.81"));  // 0.8125 to three decimals

    const std::string csv = render_evaluation_csv(ev);
    CHECK(contains(csv, "segment,n,positives,routed_auc,global_auc,random_auc"));
    CHECK(contains(csv, "contains_name,50,20,0.8,0.7,0.5"));
    CHECK(contains(csv, "contains_words,0,0,,,0.5"));  // empty cells, not fake zeros
    CHECK(contains(csv, "overall,100,40,0.8125,0.75,0.5"));
}

TEST_CASE("router summary rendering") {
    RouterModel router;
    router.seed = 7;
    router.cv_k = 5;
    router.cv_repeats = 2;
    router.crawl_date = parse_date("2014-10-07");
    router.data_fingerprint = 0xabcdef;
    for (std::size_t g = 0; g < 3; ++g) {
        auto& e = router.groups[g];
        e.schema = FeatureSchema::for_group(kAllGroups[g]);
        e.spec = {"logit", {}};
        e.selection.family = "logit";
        e.selection.mean_auc = 0.6;
        e.selection.sd_auc = 0.01;
        e.train_rows = 100 + g;
        e.train_positives = 40;
    }

    const std::string text = render_router_summary_text(router);
    CHECK(contains(text, "Trained router (seed 7, 5-fold x 2-repeat CV, crawl date 2014-10-07)"));
    CHECK(contains(text, "Contains Name"));
    CHECK(contains(text, "logit"));
    CHECK(contains(text, "Data fingerprint: "));
    CHECK_FALSE(contains(text, "Global (core)"));  // no baseline attached

    const std::string csv = render_router_summary_csv(router);
    CHECK(contains(csv, "segment,family,parameters,cv_mean_auc,cv_sd_auc,train_rows,train_positives"));
    CHECK(contains(csv, "contains_name,logit,,0.6,0.01,100,40"));
    CHECK_FALSE(contains(csv, "global"));
}

TEST_CASE("log-scale histogram") {
    std::vector<double> counts = {0, 0, 1, 5, 9, 99, 100, 1000, 10000, 100000};
    Histogram h = log_histogram(counts, 5);
    REQUIRE(h.counts.size() == 5);
    REQUIRE(h.edges.size() == 6);
    CHECK(h.edges.front() == 0.0);
    for (std::size_t i = 1; i < h.edges.size(); ++i) CHECK(h.edges[i] > h.edges[i - 1]);
    std::int64_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == std::int64_t(counts.size()));

    Histogram zeros = log_histogram(std::vector<double>{0, 0, 0}, 4);
    REQUIRE(zeros.counts.size() == 1);  // degenerate all-zero input collapses to one bin
    CHECK(zeros.counts[0] == 3);
    CHECK(zeros.edges == std::vector<double>{0.0, 0.0});

    const std::string csv = render_histogram_csv(h);
    CHECK(contains(csv, "bin_low,bin_high,count"));
    CHECK(contains(csv, "0,"));

    CHECK_THROWS_AS(log_histogram(std::vector<double>{}, 3), ValidationError);
    CHECK_THROWS_AS(log_histogram(std::vector<double>{1.0}, 0), ValidationError);
    CHECK_THROWS_AS(log_histogram(std::vector<double>{-1.0}, 3), ValidationError);
}
