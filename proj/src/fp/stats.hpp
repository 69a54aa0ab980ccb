#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fp {

// One row of a descriptive-statistics table: mean, sample SD, median, the
// 2.5th/97.5th percentile interval, min, max and N.
struct DescriptiveRow {
    std::int64_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double p2_5 = 0.0;
    double p97_5 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct AnovaResult {
    double ss_between = 0.0;
    double ss_within = 0.0;
    double ss_total = 0.0;
    std::int64_t df_between = 0;
    std::int64_t df_within = 0;
    double ms_between = 0.0;
    double ms_within = 0.0;
    double f_value = 0.0;
    double p_value = 0.0;
};

struct TukeyComparison {
    int group_a = 0;
    int group_b = 0;
    double mean_difference = 0.0;  // mean(a) - mean(b)
    double standard_error = 0.0;
    double q_statistic = 0.0;
    double p_value = 0.0;
};

double mean_of(std::span<const double> values);
// Sample standard deviation (n-1 denominator).
double sample_sd(std::span<const double> values);
double median_of(std::vector<double> values);
// Linear-interpolation quantile on sorted data (h = (n-1)p convention).
double quantile_sorted(std::span<const double> sorted, double p);

DescriptiveRow describe(std::span<const double> values);

// One-way between/within decomposition; p from the F survival function.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

// Tukey-Kramer pairwise comparisons against the studentized range with
// SE = sqrt(ms_within/2 * (1/n_a + 1/n_b)).
std::vector<TukeyComparison> tukey_kramer(const std::vector<std::vector<double>>& groups,
                                          const AnovaResult& anova);

}  // namespace fp
