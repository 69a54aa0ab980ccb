#include "fp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fp/common.hpp"
#include "fp/special_functions.hpp"

namespace fp {

double mean_of(std::span<const double> values) {
    if (values.empty()) throw ValidationError("mean of empty list");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / double(values.size());
}

double sample_sd(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw ValidationError("sd of empty list");
    if (n == 1) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / double(n - 1));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ValidationError("quantile of empty list");
    const double h = (double(sorted.size()) - 1.0) * p;
    const std::size_t lo = std::size_t(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - double(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw ValidationError("median of empty list");
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

DescriptiveRow describe(std::span<const double> values) {
    if (values.empty()) throw ValidationError("describe of empty list");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    DescriptiveRow row;
    row.n = std::int64_t(values.size());
    row.mean = mean_of(values);
    row.sd = sample_sd(values);
    row.median = quantile_sorted(sorted, 0.5);
    row.p2_5 = quantile_sorted(sorted, 0.025);
    row.p97_5 = quantile_sorted(sorted, 0.975);
    row.min = sorted.front();
    row.max = sorted.back();
    return row;
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ValidationError("ANOVA requires at least 2 groups");
    std::int64_t n_total = 0;
    double grand_sum = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty())
            throw ValidationError("ANOVA group " + std::to_string(g) + " is empty");
        n_total += std::int64_t(groups[g].size());
        for (double v : groups[g]) grand_sum += v;
    }
    if (n_total <= std::int64_t(groups.size()))
        throw ValidationError("ANOVA requires total N > number of groups");
    const double grand_mean = grand_sum / double(n_total);

    AnovaResult r;
    for (const auto& g : groups) {
        const double m = mean_of(g);
        r.ss_between += double(g.size()) * (m - grand_mean) * (m - grand_mean);
        for (double v : g) r.ss_within += (v - m) * (v - m);
    }
    r.ss_total = r.ss_between + r.ss_within;
    r.df_between = std::int64_t(groups.size()) - 1;
    r.df_within = n_total - std::int64_t(groups.size());
    r.ms_between = r.ss_between / double(r.df_between);
    r.ms_within = r.ss_within / double(r.df_within);
    if (r.ms_within == 0.0) {
        if (r.ms_between == 0.0)
            throw ValidationError("ANOVA F undefined: zero between and within variance");
        r.f_value = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
    }
    r.f_value = r.ms_between / r.ms_within;
    r.p_value = f_sf(r.f_value, double(r.df_between), double(r.df_within));
    return r;
}

std::vector<TukeyComparison> tukey_kramer(const std::vector<std::vector<double>>& groups,
                                          const AnovaResult& anova) {
    std::vector<double> means(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) means[g] = mean_of(groups[g]);
    std::vector<TukeyComparison> out;
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            TukeyComparison c;
            c.group_a = int(a);
            c.group_b = int(b);
            c.mean_difference = means[a] - means[b];
            c.standard_error = std::sqrt(anova.ms_within / 2.0 *
                                         (1.0 / double(groups[a].size()) +
                                          1.0 / double(groups[b].size())));
            if (c.standard_error == 0.0)
                throw ValidationError("Tukey SE is zero: no within-group variance");
            c.q_statistic = std::fabs(c.mean_difference) / c.standard_error;
            c.p_value = studentized_range_sf(c.q_statistic, int(groups.size()),
                                             double(anova.df_within));
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace fp
