#pragma once

#include <span>
#include <string>
#include <vector>

#include "fp/ingest.hpp"
#include "fp/logreg.hpp"
#include "fp/models.hpp"
#include "fp/router.hpp"
#include "fp/stats.hpp"

namespace fp {

// Text reports print three decimals with period separators and "0.000" for
// p-values below 0.0005; CSV reports keep full precision for machine use.
std::string format_p(double p);

// "age_in_days" -> "Age in Days", "impression_bad" -> "Impression: bad", ...
std::string display_feature_name(std::string_view raw);

struct NamedRow {
    std::string name;
    DescriptiveRow row;
};

std::string render_describe_text(const std::vector<NamedRow>& rows, const std::string& title);
std::string render_describe_csv(const std::vector<NamedRow>& rows);

std::string render_changes_text(const ChangeSummary& summary);
std::string render_changes_csv(const ChangeSummary& summary);

std::string render_anova_text(const AnovaResult& anova);
std::string render_anova_csv(const AnovaResult& anova);

// labels indexes group_a/group_b of each comparison.
std::string render_tukey_text(const std::vector<TukeyComparison>& comparisons,
                              const std::vector<std::string>& labels);
std::string render_tukey_csv(const std::vector<TukeyComparison>& comparisons,
                             const std::vector<std::string>& labels);

std::string render_logit_text(const LogitModel& model, const std::string& title);
// Long-format rows prefixed with a segment label so several models can share
// one file; include_header controls the leading header line.
std::string render_logit_csv(const LogitModel& model, const std::string& segment,
                             bool include_header = true);

std::string render_grid_text(const GridSearchResult& result);
std::string render_grid_csv(const GridSearchResult& result);
std::string render_grid_failures_csv(const GridSearchResult& result);

std::string render_evaluation_text(const RouterEvaluation& evaluation);
std::string render_evaluation_csv(const RouterEvaluation& evaluation);

// Per-group model selection of a trained router.
std::string render_router_summary_text(const RouterModel& router);
std::string render_router_summary_csv(const RouterModel& router);

// Histogram with bins equally wide in log10(1 + x); edges are in raw units,
// edges.size() == counts.size() + 1.
struct Histogram {
    std::vector<double> edges;
    std::vector<std::int64_t> counts;
};

Histogram log_histogram(std::span<const double> values, int bins);
std::string render_histogram_csv(const Histogram& histogram);

}  // namespace fp
