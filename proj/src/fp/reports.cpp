#include "fp/reports.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "fp/lexicon.hpp"

namespace fp {

namespace {

// Integral values print bare, everything else with three decimals; matches
// the source tables, which mix counts ("112") with ratios ("0.989").
std::string format_stat(double v) {
    if (std::isfinite(v) && std::fabs(v) < 1e15 && v == std::floor(v))
        return std::to_string(static_cast<long long>(v));
    return format_double(v, 3);
}

std::string format_interval(double lo, double hi) {
    return "[" + format_stat(lo) + ", " + format_stat(hi) + "]";
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv_field(fields[i]);
    }
    line += '\n';
    return line;
}

// Aligned fixed-width table: first column left, the rest right.
class TextTable {
  public:
    explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string render() const {
        std::vector<std::size_t> width(header_.size(), 0);
        for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
        for (const auto& row : rows_)
            for (std::size_t c = 0; c < row.size(); ++c)
                width[c] = std::max(width[c], row[c].size());

        std::string out;
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < header_.size(); ++c) {
                const std::string& cell = c < row.size() ? row[c] : std::string();
                if (c) out += "  ";
                if (c == 0) {
                    out += cell;
                    out.append(width[c] - cell.size(), ' ');
                } else {
                    out.append(width[c] - cell.size(), ' ');
                    out += cell;
                }
            }
            while (!out.empty() && out.back() == ' ') out.pop_back();
            out += '\n';
        };
        emit(header_);
        std::size_t total = 0;
        for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
        out.append(total, '-');
        out += '\n';
        for (const auto& row : rows_) emit(row);
        return out;
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> describe_cells(const std::string& name, const DescriptiveRow& r) {
    return {name,
            std::to_string(r.n),
            format_stat(r.mean),
            format_stat(r.sd),
            format_stat(r.median),
            format_interval(r.p2_5, r.p97_5),
            format_stat(r.min),
            format_stat(r.max)};
}

std::vector<std::string> describe_csv_cells(const std::string& name, const DescriptiveRow& r) {
    return {name,
            std::to_string(r.n),
            format_double_exact(r.mean),
            format_double_exact(r.sd),
            format_double_exact(r.median),
            format_double_exact(r.p2_5),
            format_double_exact(r.p97_5),
            format_double_exact(r.min),
            format_double_exact(r.max)};
}

std::string auc_cell(const GroupEval& e) {
    if (!e.present) return "-";
    if (!e.auc_defined) return "-";
    return format_double(e.auc, 3);
}

std::string auc_csv_cell(const GroupEval& e) {
    if (!e.present || !e.auc_defined) return "";
    return format_double_exact(e.auc);
}

}  // namespace

std::string format_p(double p) {
    if (p < 0.0005) return "0.000";
    return format_double(p, 3);
}

std::string display_feature_name(std::string_view raw) {
    if (raw == "(Intercept)") return "Constant";
    if (raw == "word_fraction") return "Name Contains Words";
    if (raw == "is_male") return "Name is Male";
    if (raw == "is_female") return "Name is Female";
    if (raw.rfind("impression_", 0) == 0) return "Impression: " + std::string(raw.substr(11));

    std::string out;
    for (const auto& part : split(raw, '_')) {
        if (!out.empty()) out += ' ';
        if (part == "url") {
            out += "URL";
        } else if (part == "utc") {
            out += "UTC";
        } else if (part == "in" || part == "of") {
            out += part;
        } else {
            std::string word = part;
            if (!word.empty()) word[0] = char(std::toupper(static_cast<unsigned char>(word[0])));
            out += word;
        }
    }
    return out;
}

std::string render_describe_text(const std::vector<NamedRow>& rows, const std::string& title) {
    TextTable table({"Measure", "N", "Mean", "SD", "Median", "95 % interval", "Min", "Max"});
    for (const auto& r : rows) table.add(describe_cells(r.name, r.row));
    return title + "\n" + table.render();
}

std::string render_describe_csv(const std::vector<NamedRow>& rows) {
    std::string out =
        csv_line({"measure", "n", "mean", "sd", "median", "p2_5", "p97_5", "min", "max"});
    for (const auto& r : rows) out += csv_line(describe_csv_cells(r.name, r.row));
    return out;
}

std::string render_changes_text(const ChangeSummary& summary) {
    std::vector<NamedRow> rows = {{"First Count", summary.first_count},
                                  {"Second Count", summary.second_count},
                                  {"Absolute Change", summary.absolute_change},
                                  {"Relative Change", summary.relative_change}};
    std::string out = render_describe_text(rows, "Follower counts across the two crawls");
    out += "Increased flags: " + std::to_string(summary.increased_count) + " of " +
           std::to_string(summary.first_count.n) + " (" +
           format_double(summary.increased_percent, 1) + " %)\n";
    return out;
}

std::string render_changes_csv(const ChangeSummary& summary) {
    std::vector<NamedRow> rows = {{"first_count", summary.first_count},
                                  {"second_count", summary.second_count},
                                  {"absolute_change", summary.absolute_change},
                                  {"relative_change", summary.relative_change}};
    std::string out = render_describe_csv(rows);
    out += csv_line({"increased_count", std::to_string(summary.increased_count)});
    out += csv_line({"increased_percent", format_double_exact(summary.increased_percent)});
    return out;
}

std::string render_anova_text(const AnovaResult& anova) {
    TextTable table({"Source", "SS", "df", "MS", "F", "p"});
    table.add({"Between Groups", format_stat(anova.ss_between), std::to_string(anova.df_between),
               format_stat(anova.ms_between), format_stat(anova.f_value),
               format_p(anova.p_value)});
    table.add({"Within Groups", format_stat(anova.ss_within), std::to_string(anova.df_within),
               format_stat(anova.ms_within), "", ""});
    table.add({"Total", format_stat(anova.ss_total),
               std::to_string(anova.df_between + anova.df_within), "", "", ""});
    return "One-way analysis of variance\n" + table.render();
}

std::string render_anova_csv(const AnovaResult& anova) {
    std::string out = csv_line({"source", "ss", "df", "ms", "f", "p"});
    out += csv_line({"between_groups", format_double_exact(anova.ss_between),
                     std::to_string(anova.df_between), format_double_exact(anova.ms_between),
                     format_double_exact(anova.f_value), format_double_exact(anova.p_value)});
    out += csv_line({"within_groups", format_double_exact(anova.ss_within),
                     std::to_string(anova.df_within), format_double_exact(anova.ms_within), "",
                     ""});
    out += csv_line({"total", format_double_exact(anova.ss_total),
                     std::to_string(anova.df_between + anova.df_within), "", "", ""});
    return out;
}

std::string render_tukey_text(const std::vector<TukeyComparison>& comparisons,
                              const std::vector<std::string>& labels) {
    TextTable table({"Comparison", "Mean diff", "SE", "q", "p", "Sig."});
    for (const auto& c : comparisons) {
        table.add({labels.at(std::size_t(c.group_a)) + " vs " + labels.at(std::size_t(c.group_b)),
                   format_stat(c.mean_difference), format_stat(c.standard_error),
                   format_stat(c.q_statistic), format_p(c.p_value),
                   significance_stars(c.p_value)});
    }
    return "Tukey-Kramer pairwise comparisons\n" + table.render();
}

std::string render_tukey_csv(const std::vector<TukeyComparison>& comparisons,
                             const std::vector<std::string>& labels) {
    std::string out = csv_line({"group_a", "group_b", "mean_difference", "standard_error", "q", "p"});
    for (const auto& c : comparisons) {
        out += csv_line({labels.at(std::size_t(c.group_a)), labels.at(std::size_t(c.group_b)),
                         format_double_exact(c.mean_difference),
                         format_double_exact(c.standard_error),
                         format_double_exact(c.q_statistic), format_double_exact(c.p_value)});
    }
    return out;
}

std::string render_logit_text(const LogitModel& model, const std::string& title) {
    std::string out = "Binary logistic regression: " + title + "\n";
    out += "N = " + std::to_string(model.n) + "; " +
           (model.converged ? "converged in " + std::to_string(model.iterations) + " iterations"
                            : "DID NOT CONVERGE") +
           (model.separation ? "; separation guard hit" : "") + "\n";
    out += "Log-likelihood = " + format_double(model.log_likelihood, 3) + " (null " +
           format_double(model.null_log_likelihood, 3) + ")\n";
    out += "Nagelkerke R^2 = " + format_double(nagelkerke_r2(model), 3) + "\n\n";

    TextTable table({"Variable", "B", "Sig.", "SE", "Exp(B)"});
    for (const auto& row : wald_table(model, true)) {
        table.add({display_feature_name(row.variable), format_double(row.beta, 3),
                   significance_stars(row.p_value), format_double(row.standard_error, 3),
                   format_double(row.odds_ratio, 3)});
    }
    out += table.render();
    out += "Significance: *** p<0.001, ** p<0.01, * p<0.05\n";
    return out;
}

std::string render_logit_csv(const LogitModel& model, const std::string& segment,
                             bool include_header) {
    std::string out;
    if (include_header)
        out = csv_line({"segment", "variable", "beta", "standard_error", "wald", "p",
                        "odds_ratio"});
    for (const auto& row : wald_table(model, true)) {
        out += csv_line({segment, row.variable, format_double_exact(row.beta),
                         format_double_exact(row.standard_error),
                         format_double_exact(row.wald_statistic), format_double_exact(row.p_value),
                         format_double_exact(row.odds_ratio)});
    }
    out += csv_line({segment, "(n)", std::to_string(model.n), "", "", "", ""});
    out += csv_line(
        {segment, "(log_likelihood)", format_double_exact(model.log_likelihood), "", "", "", ""});
    out += csv_line({segment, "(null_log_likelihood)",
                     format_double_exact(model.null_log_likelihood), "", "", "", ""});
    out += csv_line(
        {segment, "(nagelkerke_r2)", format_double_exact(nagelkerke_r2(model)), "", "", "", ""});
    return out;
}

std::string render_grid_text(const GridSearchResult& result) {
    std::string out = "Grid search by mean cross-validated AUC\n";
    TextTable table({"Family", "Best parameters", "Mean AUC", "SD", "Points"});
    for (std::size_t i = 0; i < result.family_best.size(); ++i) {
        const CvResult& r = result.family_best[i];
        std::size_t points = 0;
        for (const auto& e : result.evaluated)
            if (e.family == r.family) ++points;
        std::string marker = int(i) == result.best_index ? r.family + " *" : r.family;
        table.add({marker, format_params(r.params), format_double(r.mean_auc, 3),
                   format_double(r.sd_auc, 3), std::to_string(points)});
    }
    out += table.render();
    const CvResult& best = result.best();
    out += "Selected: " + best.family;
    if (!best.params.empty()) out += " (" + format_params(best.params) + ")";
    out += ", mean AUC " + format_double(best.mean_auc, 3) + "\n";
    if (!result.failures.empty())
        out += "Failed grid points: " + std::to_string(result.failures.size()) + "\n";
    return out;
}

std::string render_grid_csv(const GridSearchResult& result) {
    std::string out = csv_line({"family", "parameters", "fold_aucs", "mean_auc", "sd_auc"});
    for (const auto& r : result.evaluated) {
        std::string folds;
        for (std::size_t i = 0; i < r.fold_aucs.size(); ++i) {
            if (i) folds += ';';
            folds += format_double_exact(r.fold_aucs[i]);
        }
        out += csv_line({r.family, format_params(r.params), folds,
                         format_double_exact(r.mean_auc), format_double_exact(r.sd_auc)});
    }
    return out;
}

std::string render_grid_failures_csv(const GridSearchResult& result) {
    std::string out = csv_line({"family", "parameters", "error"});
    for (const auto& f : result.failures)
        out += csv_line({f.family, format_params(f.params), f.message});
    return out;
}

std::string render_evaluation_text(const RouterEvaluation& evaluation) {
    TextTable table({"Segment", "N", "Routed AUC", "Global AUC", "Random"});
    for (std::size_t g = 0; g < kAllGroups.size(); ++g) {
        table.add({std::string(group_label(kAllGroups[g])), std::to_string(evaluation.routed[g].n),
                   auc_cell(evaluation.routed[g]),
                   evaluation.has_global ? auc_cell(evaluation.global[g]) : "-", "0.500"});
    }
    table.add({"Overall", std::to_string(evaluation.n),
               evaluation.overall_defined ? format_double(evaluation.routed_overall, 3) : "-",
               evaluation.has_global && evaluation.overall_defined
                   ? format_double(evaluation.global_overall, 3)
                   : "-",
               format_double(evaluation.random_overall, 3)});
    return "Classifier evaluation (AUC)\n" + table.render();
}

std::string render_evaluation_csv(const RouterEvaluation& evaluation) {
    std::string out =
        csv_line({"segment", "n", "positives", "routed_auc", "global_auc", "random_auc"});
    for (std::size_t g = 0; g < kAllGroups.size(); ++g) {
        out += csv_line({std::string(group_id(kAllGroups[g])),
                         std::to_string(evaluation.routed[g].n),
                         std::to_string(evaluation.routed[g].positives),
                         auc_csv_cell(evaluation.routed[g]),
                         evaluation.has_global ? auc_csv_cell(evaluation.global[g]) : "", "0.5"});
    }
    std::size_t positives = 0;
    for (std::size_t g = 0; g < kAllGroups.size(); ++g) positives += evaluation.routed[g].positives;
    out += csv_line({"overall", std::to_string(evaluation.n), std::to_string(positives),
                     evaluation.overall_defined ? format_double_exact(evaluation.routed_overall)
                                                : "",
                     evaluation.has_global && evaluation.overall_defined
                         ? format_double_exact(evaluation.global_overall)
                         : "",
                     format_double_exact(evaluation.random_overall)});
    return out;
}

namespace {

std::vector<std::string> summary_cells(const std::string& segment, const GroupModelEntry& e,
                                       bool csv) {
    auto num = [&](double v) { return csv ? format_double_exact(v) : format_double(v, 3); };
    return {segment,
            e.spec.family,
            format_params(e.spec.params),
            num(e.selection.mean_auc),
            num(e.selection.sd_auc),
            std::to_string(e.train_rows),
            std::to_string(e.train_positives)};
}

}  // namespace

std::string render_router_summary_text(const RouterModel& router) {
    std::string out = "Trained router (seed " + std::to_string(router.seed) + ", " +
                      std::to_string(router.cv_k) + "-fold x " +
                      std::to_string(router.cv_repeats) + "-repeat CV, crawl date " +
                      format_date(router.crawl_date) + ")\n";
    TextTable table(
        {"Segment", "Family", "Parameters", "Mean AUC", "SD", "Rows", "Positives"});
    for (std::size_t g = 0; g < kAllGroups.size(); ++g)
        table.add(summary_cells(std::string(group_label(kAllGroups[g])), router.groups[g], false));
    if (router.global)
        table.add(summary_cells("Global (core)", *router.global, false));
    out += table.render();
    out += "Data fingerprint: " + to_hex(router.data_fingerprint) +
           "; grid fingerprint: " + to_hex(router.grid_fingerprint) + "\n";
    return out;
}

std::string render_router_summary_csv(const RouterModel& router) {
    std::string out = csv_line({"segment", "family", "parameters", "cv_mean_auc", "cv_sd_auc",
                                "train_rows", "train_positives"});
    for (std::size_t g = 0; g < kAllGroups.size(); ++g)
        out += csv_line(summary_cells(std::string(group_id(kAllGroups[g])), router.groups[g], true));
    if (router.global) out += csv_line(summary_cells("global", *router.global, true));
    return out;
}

Histogram log_histogram(std::span<const double> values, int bins) {
    if (values.empty()) throw ValidationError("histogram needs at least one value");
    if (bins < 1) throw ValidationError("histogram needs at least one bin");
    double hi = 0.0;
    for (double v : values) {
        if (!(v >= 0.0)) throw ValidationError("log histogram values must be non-negative");
        hi = std::max(hi, std::log10(1.0 + v));
    }
    Histogram h;
    if (hi == 0.0) {  // all zeros: one degenerate bin
        h.edges = {0.0, 0.0};
        h.counts = {std::int64_t(values.size())};
        return h;
    }
    const double width = hi / bins;
    h.edges.resize(std::size_t(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        h.edges[std::size_t(b)] = std::pow(10.0, width * b) - 1.0;
    h.edges[0] = 0.0;
    h.counts.assign(std::size_t(bins), 0);
    for (double v : values) {
        int b = int(std::log10(1.0 + v) / width);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[std::size_t(b)];
    }
    return h;
}

std::string render_histogram_csv(const Histogram& histogram) {
    std::string out = csv_line({"bin_low", "bin_high", "count"});
    for (std::size_t b = 0; b < histogram.counts.size(); ++b)
        out += csv_line({format_double_exact(histogram.edges[b]),
                         format_double_exact(histogram.edges[b + 1]),
                         std::to_string(histogram.counts[b])});
    return out;
}

}  // namespace fp
