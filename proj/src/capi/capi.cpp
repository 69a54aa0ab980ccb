#include "followerpred.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "fp/common.hpp"
#include "fp/features.hpp"
#include "fp/ingest.hpp"
#include "fp/lexicon.hpp"
#include "fp/logreg.hpp"
#include "fp/models.hpp"
#include "fp/reports.hpp"
#include "fp/router.hpp"
#include "fp/stats.hpp"
#include "fp/synth.hpp"

struct fp_lexicon {
    fp::NameLexicon impl;
};
struct fp_wordlist {
    fp::WordList impl;
};
struct fp_snapshot {
    fp::Snapshot impl;
};
struct fp_labeled {
    fp::LabeledSet impl;
};
struct fp_router {
    fp::RouterModel impl;
};

namespace {

thread_local std::string t_last_error;

int set_error(int code, const char* what) {
    t_last_error = what;
    return code;
}

// Maps the library's exception hierarchy onto status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return FP_OK;
    } catch (const fp::IoError& e) {
        return set_error(FP_EIO, e.what());
    } catch (const fp::ParseError& e) {
        return set_error(FP_EPARSE, e.what());
    } catch (const fp::ValidationError& e) {
        return set_error(FP_EINVALID, e.what());
    } catch (const std::exception& e) {
        return set_error(FP_EINTERNAL, e.what());
    } catch (...) {
        return set_error(FP_EINTERNAL, "unknown failure");
    }
}

void require(bool condition, const char* what) {
    if (!condition) throw fp::ValidationError(what);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void return_string(char** out, const std::string& s) {
    require(out != nullptr, "output string pointer is null");
    *out = dup_string(s);
}

std::vector<std::vector<const fp::LabeledProfile*>> partition_by_group(
    const fp::LabeledSet& labeled, const fp::NameLexicon& lexicon, const fp::WordList& words) {
    std::vector<std::vector<const fp::LabeledProfile*>> parts(fp::kAllGroups.size());
    for (const auto& r : labeled.records) {
        fp::Group g = fp::assign_group(r.profile.name_field, lexicon, words);
        parts[std::size_t(g)].push_back(&r);
    }
    return parts;
}

std::vector<std::vector<double>> follower_counts_by_group(const fp_labeled* labeled,
                                                          const fp_lexicon* lexicon,
                                                          const fp_wordlist* words) {
    auto parts = partition_by_group(labeled->impl, lexicon->impl, words->impl);
    std::vector<std::vector<double>> groups(parts.size());
    for (std::size_t g = 0; g < parts.size(); ++g) {
        groups[g].reserve(parts[g].size());
        for (const auto* r : parts[g]) groups[g].push_back(double(r->profile.followers_count));
    }
    return groups;
}

std::vector<std::string> group_label_list() {
    std::vector<std::string> labels;
    for (fp::Group g : fp::kAllGroups) labels.emplace_back(fp::group_label(g));
    return labels;
}

fp::CvConfig make_cv(int k, int repeats, std::uint64_t seed, int threads) {
    fp::CvConfig cv;
    cv.k = k;
    cv.repeats = repeats;
    cv.seed = seed;
    cv.threads = threads;
    return cv;
}

}  // namespace

extern "C" {

const char* fp_version(void) { return "1.0.0"; }

const char* fp_last_error(void) { return t_last_error.c_str(); }

void fp_string_free(char* s) { std::free(s); }

int fp_file_fingerprint(const char* path, char** out_hex) {
    return guarded([&] {
        require(path != nullptr, "path is null");
        return_string(out_hex, fp::to_hex(fp::fnv1a_file(path)));
    });
}

/* ---- reference data ---------------------------------------------------- */

int fp_lexicon_load(const char* path, fp_lexicon** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new fp_lexicon{fp::NameLexicon::load_csv(path)};
    });
}

void fp_lexicon_free(fp_lexicon* lexicon) { delete lexicon; }

int fp_wordlist_load(const char* path, fp_wordlist** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new fp_wordlist{fp::WordList::load(path)};
    });
}

void fp_wordlist_free(fp_wordlist* words) { delete words; }

/* ---- snapshots ----------------------------------------------------------- */

int fp_snapshot_load(const char* path, const char* crawl_date, fp_snapshot** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        std::optional<fp::Date> override_date;
        if (crawl_date != nullptr) override_date = fp::parse_date(crawl_date);
        *out = new fp_snapshot{fp::load_snapshot(path, override_date)};
    });
}

int fp_snapshot_save(const fp_snapshot* snapshot, const char* path) {
    return guarded([&] {
        require(snapshot != nullptr && path != nullptr, "null argument");
        fp::save_snapshot(snapshot->impl, path);
    });
}

void fp_snapshot_free(fp_snapshot* snapshot) { delete snapshot; }

int fp_snapshot_counts(const fp_snapshot* snapshot, uint64_t* n, uint64_t* malformed) {
    return guarded([&] {
        require(snapshot != nullptr, "null snapshot");
        if (n) *n = snapshot->impl.profiles.size();
        if (malformed) *malformed = snapshot->impl.malformed;
    });
}

int fp_snapshot_filter(const fp_snapshot* snapshot, fp_snapshot** out) {
    return guarded([&] {
        require(snapshot != nullptr && out != nullptr, "null argument");
        fp::Snapshot filtered;
        filtered.ctx = snapshot->impl.ctx;
        filtered.profiles = fp::filter_profiles(snapshot->impl.profiles, snapshot->impl.ctx);
        *out = new fp_snapshot{std::move(filtered)};
    });
}

/* ---- labeled sets ---------------------------------------------------------- */

int fp_labeled_join(const fp_snapshot* first, const fp_snapshot* second, fp_labeled** out,
                    uint64_t* attrition) {
    return guarded([&] {
        require(first != nullptr && second != nullptr && out != nullptr, "null argument");
        fp::JoinResult joined = fp::join_snapshots(first->impl, second->impl);
        if (attrition) *attrition = joined.attrition;
        *out = new fp_labeled{std::move(joined.labeled)};
    });
}

int fp_labeled_load(const char* path, fp_labeled** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new fp_labeled{fp::load_labeled(path)};
    });
}

int fp_labeled_save(const fp_labeled* labeled, const char* path) {
    return guarded([&] {
        require(labeled != nullptr && path != nullptr, "null argument");
        fp::save_labeled(labeled->impl, path);
    });
}

void fp_labeled_free(fp_labeled* labeled) { delete labeled; }

int fp_labeled_counts(const fp_labeled* labeled, uint64_t* n, uint64_t* positives) {
    return guarded([&] {
        require(labeled != nullptr, "null labeled set");
        if (n) *n = labeled->impl.records.size();
        if (positives) {
            uint64_t count = 0;
            for (const auto& r : labeled->impl.records) count += r.increased ? 1 : 0;
            *positives = count;
        }
    });
}

int fp_labeled_split(const fp_labeled* labeled, double train_ratio, uint64_t seed,
                     fp_labeled** train, fp_labeled** eval) {
    return guarded([&] {
        require(labeled != nullptr && train != nullptr && eval != nullptr, "null argument");
        fp::SplitResult split = fp::stratified_split(labeled->impl, train_ratio, seed);
        *train = new fp_labeled{std::move(split.train)};
        *eval = new fp_labeled{std::move(split.eval)};
    });
}

/* ---- reports ------------------------------------------------------------ */

int fp_report_changes(const fp_labeled* labeled, int as_csv, char** out) {
    return guarded([&] {
        require(labeled != nullptr, "null labeled set");
        fp::ChangeSummary summary = fp::describe_changes(labeled->impl);
        return_string(out, as_csv ? fp::render_changes_csv(summary)
                                  : fp::render_changes_text(summary));
    });
}

int fp_report_measures(const fp_labeled* labeled, const fp_lexicon* lexicon,
                       const fp_wordlist* words, int as_csv, char** out) {
    return guarded([&] {
        require(labeled != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        const fp::LabeledSet& set = labeled->impl;
        require(!set.records.empty(), "labeled set is empty");

        std::vector<const fp::LabeledProfile*> rows;
        rows.reserve(set.records.size());
        for (const auto& r : set.records) rows.push_back(&r);
        fp::FeatureMatrix fm =
            fp::extract_matrix(rows, fp::FeatureSchema::core(), set.ctx, lexicon->impl,
                               words->impl);

        std::vector<fp::NamedRow> report;
        std::vector<double> followers;
        followers.reserve(set.records.size());
        for (const auto& r : set.records) followers.push_back(double(r.profile.followers_count));
        report.push_back({"Followers Count", fp::describe(followers)});

        // the interval-level measures, in schema order
        for (std::size_t c = 0; c < fm.schema.size(); ++c) {
            if (fm.schema.indicator_mask[c]) continue;
            std::vector<double> column(fm.x.rows());
            for (std::size_t r = 0; r < fm.x.rows(); ++r) column[r] = fm.x.at(r, c);
            report.push_back(
                {fp::display_feature_name(fm.schema.feature_names[c]), fp::describe(column)});
        }
        return_string(out, as_csv ? fp::render_describe_csv(report)
                                  : fp::render_describe_text(report, "Interval-level measures"));
    });
}

int fp_report_group_counts(const fp_labeled* labeled, const fp_lexicon* lexicon,
                           const fp_wordlist* words, int as_csv, char** out) {
    return guarded([&] {
        require(labeled != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        auto groups = follower_counts_by_group(labeled, lexicon, words);
        std::vector<fp::NamedRow> report;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            require(!groups[g].empty(), "a group has no records");
            std::string name = as_csv ? std::string(fp::group_id(fp::kAllGroups[g]))
                                      : std::string(fp::group_label(fp::kAllGroups[g]));
            report.push_back({std::move(name), fp::describe(groups[g])});
        }
        return_string(out,
                      as_csv ? fp::render_describe_csv(report)
                             : fp::render_describe_text(report,
                                                        "Follower counts by name-field group"));
    });
}

int fp_report_group_assignments(const fp_labeled* labeled, const fp_lexicon* lexicon,
                                const fp_wordlist* words, char** out_csv) {
    return guarded([&] {
        require(labeled != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        std::string csv = "user_id,group\n";
        for (const auto& r : labeled->impl.records) {
            fp::Group g = fp::assign_group(r.profile.name_field, lexicon->impl, words->impl);
            csv += std::to_string(r.profile.user_id);
            csv += ',';
            csv += fp::group_id(g);
            csv += '\n';
        }
        return_string(out_csv, csv);
    });
}

int fp_report_anova(const fp_labeled* labeled, const fp_lexicon* lexicon, const fp_wordlist* words,
                    int as_csv, char** out) {
    return guarded([&] {
        require(labeled != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        auto groups = follower_counts_by_group(labeled, lexicon, words);
        fp::AnovaResult anova = fp::one_way_anova(groups);
        return_string(out, as_csv ? fp::render_anova_csv(anova) : fp::render_anova_text(anova));
    });
}

int fp_report_tukey(const fp_labeled* labeled, const fp_lexicon* lexicon, const fp_wordlist* words,
                    int as_csv, char** out) {
    return guarded([&] {
        require(labeled != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        auto groups = follower_counts_by_group(labeled, lexicon, words);
        fp::AnovaResult anova = fp::one_way_anova(groups);
        auto comparisons = fp::tukey_kramer(groups, anova);
        auto labels = group_label_list();
        if (as_csv) {
            std::vector<std::string> ids;
            for (fp::Group g : fp::kAllGroups) ids.emplace_back(fp::group_id(g));
            return_string(out, fp::render_tukey_csv(comparisons, ids));
        } else {
            return_string(out, fp::render_tukey_text(comparisons, labels));
        }
    });
}

int fp_report_logreg(const fp_labeled* labeled, const fp_lexicon* lexicon,
                     const fp_wordlist* words, const char* group, int as_csv, char** out) {
    return guarded([&] {
        require(labeled != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        std::vector<fp::Group> wanted;
        if (group == nullptr) {
            wanted.assign(fp::kAllGroups.begin(), fp::kAllGroups.end());
        } else {
            wanted.push_back(fp::group_from_id(group));
        }

        auto parts = partition_by_group(labeled->impl, lexicon->impl, words->impl);
        std::string text;
        for (fp::Group g : wanted) {
            const auto& rows = parts[std::size_t(g)];
            require(!rows.empty(), "group has no records");
            fp::FeatureMatrix fm = fp::extract_matrix(rows, fp::FeatureSchema::for_group(g),
                                                      labeled->impl.ctx, lexicon->impl,
                                                      words->impl);
            fp::LogitModel model = fp::fit_logit(fm.x, fm.y, fm.schema.feature_names);
            if (as_csv) {
                text += fp::render_logit_csv(model, std::string(fp::group_id(g)), text.empty());
            } else {
                if (!text.empty()) text += '\n';
                text += fp::render_logit_text(model, std::string(fp::group_label(g)));
            }
        }
        return_string(out, text);
    });
}

int fp_histogram_followers(const fp_labeled* labeled, int which, int bins, char** out_csv) {
    return guarded([&] {
        require(labeled != nullptr, "null labeled set");
        require(which == 0 || which == 1, "which must be 0 (first crawl) or 1 (second)");
        std::vector<double> values;
        values.reserve(labeled->impl.records.size());
        for (const auto& r : labeled->impl.records)
            values.push_back(double(which == 0 ? r.profile.followers_count : r.followers_second));
        return_string(out_csv, fp::render_histogram_csv(fp::log_histogram(values, bins)));
    });
}

/* ---- model selection ------------------------------------------------------- */

int fp_gridsearch(const fp_labeled* labeled, const fp_lexicon* lexicon, const fp_wordlist* words,
                  const char* grid_path, const char* scope, int cv_k, int cv_repeats,
                  uint64_t seed, int threads, char** out_text, char** out_csv,
                  char** out_failures_csv) {
    return guarded([&] {
        require(labeled != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        require(grid_path != nullptr && scope != nullptr, "null argument");

        fp::FeatureSchema schema;
        std::vector<const fp::LabeledProfile*> rows;
        if (std::string_view(scope) == "global") {
            schema = fp::FeatureSchema::core();
            for (const auto& r : labeled->impl.records) rows.push_back(&r);
        } else {
            fp::Group g = fp::group_from_id(scope);
            schema = fp::FeatureSchema::for_group(g);
            auto parts = partition_by_group(labeled->impl, lexicon->impl, words->impl);
            rows = std::move(parts[std::size_t(g)]);
        }
        require(!rows.empty(), "scope selects no records");

        fp::FeatureMatrix fm =
            fp::extract_matrix(rows, schema, labeled->impl.ctx, lexicon->impl, words->impl);
        auto grids = fp::load_grid_config(grid_path);
        fp::GridSearchResult result =
            fp::grid_search(grids, fm.x, fm.y, make_cv(cv_k, cv_repeats, seed, threads));

        if (out_text) *out_text = dup_string(fp::render_grid_text(result));
        if (out_csv) *out_csv = dup_string(fp::render_grid_csv(result));
        if (out_failures_csv) *out_failures_csv = dup_string(fp::render_grid_failures_csv(result));
    });
}

/* ---- router ------------------------------------------------------------------ */

int fp_router_train(const fp_labeled* train, const fp_lexicon* lexicon, const fp_wordlist* words,
                    const char* grid_path, int cv_k, int cv_repeats, uint64_t seed, int threads,
                    int with_global, fp_router** out) {
    return guarded([&] {
        require(train != nullptr && lexicon != nullptr && words != nullptr, "null argument");
        require(grid_path != nullptr && out != nullptr, "null argument");
        auto grids = fp::load_grid_config(grid_path);
        fp::RouterModel router =
            fp::train_router(train->impl, lexicon->impl, words->impl, grids,
                             make_cv(cv_k, cv_repeats, seed, threads), seed, threads,
                             with_global != 0);
        *out = new fp_router{std::move(router)};
    });
}

int fp_router_save(const fp_router* router, const char* path) {
    return guarded([&] {
        require(router != nullptr && path != nullptr, "null argument");
        fp::save_router(router->impl, path);
    });
}

int fp_router_load(const char* path, const fp_lexicon* lexicon, const fp_wordlist* words,
                   fp_router** out) {
    return guarded([&] {
        require(path != nullptr && lexicon != nullptr && words != nullptr && out != nullptr,
                "null argument");
        *out = new fp_router{fp::load_router(path, lexicon->impl, words->impl)};
    });
}

void fp_router_free(fp_router* router) { delete router; }

int fp_router_summary(const fp_router* router, int as_csv, char** out) {
    return guarded([&] {
        require(router != nullptr, "null router");
        return_string(out, as_csv ? fp::render_router_summary_csv(router->impl)
                                  : fp::render_router_summary_text(router->impl));
    });
}

int fp_router_evaluate(const fp_router* router, const fp_labeled* eval, const fp_lexicon* lexicon,
                       const fp_wordlist* words, int as_csv, char** out) {
    return guarded([&] {
        require(router != nullptr && eval != nullptr && lexicon != nullptr && words != nullptr,
                "null argument");
        fp::RouterEvaluation ev =
            fp::evaluate_router(router->impl, eval->impl, lexicon->impl, words->impl);
        return_string(out,
                      as_csv ? fp::render_evaluation_csv(ev) : fp::render_evaluation_text(ev));
    });
}

int fp_router_predict(const fp_router* router, const fp_snapshot* snapshot,
                      const fp_lexicon* lexicon, const fp_wordlist* words, char** out_csv) {
    return guarded([&] {
        require(router != nullptr && snapshot != nullptr && lexicon != nullptr &&
                    words != nullptr,
                "null argument");
        std::string csv = "user_id,group,probability,label\n";
        for (const auto& p : snapshot->impl.profiles) {
            fp::Classification c =
                fp::classify(router->impl, p, snapshot->impl.ctx, lexicon->impl, words->impl);
            csv += std::to_string(p.user_id);
            csv += ',';
            csv += fp::group_id(c.group);
            csv += ',';
            csv += fp::format_double_exact(c.probability);
            csv += ',';
            csv += c.label ? '1' : '0';
            csv += '\n';
        }
        return_string(out_csv, csv);
    });
}

/* ---- synthetic data ----------------------------------------------------------- */

int fp_synth_generate(const char* config_path, const fp_lexicon* lexicon,
                      const fp_wordlist* words, int threads, const char* first_path,
                      const char* second_path, const char* truth_path, uint64_t* n_first,
                      uint64_t* n_second, uint64_t* n_truth) {
    return guarded([&] {
        require(config_path != nullptr && lexicon != nullptr && words != nullptr,
                "null argument");
        require(first_path != nullptr && second_path != nullptr && truth_path != nullptr,
                "null output path");
        fp::GeneratorConfig config = fp::load_generator_config(config_path);
        fp::SynthResult result = fp::generate(config, lexicon->impl, words->impl, threads);
        fp::save_snapshot(result.first, first_path);
        fp::save_snapshot(result.second, second_path);
        fp::write_text_file(truth_path, fp::truth_to_csv(result.truth));
        if (n_first) *n_first = result.first.profiles.size();
        if (n_second) *n_second = result.second.profiles.size();
        if (n_truth) *n_truth = result.truth.size();
    });
}

}  // extern "C"
