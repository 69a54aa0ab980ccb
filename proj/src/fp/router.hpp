#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fp/features.hpp"
#include "fp/ingest.hpp"
#include "fp/lexicon.hpp"
#include "fp/models.hpp"

namespace fp {

// One trained per-group (or global-baseline) classifier.
struct GroupModelEntry {
    FeatureSchema schema;
    LearnerSpec spec;     // winning family and parameters
    FittedModel model;    // refit on the full training rows of the group
    CvResult selection;   // cross-validation scores behind the selection
    std::size_t train_rows = 0;
    std::size_t train_positives = 0;
};

// Classifier that routes each profile to the model of its name-field group,
// plus an optional single core-schema model trained on everything for the
// routed-versus-global comparison.
struct RouterModel {
    static constexpr int kVersion = 1;

    std::uint64_t seed = 0;
    Date crawl_date{};  // first-crawl date the training features derived from
    int cv_k = 10;
    int cv_repeats = 5;
    std::uint64_t data_fingerprint = 0;
    std::uint64_t grid_fingerprint = 0;
    std::uint64_t lexicon_fingerprint = 0;
    std::uint64_t wordlist_fingerprint = 0;

    GroupModelEntry groups[3];  // indexed by Group
    std::optional<GroupModelEntry> global;
};

std::uint64_t labeled_fingerprint(const LabeledSet& labeled);
std::uint64_t grids_fingerprint(const std::vector<FamilyGrid>& grids);

// Per group: assign rows, grid-search on that group's schema, refit the best
// point on all of the group's rows. with_global adds the core-schema baseline
// selected and fitted the same way on every row. Deterministic per seed.
RouterModel train_router(const LabeledSet& train, const NameLexicon& lexicon,
                         const WordList& words, const std::vector<FamilyGrid>& grids,
                         const CvConfig& cv, std::uint64_t seed, int threads,
                         bool with_global = true);

struct Classification {
    Group group = Group::CustomContent;
    double probability = 0.0;
    bool label = false;  // probability >= 0.5
};

Classification classify(const RouterModel& router, const RawProfile& profile,
                        const CrawlContext& ctx, const NameLexicon& lexicon,
                        const WordList& words);

// Core-schema score from the global baseline; requires router.global.
double score_global(const RouterModel& router, const RawProfile& profile, const CrawlContext& ctx,
                    const NameLexicon& lexicon, const WordList& words);

struct GroupEval {
    bool present = false;      // any eval rows routed here
    bool auc_defined = false;  // both labels present among them
    std::size_t n = 0;
    std::size_t positives = 0;
    double auc = 0.0;
};

struct RouterEvaluation {
    struct Row {
        std::uint64_t user_id = 0;
        Group group = Group::CustomContent;
        bool label = false;
        double p_routed = 0.0;
        double p_global = 0.0;  // NaN when the router carries no baseline
    };

    std::size_t n = 0;
    GroupEval routed[3];
    GroupEval global[3];
    bool overall_defined = false;
    double routed_overall = 0.0;
    double global_overall = 0.0;
    double random_overall = 0.5;  // constant scorer under the tie convention
    bool has_global = false;
    std::vector<Row> rows;  // eval order
};

RouterEvaluation evaluate_router(const RouterModel& router, const LabeledSet& eval,
                                 const NameLexicon& lexicon, const WordList& words);

// Versioned JSON container. Loading verifies the magic, the version and that
// the supplied lexicon/wordlist fingerprints match the training ones.
void save_router(const RouterModel& router, const std::string& path);
RouterModel load_router(const std::string& path, const NameLexicon& lexicon,
                        const WordList& words);

}  // namespace fp
