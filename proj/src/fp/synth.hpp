#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fp/common.hpp"
#include "fp/ingest.hpp"
#include "fp/lexicon.hpp"

namespace fp {

// Log-normal marginal for a count-valued field: round(exp(N(log_mean, log_sd))).
struct CountMarginal {
    double log_mean = 0.0;
    double log_sd = 1.0;
};

// Planted-truth generator settings. Coefficients are keyed by feature name
// (plus "intercept") and must name features present in the group's schema.
struct GeneratorConfig {
    int n_profiles = 1000;
    std::uint64_t seed = 0;
    Date crawl_date{};
    Date second_date{};
    double proportions[3] = {0.69, 0.074, 0.236};  // indexed by Group
    std::map<std::string, double> betas[3];        // indexed by Group
    std::map<std::string, CountMarginal> counts;   // overrides for count fields
    double contamination = 0.0;  // extra rows the ingest filter must drop
    double attrition = 0.0;      // rows present in crawl one but not crawl two

    void validate() const;
};

GeneratorConfig parse_generator_config(const std::string& text, const std::string& source_name);
GeneratorConfig load_generator_config(const std::string& path);

struct TruthRecord {
    std::uint64_t user_id = 0;
    Group group = Group::CustomContent;
    double linear_predictor = 0.0;
    double p_true = 0.0;
    bool increased = false;
};

struct SynthResult {
    Snapshot first;
    Snapshot second;
    std::vector<TruthRecord> truth;
};

// Deterministic per seed: each record derives its own generator stream, so
// thread count never changes the output.
SynthResult generate(const GeneratorConfig& config, const NameLexicon& lexicon,
                     const WordList& words, int threads = 1);

std::string truth_to_csv(const std::vector<TruthRecord>& truth);
std::vector<TruthRecord> truth_from_csv(const std::string& text);

}  // namespace fp
