#pragma once

#include <string>
#include <vector>

#include "fp/ingest.hpp"
#include "fp/lexicon.hpp"
#include "fp/matrix.hpp"

namespace fp {

// Ordered feature layout for one group. The core block is shared by every
// group; ContainsWords adds the word fraction, ContainsName additionally adds
// gender and impression flags.
struct FeatureSchema {
    Group group = Group::CustomContent;
    std::vector<std::string> feature_names;
    std::vector<bool> indicator_mask;  // true where the feature is a 0/1 flag

    std::size_t size() const { return feature_names.size(); }
    int index_of(std::string_view name) const;  // -1 when absent

    static FeatureSchema for_group(Group g);
    // Core-only layout used by the global baseline (same as CustomContent).
    static FeatureSchema core();
};

struct FeatureVector {
    std::vector<double> values;
    bool label = false;
};

// Number of maximal substrings "http://"/"https://" followed by at least one
// non-whitespace character.
int count_description_urls(std::string_view description);
// Number of '#' characters immediately followed by an ASCII letter or digit.
int count_description_hashtags(std::string_view description);

// Derives the feature values of one profile under the schema. Group-specific
// blocks use the profile's normalized name tokens; requesting the
// ContainsName block for a profile with no lexicon match is an error.
std::vector<double> extract_values(const RawProfile& profile, const FeatureSchema& schema,
                                   const CrawlContext& ctx, const NameLexicon& lexicon,
                                   const WordList& words);

FeatureVector extract(const LabeledProfile& profile, const FeatureSchema& schema,
                      const CrawlContext& ctx, const NameLexicon& lexicon, const WordList& words);

// Feature matrix + labels for a set of records under one schema.
struct FeatureMatrix {
    FeatureSchema schema;
    Matrix x;
    std::vector<char> y;  // 0/1 labels aligned with rows
};

FeatureMatrix extract_matrix(const std::vector<const LabeledProfile*>& records,
                             const FeatureSchema& schema, const CrawlContext& ctx,
                             const NameLexicon& lexicon, const WordList& words);

// Per-feature standardization learned from training data. Constant features
// are flagged and passed through unchanged.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> sd;  // sample SD (n-1); meaningful only where !constant
    std::vector<bool> constant;

    static Scaler fit(const Matrix& x);
    std::vector<double> apply(const std::vector<double>& values) const;
    void apply_row(const double* in, double* out) const;
    Matrix apply(const Matrix& x) const;
};

// Interchange CSV: header = feature names + "label", one row per record.
std::string feature_matrix_to_csv(const FeatureMatrix& fm);
// Reads the interchange CSV back; the schema keeps the header names with an
// all-false indicator mask (group identity is not stored in the CSV).
FeatureMatrix feature_matrix_from_csv(const std::string& text, const std::string& source_name);

}  // namespace fp
