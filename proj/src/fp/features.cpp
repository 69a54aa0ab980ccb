#include "fp/features.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace fp {
namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool has_content(const std::optional<std::string>& field) {
    return field && !trim(*field).empty();
}

void add(FeatureSchema& s, std::string name, bool indicator) {
    s.feature_names.push_back(std::move(name));
    s.indicator_mask.push_back(indicator);
}

void add_core(FeatureSchema& s) {
    add(s, "age_in_days", false);
    add(s, "inactivity_in_days", false);
    add(s, "tweet_count", false);
    add(s, "favorited_count", false);
    add(s, "friends_count", false);
    add(s, "listed_count", false);
    add(s, "description_url_count", false);
    add(s, "description_hashtag_count", false);
    add(s, "has_default_profile", true);
    add(s, "has_default_profile_image", true);
    add(s, "has_description", true);
    add(s, "has_location", true);
    add(s, "has_url", true);
    add(s, "utc_offset", false);
    add(s, "has_utc_offset", true);
}

}  // namespace

int FeatureSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (feature_names[i] == name) return int(i);
    return -1;
}

FeatureSchema FeatureSchema::for_group(Group g) {
    FeatureSchema s;
    s.group = g;
    add_core(s);
    if (g == Group::ContainsWords || g == Group::ContainsName) add(s, "word_fraction", false);
    if (g == Group::ContainsName) {
        add(s, "is_male", true);
        add(s, "is_female", true);
        for (auto tag : impression_tags()) add(s, "impression_" + std::string(tag), true);
    }
    return s;
}

FeatureSchema FeatureSchema::core() { return for_group(Group::CustomContent); }

int count_description_urls(std::string_view description) {
    int count = 0;
    std::size_t i = 0;
    while (i < description.size()) {
        std::size_t scheme_len = 0;
        if (description.substr(i).starts_with("https://"))
            scheme_len = 8;
        else if (description.substr(i).starts_with("http://"))
            scheme_len = 7;
        if (scheme_len == 0) {
            ++i;
            continue;
        }
        std::size_t j = i + scheme_len;
        std::size_t body = 0;
        while (j < description.size() && !is_ascii_space(description[j])) {
            ++j;
            ++body;
        }
        if (body > 0) ++count;
        i = j;  // the maximal non-whitespace run is consumed either way
    }
    return count;
}

int count_description_hashtags(std::string_view description) {
    int count = 0;
    for (std::size_t i = 0; i + 1 < description.size(); ++i)
        if (description[i] == '#' && is_ascii_alnum(description[i + 1])) ++count;
    return count;
}

std::vector<double> extract_values(const RawProfile& profile, const FeatureSchema& schema,
                                   const CrawlContext& ctx, const NameLexicon& lexicon,
                                   const WordList& words) {
    std::vector<double> v;
    v.reserve(schema.size());
    v.push_back(double(days_between(profile.created_at, ctx.crawl_date)));
    // A profile that never tweeted is treated as inactive since creation.
    v.push_back(profile.last_tweet_at
                    ? double(days_between(*profile.last_tweet_at, ctx.crawl_date))
                    : double(days_between(profile.created_at, ctx.crawl_date)));
    v.push_back(double(profile.tweet_count));
    v.push_back(double(profile.favorited_count));
    v.push_back(double(profile.friends_count));
    v.push_back(double(profile.listed_count));
    const std::string_view desc = profile.description ? *profile.description : std::string_view{};
    v.push_back(double(count_description_urls(desc)));
    v.push_back(double(count_description_hashtags(desc)));
    v.push_back(profile.default_profile ? 1.0 : 0.0);
    v.push_back(profile.default_profile_image ? 1.0 : 0.0);
    v.push_back(has_content(profile.description) ? 1.0 : 0.0);
    v.push_back(has_content(profile.location) ? 1.0 : 0.0);
    v.push_back(has_content(profile.url) ? 1.0 : 0.0);
    v.push_back(profile.utc_offset_hours ? double(*profile.utc_offset_hours) : 0.0);
    v.push_back(profile.utc_offset_hours ? 1.0 : 0.0);

    if (schema.group == Group::ContainsWords || schema.group == Group::ContainsName) {
        const auto tokens = normalize_name_field(profile.name_field);
        v.push_back(word_fraction(tokens, words));
        if (schema.group == Group::ContainsName) {
            const NameAttributes attrs = name_attributes(tokens, lexicon);
            v.push_back(attrs.is_male ? 1.0 : 0.0);
            v.push_back(attrs.is_female ? 1.0 : 0.0);
            for (int i = 0; i < kImpressionCount; ++i)
                v.push_back(attrs.impression_flags[std::size_t(i)] ? 1.0 : 0.0);
        }
    }
    if (v.size() != schema.size())
        throw ValidationError("extracted vector length does not match the schema");
    return v;
}

FeatureVector extract(const LabeledProfile& profile, const FeatureSchema& schema,
                      const CrawlContext& ctx, const NameLexicon& lexicon, const WordList& words) {
    FeatureVector fv;
    fv.values = extract_values(profile.profile, schema, ctx, lexicon, words);
    fv.label = profile.increased;
    return fv;
}

FeatureMatrix extract_matrix(const std::vector<const LabeledProfile*>& records,
                             const FeatureSchema& schema, const CrawlContext& ctx,
                             const NameLexicon& lexicon, const WordList& words) {
    FeatureMatrix fm;
    fm.schema = schema;
    fm.x = Matrix(records.size(), schema.size());
    fm.y.resize(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto values = extract_values(records[i]->profile, schema, ctx, lexicon, words);
        std::copy(values.begin(), values.end(), fm.x.row(i));
        fm.y[i] = records[i]->increased ? 1 : 0;
    }
    return fm;
}

Scaler Scaler::fit(const Matrix& x) {
    if (x.rows() == 0) throw ValidationError("cannot fit a scaler on an empty matrix");
    const std::size_t n = x.rows(), p = x.cols();
    Scaler s;
    s.mean.assign(p, 0.0);
    s.sd.assign(p, 0.0);
    s.constant.assign(p, false);
    for (std::size_t c = 0; c < p; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += x.at(r, c);
        s.mean[c] = sum / double(n);
    }
    for (std::size_t c = 0; c < p; ++c) {
        if (n < 2) {
            s.constant[c] = true;
            continue;
        }
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = x.at(r, c) - s.mean[c];
            ss += d * d;
        }
        s.sd[c] = std::sqrt(ss / double(n - 1));
        if (s.sd[c] <= 0.0) s.constant[c] = true;
    }
    return s;
}

void Scaler::apply_row(const double* in, double* out) const {
    for (std::size_t c = 0; c < mean.size(); ++c)
        out[c] = constant[c] ? in[c] : (in[c] - mean[c]) / sd[c];
}

std::vector<double> Scaler::apply(const std::vector<double>& values) const {
    if (values.size() != mean.size()) throw ValidationError("scaler/vector length mismatch");
    std::vector<double> out(values.size());
    apply_row(values.data(), out.data());
    return out;
}

Matrix Scaler::apply(const Matrix& x) const {
    if (x.cols() != mean.size()) throw ValidationError("scaler/matrix width mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) apply_row(x.row(r), out.row(r));
    return out;
}

std::string feature_matrix_to_csv(const FeatureMatrix& fm) {
    std::ostringstream out;
    for (const auto& name : fm.schema.feature_names) out << name << ',';
    out << "label\n";
    for (std::size_t r = 0; r < fm.x.rows(); ++r) {
        for (std::size_t c = 0; c < fm.x.cols(); ++c) out << format_double_exact(fm.x.at(r, c)) << ',';
        out << int(fm.y[r]) << '\n';
    }
    return out.str();
}

FeatureMatrix feature_matrix_from_csv(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source_name + ": empty feature matrix");
    auto header = split(trim(line), ',');
    if (header.size() < 2 || trim(header.back()) != "label")
        throw ParseError(source_name + ": feature matrix header must end with 'label'");
    FeatureMatrix fm;
    for (std::size_t i = 0; i + 1 < header.size(); ++i)
        fm.schema.feature_names.emplace_back(trim(header[i]));
    fm.schema.indicator_mask.assign(fm.schema.feature_names.size(), false);
    fm.x = Matrix(0, fm.schema.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(trim(line), ',');
        if (fields.size() != header.size())
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": wrong column count");
        std::vector<double> values(fm.schema.size());
        for (std::size_t c = 0; c < values.size(); ++c) {
            char* end = nullptr;
            const std::string cell(trim(fields[c]));
            values[c] = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw ParseError(source_name + ":" + std::to_string(line_no) +
                                 ": bad numeric value '" + cell + "'");
        }
        const std::string label(trim(fields.back()));
        if (label != "0" && label != "1")
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": label must be 0 or 1");
        fm.x.push_row(values);
        fm.y.push_back(label == "1" ? 1 : 0);
    }
    return fm;
}

}  // namespace fp
