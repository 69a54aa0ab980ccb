#include "fp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "fp/features.hpp"
#include "fp/parallel.hpp"
#include "fp/rng.hpp"

namespace fp {
namespace {

double parse_number(const std::string& v, const std::string& where) {
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ParseError(where + ": bad numeric value '" + v + "'");
    return parsed;
}

std::vector<double> parse_number_list(std::string_view text, const std::string& where) {
    std::vector<double> values;
    for (const auto& cell : split(text, ',')) {
        const std::string v(trim(cell));
        if (v.empty()) continue;
        values.push_back(parse_number(v, where));
    }
    return values;
}

int group_index(std::string_view label) { return int(group_from_id(label)); }

}  // namespace

void GeneratorConfig::validate() const {
    if (n_profiles < 1) throw ValidationError("generator needs n >= 1");
    double sum = 0.0;
    for (double p : proportions) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("group proportions must lie in [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("group proportions must sum to 1");
    if (!(second_date > crawl_date))
        throw ValidationError("second crawl date must come after the first");
    if (!(contamination >= 0.0 && contamination < 1.0))
        throw ValidationError("contamination must lie in [0,1)");
    if (!(attrition >= 0.0 && attrition < 1.0))
        throw ValidationError("attrition must lie in [0,1)");
    for (int g = 0; g < 3; ++g) {
        const FeatureSchema schema = FeatureSchema::for_group(Group(g));
        for (const auto& [name, beta] : betas[g]) {
            (void)beta;
            if (name == "intercept") continue;
            if (schema.index_of(name) < 0)
                throw ValidationError("coefficient '" + name + "' is not a feature of group '" +
                                      std::string(group_id(Group(g))) + "'");
        }
    }
    for (const auto& [name, marginal] : counts) {
        if (!(marginal.log_sd >= 0.0))
            throw ValidationError("count marginal '" + name + "' needs log_sd >= 0");
        static const char* known[] = {"followers_count", "friends_count", "tweet_count",
                                      "favorited_count", "listed_count"};
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return name == k; }) == std::end(known))
            throw ValidationError("unknown count field '" + name + "'");
    }
}

GeneratorConfig parse_generator_config(const std::string& text, const std::string& source_name) {
    GeneratorConfig config;
    config.crawl_date = parse_date("2014-10-07");
    config.second_date = parse_date("2014-11-07");

    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    bool saw_population = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = source_name + ":" + std::to_string(line_no);
        const std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (sv.front() == '[') {
            if (sv.back() != ']') throw ParseError(where + ": unclosed section");
            section = std::string(trim(sv.substr(1, sv.size() - 2)));
            if (section == "population") saw_population = true;
            continue;
        }
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos) throw ParseError(where + ": expected key = value");
        const std::string key(trim(sv.substr(0, eq)));
        const std::string value(trim(sv.substr(eq + 1)));
        if (key.empty() || value.empty()) throw ParseError(where + ": empty key or value");

        if (section == "population") {
            if (key == "n") config.n_profiles = int(parse_number(value, where));
            else if (key == "seed") config.seed = std::uint64_t(parse_number(value, where));
            else if (key == "crawl_date") config.crawl_date = parse_date(value);
            else if (key == "second_date") config.second_date = parse_date(value);
            else if (key == "contamination") config.contamination = parse_number(value, where);
            else if (key == "attrition") config.attrition = parse_number(value, where);
            else throw ParseError(where + ": unknown population key '" + key + "'");
        } else if (section == "groups") {
            config.proportions[std::size_t(group_index(key))] = parse_number(value, where);
        } else if (section.rfind("beta.", 0) == 0) {
            const int g = group_index(section.substr(5));
            if (!config.betas[g].emplace(key, parse_number(value, where)).second)
                throw ParseError(where + ": duplicate coefficient '" + key + "'");
        } else if (section == "counts") {
            const auto values = parse_number_list(value, where);
            if (values.size() != 2)
                throw ParseError(where + ": count marginal needs 'log_mean, log_sd'");
            config.counts[key] = {values[0], values[1]};
        } else if (section.empty()) {
            throw ParseError(where + ": key outside a section");
        } else {
            throw ParseError(where + ": unknown section '" + section + "'");
        }
    }
    if (!saw_population) throw ParseError(source_name + ": missing [population] section");
    config.validate();
    return config;
}

GeneratorConfig load_generator_config(const std::string& path) {
    return parse_generator_config(read_text_file(path), path);
}

namespace {

struct Marginals {
    CountMarginal followers{4.0, 1.4};
    CountMarginal friends{3.9, 1.2};
    CountMarginal tweets{5.5, 1.8};
    CountMarginal favorites{3.0, 2.0};
    CountMarginal listed{1.0, 1.2};
};

Marginals resolve_marginals(const GeneratorConfig& config) {
    Marginals m;
    auto pick = [&](const char* key, CountMarginal& slot) {
        auto it = config.counts.find(key);
        if (it != config.counts.end()) slot = it->second;
    };
    pick("followers_count", m.followers);
    pick("friends_count", m.friends);
    pick("tweet_count", m.tweets);
    pick("favorited_count", m.favorites);
    pick("listed_count", m.listed);
    return m;
}

std::int64_t draw_count(Rng& rng, const CountMarginal& marginal, std::int64_t lo) {
    std::normal_distribution<double> normal(marginal.log_mean, marginal.log_sd);
    const double v = std::exp(normal(rng));
    const double capped = std::min(v, 5e8);  // keep within sane profile ranges
    return std::max(lo, std::int64_t(std::llround(capped)));
}

// Pronounceable token that is guaranteed to be neither a lexicon name nor a
// dictionary word, so it never changes the group of the name it pads.
std::string draw_junk_token(Rng& rng, const NameLexicon& lexicon, const WordList& words) {
    static const char consonants[] = "bcdfgjklmnprstvz";
    static const char vowels[] = "aeiou";
    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::size_t len = 5 + uniform_below(rng, 5);
        std::string token;
        for (std::size_t i = 0; i < len; ++i)
            token += (i % 2 == 0) ? consonants[uniform_below(rng, sizeof consonants - 1)]
                                  : vowels[uniform_below(rng, sizeof vowels - 1)];
        if (lexicon.find(token) == nullptr && !words.contains(token)) return token;
    }
    throw Error("could not draw a neutral token; lexicon or wordlist too dense");
}

std::string styled(Rng& rng, std::string token) {
    if (uniform01(rng) < 0.5 && !token.empty()) token[0] = char(std::toupper(token[0]));
    return token;
}

}  // namespace

SynthResult generate(const GeneratorConfig& config, const NameLexicon& lexicon,
                     const WordList& words, int threads) {
    config.validate();
    if (lexicon.size() == 0) throw ValidationError("generator needs a non-empty lexicon");
    if (words.size() == 0) throw ValidationError("generator needs a non-empty wordlist");
    const std::vector<std::string> names = lexicon.names_sorted();
    const std::vector<std::string> word_pool = words.words_sorted();
    const Marginals marginals = resolve_marginals(config);
    const FeatureSchema schemas[3] = {FeatureSchema::for_group(Group::ContainsName),
                                      FeatureSchema::for_group(Group::ContainsWords),
                                      FeatureSchema::for_group(Group::CustomContent)};
    const CrawlContext ctx{config.crawl_date};

    const std::size_t n_clean = std::size_t(config.n_profiles);
    const std::size_t n_extra =
        std::size_t(std::llround(config.contamination * double(config.n_profiles)));
    const std::size_t n_total = n_clean + n_extra;

    std::vector<RawProfile> first(n_total);
    std::vector<std::int64_t> second_followers(n_total, 0);
    std::vector<char> in_second(n_total, 1);
    std::vector<TruthRecord> truth(n_clean);

    parallel_for(n_total, threads, [&](std::size_t i) {
        Rng rng(mix_seed(config.seed, 0x5E17A71Cull, std::uint64_t(i)));
        RawProfile p;
        p.user_id = 1000 + i;

        const double u = uniform01(rng);
        Group group = Group::CustomContent;
        if (u < config.proportions[0]) group = Group::ContainsName;
        else if (u < config.proportions[0] + config.proportions[1]) group = Group::ContainsWords;

        std::vector<std::string> tokens;
        if (group == Group::ContainsName) {
            // lexicon name plus fillers; fillers mix real words and junk so the
            // word_fraction feature varies within this group too
            tokens.push_back(styled(rng, names[uniform_below(rng, names.size())]));
            const std::size_t fillers = uniform_below(rng, 3);
            for (std::size_t j = 0; j < fillers; ++j) {
                if (uniform01(rng) < 0.5)
                    tokens.push_back(styled(rng, word_pool[uniform_below(rng, word_pool.size())]));
                else
                    tokens.push_back(styled(rng, draw_junk_token(rng, lexicon, words)));
            }
        } else if (group == Group::ContainsWords) {
            // bimodal word fraction: either all words (1.0) or one of five (0.2)
            if (uniform01(rng) < 0.5) {
                const std::size_t k = 1 + uniform_below(rng, 2);
                for (std::size_t j = 0; j < k; ++j)
                    tokens.push_back(styled(rng, word_pool[uniform_below(rng, word_pool.size())]));
            } else {
                tokens.push_back(styled(rng, word_pool[uniform_below(rng, word_pool.size())]));
                for (int j = 0; j < 4; ++j)
                    tokens.push_back(styled(rng, draw_junk_token(rng, lexicon, words)));
            }
            std::shuffle(tokens.begin(), tokens.end(), rng);
        } else {
            const std::size_t k = 1 + uniform_below(rng, 3);
            for (std::size_t j = 0; j < k; ++j)
                tokens.push_back(styled(rng, draw_junk_token(rng, lexicon, words)));
        }
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (t) p.name_field += ' ';
            p.name_field += tokens[t];
        }
        if (assign_group(p.name_field, lexicon, words) != group)
            throw Error("generator produced a name outside its target group: " + p.name_field);
        p.screen_name = "user" + std::to_string(p.user_id);

        p.followers_count = draw_count(rng, marginals.followers, 1);
        p.friends_count = draw_count(rng, marginals.friends, 0);
        p.tweet_count = draw_count(rng, marginals.tweets, 1);
        p.favorited_count = draw_count(rng, marginals.favorites, 0);
        p.listed_count = draw_count(rng, marginals.listed, 0);

        const std::int64_t age_days = 40 + std::int64_t(uniform_below(rng, 2961));
        p.created_at = config.crawl_date - std::chrono::days(age_days);
        std::int64_t idle_days = std::int64_t(uniform_below(rng, 301));
        idle_days = std::min(idle_days, age_days);
        p.last_tweet_at = config.crawl_date - std::chrono::days(idle_days);

        if (uniform01(rng) < 0.7) {
            std::string d = "about " + draw_junk_token(rng, lexicon, words);
            const std::size_t urls = uniform_below(rng, 3);
            for (std::size_t j = 0; j < urls; ++j)
                d += " http://" + draw_junk_token(rng, lexicon, words) + ".example.com";
            const std::size_t tags = uniform_below(rng, 4);
            for (std::size_t j = 0; j < tags; ++j)
                d += " #" + draw_junk_token(rng, lexicon, words);
            p.description = d;
        }
        if (uniform01(rng) < 0.4) p.location = "city " + draw_junk_token(rng, lexicon, words);
        if (uniform01(rng) < 0.3) p.url = "http://example.com/" + p.screen_name;
        if (uniform01(rng) < 0.55) {
            static const int offsets[] = {-8, -5, -3, 0, 1, 2, 3, 5, 8};
            p.utc_offset_hours = offsets[uniform_below(rng, std::size(offsets))];
        }
        p.default_profile = uniform01(rng) < 0.35;
        p.default_profile_image = uniform01(rng) < 0.12;

        if (i >= n_clean) {
            // contaminated rows exist to exercise the ingest filter
            switch (i % 4) {
                case 0: p.is_protected = true; break;
                case 1: p.verified = true; break;
                case 2: p.last_tweet_at.reset(); break;
                default:
                    p.created_at = config.crawl_date - std::chrono::days(3000);
                    p.last_tweet_at = config.crawl_date - std::chrono::days(400);
            }
            first[i] = std::move(p);
            second_followers[i] = first[i].followers_count;
            return;
        }

        const int g = int(group);
        const auto x = extract_values(p, schemas[g], ctx, lexicon, words);
        double lp = 0.0;
        for (const auto& [name, beta] : config.betas[g]) {
            if (name == "intercept") lp += beta;
            else lp += beta * x[std::size_t(schemas[g].index_of(name))];
        }
        const double p_true = 1.0 / (1.0 + std::exp(-lp));
        const bool increased = uniform01(rng) < p_true;

        std::int64_t delta =
            std::max<std::int64_t>(1, std::llround(double(p.followers_count) *
                                                   (0.02 + 0.13 * uniform01(rng))));
        if (increased) second_followers[i] = p.followers_count + delta;
        else if (uniform01(rng) < 0.4) second_followers[i] = p.followers_count;  // flat month
        else second_followers[i] = std::max<std::int64_t>(0, p.followers_count - delta);

        if (uniform01(rng) < config.attrition) in_second[i] = 0;
        truth[i] = {p.user_id, group, lp, p_true, increased};
        first[i] = std::move(p);
    });

    SynthResult result;
    result.first.ctx = ctx;
    result.first.profiles = std::move(first);
    result.second.ctx = CrawlContext{config.second_date};
    result.second.profiles.reserve(n_total);
    for (std::size_t i = 0; i < n_total; ++i) {
        if (!in_second[i]) continue;
        RawProfile p = result.first.profiles[i];
        p.followers_count = second_followers[i];
        result.second.profiles.push_back(std::move(p));
    }
    result.truth = std::move(truth);
    return result;
}

std::string truth_to_csv(const std::vector<TruthRecord>& truth) {
    std::ostringstream out;
    out << "user_id,group,linear_predictor,p_true,increased\n";
    for (const auto& r : truth)
        out << r.user_id << ',' << group_id(r.group) << ','
            << format_double_exact(r.linear_predictor) << ',' << format_double_exact(r.p_true)
            << ',' << (r.increased ? 1 : 0) << '\n';
    return out.str();
}

std::vector<TruthRecord> truth_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "user_id,group,linear_predictor,p_true,increased")
        throw ParseError("truth file: bad or missing header");
    std::vector<TruthRecord> truth;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 5)
            throw ParseError("truth file:" + std::to_string(line_no) + ": expected 5 columns");
        TruthRecord r;
        r.user_id = std::uint64_t(std::strtoull(std::string(cells[0]).c_str(), nullptr, 10));
        r.group = group_from_id(trim(cells[1]));
        r.linear_predictor = parse_number(std::string(trim(cells[2])), "truth file");
        r.p_true = parse_number(std::string(trim(cells[3])), "truth file");
        r.increased = trim(cells[4]) == "1";
        truth.push_back(r);
    }
    return truth;
}

}  // namespace fp
