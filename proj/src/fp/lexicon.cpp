#include "fp/lexicon.hpp"

#include <algorithm>
#include <fstream>

#include "fp/common.hpp"

namespace fp {
namespace {

// Base letters for Latin-1 Supplement letters (U+00C0..U+00FF); nullptr marks
// non-letters (multiplication/division signs).
constexpr const char* kLatin1[0x40] = {
    "a", "a", "a", "a", "a", "a", "ae", "c",   // C0-C7
    "e", "e", "e", "e", "i", "i", "i",  "i",   // C8-CF
    "d", "n", "o", "o", "o", "o", "o",  nullptr,  // D0-D7
    "o", "u", "u", "u", "u", "y", "th", "ss",  // D8-DF
    "a", "a", "a", "a", "a", "a", "ae", "c",   // E0-E7
    "e", "e", "e", "e", "i", "i", "i",  "i",   // E8-EF
    "d", "n", "o", "o", "o", "o", "o",  nullptr,  // F0-F7
    "o", "u", "u", "u", "u", "y", "th", "y",   // F8-FF
};

// Base letters for Latin Extended-A (U+0100..U+017F).
constexpr const char* kLatinExtA[0x80] = {
    "a", "a", "a", "a", "a", "a",                      // 0100-0105
    "c", "c", "c", "c", "c", "c", "c", "c",            // 0106-010D
    "d", "d", "d", "d",                                // 010E-0111
    "e", "e", "e", "e", "e", "e", "e", "e", "e", "e",  // 0112-011B
    "g", "g", "g", "g", "g", "g", "g", "g",            // 011C-0123
    "h", "h", "h", "h",                                // 0124-0127
    "i", "i", "i", "i", "i", "i", "i", "i", "i", "i",  // 0128-0131
    "ij", "ij",                                        // 0132-0133
    "j", "j",                                          // 0134-0135
    "k", "k", "k",                                     // 0136-0138
    "l", "l", "l", "l", "l", "l", "l", "l", "l", "l",  // 0139-0142
    "n", "n", "n", "n", "n", "n", "n", "n", "n",       // 0143-014B
    "o", "o", "o", "o", "o", "o",                      // 014C-0151
    "oe", "oe",                                        // 0152-0153
    "r", "r", "r", "r", "r", "r",                      // 0154-0159
    "s", "s", "s", "s", "s", "s", "s", "s",            // 015A-0161
    "t", "t", "t", "t", "t", "t",                      // 0162-0167
    "u", "u", "u", "u", "u", "u", "u", "u", "u", "u", "u", "u",  // 0168-0173
    "w", "w",                                          // 0174-0175
    "y", "y", "y",                                     // 0176-0178
    "z", "z", "z", "z", "z", "z",                      // 0179-017E
    "s",                                               // 017F (long s)
};

// Lowercase ASCII transliteration for one codepoint, or nullptr when the
// codepoint acts as a token separator.
const char* transliterate(char32_t cp, char* scratch) {
    if (cp >= 'a' && cp <= 'z') {
        scratch[0] = char(cp);
        scratch[1] = '\0';
        return scratch;
    }
    if (cp >= 'A' && cp <= 'Z') {
        scratch[0] = char(cp - 'A' + 'a');
        scratch[1] = '\0';
        return scratch;
    }
    if (cp >= 0x00C0 && cp <= 0x00FF) return kLatin1[cp - 0x00C0];
    if (cp >= 0x0100 && cp <= 0x017F) return kLatinExtA[cp - 0x0100];
    return nullptr;
}

// Decodes one UTF-8 codepoint at `i`; advances `i` past it. Malformed bytes
// decode as U+FFFD, which transliterates to a separator.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + std::size_t(len) > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char b = static_cast<unsigned char>(s[i + std::size_t(k)]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += std::size_t(len);
    return cp;
}

bool is_lower_alpha(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

std::string_view group_id(Group g) {
    switch (g) {
        case Group::ContainsName: return "contains_name";
        case Group::ContainsWords: return "contains_words";
        case Group::CustomContent: return "custom_content";
    }
    return "?";
}

std::string_view group_label(Group g) {
    switch (g) {
        case Group::ContainsName: return "Contains Name";
        case Group::ContainsWords: return "Contains Words";
        case Group::CustomContent: return "Custom Content";
    }
    return "?";
}

Group group_from_id(std::string_view id) {
    for (Group g : kAllGroups)
        if (group_id(g) == id) return g;
    throw ValidationError("unknown group id '" + std::string(id) + "'");
}

const std::array<std::string_view, kImpressionCount>& impression_tags() {
    static const std::array<std::string_view, kImpressionCount> tags = {
        "good",      "bad",      "masculine", "feminine", "classic",  "modern",   "mature",
        "youthful",  "formal",   "informal",  "upper-class", "common", "urban",   "natural",
        "wholesome", "devious",  "strong",    "delicate", "refined",  "rough",    "strange",
        "boring",    "simple",   "complex",   "serious",  "comedic",  "nerdy",    "unintellectual",
    };
    return tags;
}

int impression_index(std::string_view tag) {
    const auto& tags = impression_tags();
    for (int i = 0; i < kImpressionCount; ++i)
        if (tags[std::size_t(i)] == tag) return i;
    return -1;
}

void NameLexicon::add(NameEntry entry) {
    if (!is_lower_alpha(entry.name))
        throw ValidationError("lexicon name '" + entry.name + "' must match [a-z]+");
    std::string key = entry.name;
    entries_[std::move(key)] = std::move(entry);
}

const NameEntry* NameLexicon::find(std::string_view token) const {
    auto it = entries_.find(std::string(token));
    return it == entries_.end() ? nullptr : &it->second;
}

std::size_t NameLexicon::count_by_gender(Gender g) const {
    return std::size_t(std::count_if(entries_.begin(), entries_.end(),
                                     [g](const auto& kv) { return kv.second.gender == g; }));
}

std::vector<std::string> NameLexicon::names_sorted() const {
    std::vector<std::string> names;
    names.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) names.push_back(name);
    std::sort(names.begin(), names.end());
    return names;
}

std::uint64_t NameLexicon::fingerprint() const {
    // order-independent: combine per-entry hashes by addition
    std::uint64_t acc = 0;
    for (const auto& [name, entry] : entries_) {
        std::uint64_t h = fnv1a(name);
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(&entry.gender), sizeof entry.gender), h);
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(&entry.impressions),
                                   sizeof entry.impressions), h);
        acc += h;
    }
    return acc ^ (std::uint64_t(entries_.size()) << 1);
}

NameLexicon NameLexicon::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon '" + path + "'");
    NameLexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = split(sv, ',');
        if (fields.size() < 2 || fields.size() > 3)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected name,gender[,impressions]");
        NameEntry e;
        e.name = std::string(trim(fields[0]));
        const std::string gender(trim(fields[1]));
        if (gender == "male")
            e.gender = Gender::Male;
        else if (gender == "female")
            e.gender = Gender::Female;
        else if (gender == "both")
            e.gender = Gender::Both;
        else
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad gender '" + gender +
                             "'");
        if (fields.size() == 3) {
            for (const auto& tag : split(fields[2], ';')) {
                std::string_view t = trim(tag);
                if (t.empty()) continue;
                const int idx = impression_index(t);
                if (idx < 0)
                    throw ParseError(path + ":" + std::to_string(line_no) +
                                     ": unknown impression '" + std::string(t) + "'");
                e.impressions |= 1u << idx;
            }
        }
        if (!is_lower_alpha(e.name))
            throw ParseError(path + ":" + std::to_string(line_no) + ": name '" + e.name +
                             "' must match [a-z]+");
        lex.add(std::move(e));
    }
    return lex;
}

void WordList::add(std::string word) {
    if (!is_lower_alpha(word)) throw ValidationError("word '" + word + "' must match [a-z]+");
    words_.insert(std::move(word));
}

std::vector<std::string> WordList::words_sorted() const {
    std::vector<std::string> words(words_.begin(), words_.end());
    std::sort(words.begin(), words.end());
    return words;
}

std::uint64_t WordList::fingerprint() const {
    std::uint64_t acc = 0;
    for (const auto& w : words_) acc += fnv1a(w);
    return acc ^ (std::uint64_t(words_.size()) << 1);
}

WordList WordList::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open wordlist '" + path + "'");
    WordList words;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (!is_lower_alpha(sv))
            throw ParseError(path + ":" + std::to_string(line_no) + ": word '" + std::string(sv) +
                             "' must match [a-z]+");
        words.add(std::string(sv));
    }
    if (words.size() == 0) throw ParseError("wordlist '" + path + "' is empty");
    return words;
}

std::vector<std::string> normalize_name_field(std::string_view name_field) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    char scratch[2];
    while (i < name_field.size()) {
        const char32_t cp = decode_utf8(name_field, i);
        const char* mapped = transliterate(cp, scratch);
        if (mapped) {
            current += mapped;
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Group assign_group_tokens(const std::vector<std::string>& tokens, const NameLexicon& lexicon,
                          const WordList& words) {
    for (const auto& t : tokens)
        if (lexicon.find(t)) return Group::ContainsName;
    for (const auto& t : tokens)
        if (words.contains(t)) return Group::ContainsWords;
    return Group::CustomContent;
}

Group assign_group(std::string_view name_field, const NameLexicon& lexicon,
                   const WordList& words) {
    return assign_group_tokens(normalize_name_field(name_field), lexicon, words);
}

double word_fraction(const std::vector<std::string>& tokens, const WordList& words) {
    if (tokens.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& t : tokens)
        if (words.contains(t)) ++hits;
    return double(hits) / double(tokens.size());
}

NameAttributes name_attributes(const std::vector<std::string>& tokens,
                               const NameLexicon& lexicon) {
    NameAttributes attrs;
    bool matched = false;
    for (const auto& t : tokens) {
        const NameEntry* e = lexicon.find(t);
        if (!e) continue;
        matched = true;
        if (e->gender == Gender::Male || e->gender == Gender::Both) attrs.is_male = true;
        if (e->gender == Gender::Female || e->gender == Gender::Both) attrs.is_female = true;
        for (int i = 0; i < kImpressionCount; ++i)
            if (e->has_impression(i)) attrs.impression_flags[std::size_t(i)] = true;
    }
    if (!matched)
        throw ValidationError("name attributes requested but no token matches the lexicon");
    return attrs;
}

}  // namespace fp
