#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace fp {

// Profile partition by name-field content. Order is part of the contract:
// a matched given name wins over a matched word, words win over the rest.
enum class Group : int { ContainsName = 0, ContainsWords = 1, CustomContent = 2 };

inline constexpr std::array<Group, 3> kAllGroups = {Group::ContainsName, Group::ContainsWords,
                                                    Group::CustomContent};

std::string_view group_id(Group g);       // snake_case identifier for CSV output
std::string_view group_label(Group g);    // display label for text reports
Group group_from_id(std::string_view id);

enum class Gender : int { Male = 0, Female = 1, Both = 2 };

// The 14 bipolar impression pairs, flattened to 28 tags. Index order is the
// feature order of the impression flags.
inline constexpr int kImpressionCount = 28;
const std::array<std::string_view, kImpressionCount>& impression_tags();
int impression_index(std::string_view tag);  // -1 when unknown

struct NameEntry {
    std::string name;  // lowercase ASCII, [a-z]+
    Gender gender = Gender::Both;
    std::uint32_t impressions = 0;  // bitset over impression_tags() indices

    bool has_impression(int idx) const { return (impressions >> idx) & 1u; }
};

class NameLexicon {
  public:
    void add(NameEntry entry);
    const NameEntry* find(std::string_view token) const;
    std::size_t size() const { return entries_.size(); }
    std::size_t count_by_gender(Gender g) const;
    std::vector<std::string> names_sorted() const;  // for deterministic sampling
    std::uint64_t fingerprint() const;

    static NameLexicon load_csv(const std::string& path);

  private:
    std::unordered_map<std::string, NameEntry> entries_;
};

class WordList {
  public:
    void add(std::string word);
    bool contains(std::string_view token) const { return words_.contains(std::string(token)); }
    std::size_t size() const { return words_.size(); }
    std::vector<std::string> words_sorted() const;  // for deterministic sampling
    std::uint64_t fingerprint() const;

    static WordList load(const std::string& path);

  private:
    std::unordered_set<std::string> words_;
};

// Lower-cases, strips Latin diacritics to base ASCII letters and splits on
// everything else. Characters with no Latin transliteration act as separators.
std::vector<std::string> normalize_name_field(std::string_view name_field);

Group assign_group(std::string_view name_field, const NameLexicon& lexicon, const WordList& words);
Group assign_group_tokens(const std::vector<std::string>& tokens, const NameLexicon& lexicon,
                          const WordList& words);

// Fraction of tokens found in the wordlist, counted with multiplicity.
double word_fraction(const std::vector<std::string>& tokens, const WordList& words);

struct NameAttributes {
    bool is_male = false;
    bool is_female = false;
    std::array<bool, kImpressionCount> impression_flags{};
};

// Union over all matched names: a flag is set iff any matched entry carries
// it; gender "both" sets both. Throws when no token matches the lexicon.
NameAttributes name_attributes(const std::vector<std::string>& tokens, const NameLexicon& lexicon);

}  // namespace fp
