#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fp/common.hpp"
#include "fp/lexicon.hpp"

using namespace fp;

namespace {

NameLexicon tiny_lexicon() {
    NameLexicon lex;
    lex.add({"emma", Gender::Female, 0});
    lex.add({"james", Gender::Male, 0});
    lex.add({"alex", Gender::Both, 0});
    return lex;
}

WordList tiny_words() {
    WordList words;
    for (const char* w : {"social", "media", "expert", "love", "music"}) words.add(w);
    return words;
}

}  // namespace

TEST_CASE("normalize_name_field lowercases, transliterates and splits") {
    auto tokens = normalize_name_field("Emma Watson");
    REQUIRE(tokens.size() == 2);
    CHECK(tokens[0] == "emma");
    CHECK(tokens[1] == "watson");

    // diacritics strip to base letters
    CHECK(normalize_name_field("Émile Zolá") == std::vector<std::string>{"emile", "zola"});
    CHECK(normalize_name_field("Björn") == std::vector<std::string>{"bjorn"});

    // digits, punctuation and emoji separate tokens
    CHECK(normalize_name_field("mr_2cool4u!") == std::vector<std::string>{"mr", "cool", "u"});
    CHECK(normalize_name_field("☆ STAR ☆") == std::vector<std::string>{"star"});
    CHECK(normalize_name_field("").empty());
    CHECK(normalize_name_field("123 456").empty());
}

TEST_CASE("group assignment priority: names beat words beat custom") {
    NameLexicon lex = tiny_lexicon();
    WordList words = tiny_words();

    CHECK(assign_group("Emma", lex, words) == Group::ContainsName);
    CHECK(assign_group("social media expert", lex, words) == Group::ContainsWords);
    CHECK(assign_group("xkcd42", lex, words) == Group::CustomContent);

    // adversarial: both a name and words present -> name wins
    CHECK(assign_group("Emma loves social media", lex, words) == Group::ContainsName);
    CHECK(assign_group("social media Emma", lex, words) == Group::ContainsName);
    // word in any position wins over custom
    CHECK(assign_group("zzkj music", lex, words) == Group::ContainsWords);
    // empty and unmatched fields fall through to custom
    CHECK(assign_group("", lex, words) == Group::CustomContent);
    CHECK(assign_group("!!!", lex, words) == Group::CustomContent);
}

TEST_CASE("group ids and labels round-trip") {
    for (Group g : kAllGroups) {
        CHECK(group_from_id(group_id(g)) == g);
    }
    CHECK(group_id(Group::ContainsName) == "contains_name");
    CHECK(group_label(Group::ContainsWords) == "Contains Words");
    CHECK_THROWS_AS(group_from_id("nope"), ValidationError);
}

TEST_CASE("word_fraction counts multiplicity") {
    WordList words = tiny_words();
    CHECK(word_fraction({"social", "media"}, words) == 1.0);
    CHECK(word_fraction({"social", "zz"}, words) == 0.5);
    CHECK(word_fraction({"social", "social", "zz", "qq"}, words) == 0.5);
    CHECK(word_fraction({}, words) == 0.0);
}

TEST_CASE("name attributes merge gender and impressions across matches") {
    NameLexicon lex;
    NameEntry emma{"emma", Gender::Female, 0};
    emma.impressions |= 1u << impression_index("good");
    emma.impressions |= 1u << impression_index("classic");
    NameEntry james{"james", Gender::Male, 0};
    james.impressions |= 1u << impression_index("classic");
    james.impressions |= 1u << impression_index("serious");
    lex.add(emma);
    lex.add(james);

    NameAttributes a = name_attributes({"emma"}, lex);
    CHECK(a.is_female);
    CHECK_FALSE(a.is_male);
    CHECK(a.impression_flags[std::size_t(impression_index("good"))]);
    CHECK_FALSE(a.impression_flags[std::size_t(impression_index("serious"))]);

    NameAttributes both = name_attributes({"emma", "james"}, lex);
    CHECK(both.is_female);
    CHECK(both.is_male);
    CHECK(both.impression_flags[std::size_t(impression_index("good"))]);
    CHECK(both.impression_flags[std::size_t(impression_index("serious"))]);
    CHECK(both.impression_flags[std::size_t(impression_index("classic"))]);

    NameLexicon with_both = tiny_lexicon();
    NameAttributes b = name_attributes({"alex"}, with_both);
    CHECK(b.is_male);
    CHECK(b.is_female);

    CHECK_THROWS_AS(name_attributes({"zz"}, lex), ValidationError);
}

TEST_CASE("impression vocabulary is the 14 bipolar pairs") {
    CHECK(impression_tags().size() == 28);
    CHECK(impression_index("good") == 0);
    CHECK(impression_index("unintellectual") == 27);
    CHECK(impression_index("gaming") == -1);
}

TEST_CASE("lexicon CSV loading validates entries") {
    const char* path = "/tmp/fp_test_lexicon.csv";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "emma,female,good;classic\n";
        out << "james,male,serious\n";
        out << "alex,both,\n";
    }
    NameLexicon lex = NameLexicon::load_csv(path);
    CHECK(lex.size() == 3);
    CHECK(lex.count_by_gender(Gender::Female) == 1);
    CHECK(lex.count_by_gender(Gender::Both) == 1);
    REQUIRE(lex.find("emma") != nullptr);
    CHECK(lex.find("emma")->has_impression(impression_index("good")));
    CHECK(lex.find("Emma") == nullptr);  // lookups are exact lowercase tokens
    CHECK(lex.names_sorted() == std::vector<std::string>{"alex", "emma", "james"});

    {
        std::ofstream out(path);
        out << "Emma,female,good\n";  // uppercase name rejected
    }
    CHECK_THROWS_AS(NameLexicon::load_csv(path), Error);
    {
        std::ofstream out(path);
        out << "emma,robot,good\n";  // unknown gender
    }
    CHECK_THROWS_AS(NameLexicon::load_csv(path), ParseError);
    {
        std::ofstream out(path);
        out << "emma,female,sparkly\n";  // unknown impression tag
    }
    CHECK_THROWS_AS(NameLexicon::load_csv(path), ParseError);
    std::remove(path);
    CHECK_THROWS_AS(NameLexicon::load_csv("/nonexistent.csv"), IoError);
}

TEST_CASE("wordlist loading and fingerprints") {
    const char* path = "/tmp/fp_test_words.txt";
    {
        std::ofstream out(path);
        out << "# words\nsocial\nmedia\n";
    }
    WordList words = WordList::load(path);
    CHECK(words.size() == 2);
    CHECK(words.contains("social"));
    CHECK_FALSE(words.contains("expert"));
    CHECK(words.words_sorted() == std::vector<std::string>{"media", "social"});
    std::uint64_t fp1 = words.fingerprint();

    {
        std::ofstream out(path);
        out << "media\nsocial\n";  // same set, different order
    }
    CHECK(WordList::load(path).fingerprint() == fp1);
    {
        std::ofstream out(path);
        out << "media\nsocial\nextra\n";
    }
    CHECK(WordList::load(path).fingerprint() != fp1);
    std::remove(path);
}

TEST_CASE("shipped fixtures load and are disjoint") {
    NameLexicon lex = NameLexicon::load_csv("data/lexicon_fixture.csv");
    WordList words = WordList::load("data/wordlist_fixture.txt");
    CHECK(lex.size() == 42);
    CHECK(words.size() >= 100);
    for (const auto& name : lex.names_sorted()) CHECK_FALSE(words.contains(name));
    // every impression tag is used by at least one fixture name
    for (int i = 0; i < kImpressionCount; ++i) {
        bool used = false;
        for (const auto& name : lex.names_sorted())
            if (lex.find(name)->has_impression(i)) used = true;
        CHECK(used);
    }
}
