#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fp/common.hpp"
#include "fp/ingest.hpp"

using namespace fp;

namespace {

RawProfile make_profile(std::uint64_t id, std::int64_t followers) {
    RawProfile p;
    p.user_id = id;
    p.name_field = "User " + std::to_string(id);
    p.screen_name = "user" + std::to_string(id);
    p.followers_count = followers;
    p.friends_count = 10;
    p.tweet_count = 100;
    p.favorited_count = 5;
    p.listed_count = 1;
    p.created_at = parse_date("2012-01-15");
    p.last_tweet_at = parse_date("2014-10-01");
    return p;
}

Snapshot make_snapshot(std::vector<RawProfile> profiles, const char* date = "2014-10-07") {
    Snapshot s;
    s.ctx.crawl_date = parse_date(date);
    s.profiles = std::move(profiles);
    return s;
}

Snapshot parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_snapshot(in, "test");
}

}  // namespace

TEST_CASE("snapshot save/load round-trips byte-exactly") {
    RawProfile full = make_profile(1, 120);
    full.description = "hello, \"world\"";
    full.location = "Berlin";
    full.url = "http://example.org";
    full.utc_offset_hours = -5;
    full.default_profile = true;
    RawProfile sparse = make_profile(2, 0);
    sparse.last_tweet_at.reset();

    const char* a = "/tmp/fp_test_snap_a.jsonl";
    const char* b = "/tmp/fp_test_snap_b.jsonl";
    save_snapshot(make_snapshot({full, sparse}), a);
    Snapshot loaded = load_snapshot(a);
    CHECK(loaded.ctx.crawl_date == parse_date("2014-10-07"));
    REQUIRE(loaded.profiles.size() == 2);
    CHECK(loaded.malformed == 0);
    CHECK(loaded.profiles[0].description == full.description);
    CHECK(loaded.profiles[0].utc_offset_hours == -5);
    CHECK_FALSE(loaded.profiles[1].last_tweet_at.has_value());
    save_snapshot(loaded, b);
    CHECK(read_text_file(a) == read_text_file(b));
    std::remove(a);
    std::remove(b);
}

TEST_CASE("snapshot header rules") {
    // header line is mandatory unless a crawl date override is supplied
    CHECK_THROWS_AS(parse_text("{\"user_id\":1}\n"), ParseError);
    CHECK_THROWS_AS(parse_text(""), ParseError);
    {
        std::istringstream in("");
        Snapshot s = parse_snapshot(in, "test", parse_date("2014-10-07"));
        CHECK(s.ctx.crawl_date == parse_date("2014-10-07"));
        CHECK(s.profiles.empty());
    }
    {
        // override replaces the header's date too
        std::istringstream in("{\"crawl_date\":\"2014-10-07\"}\n");
        Snapshot s = parse_snapshot(in, "test", parse_date("2015-01-01"));
        CHECK(s.ctx.crawl_date == parse_date("2015-01-01"));
    }
    CHECK_THROWS_AS(parse_text("{\"crawl_date\":20141007}\n"), ParseError);
    CHECK_THROWS_AS(load_snapshot("/nonexistent.jsonl"), IoError);
}

TEST_CASE("malformed records are counted, never silently dropped") {
    const char* tmp = "/tmp/fp_test_snap_bad.jsonl";
    save_snapshot(make_snapshot({make_profile(7, 42)}), tmp);
    std::string good_line;
    {
        std::ifstream in(tmp);
        std::string header;
        std::getline(in, header);
        std::getline(in, good_line);
    }
    std::remove(tmp);

    std::string text = "{\"crawl_date\":\"2014-10-07\"}\n";
    text += good_line + "\n";
    text += "not json at all\n";                                       // unparseable
    text += "[1,2,3]\n";                                               // not an object
    text += "{\"user_id\":9}\n";                                       // missing fields
    text += "\n";                                                      // blank: skipped, not malformed
    {
        std::string bad = good_line;
        const auto pos = bad.find("\"followers_count\":42");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 21, "\"followers_count\":-1");                // negative count
        bad.replace(bad.find("\"user_id\":7"), 11, "\"user_id\":8");
        text += bad + "\n";
    }
    Snapshot s = parse_text(text);
    CHECK(s.profiles.size() == 1);
    CHECK(s.malformed == 4);

    // field-level validation: offset range and date ordering
    std::string offset_line = good_line;
    offset_line.insert(offset_line.find("\"default_profile\""), "\"utc_offset_hours\":20,");
    Snapshot off = parse_text("{\"crawl_date\":\"2014-10-07\"}\n" + offset_line + "\n");
    CHECK(off.malformed == 1);
    std::string future_line = good_line;
    future_line.replace(future_line.find("2012-01-15"), 10, "2015-06-01");  // created after crawl
    Snapshot fut = parse_text("{\"crawl_date\":\"2014-10-07\"}\n" + future_line + "\n");
    CHECK(fut.malformed == 1);
}

TEST_CASE("duplicate user ids are fatal") {
    std::string text = "{\"crawl_date\":\"2014-10-07\"}\n";
    const char* tmp = "/tmp/fp_test_snap_dup.jsonl";
    save_snapshot(make_snapshot({make_profile(3, 1), make_profile(3, 2)}), tmp);
    CHECK_THROWS_AS(load_snapshot(tmp), ValidationError);
    std::remove(tmp);
    (void)text;
}

TEST_CASE("profile filter drops protected, verified and dormant accounts") {
    CrawlContext ctx{parse_date("2014-10-07")};
    RawProfile keep = make_profile(1, 10);
    RawProfile prot = make_profile(2, 10);
    prot.is_protected = true;
    RawProfile veri = make_profile(3, 10);
    veri.verified = true;
    RawProfile never_tweeted = make_profile(4, 10);
    never_tweeted.last_tweet_at.reset();
    RawProfile dormant = make_profile(5, 10);
    dormant.last_tweet_at = parse_date("2013-10-06");  // 366 days before crawl
    RawProfile boundary = make_profile(6, 10);
    boundary.last_tweet_at = parse_date("2013-10-07");  // exactly 365 days: kept

    auto kept = filter_profiles({keep, prot, veri, never_tweeted, dormant, boundary}, ctx);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].user_id == 1);
    CHECK(kept[1].user_id == 6);
}

TEST_CASE("join pairs crawls by id and derives the label") {
    Snapshot first = make_snapshot(
        {make_profile(1, 100), make_profile(2, 100), make_profile(3, 200), make_profile(5, 0)},
        "2014-10-07");
    Snapshot second = make_snapshot(
        {make_profile(2, 150), make_profile(3, 200), make_profile(4, 9), make_profile(5, 3)},
        "2014-11-07");

    JoinResult jr = join_snapshots(first, second);
    CHECK(jr.attrition == 1);  // id 1 disappeared
    CHECK(jr.labeled.ctx.crawl_date == first.ctx.crawl_date);
    REQUIRE(jr.labeled.records.size() == 3);

    const auto& r2 = jr.labeled.records[0];
    CHECK(r2.profile.user_id == 2);
    CHECK(r2.followers_second == 150);
    CHECK(r2.increased);
    CHECK(r2.absolute_change == 50);
    CHECK(r2.relative_change == doctest::Approx(1.5));

    const auto& r3 = jr.labeled.records[1];
    CHECK_FALSE(r3.increased);  // equal counts are not an increase
    CHECK(r3.absolute_change == 0);
    CHECK(r3.relative_change == doctest::Approx(1.0));

    const auto& r5 = jr.labeled.records[2];
    CHECK(r5.increased);
    CHECK(r5.relative_change == 0.0);  // ratio undefined when starting at zero

    Snapshot dup = make_snapshot({make_profile(1, 1), make_profile(1, 2)});
    CHECK_THROWS_AS(join_snapshots(dup, second), ValidationError);
}

TEST_CASE("labeled set save/load round-trips") {
    Snapshot first = make_snapshot({make_profile(1, 100), make_profile(2, 100),
                                    make_profile(3, 50), make_profile(4, 80)});
    Snapshot second = make_snapshot(
        {make_profile(1, 120), make_profile(2, 90), make_profile(3, 60), make_profile(4, 70)},
        "2014-11-07");
    LabeledSet labeled = join_snapshots(first, second).labeled;

    const char* a = "/tmp/fp_test_labeled_a.jsonl";
    const char* b = "/tmp/fp_test_labeled_b.jsonl";
    save_labeled(labeled, a);
    LabeledSet loaded = load_labeled(a);
    CHECK(loaded.ctx.crawl_date == labeled.ctx.crawl_date);
    REQUIRE(loaded.records.size() == 4);
    CHECK(loaded.records[0].followers_second == 120);
    CHECK(loaded.records[0].increased);
    CHECK_FALSE(loaded.records[1].increased);
    save_labeled(loaded, b);
    CHECK(read_text_file(a) == read_text_file(b));

    // a malformed labeled record is fatal, unlike raw-crawl ingestion
    std::ofstream(a, std::ios::app) << "{\"user_id\":99}\n";
    CHECK_THROWS_AS(load_labeled(a), ParseError);
    std::remove(a);
    std::remove(b);
}

TEST_CASE("stratified split preserves label mix and is seed-deterministic") {
    LabeledSet labeled;
    labeled.ctx.crawl_date = parse_date("2014-10-07");
    for (std::uint64_t i = 0; i < 40; ++i) {
        LabeledProfile rec;
        rec.profile = make_profile(i + 1, 100);
        rec.increased = i < 10;  // 10 positives, 30 negatives
        rec.followers_second = rec.increased ? 150 : 100;
        labeled.records.push_back(rec);
    }

    SplitResult sp = stratified_split(labeled, 0.5, 99);
    CHECK(sp.train.records.size() == 20);
    CHECK(sp.eval.records.size() == 20);
    auto count_pos = [](const LabeledSet& s) {
        std::size_t n = 0;
        for (const auto& r : s.records) n += r.increased ? 1 : 0;
        return n;
    };
    CHECK(count_pos(sp.train) == 5);
    CHECK(count_pos(sp.eval) == 5);

    // input order is preserved within each part
    auto ids = [](const LabeledSet& s) {
        std::vector<std::uint64_t> v;
        for (const auto& r : s.records) v.push_back(r.profile.user_id);
        return v;
    };
    auto train_ids = ids(sp.train);
    CHECK(std::is_sorted(train_ids.begin(), train_ids.end()));

    SplitResult again = stratified_split(labeled, 0.5, 99);
    CHECK(ids(again.train) == train_ids);
    SplitResult other = stratified_split(labeled, 0.5, 100);
    CHECK(ids(other.train) != train_ids);

    CHECK_THROWS_AS(stratified_split(labeled, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(stratified_split(labeled, 1.0, 1), ValidationError);
    LabeledSet lopsided;
    lopsided.records = {labeled.records[0], labeled.records[10], labeled.records[11]};
    CHECK_THROWS_AS(stratified_split(lopsided, 0.5, 1), ValidationError);
}

TEST_CASE("change summary worked example") {
    Snapshot first = make_snapshot({make_profile(1, 100), make_profile(2, 200)});
    Snapshot second =
        make_snapshot({make_profile(1, 150), make_profile(2, 100)}, "2014-11-07");
    ChangeSummary s = describe_changes(join_snapshots(first, second).labeled);
    CHECK(s.first_count.n == 2);
    CHECK(s.first_count.mean == doctest::Approx(150.0));
    CHECK(s.second_count.mean == doctest::Approx(125.0));
    CHECK(s.absolute_change.mean == doctest::Approx(-25.0));
    CHECK(s.relative_change.mean == doctest::Approx(1.0));  // (1.5 + 0.5) / 2
    CHECK(s.increased_count == 1);
    CHECK(s.increased_percent == doctest::Approx(50.0));

    CHECK_THROWS_AS(describe_changes(LabeledSet{}), ValidationError);
}
