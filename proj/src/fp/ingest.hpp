#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fp/common.hpp"
#include "fp/stats.hpp"

namespace fp {

// One user's profile fields at crawl time.
struct RawProfile {
    std::uint64_t user_id = 0;
    std::string name_field;
    std::string screen_name;
    std::optional<std::string> description;
    std::optional<std::string> location;
    std::optional<std::string> url;
    std::int64_t followers_count = 0;
    std::int64_t friends_count = 0;
    std::int64_t tweet_count = 0;
    std::int64_t favorited_count = 0;
    std::int64_t listed_count = 0;
    std::optional<int> utc_offset_hours;  // -12..+14 when present
    bool default_profile = false;
    bool default_profile_image = false;
    Date created_at{};
    std::optional<Date> last_tweet_at;
    bool is_protected = false;  // "protected" in the file format
    bool verified = false;
};

// Reference date for age/inactivity derivation.
struct CrawlContext {
    Date crawl_date{};
};

struct Snapshot {
    CrawlContext ctx;
    std::vector<RawProfile> profiles;
    std::size_t malformed = 0;  // skipped lines, reported, never silently dropped
};

// First-snapshot profile joined with the second crawl's follower count.
struct LabeledProfile {
    RawProfile profile;
    std::int64_t followers_second = 0;
    bool increased = false;           // followers_second > profile.followers_count
    std::int64_t absolute_change = 0;  // followers_second - profile.followers_count
    double relative_change = 0.0;      // second/first, 0 when first == 0
};

struct LabeledSet {
    CrawlContext ctx;  // first crawl's date (reference for feature derivation)
    std::vector<LabeledProfile> records;
};

// Snapshot files are UTF-8, one JSON object per line. The first line is a
// header carrying the reserved key "crawl_date"; every other line is one
// profile record keyed by the RawProfile field names, dates as YYYY-MM-DD.
Snapshot parse_snapshot(std::istream& in, const std::string& source_name,
                        std::optional<Date> crawl_date_override = std::nullopt);
Snapshot load_snapshot(const std::string& path,
                       std::optional<Date> crawl_date_override = std::nullopt);
void save_snapshot(const Snapshot& snapshot, const std::string& path);

// Drops protected and verified profiles and those inactive for more than 365
// days at crawl time; a missing last_tweet_at counts as infinite inactivity.
std::vector<RawProfile> filter_profiles(const std::vector<RawProfile>& profiles,
                                        const CrawlContext& ctx);

struct JoinResult {
    LabeledSet labeled;
    std::size_t attrition = 0;  // users of the first crawl missing from the second
};

// Pairs the two crawls by user_id and derives the increase label. Duplicate
// ids within either snapshot are a fatal validation error.
JoinResult join_snapshots(const Snapshot& first, const Snapshot& second);

// Labeled-set file: same line-oriented format with a header line carrying
// crawl_date, records extended by the second-crawl fields.
LabeledSet load_labeled(const std::string& path);
void save_labeled(const LabeledSet& labeled, const std::string& path);

struct SplitResult {
    LabeledSet train;
    LabeledSet eval;
};

// Seeded stratified split preserving the increase-flag ratio in both parts;
// each part keeps the input's relative record order.
SplitResult stratified_split(const LabeledSet& labeled, double ratio, std::uint64_t seed);

// Table of follower-count changes between the two crawls.
struct ChangeSummary {
    DescriptiveRow first_count;
    DescriptiveRow second_count;
    DescriptiveRow absolute_change;
    DescriptiveRow relative_change;
    double increased_percent = 0.0;
    std::int64_t increased_count = 0;
};

ChangeSummary describe_changes(const LabeledSet& labeled);

}  // namespace fp
