#include "fp/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fp/rng.hpp"

namespace fp {
namespace {

using json = nlohmann::ordered_json;

std::optional<std::string> opt_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::int64_t req_count(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer())
        throw ParseError(std::string("field '") + key + "' must be an integer");
    const std::int64_t v = it->get<std::int64_t>();
    if (v < 0) throw ParseError(std::string("field '") + key + "' must be >= 0");
    return v;
}

bool req_bool(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_boolean())
        throw ParseError(std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
}

Date req_date(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw ParseError(std::string("field '") + key + "' must be a YYYY-MM-DD string");
    return parse_date(it->get<std::string>());
}

RawProfile parse_profile_line(const json& j, Date crawl_date) {
    if (!j.is_object()) throw ParseError("record is not an object");
    RawProfile p;
    auto id = j.find("user_id");
    if (id == j.end() || !id->is_number_unsigned())
        throw ParseError("field 'user_id' must be an unsigned integer");
    p.user_id = id->get<std::uint64_t>();
    auto name = j.find("name_field");
    if (name == j.end() || !name->is_string())
        throw ParseError("field 'name_field' must be a string");
    p.name_field = name->get<std::string>();
    auto screen = j.find("screen_name");
    if (screen == j.end() || !screen->is_string())
        throw ParseError("field 'screen_name' must be a string");
    p.screen_name = screen->get<std::string>();
    p.description = opt_string(j, "description");
    p.location = opt_string(j, "location");
    p.url = opt_string(j, "url");
    p.followers_count = req_count(j, "followers_count");
    p.friends_count = req_count(j, "friends_count");
    p.tweet_count = req_count(j, "tweet_count");
    p.favorited_count = req_count(j, "favorited_count");
    p.listed_count = req_count(j, "listed_count");
    if (auto it = j.find("utc_offset_hours"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw ParseError("field 'utc_offset_hours' must be an integer");
        const std::int64_t v = it->get<std::int64_t>();
        if (v < -12 || v > 14) throw ParseError("field 'utc_offset_hours' out of range -12..14");
        p.utc_offset_hours = int(v);
    }
    p.default_profile = req_bool(j, "default_profile");
    p.default_profile_image = req_bool(j, "default_profile_image");
    p.created_at = req_date(j, "created_at");
    if (auto it = j.find("last_tweet_at"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("field 'last_tweet_at' must be a YYYY-MM-DD string");
        p.last_tweet_at = parse_date(it->get<std::string>());
    }
    p.is_protected = req_bool(j, "protected");
    p.verified = req_bool(j, "verified");
    if (p.created_at > crawl_date) throw ParseError("created_at is after the crawl date");
    return p;
}

json profile_to_json(const RawProfile& p) {
    json j;
    j["user_id"] = p.user_id;
    j["name_field"] = p.name_field;
    j["screen_name"] = p.screen_name;
    if (p.description) j["description"] = *p.description;
    if (p.location) j["location"] = *p.location;
    if (p.url) j["url"] = *p.url;
    j["followers_count"] = p.followers_count;
    j["friends_count"] = p.friends_count;
    j["tweet_count"] = p.tweet_count;
    j["favorited_count"] = p.favorited_count;
    j["listed_count"] = p.listed_count;
    if (p.utc_offset_hours) j["utc_offset_hours"] = *p.utc_offset_hours;
    j["default_profile"] = p.default_profile;
    j["default_profile_image"] = p.default_profile_image;
    j["created_at"] = format_date(p.created_at);
    if (p.last_tweet_at) j["last_tweet_at"] = format_date(*p.last_tweet_at);
    j["protected"] = p.is_protected;
    j["verified"] = p.verified;
    return j;
}

// The header line is the only line allowed to carry the reserved key.
// Returns the crawl date and whether the line was a header (and is consumed).
std::pair<Date, bool> parse_header(const std::string& line, const std::string& source_name,
                                   std::optional<Date> override_date) {
    const json h = json::parse(line, nullptr, false);
    const bool is_header = !h.is_discarded() && h.is_object() && h.contains("crawl_date");
    if (!is_header) {
        if (override_date) return {*override_date, false};
        throw ParseError(source_name + ": first line must be a header object with 'crawl_date'");
    }
    if (override_date) return {*override_date, true};
    if (!h["crawl_date"].is_string())
        throw ParseError(source_name + ": header 'crawl_date' must be a YYYY-MM-DD string");
    return {parse_date(h["crawl_date"].get<std::string>()), true};
}

void check_unique_ids(const std::vector<RawProfile>& profiles, const std::string& what) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(profiles.size());
    for (const auto& p : profiles)
        if (!seen.insert(p.user_id).second)
            throw ValidationError(what + ": duplicate user_id " + std::to_string(p.user_id));
}

}  // namespace

Snapshot parse_snapshot(std::istream& in, const std::string& source_name,
                        std::optional<Date> crawl_date_override) {
    if (!in) throw IoError("cannot read snapshot '" + source_name + "'");
    Snapshot snap;
    std::string line;
    if (!std::getline(in, line)) {
        if (!crawl_date_override)
            throw ParseError(source_name + ": empty file, no header with 'crawl_date'");
        snap.ctx.crawl_date = *crawl_date_override;
        return snap;
    }
    const auto [crawl_date, had_header] = parse_header(line, source_name, crawl_date_override);
    snap.ctx.crawl_date = crawl_date;
    std::size_t line_no = 1;
    auto consume = [&](const std::string& text) {
        ++line_no;
        if (trim(text).empty()) return;
        const json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) {
            ++snap.malformed;
            return;
        }
        try {
            snap.profiles.push_back(parse_profile_line(j, snap.ctx.crawl_date));
        } catch (const Error&) {
            ++snap.malformed;
        }
    };
    if (!had_header) consume(line);
    while (std::getline(in, line)) consume(line);
    check_unique_ids(snap.profiles, source_name);
    return snap;
}

Snapshot load_snapshot(const std::string& path, std::optional<Date> crawl_date_override) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open snapshot '" + path + "'");
    return parse_snapshot(in, path, crawl_date_override);
}

void save_snapshot(const Snapshot& snapshot, const std::string& path) {
    std::ostringstream out;
    json header;
    header["crawl_date"] = format_date(snapshot.ctx.crawl_date);
    out << header.dump() << '\n';
    for (const auto& p : snapshot.profiles) out << profile_to_json(p).dump() << '\n';
    write_text_file(path, out.str());
}

std::vector<RawProfile> filter_profiles(const std::vector<RawProfile>& profiles,
                                        const CrawlContext& ctx) {
    std::vector<RawProfile> kept;
    kept.reserve(profiles.size());
    for (const auto& p : profiles) {
        if (p.is_protected || p.verified) continue;
        if (!p.last_tweet_at) continue;  // never tweeted: infinite inactivity
        if (days_between(*p.last_tweet_at, ctx.crawl_date) > 365) continue;
        kept.push_back(p);
    }
    return kept;
}

JoinResult join_snapshots(const Snapshot& first, const Snapshot& second) {
    check_unique_ids(first.profiles, "first snapshot");
    check_unique_ids(second.profiles, "second snapshot");
    std::unordered_map<std::uint64_t, const RawProfile*> index;
    index.reserve(second.profiles.size());
    for (const auto& p : second.profiles) index.emplace(p.user_id, &p);

    JoinResult result;
    result.labeled.ctx = first.ctx;
    result.labeled.records.reserve(first.profiles.size());
    for (const auto& p : first.profiles) {
        auto it = index.find(p.user_id);
        if (it == index.end()) {
            ++result.attrition;
            continue;
        }
        LabeledProfile rec;
        rec.profile = p;
        rec.followers_second = it->second->followers_count;
        rec.increased = rec.followers_second > p.followers_count;
        rec.absolute_change = rec.followers_second - p.followers_count;
        rec.relative_change = p.followers_count > 0
                                  ? double(rec.followers_second) / double(p.followers_count)
                                  : 0.0;
        result.labeled.records.push_back(std::move(rec));
    }
    return result;
}

LabeledSet load_labeled(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labeled set '" + path + "'");
    LabeledSet set;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ": empty file, no header with 'crawl_date'");
    set.ctx.crawl_date = parse_header(line, path, std::nullopt).first;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError(path + ":" + std::to_string(line_no) + ": malformed record");
        try {
            LabeledProfile rec;
            rec.profile = parse_profile_line(j, set.ctx.crawl_date);
            rec.followers_second = req_count(j, "followers_second");
            rec.increased = rec.followers_second > rec.profile.followers_count;
            rec.absolute_change = rec.followers_second - rec.profile.followers_count;
            rec.relative_change =
                rec.profile.followers_count > 0
                    ? double(rec.followers_second) / double(rec.profile.followers_count)
                    : 0.0;
            set.records.push_back(std::move(rec));
        } catch (const Error& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return set;
}

void save_labeled(const LabeledSet& labeled, const std::string& path) {
    std::ostringstream out;
    json header;
    header["crawl_date"] = format_date(labeled.ctx.crawl_date);
    out << header.dump() << '\n';
    for (const auto& rec : labeled.records) {
        json j = profile_to_json(rec.profile);
        j["followers_second"] = rec.followers_second;
        out << j.dump() << '\n';
    }
    write_text_file(path, out.str());
}

SplitResult stratified_split(const LabeledSet& labeled, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must be in (0,1)");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labeled.records.size(); ++i)
        (labeled.records[i].increased ? pos : neg).push_back(i);
    if (pos.size() < 2 || neg.size() < 2)
        throw ValidationError("stratified split needs at least 2 records of each label");

    std::vector<bool> in_train(labeled.records.size(), false);
    int stream = 0;
    for (auto* cls : {&pos, &neg}) {
        Rng rng = make_rng(seed, std::uint64_t(stream++));
        shuffle_vec(*cls, rng);
        const auto n_train = std::size_t(std::llround(ratio * double(cls->size())));
        for (std::size_t i = 0; i < n_train; ++i) in_train[(*cls)[i]] = true;
    }
    SplitResult result;
    result.train.ctx = labeled.ctx;
    result.eval.ctx = labeled.ctx;
    for (std::size_t i = 0; i < labeled.records.size(); ++i)
        (in_train[i] ? result.train : result.eval).records.push_back(labeled.records[i]);
    return result;
}

ChangeSummary describe_changes(const LabeledSet& labeled) {
    if (labeled.records.empty()) throw ValidationError("cannot describe an empty labeled set");
    const std::size_t n = labeled.records.size();
    std::vector<double> first(n), second(n), abs_change(n), rel_change(n);
    std::int64_t increased = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = labeled.records[i];
        first[i] = double(r.profile.followers_count);
        second[i] = double(r.followers_second);
        abs_change[i] = double(r.absolute_change);
        rel_change[i] = r.relative_change;
        increased += r.increased ? 1 : 0;
    }
    ChangeSummary s;
    s.first_count = describe(first);
    s.second_count = describe(second);
    s.absolute_change = describe(abs_change);
    s.relative_change = describe(rel_change);
    s.increased_count = increased;
    s.increased_percent = 100.0 * double(increased) / double(n);
    return s;
}

}  // namespace fp
