#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace farmlens {

inline constexpr std::string_view kSchemaVersion = "farmlens/1";

enum class Gender { female, male, unknown };

// The six age bins used by the Facebook page-insights report.
enum class AgeBin { a13_17, a18_24, a25_34, a35_44, a45_54, a55_plus };
inline constexpr std::size_t kAgeBinCount = 6;
inline constexpr std::array<std::string_view, kAgeBinCount> kAgeBinNames = {
    "13-17", "18-24", "25-34", "35-44", "45-54", "55+"};

std::string_view to_string(Gender g);
std::string_view to_string(AgeBin a);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<AgeBin> parse_age_bin(std::string_view s);

struct Demographics {
    Gender gender = Gender::unknown;
    AgeBin age_bin = AgeBin::a18_24;
    std::string country = "unknown";  // ISO-3166 alpha-2 or "unknown"

    bool operator==(const Demographics&) const = default;
};

// Ground truth: a baseline (normal) user, or an account delivered by a farm campaign.
struct Label {
    enum class Kind { baseline, farm };
    Kind kind = Kind::baseline;
    std::string campaign;  // empty for baseline

    static Label baseline() { return {}; }
    static Label farm(std::string campaign_id) { return {Kind::farm, std::move(campaign_id)}; }

    bool is_farm() const { return kind == Kind::farm; }
    std::string str() const;  // "baseline" or "farm:<campaign>"
    static std::optional<Label> parse(std::string_view s);

    bool operator==(const Label&) const = default;
    auto operator<=>(const Label&) const = default;
};

struct TimelinePost {
    std::string text;       // UTF-8, may be empty
    std::int64_t timestamp = 0;  // seconds since epoch
    std::int64_t n_likes = 0;
    std::int64_t n_comments = 0;
    bool is_shared = false;  // re-share, external link or linked media

    bool operator==(const TimelinePost&) const = default;
};

struct PageLike {
    std::string page;
    std::int64_t timestamp = 0;

    bool operator==(const PageLike&) const = default;
};

struct Account {
    std::string id;
    Label label;
    std::vector<TimelinePost> posts;     // ascending timestamp
    std::vector<PageLike> liked_pages;   // distinct page ids
    std::vector<std::string> friends;    // distinct, never the account itself
    Demographics demographics;
    bool active = true;

    bool operator==(const Account&) const = default;
};

struct Page {
    std::string id;
    std::int64_t total_likes = 0;
    std::string category;
    bool is_popular = false;

    bool operator==(const Page&) const = default;
};

struct Dataset {
    std::vector<Account> accounts;
    std::map<std::string, Page> pages;
    std::map<std::string, std::string> provenance;

    bool operator==(const Dataset&) const = default;

    std::size_t count(Label::Kind kind) const;
};

// Throws SchemaError on the first violated invariant; the message names the
// offending record and field.
void validate(const Dataset& d);

// JSONL: header line {"schema":"farmlens/1","provenance":{...}}, then one
// {"page":...} record per page, then one account record per line.
Dataset read_dataset(std::istream& in, std::string_view source_name = "<stream>");
Dataset load_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, const Dataset& d);
void save_dataset(const std::filesystem::path& path, const Dataset& d);

// Stratified by full label (each farm campaign and baseline separately): per
// stratum, round(train_fraction * n) accounts go to train and the rest to test.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction, std::uint64_t seed);

// Union of two fragments. Account ids must not collide; a page present in both
// keeps the larger total_likes. total_likes is raised where needed so the
// merged dataset still satisfies the page invariant.
Dataset merge(const Dataset& a, const Dataset& b);

// Accounts whose label satisfies the predicate, with the page map trimmed to
// what they reference.
template <typename Pred>
Dataset filter_accounts(const Dataset& d, Pred&& keep) {
    Dataset out;
    out.provenance = d.provenance;
    for (const auto& a : d.accounts) {
        if (!keep(a)) continue;
        for (const auto& like : a.liked_pages) {
            auto it = d.pages.find(like.page);
            if (it != d.pages.end()) out.pages.emplace(it->first, it->second);
        }
        out.accounts.push_back(a);
    }
    return out;
}

} // namespace farmlens
