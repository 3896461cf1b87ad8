#include "farmlens/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "farmlens/error.hpp"
#include "farmlens/rng.hpp"

namespace farmlens {

using nlohmann::json;

std::string_view to_string(Gender g) {
    switch (g) {
    case Gender::female: return "F";
    case Gender::male: return "M";
    case Gender::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(AgeBin a) { return kAgeBinNames[static_cast<std::size_t>(a)]; }

std::optional<Gender> parse_gender(std::string_view s) {
    if (s == "F") return Gender::female;
    if (s == "M") return Gender::male;
    if (s == "unknown") return Gender::unknown;
    return std::nullopt;
}

std::optional<AgeBin> parse_age_bin(std::string_view s) {
    for (std::size_t i = 0; i < kAgeBinCount; ++i) {
        if (kAgeBinNames[i] == s) return static_cast<AgeBin>(i);
    }
    return std::nullopt;
}

std::string Label::str() const { return is_farm() ? "farm:" + campaign : std::string("baseline"); }

std::optional<Label> Label::parse(std::string_view s) {
    if (s == "baseline") return Label::baseline();
    constexpr std::string_view prefix = "farm:";
    if (s.starts_with(prefix) && s.size() > prefix.size()) {
        return Label::farm(std::string(s.substr(prefix.size())));
    }
    return std::nullopt;
}

std::size_t Dataset::count(Label::Kind kind) const {
    return static_cast<std::size_t>(
        std::count_if(accounts.begin(), accounts.end(), [&](const Account& a) { return a.label.kind == kind; }));
}

namespace {

[[noreturn]] void fail(std::string_view where, std::string_view field, std::string_view what) {
    std::ostringstream msg;
    msg << where << ": field '" << field << "': " << what;
    throw SchemaError(msg.str());
}

std::string account_where(std::size_t index, std::string_view id) {
    std::ostringstream s;
    s << "account #" << index;
    if (!id.empty()) s << " (id '" << id << "')";
    return s.str();
}

} // namespace

void validate(const Dataset& d) {
    std::unordered_set<std::string_view> ids;
    ids.reserve(d.accounts.size());
    std::unordered_map<std::string_view, std::int64_t> liker_counts;

    for (const auto& [key, page] : d.pages) {
        if (key != page.id) fail("page '" + key + "'", "page", "map key does not match page id");
        if (page.total_likes < 0) fail("page '" + key + "'", "total_likes", "must be >= 0");
    }

    for (std::size_t i = 0; i < d.accounts.size(); ++i) {
        const Account& a = d.accounts[i];
        const std::string where = account_where(i, a.id);
        if (a.id.empty()) fail(where, "id", "must be non-empty");
        if (!ids.insert(a.id).second) throw SchemaError("duplicate account id '" + a.id + "'");
        if (a.label.is_farm() && a.label.campaign.empty()) fail(where, "label", "farm label without campaign");

        for (std::size_t p = 0; p < a.posts.size(); ++p) {
            const auto& post = a.posts[p];
            const std::string field = "posts[" + std::to_string(p) + "]";
            if (post.n_likes < 0) fail(where, field + ".likes", "must be >= 0");
            if (post.n_comments < 0) fail(where, field + ".comments", "must be >= 0");
            if (p > 0 && post.timestamp < a.posts[p - 1].timestamp) {
                fail(where, field + ".ts", "posts must be sorted by timestamp ascending");
            }
        }

        std::unordered_set<std::string_view> seen_pages;
        for (std::size_t p = 0; p < a.liked_pages.size(); ++p) {
            const auto& like = a.liked_pages[p];
            const std::string field = "liked_pages[" + std::to_string(p) + "]";
            if (!seen_pages.insert(like.page).second) fail(where, field + ".page", "duplicate page '" + like.page + "'");
            if (!d.pages.contains(like.page)) {
                throw SchemaError(where + ": dangling page reference '" + like.page + "'");
            }
            ++liker_counts[like.page];
        }

        std::unordered_set<std::string_view> seen_friends;
        for (const auto& f : a.friends) {
            if (f == a.id) fail(where, "friends", "self-friendship is not allowed");
            if (!seen_friends.insert(f).second) fail(where, "friends", "duplicate friend '" + f + "'");
        }
    }

    for (const auto& [page_id, n] : liker_counts) {
        const Page& page = d.pages.at(std::string(page_id));
        if (page.total_likes < n) {
            fail("page '" + page.id + "'", "total_likes",
                 "smaller than the " + std::to_string(n) + " dataset accounts liking it");
        }
    }
}

namespace {

const json& require(const json& obj, const char* key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, key, "missing");
    return *it;
}

std::string get_string(const json& obj, const char* key, std::string_view where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) fail(where, key, "expected string");
    return v.get<std::string>();
}

std::int64_t get_int(const json& v, std::string_view where, std::string_view field) {
    if (!v.is_number_integer()) fail(where, field, "expected integer");
    return v.get<std::int64_t>();
}

Page parse_page(const json& j, std::string_view where) {
    Page p;
    p.id = get_string(j, "page", where);
    p.total_likes = get_int(require(j, "total_likes", where), where, "total_likes");
    if (p.total_likes < 0) fail(where, "total_likes", "must be >= 0");
    if (auto it = j.find("category"); it != j.end()) {
        if (!it->is_string()) fail(where, "category", "expected string");
        p.category = it->get<std::string>();
    }
    if (auto it = j.find("popular"); it != j.end()) {
        if (!it->is_boolean()) fail(where, "popular", "expected boolean");
        p.is_popular = it->get<bool>();
    }
    return p;
}

Account parse_account(const json& j, std::size_t index) {
    Account a;
    std::string where = account_where(index, "");
    a.id = get_string(j, "id", where);
    where = account_where(index, a.id);

    const std::string label = get_string(j, "label", where);
    auto parsed = Label::parse(label);
    if (!parsed) fail(where, "label", "unknown label '" + label + "'");
    a.label = *parsed;

    const json& demo = require(j, "demographics", where);
    if (!demo.is_object()) fail(where, "demographics", "expected object");
    {
        const std::string g = get_string(demo, "gender", where);
        auto gender = parse_gender(g);
        if (!gender) fail(where, "demographics.gender", "unknown gender '" + g + "'");
        a.demographics.gender = *gender;
        const std::string ab = get_string(demo, "age_bin", where);
        auto bin = parse_age_bin(ab);
        if (!bin) fail(where, "demographics.age_bin", "unknown age bin '" + ab + "'");
        a.demographics.age_bin = *bin;
        a.demographics.country = get_string(demo, "country", where);
    }

    const json& posts = require(j, "posts", where);
    if (!posts.is_array()) fail(where, "posts", "expected array");
    a.posts.reserve(posts.size());
    for (std::size_t p = 0; p < posts.size(); ++p) {
        const json& pj = posts[p];
        const std::string f = "posts[" + std::to_string(p) + "]";
        if (!pj.is_object()) fail(where, f, "expected object");
        TimelinePost post;
        const json& text = require(pj, "text", where);
        if (!text.is_string()) fail(where, f + ".text", "expected string");
        post.text = text.get<std::string>();
        post.timestamp = get_int(require(pj, "ts", where), where, f + ".ts");
        post.n_likes = get_int(require(pj, "likes", where), where, f + ".likes");
        if (post.n_likes < 0) fail(where, f + ".likes", "must be >= 0");
        post.n_comments = get_int(require(pj, "comments", where), where, f + ".comments");
        if (post.n_comments < 0) fail(where, f + ".comments", "must be >= 0");
        const json& shared = require(pj, "shared", where);
        if (!shared.is_boolean()) fail(where, f + ".shared", "expected boolean");
        post.is_shared = shared.get<bool>();
        a.posts.push_back(std::move(post));
    }

    const json& likes = require(j, "liked_pages", where);
    if (!likes.is_array()) fail(where, "liked_pages", "expected array");
    a.liked_pages.reserve(likes.size());
    for (std::size_t p = 0; p < likes.size(); ++p) {
        const json& lj = likes[p];
        const std::string f = "liked_pages[" + std::to_string(p) + "]";
        if (!lj.is_object()) fail(where, f, "expected object");
        PageLike like;
        like.page = get_string(lj, "page", where);
        like.timestamp = get_int(require(lj, "ts", where), where, f + ".ts");
        a.liked_pages.push_back(std::move(like));
    }

    const json& friends = require(j, "friends", where);
    if (!friends.is_array()) fail(where, "friends", "expected array");
    for (const auto& f : friends) {
        if (!f.is_string()) fail(where, "friends", "expected array of strings");
        a.friends.push_back(f.get<std::string>());
    }

    if (auto it = j.find("active"); it != j.end()) {
        if (!it->is_boolean()) fail(where, "active", "expected boolean");
        a.active = it->get<bool>();
    }
    return a;
}

json to_json(const Account& a) {
    json posts = json::array();
    for (const auto& p : a.posts) {
        posts.push_back({{"text", p.text},
                         {"ts", p.timestamp},
                         {"likes", p.n_likes},
                         {"comments", p.n_comments},
                         {"shared", p.is_shared}});
    }
    json likes = json::array();
    for (const auto& l : a.liked_pages) likes.push_back({{"page", l.page}, {"ts", l.timestamp}});
    return json{{"id", a.id},
                {"label", a.label.str()},
                {"active", a.active},
                {"demographics",
                 {{"gender", to_string(a.demographics.gender)},
                  {"age_bin", to_string(a.demographics.age_bin)},
                  {"country", a.demographics.country}}},
                {"posts", std::move(posts)},
                {"liked_pages", std::move(likes)},
                {"friends", a.friends}};
}

} // namespace

Dataset read_dataset(std::istream& in, std::string_view source_name) {
    Dataset d;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t account_index = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(std::string(source_name) + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
        if (!j.is_object()) {
            throw SchemaError(std::string(source_name) + ":" + std::to_string(line_no) + ": record is not an object");
        }
        if (!have_header) {
            auto it = j.find("schema");
            if (it == j.end()) throw SchemaError(std::string(source_name) + ": missing schema header line");
            if (*it != kSchemaVersion) {
                throw SchemaError(std::string(source_name) + ": unsupported schema '" + it->dump() + "'");
            }
            if (auto p = j.find("provenance"); p != j.end() && p->is_object()) {
                for (const auto& [k, v] : p->items()) d.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
            have_header = true;
            continue;
        }
        if (j.contains("page") && !j.contains("id")) {
            Page page = parse_page(j, std::string(source_name) + ":" + std::to_string(line_no));
            if (d.pages.contains(page.id)) throw SchemaError("duplicate page record '" + page.id + "'");
            d.pages.emplace(page.id, std::move(page));
        } else {
            d.accounts.push_back(parse_account(j, account_index++));
        }
    }
    if (!have_header) throw SchemaError(std::string(source_name) + ": empty input (missing schema header line)");
    if (!d.provenance.contains("source")) d.provenance["source"] = std::string(source_name);
    validate(d);
    return d;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open dataset file '" + path.string() + "'");
    return read_dataset(in, path.string());
}

void write_dataset(std::ostream& out, const Dataset& d) {
    json header{{"schema", kSchemaVersion}};
    if (!d.provenance.empty()) header["provenance"] = d.provenance;
    out << header.dump() << '\n';
    for (const auto& [id, p] : d.pages) {
        out << json{{"page", p.id}, {"total_likes", p.total_likes}, {"category", p.category}, {"popular", p.is_popular}}
                   .dump()
            << '\n';
    }
    for (const auto& a : d.accounts) out << to_json(a).dump() << '\n';
}

void save_dataset(const std::filesystem::path& path, const Dataset& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write dataset file '" + path.string() + "'");
    write_dataset(out, d);
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
    }
    if (d.count(Label::Kind::baseline) == 0 || d.count(Label::Kind::farm) == 0) {
        throw InvalidArgument("split_train_test requires both baseline and farm accounts");
    }

    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < d.accounts.size(); ++i) strata[d.accounts[i].label.str()].push_back(i);

    std::vector<bool> in_train(d.accounts.size(), false);
    for (auto& [label, members] : strata) {
        if (members.size() < 2) {
            throw InvalidArgument("label '" + label + "' has fewer than 2 accounts; cannot stratify");
        }
        Rng rng(derive_seed(seed, fnv1a(label)));
        rng.shuffle(members);
        const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
        for (std::size_t k = 0; k < n_train; ++k) in_train[members[k]] = true;
    }

    Dataset train, test;
    train.pages = test.pages = d.pages;
    train.provenance = test.provenance = d.provenance;
    for (std::size_t i = 0; i < d.accounts.size(); ++i) {
        (in_train[i] ? train : test).accounts.push_back(d.accounts[i]);
    }
    return {std::move(train), std::move(test)};
}

Dataset merge(const Dataset& a, const Dataset& b) {
    Dataset out = a;
    std::unordered_set<std::string_view> ids;
    for (const auto& acc : a.accounts) ids.insert(acc.id);
    for (const auto& acc : b.accounts) {
        if (ids.contains(acc.id)) throw SchemaError("duplicate account id '" + acc.id + "'");
    }
    out.accounts.insert(out.accounts.end(), b.accounts.begin(), b.accounts.end());
    for (const auto& [id, page] : b.pages) {
        auto [it, inserted] = out.pages.emplace(id, page);
        if (!inserted) {
            it->second.total_likes = std::max(it->second.total_likes, page.total_likes);
            it->second.is_popular = it->second.is_popular || page.is_popular;
        }
    }
    std::unordered_map<std::string_view, std::int64_t> counts;
    for (const auto& acc : out.accounts) {
        for (const auto& like : acc.liked_pages) ++counts[like.page];
    }
    for (auto& [id, page] : out.pages) {
        auto it = counts.find(id);
        if (it != counts.end()) page.total_likes = std::max(page.total_likes, it->second);
    }
    for (const auto& [k, v] : b.provenance) {
        auto [it, inserted] = out.provenance.emplace(k, v);
        if (!inserted && it->second != v) it->second += "+" + v;
    }
    return out;
}

} // namespace farmlens
