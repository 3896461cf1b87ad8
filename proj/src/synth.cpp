#include "farmlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "embedded.hpp"
#include "farmlens/error.hpp"
#include "farmlens/features.hpp"
#include "farmlens/graphkit.hpp"
#include "farmlens/parallel.hpp"
#include "farmlens/rng.hpp"
#include "farmlens/textmetrics.hpp"

namespace farmlens::synth {

using nlohmann::json;

std::string_view to_string(Archetype a) {
    switch (a) {
    case Archetype::baseline: return "baseline";
    case Archetype::bursty_farm: return "bursty_farm";
    case Archetype::stealthy_farm: return "stealthy_farm";
    }
    return "baseline";
}

Label CohortSpec::label() const {
    return archetype == Archetype::baseline ? Label::baseline() : Label::farm(campaign);
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument("preset: " + what);
}

} // namespace

CohortSpec parse_spec(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("preset: ") + e.what());
    }
    CohortSpec s;
    try {
        s.name = j.at("name").get<std::string>();
        read_opt(j, "campaign", s.campaign);
        const auto arch = j.at("archetype").get<std::string>();
        if (arch == "baseline") {
            s.archetype = Archetype::baseline;
        } else if (arch == "bursty_farm") {
            s.archetype = Archetype::bursty_farm;
        } else if (arch == "stealthy_farm") {
            s.archetype = Archetype::stealthy_farm;
        } else {
            throw InvalidArgument("preset: unknown archetype '" + arch + "'");
        }
        read_opt(j, "n_accounts", s.n_accounts);

        if (j.contains("demographics")) {
            const auto& d = j.at("demographics");
            read_opt(d, "female", s.demographics.female);
            if (d.contains("age")) {
                const auto age = d.at("age").get<std::vector<double>>();
                require(age.size() == kAgeBinCount, "age needs six bins");
                std::copy(age.begin(), age.end(), s.demographics.age.begin());
            }
            if (d.contains("countries")) s.demographics.countries = d.at("countries").get<std::map<std::string, double>>();
        } else {
            s.demographics.age = {14.9, 32.3, 26.6, 13.2, 7.2, 5.9};
        }
        if (j.contains("posts")) {
            const auto& p = j.at("posts");
            auto& m = s.posts;
            read_opt(p, "posts_median", m.posts_median);
            read_opt(p, "posts_sigma", m.posts_sigma);
            read_opt(p, "posts_max", m.posts_max);
            read_opt(p, "share_ratio", m.share_ratio);
            read_opt(p, "share_ratio_sd", m.share_ratio_sd);
            read_opt(p, "empty_shared", m.empty_shared);
            read_opt(p, "likes_per_post", m.likes_per_post);
            read_opt(p, "likes_sigma", m.likes_sigma);
            read_opt(p, "comments_per_post", m.comments_per_post);
            read_opt(p, "comments_sigma", m.comments_sigma);
            read_opt(p, "words_per_post", m.words_per_post);
            read_opt(p, "words_sigma", m.words_sigma);
        }
        if (j.contains("text")) {
            const auto& t = j.at("text");
            auto& m = s.text;
            read_opt(t, "richness", m.richness);
            read_opt(t, "richness_sd", m.richness_sd);
            read_opt(t, "word_length", m.word_length);
            read_opt(t, "word_length_sd", m.word_length_sd);
            read_opt(t, "richness_word_length_corr", m.richness_word_length_corr);
            read_opt(t, "sentence_length", m.sentence_length);
            read_opt(t, "sentence_length_sd", m.sentence_length_sd);
            read_opt(t, "letters_per_syllable", m.letters_per_syllable);
            read_opt(t, "english_median", m.english_median);
            read_opt(t, "english_sigma", m.english_sigma);
            read_opt(t, "no_english", m.no_english);
            read_opt(t, "digit_rate", m.digit_rate);
        }
        if (j.contains("temporal")) {
            const auto& t = j.at("temporal");
            const auto mode = t.value("mode", std::string("uniform"));
            require(mode == "uniform" || mode == "burst", "temporal mode must be uniform or burst");
            s.temporal.mode = mode == "burst" ? TemporalMode::burst : TemporalMode::uniform;
            read_opt(t, "days", s.temporal.days);
            read_opt(t, "burst_day", s.temporal.burst_day);
            read_opt(t, "burst_hours", s.temporal.burst_hours);
            read_opt(t, "burst_share", s.temporal.burst_share);
        }
        if (j.contains("graph")) {
            const auto& g = j.at("graph");
            const auto model = g.value("model", std::string("random"));
            if (model == "random") {
                s.graph.kind = GraphModelKind::random;
            } else if (model == "groups") {
                s.graph.kind = GraphModelKind::groups;
            } else if (model == "pairs") {
                s.graph.kind = GraphModelKind::pairs;
            } else {
                throw InvalidArgument("preset: unknown graph model '" + model + "'");
            }
            read_opt(g, "mean_degree", s.graph.mean_degree);
            read_opt(g, "group_min", s.graph.group_min);
            read_opt(g, "group_max", s.graph.group_max);
            read_opt(g, "external_friends", s.graph.external_friends);
            read_opt(g, "external_pool", s.graph.external_pool);
        }
        if (j.contains("likes")) {
            const auto& l = j.at("likes");
            auto& m = s.likes;
            read_opt(l, "median", m.median);
            read_opt(l, "sigma", m.sigma);
            read_opt(l, "max", m.max);
            read_opt(l, "popular", m.popular);
            read_opt(l, "community", m.community);
            read_opt(l, "pool", m.pool);
            read_opt(l, "pool_size", m.pool_size);
            read_opt(l, "pool_share", m.pool_share);
            read_opt(l, "communities", m.communities);
            read_opt(l, "community_pages", m.community_pages);
            read_opt(l, "strong_community", m.strong_community);
            read_opt(l, "strong_affinity", m.strong_affinity);
        }
        if (j.contains("bands")) {
            for (const auto& [k, v] : j.at("bands").items()) {
                require(v.is_array() && v.size() == 2, "band '" + k + "' must be [lo, hi]");
                s.bands[k] = Band{v.at(0).get<double>(), v.at(1).get<double>()};
            }
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("preset: ") + e.what());
    }

    require(!s.name.empty(), "name must not be empty");
    require(s.n_accounts >= 10, "n_accounts must be at least 10");
    require(s.archetype == Archetype::baseline || !s.campaign.empty(), "farm presets need a campaign");
    require(s.text.richness > 0 && s.text.richness <= 1, "richness must lie in (0, 1]");
    require(s.text.word_length >= 2 && s.text.word_length <= 14, "word_length must lie in [2, 14]");
    require(std::abs(s.text.richness_word_length_corr) < 1, "richness_word_length_corr must lie in (-1, 1)");
    require(s.text.sentence_length >= 2, "sentence_length must be at least 2");
    require(s.text.letters_per_syllable >= 1.5, "letters_per_syllable must be at least 1.5");
    require(s.posts.share_ratio >= 0 && s.posts.share_ratio <= 1, "share_ratio must lie in [0, 1]");
    require(s.likes.popular >= 0 && s.likes.community >= 0 && s.likes.popular + s.likes.community <= 1,
            "like mixture shares must be non-negative and sum to at most 1");
    require(s.likes.pool.empty() || s.likes.pool_size > 0, "pool_size must be positive when a pool is named");
    require(s.graph.kind != GraphModelKind::groups || (s.graph.group_min >= 2 && s.graph.group_min <= s.graph.group_max),
            "group sizes must satisfy 2 <= group_min <= group_max");
    for (double a : s.demographics.age) require(a >= 0, "age weights must be non-negative");
    for (const auto& [k, b] : s.bands) require(b.lo <= b.hi, "band '" + k + "' has lo > hi");
    return s;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : embedded::presets()) out.emplace_back(name);
    return out;
}

CohortSpec preset(std::string_view name) {
    for (const auto& [n, text] : embedded::presets()) {
        if (n == name) return parse_spec(text);
    }
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

namespace {

constexpr std::int64_t kDay = 86'400;
constexpr std::int64_t kHour = 3'600;
constexpr std::size_t kPopularPages = 300;
constexpr std::size_t kStrongPages = 60;
constexpr std::size_t kTailPages = 5'000'000;
constexpr std::size_t kVocabularyPerLength = 6000;

const char* const kConsonants = "bcdfghjklmnprstvwz";
const char* const kVowels = "aeiou";
const char* const kForeignVowels[] = {"à", "á", "â", "ä", "è", "é", "ê", "ë", "ì", "í", "î", "ï",
                                      "ò", "ó", "ô", "ö", "ù", "ú", "û", "ü"};
const char* const kForeignConsonants[] = {"ç", "ñ", "ł", "ś", "ž", "ř", "ß", "č"};

// Onset sizes per syllable (slot 0..k-1) plus coda (slot k) for a word with k
// vowels and c consonants; every inner onset gets at least one consonant so
// vowel groups stay separate.
std::vector<std::size_t> consonant_slots(std::size_t k, std::size_t c, Rng& rng) {
    std::vector<std::size_t> slot(k + 1, 0);
    for (std::size_t i = 1; i < k; ++i) slot[i] = 1;
    std::size_t remaining = c - (k - 1);
    while (remaining > 0) {
        const std::size_t s = rng.below(k + 1);
        if (slot[s] < 3 || rng.bernoulli(0.1)) {
            ++slot[s];
            --remaining;
        }
    }
    return slot;
}

std::size_t syllable_count(std::size_t letters, double lps) {
    auto k = static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(letters) / lps)));
    k = std::min(k, letters);
    while (k > 1 && letters - k < k - 1) --k;
    return k;
}

std::string foreign_word(std::size_t letters, std::uint64_t seed) {
    Rng rng(seed);
    letters = std::max<std::size_t>(letters, 2);
    const std::size_t k = syllable_count(letters, 2.5);
    const auto slots = consonant_slots(k, letters - k, rng);
    std::string w;
    auto consonant = [&] {
        if (rng.bernoulli(0.5)) {
            w += kForeignConsonants[rng.below(std::size(kForeignConsonants))];
        } else {
            w += kConsonants[rng.below(18)];
        }
    };
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t i = 0; i < slots[s]; ++i) consonant();
        w += kForeignVowels[rng.below(std::size(kForeignVowels))];
    }
    for (std::size_t i = 0; i < slots[k]; ++i) consonant();
    return w;
}

struct Stopwords {
    std::vector<std::string> words;
    std::vector<double> cumulative;
    std::unordered_set<std::string> set;
};

const Stopwords& stopwords() {
    static const Stopwords s = [] {
        Stopwords out;
        out.words = text::builtin_stopwords();
        double total = 0;
        for (std::size_t i = 0; i < out.words.size(); ++i) {
            total += 1.0 / std::pow(static_cast<double>(i + 1), 0.6);
            out.cumulative.push_back(total);
        }
        out.set.insert(out.words.begin(), out.words.end());
        return out;
    }();
    return s;
}

std::size_t zipf_index(Rng& rng, std::size_t n) {
    const double u = rng.uniform();
    return std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * u * u));
}

struct AccountText {
    double richness, word_length, sentence_length, words_per_post, lps, digit_rate;
};

std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

char terminator(Rng& rng) {
    const double u = rng.uniform();
    return u < 0.84 ? '.' : (u < 0.92 ? '!' : '?');
}

std::size_t post_word_count(Rng& rng, double median) {
    return static_cast<std::size_t>(std::max(4.0, std::round(rng.lognormal_median(median, 0.35))));
}

// Stochastic rounding keeps words/sentences unbiased for posts longer than a sentence.
std::vector<std::size_t> split_sentences_evenly(std::size_t words, double sentence_length, Rng& rng) {
    const double exact = static_cast<double>(words) / sentence_length;
    const double whole = std::floor(exact);
    const auto ns = static_cast<std::size_t>(std::max(1.0, whole + (rng.bernoulli(exact - whole) ? 1.0 : 0.0)));
    std::vector<std::size_t> out(ns, words / ns);
    for (std::size_t i = 0; i < words % ns; ++i) ++out[i];
    return out;
}

// English posts with exactly round(richness * N) distinct lowercased words and
// letters/words close to the requested word length.
std::vector<std::string> english_posts(std::size_t count, const AccountText& p, Rng& rng) {
    if (count == 0) return {};
    const auto& sw = stopwords();

    struct Sentence {
        std::size_t words;
        std::vector<std::string> stops;
    };
    std::vector<std::vector<Sentence>> posts(count);
    std::size_t total_words = 0, stop_letters = 0, stop_slots = 0;
    std::unordered_set<std::string> distinct_stops;
    for (auto& post : posts) {
        const auto shape = split_sentences_evenly(post_word_count(rng, p.words_per_post), p.sentence_length, rng);
        for (std::size_t s = 0; s < shape.size(); ++s) {
            Sentence sent{shape[s], {}};
            const std::size_t want = s == 0 ? 2 : 1;
            std::set<std::string> chosen;
            while (chosen.size() < want) chosen.insert(sw.words[rng.pick_cumulative(sw.cumulative)]);
            // keep the two stopwords of a post distinct from each other
            for (const auto& w : chosen) {
                sent.stops.push_back(w);
                stop_letters += w.size();
                distinct_stops.insert(w);
            }
            stop_slots += sent.stops.size();
            total_words += sent.words;
            post.push_back(std::move(sent));
        }
    }

    const std::size_t content_slots = total_words - stop_slots;
    const auto target_unique = static_cast<std::size_t>(std::llround(p.richness * static_cast<double>(total_words)));
    const std::size_t unique_content =
        std::clamp<std::size_t>(target_unique > distinct_stops.size() ? target_unique - distinct_stops.size() : 1, 1,
                                std::max<std::size_t>(content_slots, 1));
    const double content_length = std::clamp(
        (p.word_length * static_cast<double>(total_words) - static_cast<double>(stop_letters)) /
            static_cast<double>(std::max<std::size_t>(content_slots, 1)),
        3.0, 14.0);

    std::vector<std::string> uniques;
    std::unordered_set<std::string> used;
    const auto lps_bucket = static_cast<std::uint64_t>(std::llround(p.lps * 20));
    while (uniques.size() < unique_content) {
        auto len = static_cast<std::size_t>(std::clamp(std::round(rng.normal(content_length, 1.6)), 2.0, 16.0));
        std::size_t idx = zipf_index(rng, kVocabularyPerLength);
        for (std::size_t tries = 1;; ++tries) {
            auto w = synth_word(len, p.lps, derive_seed(fnv1a("en-vocabulary"), (lps_bucket << 40) | (len << 24) | idx));
            if (!sw.set.contains(w) && used.insert(w).second) {
                uniques.push_back(std::move(w));
                break;
            }
            idx = (idx + 1) % kVocabularyPerLength;
            // Short lengths have few distinct spellings; move on once exhausted.
            if (tries % 64 == 0) ++len;
        }
    }
    std::vector<std::size_t> sequence(content_slots);
    for (std::size_t i = 0; i < content_slots; ++i) {
        sequence[i] = i < uniques.size() ? i : rng.below(uniques.size());
    }
    rng.shuffle(sequence);

    std::vector<std::string> out;
    out.reserve(count);
    std::size_t next = 0;
    for (const auto& post : posts) {
        std::string text;
        for (const auto& sent : post) {
            std::vector<std::string> words;
            for (std::size_t i = 0; i + sent.stops.size() < sent.words; ++i) words.push_back(uniques[sequence[next++]]);
            for (const auto& s : sent.stops) {
                const auto pos = rng.below(words.size() + 1);
                words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), s);
            }
            if (!text.empty()) text += ' ';
            for (std::size_t i = 0; i < words.size(); ++i) {
                if (i > 0) text += ' ';
                text += i == 0 ? capitalize(words[i]) : words[i];
                if (i + 1 < words.size() && rng.bernoulli(0.06)) text += ',';
            }
            if (rng.bernoulli(p.digit_rate)) text += " " + std::to_string(rng.range(2, 2016));
            text += terminator(rng);
        }
        out.push_back(std::move(text));
    }
    return out;
}

std::string foreign_post(Rng& rng, double words_per_post, double sentence_length) {
    std::string text;
    for (std::size_t n : split_sentences_evenly(post_word_count(rng, words_per_post), sentence_length, rng)) {
        if (!text.empty()) text += ' ';
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) text += ' ';
            const auto len = static_cast<std::size_t>(rng.range(3, 9));
            text += foreign_word(len, derive_seed(fnv1a("foreign-vocabulary"), (len << 24) | zipf_index(rng, 4000)));
        }
        text += terminator(rng);
    }
    return text;
}

struct PageCatalog {
    static std::string popular(std::size_t i) { return format("pop-%04zu", i); }
    static std::string community(std::size_t c, std::size_t i) { return format("com-%02zu-%03zu", c, i); }
    static std::string strong(std::size_t i) { return format("core-%03zu", i); }
    static std::string tail(std::size_t i) { return format("tail-%07zu", i); }
    static std::string pool(const std::string& name, std::size_t i) { return "op-" + name + format("-%05zu", i); }

    static std::string format(const char* f, std::size_t a, std::size_t b = 0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, a, b);
        return buf;
    }

    // Popular pages follow a heavy tail by rank, all at or above kPopularLikes.
    static std::int64_t popular_total(std::size_t i) {
        return static_cast<std::int64_t>(std::llround(static_cast<double>(kPopularLikes) *
                                                      static_cast<double>(kPopularPages) / static_cast<double>(i + 1)));
    }

    static const std::vector<double>& popular_weights() {
        static const std::vector<double> cum = [] {
            std::vector<double> c;
            double total = 0;
            for (std::size_t i = 0; i < kPopularPages; ++i) c.push_back(total += std::pow(static_cast<double>(i + 1), -0.7));
            return c;
        }();
        return cum;
    }
};

Page make_page(const std::string& id) {
    Page p;
    p.id = id;
    const auto h = fnv1a(id);
    if (id.rfind("pop-", 0) == 0) {
        p.total_likes = PageCatalog::popular_total(static_cast<std::size_t>(std::stoul(id.substr(4))));
        p.category = "Entertainment";
        p.is_popular = true;
    } else if (id.rfind("com-", 0) == 0 || id.rfind("core-", 0) == 0) {
        p.total_likes = 200 + static_cast<std::int64_t>(h % 20'000);
        p.category = "Community";
    } else if (id.rfind("op-", 0) == 0) {
        p.total_likes = 1'000 + static_cast<std::int64_t>(h % 40'000);
        p.category = "Brand";
    } else if (id.rfind("hp-", 0) == 0) {
        p.total_likes = 0;
        p.category = "Honeypot";
    } else {
        p.total_likes = 10 + static_cast<std::int64_t>(h % 5'000);
        p.category = "Local Business";
    }
    return p;
}

std::string account_prefix(const CohortSpec& spec) {
    std::string p = spec.archetype == Archetype::baseline ? spec.name : spec.campaign;
    for (char& c : p) {
        if (c == '_') c = '-';
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return p;
}

std::vector<std::vector<std::string>> build_friends(const CohortSpec& spec, const std::vector<std::string>& ids,
                                                    Rng& rng) {
    const std::size_t n = ids.size();
    std::vector<std::set<std::size_t>> adj(n);
    auto connect_group = [&](const std::vector<std::size_t>& g) {
        for (std::size_t a = 0; a < g.size(); ++a) {
            for (std::size_t b = a + 1; b < g.size(); ++b) {
                adj[g[a]].insert(g[b]);
                adj[g[b]].insert(g[a]);
            }
        }
    };
    const auto& gm = spec.graph;
    if (gm.kind == GraphModelKind::random) {
        const auto edges = static_cast<std::size_t>(std::llround(gm.mean_degree * static_cast<double>(n) / 2.0));
        for (std::size_t e = 0; e < edges && n > 1; ++e) {
            const auto u = rng.below(n);
            const auto v = rng.below(n);
            if (u != v) connect_group({u, v});
        }
    } else {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        std::vector<std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < n;) {
            const std::size_t size = gm.kind == GraphModelKind::groups
                                         ? static_cast<std::size_t>(rng.range(static_cast<std::int64_t>(gm.group_min),
                                                                              static_cast<std::int64_t>(gm.group_max)))
                                         : (rng.bernoulli(0.7) ? 2 : 3);
            const std::size_t end = std::min(n, i + size);
            groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                                order.begin() + static_cast<std::ptrdiff_t>(end));
            i = end;
        }
        const std::size_t min_size = gm.kind == GraphModelKind::groups ? gm.group_min : 2;
        if (groups.size() > 1 && groups.back().size() < min_size) {
            auto last = std::move(groups.back());
            groups.pop_back();
            groups.back().insert(groups.back().end(), last.begin(), last.end());
        }
        for (const auto& g : groups) connect_group(g);
    }

    std::vector<std::vector<std::string>> friends(n);
    const std::string ext = "x-" + account_prefix(spec) + "-";
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : adj[i]) friends[i].push_back(ids[j]);
        if (gm.external_pool > 0) {
            for (auto e : rng.sample_without_replacement(gm.external_pool, gm.external_friends)) {
                friends[i].push_back(ext + std::to_string(e));
            }
        }
        std::sort(friends[i].begin(), friends[i].end());
    }
    return friends;
}

struct CohortContext {
    const CohortSpec& spec;
    std::string honeypot;
    std::int64_t start = kCampaignStart;
};

std::int64_t campaign_like_time(const CohortContext& ctx, Rng& rng) {
    const auto& t = ctx.spec.temporal;
    const auto span = static_cast<std::int64_t>(t.days * static_cast<double>(kDay));
    if (t.mode == TemporalMode::burst && rng.bernoulli(t.burst_share)) {
        const double hours = t.burst_hours;
        const double offset = std::clamp(rng.normal(hours / 2.0, hours / 6.0), 0.0, hours - 1e-3);
        return ctx.start + static_cast<std::int64_t>(t.burst_day * static_cast<double>(kDay)) +
               static_cast<std::int64_t>(offset * static_cast<double>(kHour));
    }
    return ctx.start + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(span));
}

std::vector<PageLike> generate_likes(const CohortContext& ctx, std::size_t community, bool strong, Rng& rng) {
    const auto& m = ctx.spec.likes;
    const auto n = static_cast<std::size_t>(
        std::clamp(std::round(rng.lognormal_median(m.median, m.sigma)), 1.0, static_cast<double>(m.max)));

    std::vector<std::string> pages;
    std::unordered_set<std::string> seen;
    auto add = [&](std::string id) {
        if (seen.insert(id).second) pages.push_back(std::move(id));
    };

    std::size_t n_pool = 0, n_strong = 0, n_comm = 0, n_pop = 0;
    if (!m.pool.empty()) {
        n_pool = std::min(m.pool_size, static_cast<std::size_t>(std::llround(m.pool_share * static_cast<double>(n))));
    }
    std::size_t rest = n - std::min(n, n_pool);
    if (strong) {
        n_strong = std::min(kStrongPages, static_cast<std::size_t>(std::llround(m.strong_affinity * static_cast<double>(rest))));
        rest -= n_strong;
        const double mix = m.popular + (1.0 - m.popular - m.community);
        n_pop = mix > 0 ? static_cast<std::size_t>(std::llround(static_cast<double>(rest) * m.popular / mix)) : 0;
    } else {
        n_pop = static_cast<std::size_t>(std::llround(m.popular * static_cast<double>(n)));
        n_comm = std::min(m.community_pages, static_cast<std::size_t>(std::llround(m.community * static_cast<double>(n))));
        n_pop = std::min(n_pop, rest);
        n_comm = std::min(n_comm, rest - n_pop);
    }
    n_pop = std::min<std::size_t>(n_pop, kPopularPages * 4 / 5);

    if (n_pool > 0) {
        auto idx = rng.sample_without_replacement(m.pool_size, n_pool);
        std::sort(idx.begin(), idx.end());
        for (auto i : idx) add(PageCatalog::pool(m.pool, i));
    }
    for (auto i : rng.sample_without_replacement(kStrongPages, n_strong)) add(PageCatalog::strong(i));
    for (auto i : rng.sample_without_replacement(m.community_pages, n_comm)) add(PageCatalog::community(community, i));
    const auto& weights = PageCatalog::popular_weights();
    while (n_pop > 0) {
        const auto before = pages.size();
        add(PageCatalog::popular(rng.pick_cumulative(weights)));
        if (pages.size() > before) --n_pop;
    }
    while (pages.size() < n) add(PageCatalog::tail(rng.below(kTailPages)));

    std::vector<PageLike> likes;
    likes.reserve(pages.size() + 1);
    const std::int64_t history = 3 * 365 * kDay;
    for (auto& id : pages) {
        likes.push_back({std::move(id), ctx.start - history + static_cast<std::int64_t>(rng.below(history - kDay))});
    }
    if (!ctx.honeypot.empty()) likes.push_back({ctx.honeypot, campaign_like_time(ctx, rng)});
    return likes;
}

Demographics draw_demographics(const DemographicModel& m, Rng& rng) {
    Demographics d;
    d.gender = rng.bernoulli(m.female) ? Gender::female : Gender::male;
    std::vector<double> cum;
    double total = 0;
    for (double a : m.age) cum.push_back(total += a);
    d.age_bin = static_cast<AgeBin>(rng.pick_cumulative(cum));
    cum.clear();
    total = 0;
    std::vector<std::string> names;
    for (const auto& [c, w] : m.countries) {
        names.push_back(c);
        cum.push_back(total += w);
    }
    d.country = names.empty() ? "unknown" : names[rng.pick_cumulative(cum)];
    return d;
}

std::vector<TimelinePost> generate_posts(const CohortSpec& spec, Rng& rng) {
    const auto& pm = spec.posts;
    const auto& tm = spec.text;
    const auto n_posts = static_cast<std::size_t>(
        std::clamp(std::round(rng.lognormal_median(pm.posts_median, pm.posts_sigma)), 0.0, static_cast<double>(pm.posts_max)));

    const double share = std::clamp(rng.normal(pm.share_ratio, pm.share_ratio_sd), 0.0, 0.95);
    const double likes = rng.lognormal_median(pm.likes_per_post, pm.likes_sigma);
    const double comments = rng.lognormal_median(pm.comments_per_post, pm.comments_sigma);
    const double english = rng.bernoulli(tm.no_english)
                               ? 0.0
                               : std::clamp(rng.lognormal_median(tm.english_median, tm.english_sigma), 0.0, 1.0);
    const double z1 = rng.normal(), z2 = rng.normal();
    const double rho = tm.richness_word_length_corr;
    const AccountText at{
        std::clamp(tm.richness + tm.richness_sd * z1, 0.05, 1.0),
        std::clamp(tm.word_length + tm.word_length_sd * (rho * z1 + std::sqrt(1 - rho * rho) * z2), 2.5, 13.0),
        std::max(3.0, rng.normal(tm.sentence_length, tm.sentence_length_sd)),
        rng.lognormal_median(pm.words_per_post, pm.words_sigma),
        tm.letters_per_syllable,
        tm.digit_rate,
    };

    enum class Kind { empty, english, foreign };
    std::vector<TimelinePost> posts(n_posts);
    std::vector<Kind> kinds(n_posts);
    std::size_t n_english = 0;
    for (std::size_t i = 0; i < n_posts; ++i) {
        auto& p = posts[i];
        p.is_shared = rng.bernoulli(share);
        if (p.is_shared && rng.bernoulli(pm.empty_shared)) {
            kinds[i] = Kind::empty;
        } else if (rng.bernoulli(english)) {
            kinds[i] = Kind::english;
            ++n_english;
        } else {
            kinds[i] = Kind::foreign;
        }
        p.n_likes = static_cast<std::int64_t>(rng.poisson(likes));
        p.n_comments = static_cast<std::int64_t>(rng.poisson(comments));
    }
    auto english_texts = english_posts(n_english, at, rng);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n_posts; ++i) {
        if (kinds[i] == Kind::english) {
            posts[i].text = std::move(english_texts[next++]);
        } else if (kinds[i] == Kind::foreign) {
            posts[i].text = foreign_post(rng, at.words_per_post, at.sentence_length);
        }
    }

    const std::int64_t window = 400 * kDay;
    std::vector<std::int64_t> ts(n_posts);
    for (auto& t : ts) t = kCampaignStart - window + static_cast<std::int64_t>(rng.below(window + 60 * kDay));
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 0; i < n_posts; ++i) posts[i].timestamp = ts[i];
    return posts;
}

} // namespace

std::string synth_word(std::size_t letters, double letters_per_syllable, std::uint64_t seed) {
    Rng rng(seed);
    letters = std::max<std::size_t>(letters, 1);
    const std::size_t k = syllable_count(letters, letters_per_syllable);
    const auto slots = consonant_slots(k, letters - k, rng);
    std::string w;
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t i = 0; i < slots[s]; ++i) w += kConsonants[rng.below(18)];
        w += kVowels[rng.below(5)];
    }
    for (std::size_t i = 0; i < slots[k]; ++i) w += kConsonants[rng.below(18)];
    return w;
}

Dataset generate(const CohortSpec& spec, std::uint64_t seed, bool audit) {
    if (spec.n_accounts < 10) throw InvalidArgument("generate: n_accounts must be at least 10");
    const std::uint64_t cohort_seed = derive_seed(seed, fnv1a(spec.name));
    const std::string prefix = account_prefix(spec);

    std::vector<std::string> ids(spec.n_accounts);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = prefix + PageCatalog::format("-%05zu", i);

    Rng structure(derive_seed(cohort_seed, fnv1a("structure")));
    const auto friends = build_friends(spec, ids, structure);
    std::vector<std::size_t> community(spec.n_accounts, 0);
    std::vector<bool> strong(spec.n_accounts, false);
    for (std::size_t i = 0; i < spec.n_accounts; ++i) {
        community[i] = structure.below(std::max<std::size_t>(spec.likes.communities, 1));
        strong[i] = structure.bernoulli(spec.likes.strong_community);
    }

    CohortContext ctx{spec, spec.archetype == Archetype::baseline ? std::string() : "hp-" + prefix};
    Dataset d;
    d.accounts.resize(spec.n_accounts);
    parallel_for(spec.n_accounts, [&](std::size_t i) {
        Rng rng(derive_seed(cohort_seed, i));
        Account& a = d.accounts[i];
        a.id = ids[i];
        a.label = spec.label();
        a.demographics = draw_demographics(spec.demographics, rng);
        a.posts = generate_posts(spec, rng);
        a.liked_pages = generate_likes(ctx, community[i], strong[i], rng);
        a.friends = friends[i];
    });

    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& a : d.accounts) {
        for (const auto& l : a.liked_pages) ++counts[l.page];
    }
    for (const auto& [id, n] : counts) {
        Page p = make_page(id);
        p.total_likes = std::max(p.total_likes, n);
        d.pages.emplace(id, std::move(p));
    }
    d.provenance = {{"generator", "farmlens-synth"}, {"preset", spec.name}, {"seed", std::to_string(seed)}};

    if (audit) {
        const auto report = verify(d, spec);
        if (!report.pass()) {
            throw Error("synthetic cohort '" + spec.name + "' failed its audit: " + report.failures());
        }
    }
    return d;
}

bool AuditReport::pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const AuditEntry& e) { return e.pass; });
}

std::string AuditReport::failures() const {
    std::string out;
    for (const auto& e : entries) {
        if (e.pass) continue;
        if (!out.empty()) out += ", ";
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s=%.4g not in [%.4g, %.4g]", e.target.c_str(), e.measured, e.band.lo, e.band.hi);
        out += buf;
    }
    return out;
}

namespace {
double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    return graph::order_summary(std::move(v)).median;
}
double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
} // namespace

AuditReport verify(const Dataset& d, const CohortSpec& spec) {
    const Label label = spec.label();
    const Dataset cohort = filter_accounts(d, [&](const Account& a) { return a.label == label; });

    std::vector<FeatureVector> fv;
    if (!cohort.accounts.empty()) fv = featurize(cohort);

    std::vector<double> richness, word_length, sentence_length, ari, english, share, likes_pp, words_pp, page_likes;
    std::size_t no_english = 0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        const auto& f = fv[i];
        if (f.lexical.has_english) {
            richness.push_back(f.lexical.stats.richness);
            word_length.push_back(f.lexical.stats.avg_word_length);
            sentence_length.push_back(f.lexical.stats.avg_sentence_length);
            ari.push_back(f.lexical.stats.ari);
        } else {
            ++no_english;
        }
        english.push_back(f.lexical.english_ratio);
        share.push_back(f.non_lexical.share_ratio);
        likes_pp.push_back(f.non_lexical.avg_likes_per_post);
        words_pp.push_back(f.non_lexical.avg_words_per_post);
        page_likes.push_back(static_cast<double>(cohort.accounts[i].liked_pages.size()));
    }

    auto measure = [&](const std::string& target) -> double {
        if (target == "richness") return mean_of(richness);
        if (target == "word_length") return mean_of(word_length);
        if (target == "sentence_length") return mean_of(sentence_length);
        if (target == "ari") return mean_of(ari);
        if (target == "english_ratio_median") return median_of(english);
        if (target == "no_english_share") {
            return fv.empty() ? 0.0 : static_cast<double>(no_english) / static_cast<double>(fv.size());
        }
        if (target == "share_ratio_mean") return mean_of(share);
        if (target == "likes_per_post_mean") return mean_of(likes_pp);
        if (target == "words_per_post_median") return median_of(words_pp);
        if (target == "page_likes_median") return median_of(page_likes);
        if (target == "popular_like_share") {
            std::size_t pop = 0, total = 0;
            for (const auto& a : cohort.accounts) {
                for (const auto& l : a.liked_pages) {
                    ++total;
                    if (cohort.pages.at(l.page).total_likes >= kPopularLikes) ++pop;
                }
            }
            return total == 0 ? 0.0 : static_cast<double>(pop) / static_cast<double>(total);
        }
        if (target == "burstiness") {
            const std::string hp = "hp-" + account_prefix(spec);
            const auto t = graph::page_timeline(cohort, hp);
            return graph::burst_profile(t, 2 * kHour).burstiness;
        }
        if (target == "two_hop_mean_degree" || target == "large_clique_share") {
            const auto g = graph::two_hop_graph(cohort);
            if (target == "two_hop_mean_degree") {
                double sum = 0;
                for (std::size_t i = 0; i < g.size(); ++i) sum += static_cast<double>(g.degree(i));
                return g.size() == 0 ? 0.0 : sum / static_cast<double>(g.size());
            }
            return graph::structure_report(g).share_in_clique_larger_than(10);
        }
        throw InvalidArgument("verify: unknown audit target '" + target + "'");
    };

    AuditReport r;
    for (const auto& [target, band] : spec.bands) {
        const double v = measure(target);
        r.entries.push_back({target, v, band, band.contains(v)});
    }
    return r;
}

} // namespace farmlens::synth
