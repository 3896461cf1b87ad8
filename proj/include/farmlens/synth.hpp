#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "farmlens/model.hpp"

namespace farmlens::synth {

enum class Archetype { baseline, bursty_farm, stealthy_farm };

std::string_view to_string(Archetype a);

struct Band {
    double lo = 0, hi = 0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

struct DemographicModel {
    double female = 0.5;                                 // share of F; the rest is M
    std::array<double, kAgeBinCount> age{};              // percentages, renormalized
    std::map<std::string, double> countries{{"US", 1.0}};  // weights
};

struct PostModel {
    double posts_median = 30, posts_sigma = 0.6;
    std::size_t posts_max = 500;
    double share_ratio = 0.3, share_ratio_sd = 0.08;  // per-account mean share of shared posts
    double empty_shared = 0.6;                        // shared posts carrying no text
    double likes_per_post = 2, likes_sigma = 0.5;     // per-account mean: lognormal(median, sigma)
    double comments_per_post = 1, comments_sigma = 0.5;
    double words_per_post = 17, words_sigma = 0.35;   // per-account median words of a text post
};

struct TextModel {
    double richness = 0.7, richness_sd = 0.03;
    double word_length = 6.95, word_length_sd = 0.2;        // letters per word
    double richness_word_length_corr = 0;                   // per-account correlation of the two
    double sentence_length = 17.6, sentence_length_sd = 2;  // words per sentence
    double letters_per_syllable = 4.4;
    double english_median = 0.8, english_sigma = 0.15;      // per-account share of text posts in English
    double no_english = 0.0;                                // accounts posting no English at all
    double digit_rate = 0.05;                               // chance a post carries a number
};

enum class TemporalMode { uniform, burst };

struct TemporalModel {
    TemporalMode mode = TemporalMode::uniform;
    double days = 15;          // campaign length
    double burst_day = 1;      // burst starts this many days after launch
    double burst_hours = 4;
    double burst_share = 0.95;
};

enum class GraphModelKind { random, groups, pairs };

struct GraphModel {
    GraphModelKind kind = GraphModelKind::random;
    double mean_degree = 2;        // random
    std::size_t group_min = 11, group_max = 16;  // groups
    std::size_t external_friends = 2;
    std::size_t external_pool = 400;  // shared non-liker friends
};

struct LikeModel {
    double median = 34, sigma = 0.7;
    std::size_t max = 5000;
    double popular = 0.45, community = 0.35;  // the rest goes to the long tail
    std::string pool;                         // farm operator pool name; empty for none
    std::size_t pool_size = 0;
    double pool_share = 0;
    std::size_t communities = 30, community_pages = 80;
    double strong_community = 0;   // share of accounts in the tightly knit community
    double strong_affinity = 0.7;  // share of a strong-community member's likes on its pages
};

struct CohortSpec {
    std::string name;      // preset name, e.g. "al_all"
    std::string campaign;  // label campaign, e.g. "AL-ALL"; empty for baseline
    Archetype archetype = Archetype::baseline;
    std::size_t n_accounts = 100;
    DemographicModel demographics;
    PostModel posts;
    TextModel text;
    TemporalModel temporal;
    GraphModel graph;
    LikeModel likes;
    std::map<std::string, Band> bands;  // audit bands keyed by target name

    Label label() const;
};

// Parses a preset JSON document; throws InvalidArgument on bad values.
CohortSpec parse_spec(std::string_view json_text);
std::vector<std::string> preset_names();
CohortSpec preset(std::string_view name);  // throws InvalidArgument for unknown names

inline constexpr std::int64_t kCampaignStart = 1'435'708'800;  // 2015-07-01 00:00:00 UTC
inline constexpr std::int64_t kPopularLikes = 100'000;         // "popular page" threshold

struct AuditEntry {
    std::string target;
    double measured = 0;
    Band band;
    bool pass = false;
};

struct AuditReport {
    std::vector<AuditEntry> entries;
    bool pass() const;
    std::string failures() const;  // comma-separated failing targets
};

// Recomputes every band of the spec on the fragment's accounts.
AuditReport verify(const Dataset& d, const CohortSpec& spec);

// Deterministic for (spec, seed). Throws Error listing failed targets when the
// post-generation audit fails and audit is requested.
Dataset generate(const CohortSpec& spec, std::uint64_t seed, bool audit = true);

// Synthetic English / non-English words, exposed for tests.
std::string synth_word(std::size_t letters, double letters_per_syllable, std::uint64_t seed);

} // namespace farmlens::synth
