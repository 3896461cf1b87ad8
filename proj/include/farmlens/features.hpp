#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "farmlens/model.hpp"
#include "farmlens/textmetrics.hpp"

namespace farmlens {

struct NonLexicalFeatures {
    double avg_words_per_post = 0;
    double avg_comments_per_post = 0;
    double avg_likes_per_post = 0;
    double share_ratio = 0;

    bool operator==(const NonLexicalFeatures&) const = default;
};

struct LexicalFeatures {
    text::TextStats stats;     // over English posts only; all zero without English posts
    double english_ratio = 0;  // English posts / posts
    bool has_english = false;

    bool operator==(const LexicalFeatures&) const = default;
};

// Vector layout (external contract, stable across versions):
//   0..3   non-lexical: avg_words_per_post, avg_comments_per_post,
//          avg_likes_per_post, share_ratio
//   4..15  lexical: n_chars, n_words, n_sentences, avg_word_length,
//          avg_sentence_length, n_upper, pct_punct, pct_digits,
//          pct_nonletter, richness, ari, flesch
//   16     english_ratio
inline constexpr std::size_t kNonLexicalCount = 4;
inline constexpr std::size_t kLexicalCount = 12;
inline constexpr std::size_t kPaperFeatureCount = kNonLexicalCount + kLexicalCount;
inline constexpr std::size_t kFeatureCount = kPaperFeatureCount + 1;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "avg_words_per_post", "avg_comments_per_post", "avg_likes_per_post", "share_ratio",
    "n_chars", "n_words", "n_sentences", "avg_word_length", "avg_sentence_length", "n_upper",
    "pct_punct", "pct_digits", "pct_nonletter", "richness", "ari", "flesch",
    "english_ratio"};

struct FeatureVector {
    std::string account_id;
    Label label;
    NonLexicalFeatures non_lexical;
    LexicalFeatures lexical;

    std::array<double, kFeatureCount> values() const;

    bool operator==(const FeatureVector&) const = default;
};

NonLexicalFeatures extract_non_lexical(const Account& a);
LexicalFeatures extract_lexical(const Account& a, const text::LanguageDetector& detector = text::default_detector());
FeatureVector assemble(const Account& a, const text::LanguageDetector& detector = text::default_detector());

std::vector<FeatureVector> featurize(const Dataset& d);

// Column index for a canonical feature name; throws InvalidArgument if unknown.
std::size_t feature_index(std::string_view name);

// Header row of canonical names, one row per account, label column last.
void write_features_csv(std::ostream& out, std::span<const FeatureVector> rows);

} // namespace farmlens
