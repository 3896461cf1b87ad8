#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace farmlens::text {

struct Token {
    std::string original;
    std::string lower;
};

// Maximal runs of Unicode letters (ASCII, Latin, Greek, Cyrillic and the other
// scripts listed in utf8.cpp). Everything else separates tokens.
std::vector<Token> tokenize_words(std::string_view text);

// Splits after '.', '!' or '?' when the terminator is followed by whitespace or
// the end of text. Only segments containing at least one letter are returned,
// so a text with words but no terminator yields one sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Vowel-group count over a-z/y, at least 1 for any non-empty word.
int count_syllables(std::string_view lower_word);

class LanguageDetector {
public:
    virtual ~LanguageDetector() = default;
    virtual bool is_english(std::string_view text) const = 0;
};

// Default detector: at least two distinct stopword hits (or one hit for posts
// under three words) and at least 70% ASCII among letters.
class StopwordDetector final : public LanguageDetector {
public:
    StopwordDetector();  // built-in list from data/stopwords_en.txt
    explicit StopwordDetector(std::vector<std::string> stopwords);

    bool is_english(std::string_view text) const override;
    const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

    static constexpr double kMinAsciiLetterShare = 0.70;

private:
    std::unordered_set<std::string> stopwords_;
};

const StopwordDetector& default_detector();
std::vector<std::string> builtin_stopwords();

bool is_english(std::string_view text);

struct TextStats {
    std::size_t n_chars = 0;      // letters
    std::size_t n_words = 0;
    std::size_t n_sentences = 0;
    double avg_word_length = 0;   // letters per word
    double avg_sentence_length = 0;  // words per sentence
    std::size_t n_upper = 0;
    double pct_punct = 0;         // of non-whitespace characters
    double pct_digits = 0;
    double pct_nonletter = 0;
    double richness = 0;          // unique lowercased words / words
    double ari = 0;
    double flesch = 0;

    bool operator==(const TextStats&) const = default;
};

// Aggregates the texts as one corpus. Each text is its own segment for
// sentence splitting, so counts are additive over the list.
TextStats lexical_profile(std::span<const std::string> texts);
TextStats lexical_profile(std::string_view text);

double automated_readability_index(double letters_per_word, double words_per_sentence);
double flesch_reading_ease(double words_per_sentence, double syllables_per_word);

} // namespace farmlens::text
