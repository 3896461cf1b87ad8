#include "farmlens/textmetrics.hpp"

#include <sstream>

#include "embedded.hpp"
#include "utf8.hpp"

namespace farmlens::text {

std::vector<Token> tokenize_words(std::string_view text) {
    std::vector<Token> out;
    Token cur;
    auto flush = [&] {
        if (!cur.original.empty()) {
            out.push_back(std::move(cur));
            cur = Token{};
        }
    };
    for (std::size_t i = 0; i < text.size();) {
        const std::size_t start = i;
        const char32_t c = utf8::next(text, i);
        if (utf8::is_letter(c)) {
            cur.original.append(text.substr(start, i - start));
            utf8::append(cur.lower, utf8::to_lower(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

namespace {

bool is_terminator(char32_t c) { return c == '.' || c == '!' || c == '?'; }

// Calls on_sentence(begin, end) for each segment that contains a letter.
template <typename F>
void for_each_sentence(std::string_view text, F&& on_sentence) {
    std::size_t seg_begin = 0;
    bool has_letter = false;
    for (std::size_t i = 0; i < text.size();) {
        const char32_t c = utf8::next(text, i);
        if (utf8::is_letter(c)) has_letter = true;
        if (!is_terminator(c)) continue;
        bool boundary = i >= text.size();
        if (!boundary) {
            std::size_t j = i;
            boundary = utf8::is_space(utf8::next(text, j));
        }
        if (boundary) {
            if (has_letter) on_sentence(seg_begin, i);
            seg_begin = i;
            has_letter = false;
        }
    }
    if (has_letter) on_sentence(seg_begin, text.size());
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    for_each_sentence(text, [&](std::size_t b, std::size_t e) { out.emplace_back(trim(text.substr(b, e - b))); });
    return out;
}

int count_syllables(std::string_view lower_word) {
    if (lower_word.empty()) return 0;
    auto vowel = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; };
    int groups = 0;
    bool prev = false;
    for (char c : lower_word) {
        const bool v = vowel(c);
        if (v && !prev) ++groups;
        prev = v;
    }
    return groups < 1 ? 1 : groups;
}

std::vector<std::string> builtin_stopwords() {
    std::vector<std::string> words;
    std::istringstream in{std::string(embedded::stopwords_en())};
    std::string line;
    while (std::getline(in, line)) {
        auto w = trim(line);
        if (w.empty() || w.front() == '#') continue;
        words.emplace_back(w);
    }
    return words;
}

StopwordDetector::StopwordDetector() : StopwordDetector(builtin_stopwords()) {}

StopwordDetector::StopwordDetector(std::vector<std::string> stopwords)
    : stopwords_(std::make_move_iterator(stopwords.begin()), std::make_move_iterator(stopwords.end())) {}

bool StopwordDetector::is_english(std::string_view text) const {
    const auto tokens = tokenize_words(text);
    if (tokens.empty()) return false;

    std::size_t letters = 0, ascii_letters = 0;
    for (std::size_t i = 0; i < text.size();) {
        const char32_t c = utf8::next(text, i);
        if (!utf8::is_letter(c)) continue;
        ++letters;
        if (c < 0x80) ++ascii_letters;
    }
    if (static_cast<double>(ascii_letters) < kMinAsciiLetterShare * static_cast<double>(letters)) return false;

    std::unordered_set<std::string_view> hits;
    for (const auto& t : tokens) {
        if (stopwords_.contains(t.lower)) hits.insert(t.lower);
    }
    if (hits.size() >= 2) return true;
    return tokens.size() < 3 && hits.size() >= 1;
}

const StopwordDetector& default_detector() {
    static const StopwordDetector detector;
    return detector;
}

bool is_english(std::string_view text) { return default_detector().is_english(text); }

double automated_readability_index(double letters_per_word, double words_per_sentence) {
    return 4.71 * letters_per_word + 0.5 * words_per_sentence - 21.43;
}

double flesch_reading_ease(double words_per_sentence, double syllables_per_word) {
    return 206.835 - 1.015 * words_per_sentence - 84.6 * syllables_per_word;
}

TextStats lexical_profile(std::span<const std::string> texts) {
    std::size_t letters = 0, words = 0, sentences = 0, upper = 0, syllables = 0;
    std::size_t nonspace = 0, punct = 0, digits = 0, nonletter = 0;
    std::unordered_set<std::string> unique;

    for (const auto& t : texts) {
        for (std::size_t i = 0; i < t.size();) {
            const char32_t c = utf8::next(t, i);
            if (utf8::is_space(c)) continue;
            ++nonspace;
            if (utf8::is_letter(c)) {
                ++letters;
                if (utf8::is_upper(c)) ++upper;
                continue;
            }
            ++nonletter;
            if (utf8::is_punct(c)) ++punct;
            if (utf8::is_digit(c)) ++digits;
        }
        for (auto& tok : tokenize_words(t)) {
            ++words;
            syllables += static_cast<std::size_t>(count_syllables(tok.lower));
            unique.insert(std::move(tok.lower));
        }
        for_each_sentence(t, [&](std::size_t, std::size_t) { ++sentences; });
    }

    TextStats s;
    s.n_chars = letters;
    s.n_words = words;
    s.n_sentences = sentences;
    s.n_upper = upper;
    if (nonspace > 0) {
        const double n = static_cast<double>(nonspace);
        s.pct_punct = 100.0 * static_cast<double>(punct) / n;
        s.pct_digits = 100.0 * static_cast<double>(digits) / n;
        s.pct_nonletter = 100.0 * static_cast<double>(nonletter) / n;
    }
    if (words == 0) return s;

    const double w = static_cast<double>(words);
    s.avg_word_length = static_cast<double>(letters) / w;
    s.avg_sentence_length = w / static_cast<double>(sentences);
    s.richness = static_cast<double>(unique.size()) / w;
    s.ari = automated_readability_index(s.avg_word_length, s.avg_sentence_length);
    s.flesch = flesch_reading_ease(s.avg_sentence_length, static_cast<double>(syllables) / w);
    return s;
}

TextStats lexical_profile(std::string_view text) {
    const std::string copy(text);
    return lexical_profile(std::span<const std::string>(&copy, 1));
}

} // namespace farmlens::text
