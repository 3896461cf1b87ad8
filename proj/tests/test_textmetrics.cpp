#include <doctest.h>

#include <string>
#include <vector>

#include "farmlens/rng.hpp"
#include "farmlens/textmetrics.hpp"

using namespace farmlens;
using namespace farmlens::text;

namespace {

std::vector<std::string> originals(std::string_view s) {
    std::vector<std::string> out;
    for (auto& t : tokenize_words(s)) out.push_back(t.original);
    return out;
}

std::string random_text(Rng& rng, std::size_t words) {
    static const char* vocab[] = {"alpha", "beta", "gamma", "delta", "pie", "the", "a", "run", "quickly", "go"};
    std::string s;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) s += rng.bernoulli(0.15) ? ". " : " ";
        s += vocab[rng.below(10)];
    }
    return s + ".";
}

} // namespace

TEST_SUITE("textmetrics") {

TEST_CASE("tokenization keeps maximal letter runs") {
    CHECK(originals("The cat, the cat!") == std::vector<std::string>{"The", "cat", "the", "cat"});
    CHECK(originals("").empty());
    CHECK(originals("abc123def") == std::vector<std::string>{"abc", "def"});
    CHECK(originals("café naïve") == std::vector<std::string>{"café", "naïve"});
    auto t = tokenize_words("HeLLo");
    REQUIRE(t.size() == 1);
    CHECK(t[0].lower == "hello");
}

TEST_CASE("sentence splitting") {
    CHECK(split_sentences("Hi. Bye!").size() == 2);
    CHECK(split_sentences("no terminator here").size() == 1);
    CHECK(split_sentences("e.g. test? yes.").size() == 3);
    CHECK(split_sentences("").empty());
    CHECK(split_sentences("... !!!").empty());
    CHECK(split_sentences("3.14 is pi").size() == 1);
}

TEST_CASE("syllable heuristic counts vowel groups") {
    CHECK(count_syllables("the") == 1);
    CHECK(count_syllables("quick") == 1);
    CHECK(count_syllables("over") == 2);
    CHECK(count_syllables("lazy") == 2);
    CHECK(count_syllables("rhythm") == 1);
    CHECK(count_syllables("bcd") == 1);
}

TEST_CASE("English detection") {
    CHECK(is_english("this is a test of the system"));
    CHECK_FALSE(is_english(""));
    CHECK_FALSE(is_english("ceci est un texte purement français sans mots anglais"));
    CHECK(is_english("the end"));
    CHECK_FALSE(is_english("квартира и дом the of"));
    CHECK(is_english("this is a test of the system") == is_english("this is a test of the system"));

    StopwordDetector custom({"foo", "bar"});
    CHECK(custom.is_english("foo bar baz qux"));
    CHECK_FALSE(custom.is_english("this is a test of the system"));
    CHECK(builtin_stopwords().size() == 100);
}

TEST_CASE("fox sentence profile matches hand computation") {
    const auto s = lexical_profile(std::string_view("The quick brown fox jumps over the lazy dog."));
    CHECK(s.n_words == 9);
    CHECK(s.n_chars == 35);
    CHECK(s.n_sentences == 1);
    CHECK(s.n_upper == 1);
    CHECK(s.avg_word_length == doctest::Approx(35.0 / 9.0).epsilon(1e-15));
    CHECK(s.avg_sentence_length == 9.0);
    CHECK(std::abs(s.ari - (4.71 * (35.0 / 9.0) + 0.5 * 9.0 - 21.43)) < 1e-9);
    CHECK(s.ari == doctest::Approx(1.387).epsilon(1e-3));
    CHECK(s.richness == doctest::Approx(8.0 / 9.0));
    // 11 syllables: the quick brown fox jumps o-ver the la-zy dog
    CHECK(s.flesch == doctest::Approx(206.835 - 1.015 * 9.0 - 84.6 * (11.0 / 9.0)));
    CHECK(s.pct_punct == doctest::Approx(100.0 / 36.0));
    CHECK(s.pct_nonletter == doctest::Approx(100.0 / 36.0));
    CHECK(s.pct_digits == 0.0);
}

TEST_CASE("degenerate corpora") {
    CHECK(lexical_profile(std::string_view("hello")).richness == 1.0);
    const auto empty = lexical_profile(std::span<const std::string>{});
    CHECK(empty == TextStats{});
    const auto digits = lexical_profile(std::string_view("12 34"));
    CHECK(digits.n_words == 0);
    CHECK(digits.richness == 0.0);
    CHECK(digits.ari == 0.0);
    CHECK(digits.flesch == 0.0);
    CHECK(digits.pct_digits == 100.0);
}

TEST_CASE("duplication never increases richness") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto t = random_text(rng, 1 + rng.below(30));
        const std::vector<std::string> twice = {t, t};
        CHECK(lexical_profile(twice).richness <= lexical_profile(std::string_view(t)).richness);
    }
}

TEST_CASE("counts are additive over the corpus") {
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        const std::vector<std::string> texts = {random_text(rng, 1 + rng.below(20)), random_text(rng, 1 + rng.below(20))};
        const auto a = lexical_profile(std::string_view(texts[0]));
        const auto b = lexical_profile(std::string_view(texts[1]));
        const auto ab = lexical_profile(texts);
        CHECK(ab.n_words == a.n_words + b.n_words);
        CHECK(ab.n_chars == a.n_chars + b.n_chars);
        CHECK(ab.n_sentences == a.n_sentences + b.n_sentences);
        CHECK(ab.n_upper == a.n_upper + b.n_upper);
        CHECK(ab.avg_word_length == doctest::Approx(double(ab.n_chars) / double(ab.n_words)));
        CHECK(ab.avg_sentence_length == doctest::Approx(double(ab.n_words) / double(ab.n_sentences)));
        CHECK(ab.richness >= 0.0);
        CHECK(ab.richness <= 1.0);
    }
}

TEST_CASE("ARI increases with word length") {
    for (double wps : {5.0, 12.0, 30.0}) {
        double prev = automated_readability_index(1.0, wps);
        for (double lpw = 1.5; lpw < 12.0; lpw += 0.5) {
            const double cur = automated_readability_index(lpw, wps);
            CHECK(cur > prev);
            prev = cur;
        }
    }
    CHECK(flesch_reading_ease(10, 1.5) == doctest::Approx(206.835 - 10.15 - 126.9));
}

}
