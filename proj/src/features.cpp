#include "farmlens/features.hpp"

#include <ostream>

#include "farmlens/error.hpp"
#include "farmlens/parallel.hpp"
#include "report_util.hpp"

namespace farmlens {

std::array<double, kFeatureCount> FeatureVector::values() const {
    const auto& s = lexical.stats;
    return {non_lexical.avg_words_per_post,
            non_lexical.avg_comments_per_post,
            non_lexical.avg_likes_per_post,
            non_lexical.share_ratio,
            static_cast<double>(s.n_chars),
            static_cast<double>(s.n_words),
            static_cast<double>(s.n_sentences),
            s.avg_word_length,
            s.avg_sentence_length,
            static_cast<double>(s.n_upper),
            s.pct_punct,
            s.pct_digits,
            s.pct_nonletter,
            s.richness,
            s.ari,
            s.flesch,
            lexical.english_ratio};
}

NonLexicalFeatures extract_non_lexical(const Account& a) {
    NonLexicalFeatures f;
    if (a.posts.empty()) return f;
    std::size_t words = 0, shared = 0;
    std::int64_t comments = 0, likes = 0;
    for (const auto& p : a.posts) {
        words += text::tokenize_words(p.text).size();
        comments += p.n_comments;
        likes += p.n_likes;
        if (p.is_shared) ++shared;
    }
    const double n = static_cast<double>(a.posts.size());
    f.avg_words_per_post = static_cast<double>(words) / n;
    f.avg_comments_per_post = static_cast<double>(comments) / n;
    f.avg_likes_per_post = static_cast<double>(likes) / n;
    f.share_ratio = static_cast<double>(shared) / n;
    return f;
}

LexicalFeatures extract_lexical(const Account& a, const text::LanguageDetector& detector) {
    LexicalFeatures f;
    if (a.posts.empty()) return f;
    std::vector<std::string> english;
    for (const auto& p : a.posts) {
        if (detector.is_english(p.text)) english.push_back(p.text);
    }
    f.english_ratio = static_cast<double>(english.size()) / static_cast<double>(a.posts.size());
    if (english.empty()) return f;
    f.has_english = true;
    f.stats = text::lexical_profile(english);
    return f;
}

FeatureVector assemble(const Account& a, const text::LanguageDetector& detector) {
    return FeatureVector{a.id, a.label, extract_non_lexical(a), extract_lexical(a, detector)};
}

std::vector<FeatureVector> featurize(const Dataset& d) {
    std::vector<FeatureVector> out(d.accounts.size());
    parallel_for(d.accounts.size(), [&](std::size_t i) { out[i] = assemble(d.accounts[i]); });
    return out;
}

std::size_t feature_index(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
        if (kFeatureNames[i] == name) return i;
    }
    throw InvalidArgument("unknown feature name '" + std::string(name) + "'");
}

void write_features_csv(std::ostream& out, std::span<const FeatureVector> rows) {
    out << "account_id";
    for (auto name : kFeatureNames) out << ',' << name;
    out << ",label\n";
    for (const auto& r : rows) {
        out << csv_field(r.account_id);
        for (double v : r.values()) out << ',' << format_double(v);
        out << ',' << csv_field(r.label.str()) << '\n';
    }
}

} // namespace farmlens
