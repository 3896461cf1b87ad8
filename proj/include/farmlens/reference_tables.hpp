#pragma once

#include <array>
#include <string_view>

// Published figures used as regression fixtures and printed next to the
// synthetic measurements in reproduction reports.
namespace farmlens::reference {

struct AgeRow {
    std::string_view campaign;
    double female, male;  // percent
    std::array<double, 6> age;  // percent per bin: 13-17 18-24 25-34 35-44 45-54 55+
    double kl;  // printed KL column; negative when not printed
};

inline constexpr std::array<AgeRow, 11> kCampaignAges = {{
    {"FB-USA", 54, 46, {54.0, 27.0, 6.8, 6.8, 1.4, 4.1}, 0.45},
    {"FB-FR", 46, 54, {60.8, 20.8, 8.7, 2.6, 5.2, 1.7}, 0.54},
    {"FB-IND", 7, 93, {52.7, 43.5, 2.3, 0.7, 0.5, 0.3}, 1.12},
    {"FB-EGY", 18, 82, {54.6, 34.4, 6.4, 2.9, 0.8, 0.8}, 0.64},
    {"FB-ALL", 6, 94, {51.3, 44.4, 2.1, 1.1, 0.5, 0.6}, 1.04},
    {"BL-USA", 53, 47, {34.2, 54.5, 8.8, 1.5, 0.7, 0.5}, 0.60},
    {"SF-ALL", 37, 63, {19.8, 33.3, 21.0, 15.2, 7.2, 2.8}, 0.04},
    {"SF-USA", 37, 63, {22.3, 34.6, 22.9, 11.6, 5.4, 2.9}, 0.04},
    {"AL-ALL", 42, 58, {15.8, 52.8, 13.4, 9.7, 5.2, 3.0}, 0.12},
    {"AL-USA", 31, 68, {7.2, 41.0, 35.0, 10.0, 3.5, 2.8}, 0.09},
    {"MS-USA", 26, 74, {8.6, 46.9, 34.5, 6.4, 1.9, 1.4}, 0.17},
}};

inline constexpr AgeRow kFacebookAges = {"Facebook", 46, 54, {14.9, 32.3, 26.6, 13.2, 7.2, 5.9}, -1};

// Confusion counts with the printed percentages; accuracy < 0 when the table
// has no accuracy column.
struct ConfusionRow {
    std::string_view campaign;
    int tp, fp, tn, fn;
    double precision, recall, accuracy, f1;
};

inline constexpr std::array<ConfusionRow, 6> kCoclustering = {{
    {"AL-USA", 681, 9, 569, 4, 98, 99, -1, 99},
    {"AL-ALL", 448, 53, 527, 1, 89, 99, -1, 94},
    {"BL-USA", 523, 588, 18, 0, 47, 100, -1, 64},
    {"SF-USA", 428, 67, 512, 1, 86, 100, -1, 94},
    {"SF-ALL", 431, 48, 530, 2, 90, 99, -1, 95},
    {"MS-USA", 201, 22, 549, 2, 90, 99, -1, 93},
}};

inline constexpr std::array<ConfusionRow, 6> kCombinedSvm = {{
    {"BL-USA", 116, 1, 278, 4, 99, 97, 99, 98},
    {"AL-ALL", 140, 1, 278, 4, 99, 97, 99, 98},
    {"AL-USA", 164, 0, 275, 7, 100, 96, 98, 97},
    {"SF-ALL", 172, 2, 271, 11, 99, 94, 97, 96},
    {"SF-USA", 130, 1, 273, 9, 99, 93, 98, 96},
    {"MS-USA", 52, 0, 280, 2, 100, 96, 99, 98},
}};

// Lexical averages per account. The printed header swaps the two length
// columns; the values here are in their meaningful places.
struct LexicalRow {
    std::string_view campaign;
    double chars, words, sentences, word_length, sentence_length, richness, ari, flesch;
};

inline constexpr std::array<LexicalRow, 7> kLexical = {{
    {"Baseline", 4477, 780, 67, 6.9, 17.6, 0.70, 20.2, 55.1},
    {"BL-USA", 7356, 1330, 63, 5.7, 22.8, 0.58, 16.9, 51.5},
    {"AL-ALL", 2835, 464, 32, 6.2, 13.9, 0.59, 14.8, 43.6},
    {"AL-USA", 2475, 394, 33, 6.2, 12.7, 0.49, 14.1, 54.0},
    {"SF-ALL", 1438, 227, 19, 6.3, 11.7, 0.58, 14.1, 45.2},
    {"SF-USA", 1637, 259, 22, 6.3, 12.0, 0.55, 14.4, 45.6},
    {"MS-USA", 6227, 1047, 66, 6.1, 17.8, 0.53, 16.2, 50.1},
}};

// F1 (percent) per classifier: SVM, decision tree, AdaBoost, kNN, random forest, naive Bayes.
struct ClassifierRow {
    std::string_view campaign;
    std::array<double, 6> f1;
};

inline constexpr std::array<ClassifierRow, 6> kClassifierF1 = {{
    {"BL-USA", {98, 96, 96, 91, 88, 53}},
    {"AL-ALL", {98, 84, 95, 86, 84, 75}},
    {"AL-USA", {97, 88, 90, 91, 86, 81}},
    {"SF-ALL", {96, 90, 94, 89, 87, 67}},
    {"SF-USA", {96, 83, 92, 79, 78, 61}},
    {"MS-USA", {98, 90, 89, 89, 87, 74}},
}};

} // namespace farmlens::reference
