#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "farmlens/classifiers.hpp"
#include "farmlens/evaluation.hpp"
#include "farmlens/features.hpp"
#include "farmlens/svm.hpp"

namespace farmlens::learn {

enum class FeatureSet {
    non_lexical,  // columns 0..3
    lexical,      // columns 4..15
    combined,     // the 16 paper features
    extended,     // combined + english_ratio
};

std::string_view to_string(FeatureSet s);
std::optional<FeatureSet> parse_feature_set(std::string_view s);  // nl, lex, all, all+r
std::vector<std::size_t> feature_columns(FeatureSet s);

struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<std::string> ids;
    std::vector<Row> rows;
    std::vector<int> labels;  // +1 farm, -1 baseline

    std::size_t size() const { return rows.size(); }
    std::size_t width() const { return columns.size(); }
    std::size_t count(int label) const;
};

FeatureMatrix to_matrix(std::span<const FeatureVector> features, FeatureSet set);
// Rows whose account has at least one English post (the lexical-only population).
FeatureMatrix english_only(std::span<const FeatureVector> features, FeatureSet set);
FeatureMatrix subset(const FeatureMatrix& m, std::span<const std::size_t> rows);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stdev;  // population stdev; 0 marks a constant column

    static Standardizer fit(const FeatureMatrix& m);
    Row apply(std::span<const double> row) const;
    FeatureMatrix apply(const FeatureMatrix& m) const;
};

enum class ClassifierKind { svm, knn, naive_bayes, decision_tree, adaboost, random_forest };
inline constexpr ClassifierKind kAllClassifiers[] = {ClassifierKind::svm,           ClassifierKind::decision_tree,
                                                     ClassifierKind::adaboost,      ClassifierKind::knn,
                                                     ClassifierKind::random_forest, ClassifierKind::naive_bayes};

std::string_view to_string(ClassifierKind k);                     // svm, knn, nb, tree, ada, rf
std::optional<ClassifierKind> parse_classifier(std::string_view s);
std::string_view display_name(ClassifierKind k);                  // "Decision Tree", ...

struct HyperParams {
    double gamma = 0.125;
    double nu = 0.125;
    std::size_t knn_k = 5;
    std::size_t tree_depth = 8;
    std::size_t ada_rounds = 50;
    std::size_t forest_trees = 100;
    std::size_t forest_depth = 16;
    std::uint64_t seed = 0;
    bool standardize = true;
};

using ModelParams = std::variant<NuSvmModel, KnnModel, NaiveBayesModel, TreeModel, AdaBoostModel, ForestModel>;

struct TrainedModel {
    ClassifierKind kind = ClassifierKind::svm;
    std::vector<std::string> columns;
    std::optional<Standardizer> scaler;
    HyperParams params;
    ModelParams model;
    std::vector<std::string> warnings;

    double decision(std::span<const double> raw_row) const;
    int predict(std::span<const double> raw_row) const { return decision(raw_row) > 0 ? 1 : -1; }
};

TrainedModel train(ClassifierKind kind, const FeatureMatrix& m, const HyperParams& h);
EvaluationReport evaluate(const TrainedModel& model, const FeatureMatrix& test);
std::vector<int> predict_all(const TrainedModel& model, const FeatureMatrix& test);

// Exponent ranges of the powers of two searched for gamma and nu. A grid point
// with nu >= 1 is skipped (the nu-SVC dual needs nu < 1 to be informative).
struct GridSpec {
    int gamma_lo = -10, gamma_hi = 0;
    int nu_lo = -10, nu_hi = 0;
    std::size_t folds = 5;
};

struct GridPoint {
    double gamma = 0, nu = 0, mean_f1 = 0;
};

struct GridResult {
    HyperParams best;
    double best_f1 = 0;
    std::vector<GridPoint> points;
};

// Stratified k-fold CV on the given (training) matrix, SVM only. Highest mean
// F1 wins; ties go to the smaller gamma, then the smaller nu.
GridResult grid_search(const FeatureMatrix& m, const GridSpec& grid, const HyperParams& base);

// Fold index per row: rows of each class are shuffled and dealt round-robin.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

// Versioned JSON with an FNV-1a checksum over the serialized model body.
void save_model(std::ostream& out, const TrainedModel& m);
TrainedModel load_model(std::istream& in);
void save_model(const std::filesystem::path& path, const TrainedModel& m);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace farmlens::learn
