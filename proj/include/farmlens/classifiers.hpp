#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "farmlens/svm.hpp"

namespace farmlens::learn {

// All classifiers score rows with a real-valued decision; > 0 means farm (+1).

struct KnnModel {
    std::size_t k = 5;
    std::vector<Row> rows;
    std::vector<int> labels;

    // (farm votes - baseline votes) / k among the k nearest rows; distance ties
    // resolve to the lower row index.
    double decision(std::span<const double> x) const;
};
KnnModel train_knn(std::span<const Row> x, std::span<const int> y, std::size_t k);

struct NaiveBayesModel {
    static constexpr double kVarianceFloor = 1e-9;
    double log_prior[2] = {0, 0};  // [baseline, farm]
    std::vector<double> mean[2];
    std::vector<double> var[2];

    double decision(std::span<const double> x) const;  // log-posterior ratio farm vs baseline
};
NaiveBayesModel train_naive_bayes(std::span<const Row> x, std::span<const int> y);

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0;   // go left when x[feature] <= threshold
    int left = -1, right = -1;
    double value = 0;       // leaf: weighted farm share minus 0.5
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double decision(std::span<const double> x) const;
    std::size_t depth() const;
};

struct TreeOptions {
    std::size_t max_depth = 8;
    std::size_t min_samples_split = 2;
    std::size_t max_features = 0;  // 0 = all; otherwise sampled per split
    std::uint64_t seed = 0;
};

// CART with Gini impurity; weights default to uniform.
TreeModel train_tree(std::span<const Row> x, std::span<const int> y, std::span<const double> weights,
                     const TreeOptions& opts);

struct AdaBoostModel {
    std::vector<TreeModel> stumps;
    std::vector<double> alphas;
    double decision(std::span<const double> x) const;  // sum of alpha_t * h_t(x)
};
AdaBoostModel train_adaboost(std::span<const Row> x, std::span<const int> y, std::size_t rounds);

struct ForestModel {
    std::vector<TreeModel> trees;
    double decision(std::span<const double> x) const;  // mean farm vote minus 0.5
};
ForestModel train_forest(std::span<const Row> x, std::span<const int> y, std::size_t n_trees, std::size_t max_depth,
                         std::uint64_t seed);

} // namespace farmlens::learn
