#include "farmlens/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "farmlens/error.hpp"
#include "farmlens/parallel.hpp"
#include "farmlens/rng.hpp"

namespace farmlens::learn {

namespace {

void check_training_set(std::span<const Row> x, std::span<const int> y, const char* who) {
    if (x.size() != y.size()) throw InvalidArgument(std::string(who) + ": row/label count mismatch");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v == 1) {
            pos = true;
        } else if (v == -1) {
            neg = true;
        } else {
            throw InvalidArgument(std::string(who) + ": labels must be +1 or -1");
        }
    }
    if (!pos || !neg) throw InvalidArgument(std::string(who) + ": both classes must be present");
}

} // namespace

double KnnModel::decision(std::span<const double> x) const {
    std::vector<std::pair<double, std::size_t>> d(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) d[i] = {squared_distance(rows[i], x), i};
    const std::size_t kk = std::min(k, rows.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
    int votes = 0;
    for (std::size_t i = 0; i < kk; ++i) votes += labels[d[i].second];
    return static_cast<double>(votes) / static_cast<double>(kk);
}

KnnModel train_knn(std::span<const Row> x, std::span<const int> y, std::size_t k) {
    check_training_set(x, y, "kNN");
    if (k == 0) throw InvalidArgument("kNN: k must be positive");
    return KnnModel{k, {x.begin(), x.end()}, {y.begin(), y.end()}};
}

double NaiveBayesModel::decision(std::span<const double> x) const {
    double score[2];
    for (int c = 0; c < 2; ++c) {
        double s = log_prior[c];
        for (std::size_t f = 0; f < x.size(); ++f) {
            const double d = x[f] - mean[c][f];
            s += -0.5 * std::log(2.0 * M_PI * var[c][f]) - d * d / (2.0 * var[c][f]);
        }
        score[c] = s;
    }
    return score[1] - score[0];
}

NaiveBayesModel train_naive_bayes(std::span<const Row> x, std::span<const int> y) {
    check_training_set(x, y, "naive Bayes");
    const std::size_t d = x[0].size();
    NaiveBayesModel m;
    std::size_t count[2] = {0, 0};
    for (int c = 0; c < 2; ++c) {
        m.mean[c].assign(d, 0.0);
        m.var[c].assign(d, 0.0);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int c = y[i] > 0 ? 1 : 0;
        ++count[c];
        for (std::size_t f = 0; f < d; ++f) m.mean[c][f] += x[i][f];
    }
    for (int c = 0; c < 2; ++c) {
        for (double& v : m.mean[c]) v /= static_cast<double>(count[c]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int c = y[i] > 0 ? 1 : 0;
        for (std::size_t f = 0; f < d; ++f) {
            const double dv = x[i][f] - m.mean[c][f];
            m.var[c][f] += dv * dv;
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (double& v : m.var[c]) v = v / static_cast<double>(count[c]) + NaiveBayesModel::kVarianceFloor;
        m.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(x.size()));
    }
    return m;
}

double TreeModel::decision(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

std::size_t TreeModel::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (nodes[i].feature >= 0) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return best;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(std::span<const Row> x, std::span<const int> y, std::span<const double> w, const TreeOptions& o)
        : x_(x), y_(y), w_(w), opts_(o), rng_(o.seed) {}

    TreeModel build() {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (w_[i] > 0) idx.push_back(i);
        }
        model_.nodes.emplace_back();
        grow(0, idx, 0);
        return std::move(model_);
    }

private:
    static double gini(double farm, double total) {
        if (total <= 0) return 0;
        const double p = farm / total;
        return 2.0 * p * (1.0 - p);
    }

    void grow(std::size_t node, std::vector<std::size_t>& idx, std::size_t depth) {
        double farm = 0, total = 0;
        for (auto i : idx) {
            total += w_[i];
            if (y_[i] > 0) farm += w_[i];
        }
        model_.nodes[node].value = total > 0 ? farm / total - 0.5 : 0.0;
        if (depth >= opts_.max_depth || idx.size() < opts_.min_samples_split || farm <= 0 || farm >= total) return;

        const std::size_t d = x_[0].size();
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), 0);
        if (opts_.max_features > 0 && opts_.max_features < d) {
            rng_.shuffle(features);
            features.resize(opts_.max_features);
            std::sort(features.begin(), features.end());
        }

        const double parent = total * gini(farm, total);
        double best = parent - 1e-12;
        int best_feature = -1;
        double best_threshold = 0;
        std::vector<std::size_t> order = idx;
        for (auto f : features) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x_[a][f] < x_[b][f] || (x_[a][f] == x_[b][f] && a < b);
            });
            double lf = 0, lt = 0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const auto i = order[k];
                lt += w_[i];
                if (y_[i] > 0) lf += w_[i];
                const double xv = x_[i][f], xn = x_[order[k + 1]][f];
                if (xv == xn) continue;
                const double impurity = lt * gini(lf, lt) + (total - lt) * gini(farm - lf, total - lt);
                if (impurity < best) {
                    best = impurity;
                    best_feature = static_cast<int>(f);
                    best_threshold = xv + (xn - xv) / 2.0;
                }
            }
        }
        if (best_feature < 0) return;

        std::vector<std::size_t> left, right;
        for (auto i : idx) {
            (x_[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        const auto l = model_.nodes.size();
        model_.nodes.emplace_back();
        model_.nodes.emplace_back();
        auto& n = model_.nodes[node];
        n.feature = best_feature;
        n.threshold = best_threshold;
        n.left = static_cast<int>(l);
        n.right = static_cast<int>(l + 1);
        grow(l, left, depth + 1);
        grow(l + 1, right, depth + 1);
    }

    std::span<const Row> x_;
    std::span<const int> y_;
    std::span<const double> w_;
    TreeOptions opts_;
    Rng rng_;
    TreeModel model_;
};

} // namespace

TreeModel train_tree(std::span<const Row> x, std::span<const int> y, std::span<const double> weights,
                     const TreeOptions& opts) {
    check_training_set(x, y, "decision tree");
    std::vector<double> uniform;
    if (weights.empty()) {
        uniform.assign(x.size(), 1.0);
        weights = uniform;
    }
    if (weights.size() != x.size()) throw InvalidArgument("decision tree: weight count mismatch");
    return TreeBuilder(x, y, weights, opts).build();
}

double AdaBoostModel::decision(std::span<const double> x) const {
    double s = 0;
    for (std::size_t t = 0; t < stumps.size(); ++t) s += alphas[t] * (stumps[t].decision(x) > 0 ? 1.0 : -1.0);
    return s;
}

AdaBoostModel train_adaboost(std::span<const Row> x, std::span<const int> y, std::size_t rounds) {
    check_training_set(x, y, "AdaBoost");
    const std::size_t n = x.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    AdaBoostModel m;
    TreeOptions stump;
    stump.max_depth = 1;
    for (std::size_t t = 0; t < rounds; ++t) {
        auto tree = train_tree(x, y, w, stump);
        std::vector<int> h(n);
        double err = 0;
        for (std::size_t i = 0; i < n; ++i) {
            h[i] = tree.decision(x[i]) > 0 ? 1 : -1;
            if (h[i] != y[i]) err += w[i];
        }
        if (err >= 0.5) break;
        const double clipped = std::max(err, 1e-10);
        const double alpha = 0.5 * std::log((1.0 - clipped) / clipped);
        m.stumps.push_back(std::move(tree));
        m.alphas.push_back(alpha);
        if (err == 0.0) break;
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) sum += (w[i] *= std::exp(-alpha * y[i] * h[i]));
        for (double& v : w) v /= sum;
    }
    if (m.stumps.empty()) {
        // No stump beats chance: fall back to the weighted majority leaf.
        TreeOptions leaf;
        leaf.max_depth = 0;
        m.stumps.push_back(train_tree(x, y, {}, leaf));
        m.alphas.push_back(1.0);
    }
    return m;
}

double ForestModel::decision(std::span<const double> x) const {
    double votes = 0;
    for (const auto& t : trees) votes += t.decision(x) > 0 ? 1.0 : 0.0;
    return votes / static_cast<double>(trees.size()) - 0.5;
}

ForestModel train_forest(std::span<const Row> x, std::span<const int> y, std::size_t n_trees, std::size_t max_depth,
                         std::uint64_t seed) {
    check_training_set(x, y, "random forest");
    if (n_trees == 0) throw InvalidArgument("random forest: need at least one tree");
    const std::size_t n = x.size();
    const std::size_t d = x[0].size();
    ForestModel m;
    m.trees.resize(n_trees);
    parallel_for(n_trees, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) w[rng.below(n)] += 1.0;
        TreeOptions o;
        o.max_depth = max_depth;
        o.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d)))));
        o.seed = rng.next_u64();
        // A bootstrap that misses one class still yields a (constant) tree.
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] > 0) (y[i] > 0 ? pos : neg) = true;
        }
        if (!pos || !neg) {
            TreeModel leaf;
            leaf.nodes.push_back({-1, 0, -1, -1, pos ? 0.5 : -0.5});
            m.trees[t] = std::move(leaf);
            return;
        }
        m.trees[t] = TreeBuilder(x, y, w, o).build();
    });
    return m;
}

} // namespace farmlens::learn
