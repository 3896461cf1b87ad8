#include "farmlens/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "farmlens/error.hpp"
#include "farmlens/parallel.hpp"
#include "farmlens/rng.hpp"

namespace farmlens::learn {

using nlohmann::json;

std::string_view to_string(FeatureSet s) {
    switch (s) {
    case FeatureSet::non_lexical: return "nl";
    case FeatureSet::lexical: return "lex";
    case FeatureSet::combined: return "all";
    case FeatureSet::extended: return "all+r";
    }
    return "all";
}

std::optional<FeatureSet> parse_feature_set(std::string_view s) {
    if (s == "nl" || s == "non_lexical") return FeatureSet::non_lexical;
    if (s == "lex" || s == "lexical") return FeatureSet::lexical;
    if (s == "all" || s == "combined") return FeatureSet::combined;
    if (s == "all+r" || s == "extended") return FeatureSet::extended;
    return std::nullopt;
}

std::vector<std::size_t> feature_columns(FeatureSet s) {
    std::size_t lo = 0, hi = kPaperFeatureCount;
    switch (s) {
    case FeatureSet::non_lexical: hi = kNonLexicalCount; break;
    case FeatureSet::lexical: lo = kNonLexicalCount; break;
    case FeatureSet::combined: break;
    case FeatureSet::extended: hi = kFeatureCount; break;
    }
    std::vector<std::size_t> cols;
    for (std::size_t i = lo; i < hi; ++i) cols.push_back(i);
    return cols;
}

std::size_t FeatureMatrix::count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

namespace {
FeatureMatrix build_matrix(std::span<const FeatureVector> features, FeatureSet set, bool english_rows_only) {
    FeatureMatrix m;
    const auto cols = feature_columns(set);
    for (auto c : cols) m.columns.emplace_back(kFeatureNames[c]);
    for (const auto& f : features) {
        if (english_rows_only && !f.lexical.has_english) continue;
        const auto all = f.values();
        Row r;
        r.reserve(cols.size());
        for (auto c : cols) r.push_back(all[c]);
        m.rows.push_back(std::move(r));
        m.ids.push_back(f.account_id);
        m.labels.push_back(f.label.is_farm() ? 1 : -1);
    }
    return m;
}
} // namespace

FeatureMatrix to_matrix(std::span<const FeatureVector> features, FeatureSet set) {
    return build_matrix(features, set, false);
}

FeatureMatrix english_only(std::span<const FeatureVector> features, FeatureSet set) {
    return build_matrix(features, set, true);
}

FeatureMatrix subset(const FeatureMatrix& m, std::span<const std::size_t> rows) {
    FeatureMatrix out;
    out.columns = m.columns;
    for (auto i : rows) {
        out.rows.push_back(m.rows[i]);
        out.ids.push_back(m.ids[i]);
        out.labels.push_back(m.labels[i]);
    }
    return out;
}

Standardizer Standardizer::fit(const FeatureMatrix& m) {
    if (m.size() == 0) throw InvalidArgument("standardize: empty training matrix");
    Standardizer s;
    const std::size_t d = m.width();
    s.mean.assign(d, 0.0);
    s.stdev.assign(d, 0.0);
    for (const auto& r : m.rows) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    }
    for (double& v : s.mean) v /= static_cast<double>(m.size());
    for (const auto& r : m.rows) {
        for (std::size_t j = 0; j < d; ++j) s.stdev[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
    }
    for (double& v : s.stdev) {
        v = std::sqrt(v / static_cast<double>(m.size()));
        if (v < 1e-12) v = 0.0;
    }
    return s;
}

Row Standardizer::apply(std::span<const double> row) const {
    Row out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = stdev[j] > 0 ? (row[j] - mean[j]) / stdev[j] : 0.0;
    return out;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& m) const {
    FeatureMatrix out = m;
    for (auto& r : out.rows) r = apply(r);
    return out;
}

std::string_view to_string(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::naive_bayes: return "nb";
    case ClassifierKind::decision_tree: return "tree";
    case ClassifierKind::adaboost: return "ada";
    case ClassifierKind::random_forest: return "rf";
    }
    return "svm";
}

std::optional<ClassifierKind> parse_classifier(std::string_view s) {
    for (auto k : kAllClassifiers) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view display_name(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::svm: return "SVM";
    case ClassifierKind::knn: return "kNN";
    case ClassifierKind::naive_bayes: return "Naive Bayes";
    case ClassifierKind::decision_tree: return "Decision Tree";
    case ClassifierKind::adaboost: return "AdaBoost";
    case ClassifierKind::random_forest: return "Random Forest";
    }
    return "SVM";
}

double TrainedModel::decision(std::span<const double> raw_row) const {
    if (raw_row.size() != columns.size()) throw InvalidArgument("decision: row width does not match the model");
    const Row x = scaler ? scaler->apply(raw_row) : Row(raw_row.begin(), raw_row.end());
    return std::visit([&](const auto& m) { return m.decision(x); }, model);
}

TrainedModel train(ClassifierKind kind, const FeatureMatrix& m, const HyperParams& h) {
    if (m.count(1) == 0 || m.count(-1) == 0) throw InvalidArgument("train: both classes must be present");
    TrainedModel out;
    out.kind = kind;
    out.columns = m.columns;
    out.params = h;
    std::vector<Row> x = m.rows;
    if (h.standardize) {
        out.scaler = Standardizer::fit(m);
        for (auto& r : x) r = out.scaler->apply(r);
    }
    switch (kind) {
    case ClassifierKind::svm: {
        auto svm = train_nu_svm(x, m.labels, h.gamma, h.nu);
        if (svm.nu_clamped) {
            out.warnings.push_back("nu " + std::to_string(h.nu) + " infeasible for the class balance; clamped to " +
                                   std::to_string(svm.nu));
        }
        out.model = std::move(svm);
        break;
    }
    case ClassifierKind::knn: out.model = train_knn(x, m.labels, h.knn_k); break;
    case ClassifierKind::naive_bayes: out.model = train_naive_bayes(x, m.labels); break;
    case ClassifierKind::decision_tree: {
        TreeOptions o;
        o.max_depth = h.tree_depth;
        o.seed = h.seed;
        out.model = train_tree(x, m.labels, {}, o);
        break;
    }
    case ClassifierKind::adaboost: out.model = train_adaboost(x, m.labels, h.ada_rounds); break;
    case ClassifierKind::random_forest:
        out.model = train_forest(x, m.labels, h.forest_trees, h.forest_depth, h.seed);
        break;
    }
    return out;
}

std::vector<int> predict_all(const TrainedModel& model, const FeatureMatrix& test) {
    std::vector<int> out(test.size());
    parallel_for(test.size(), [&](std::size_t i) { out[i] = model.predict(test.rows[i]); });
    return out;
}

EvaluationReport evaluate(const TrainedModel& model, const FeatureMatrix& test) {
    if (test.size() == 0) throw InvalidArgument("evaluate: empty test matrix");
    const auto pred = predict_all(model, test);
    EvaluationReport r;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (test.labels[i] > 0) {
            (pred[i] > 0 ? r.tp : r.fn) += 1;
        } else {
            (pred[i] > 0 ? r.fp : r.tn) += 1;
        }
    }
    return r;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("stratified_folds: need at least 2 folds");
    std::vector<std::size_t> fold(labels.size(), 0);
    for (int cls : {1, -1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) idx.push_back(i);
        }
        Rng rng(derive_seed(seed, cls > 0 ? 1 : 2));
        rng.shuffle(idx);
        for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = k % folds;
    }
    return fold;
}

GridResult grid_search(const FeatureMatrix& m, const GridSpec& grid, const HyperParams& base) {
    std::vector<double> gammas, nus;
    for (int e = grid.gamma_lo; e <= grid.gamma_hi; ++e) gammas.push_back(std::ldexp(1.0, e));
    for (int e = grid.nu_lo; e <= grid.nu_hi; ++e) {
        if (std::ldexp(1.0, e) < 1.0) nus.push_back(std::ldexp(1.0, e));
    }
    if (gammas.empty() || nus.empty()) throw InvalidArgument("grid_search: empty grid");
    if (m.count(1) < grid.folds || m.count(-1) < grid.folds) {
        throw InvalidArgument("grid_search: each class needs at least one row per fold");
    }

    const auto fold_of = stratified_folds(m.labels, grid.folds, derive_seed(base.seed, fnv1a("grid-folds")));

    struct FoldData {
        std::vector<int> ytr, yval;
        SquareMatrix dtr;
        std::vector<std::vector<double>> dcross;  // validation x training
    };
    std::vector<FoldData> folds(grid.folds);
    parallel_for(grid.folds, [&](std::size_t f) {
        std::vector<std::size_t> tr, val;
        for (std::size_t i = 0; i < m.size(); ++i) (fold_of[i] == f ? val : tr).push_back(i);
        auto mtr = subset(m, tr);
        auto mval = subset(m, val);
        if (base.standardize) {
            const auto s = Standardizer::fit(mtr);
            mtr = s.apply(mtr);
            mval = s.apply(mval);
        }
        auto& fd = folds[f];
        fd.ytr = mtr.labels;
        fd.yval = mval.labels;
        fd.dtr = pairwise_sq_distances(mtr.rows);
        fd.dcross.assign(mval.size(), std::vector<double>(mtr.size()));
        for (std::size_t v = 0; v < mval.size(); ++v) {
            for (std::size_t t = 0; t < mtr.size(); ++t) fd.dcross[v][t] = squared_distance(mval.rows[v], mtr.rows[t]);
        }
    });

    // f1[(fold * G + g) * N + n]
    std::vector<double> f1(grid.folds * gammas.size() * nus.size(), 0.0);
    parallel_for(grid.folds * gammas.size(), [&](std::size_t unit) {
        const std::size_t f = unit / gammas.size();
        const std::size_t g = unit % gammas.size();
        const auto& fd = folds[f];
        const auto k = rbf_from_distances(fd.dtr, gammas[g]);
        std::vector<std::vector<double>> kc(fd.dcross.size());
        for (std::size_t v = 0; v < kc.size(); ++v) {
            kc[v].resize(fd.dcross[v].size());
            for (std::size_t t = 0; t < kc[v].size(); ++t) kc[v][t] = std::exp(-gammas[g] * fd.dcross[v][t]);
        }
        for (std::size_t n = 0; n < nus.size(); ++n) {
            double score = 0;
            try {
                const auto s = solve_nu_svc(k, fd.ytr, nus[n]);
                EvaluationReport r;
                for (std::size_t v = 0; v < kc.size(); ++v) {
                    double dec = s.b;
                    for (std::size_t t = 0; t < kc[v].size(); ++t) {
                        if (s.alpha[t] > 0) dec += s.alpha[t] * fd.ytr[t] * kc[v][t];
                    }
                    const bool pred = dec > 0;
                    if (fd.yval[v] > 0) {
                        (pred ? r.tp : r.fn) += 1;
                    } else {
                        (pred ? r.fp : r.tn) += 1;
                    }
                }
                score = r.f1();
            } catch (const NumericalError&) {
                score = 0;  // a grid point the solver cannot settle never wins
            }
            f1[unit * nus.size() + n] = score;
        }
    });

    GridResult res;
    res.best = base;
    res.best_f1 = -1;
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        for (std::size_t n = 0; n < nus.size(); ++n) {
            double mean = 0;
            for (std::size_t f = 0; f < grid.folds; ++f) mean += f1[(f * gammas.size() + g) * nus.size() + n];
            mean /= static_cast<double>(grid.folds);
            res.points.push_back({gammas[g], nus[n], mean});
            // gammas and nus ascend, so only a strictly better score may replace the incumbent.
            if (mean > res.best_f1 + 1e-12) {
                res.best_f1 = mean;
                res.best.gamma = gammas[g];
                res.best.nu = nus[n];
            }
        }
    }
    return res;
}

namespace {

json tree_to_json(const TreeModel& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return nodes;
}

TreeModel tree_from_json(const json& j) {
    TreeModel t;
    for (const auto& n : j) {
        t.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                           n.at(4).get<double>()});
    }
    for (const auto& n : t.nodes) {
        if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= t.nodes.size() ||
                               static_cast<std::size_t>(n.right) >= t.nodes.size())) {
            throw SchemaError("model file: tree node child index out of range");
        }
    }
    if (t.nodes.empty()) throw SchemaError("model file: empty tree");
    return t;
}

json model_to_json(const ModelParams& p) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NuSvmModel>) {
                return {{"gamma", m.gamma}, {"nu", m.nu}, {"b", m.b}, {"support_vectors", m.support_vectors},
                        {"coef", m.coef}, {"kkt_residual", m.kkt_residual}, {"nu_clamped", m.nu_clamped}};
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return {{"k", m.k}, {"rows", m.rows}, {"labels", m.labels}};
            } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                return {{"log_prior", {m.log_prior[0], m.log_prior[1]}},
                        {"mean", {m.mean[0], m.mean[1]}},
                        {"var", {m.var[0], m.var[1]}}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return {{"nodes", tree_to_json(m)}};
            } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
                json stumps = json::array();
                for (const auto& s : m.stumps) stumps.push_back(tree_to_json(s));
                return {{"stumps", stumps}, {"alphas", m.alphas}};
            } else {
                json trees = json::array();
                for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
                return {{"trees", trees}};
            }
        },
        p);
}

ModelParams model_from_json(ClassifierKind kind, const json& j) {
    switch (kind) {
    case ClassifierKind::svm: {
        NuSvmModel m;
        m.gamma = j.at("gamma").get<double>();
        m.nu = j.at("nu").get<double>();
        m.b = j.at("b").get<double>();
        m.support_vectors = j.at("support_vectors").get<std::vector<Row>>();
        m.coef = j.at("coef").get<std::vector<double>>();
        m.kkt_residual = j.at("kkt_residual").get<double>();
        m.nu_clamped = j.at("nu_clamped").get<bool>();
        if (m.coef.size() != m.support_vectors.size()) throw SchemaError("model file: coef/support vector mismatch");
        return m;
    }
    case ClassifierKind::knn: {
        KnnModel m;
        m.k = j.at("k").get<std::size_t>();
        m.rows = j.at("rows").get<std::vector<Row>>();
        m.labels = j.at("labels").get<std::vector<int>>();
        return m;
    }
    case ClassifierKind::naive_bayes: {
        NaiveBayesModel m;
        for (int c = 0; c < 2; ++c) {
            m.log_prior[c] = j.at("log_prior").at(c).get<double>();
            m.mean[c] = j.at("mean").at(c).get<std::vector<double>>();
            m.var[c] = j.at("var").at(c).get<std::vector<double>>();
        }
        return m;
    }
    case ClassifierKind::decision_tree: return tree_from_json(j.at("nodes"));
    case ClassifierKind::adaboost: {
        AdaBoostModel m;
        for (const auto& s : j.at("stumps")) m.stumps.push_back(tree_from_json(s));
        m.alphas = j.at("alphas").get<std::vector<double>>();
        return m;
    }
    case ClassifierKind::random_forest: {
        ForestModel m;
        for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
        return m;
    }
    }
    throw SchemaError("model file: unknown classifier");
}

constexpr std::string_view kModelFormat = "farmlens-model";
constexpr int kModelVersion = 1;

std::string checksum_hex(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

} // namespace

void save_model(std::ostream& out, const TrainedModel& m) {
    json body;
    body["kind"] = std::string(to_string(m.kind));
    body["columns"] = m.columns;
    if (m.scaler) {
        body["scaler"] = {{"mean", m.scaler->mean}, {"stdev", m.scaler->stdev}};
    } else {
        body["scaler"] = nullptr;
    }
    const auto& h = m.params;
    body["params"] = {{"gamma", h.gamma},          {"nu", h.nu},
                      {"knn_k", h.knn_k},          {"tree_depth", h.tree_depth},
                      {"ada_rounds", h.ada_rounds}, {"forest_trees", h.forest_trees},
                      {"forest_depth", h.forest_depth}, {"seed", h.seed},
                      {"standardize", h.standardize}};
    body["model"] = model_to_json(m.model);
    body["warnings"] = m.warnings;
    const std::string text = body.dump();
    json doc;
    doc["format"] = std::string(kModelFormat);
    doc["version"] = kModelVersion;
    doc["checksum"] = checksum_hex(text);
    doc["body"] = body;
    out << doc.dump() << '\n';
}

TrainedModel load_model(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model file: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kModelFormat) throw SchemaError("model file: wrong format tag");
        if (doc.at("version").get<int>() != kModelVersion) throw SchemaError("model file: unsupported version");
        const auto& body = doc.at("body");
        if (checksum_hex(body.dump()) != doc.at("checksum").get<std::string>()) {
            throw SchemaError("model file: checksum mismatch");
        }
        TrainedModel m;
        const auto kind = parse_classifier(body.at("kind").get<std::string>());
        if (!kind) throw SchemaError("model file: unknown classifier kind");
        m.kind = *kind;
        m.columns = body.at("columns").get<std::vector<std::string>>();
        if (!body.at("scaler").is_null()) {
            Standardizer s;
            s.mean = body.at("scaler").at("mean").get<std::vector<double>>();
            s.stdev = body.at("scaler").at("stdev").get<std::vector<double>>();
            m.scaler = std::move(s);
        }
        const auto& p = body.at("params");
        m.params.gamma = p.at("gamma").get<double>();
        m.params.nu = p.at("nu").get<double>();
        m.params.knn_k = p.at("knn_k").get<std::size_t>();
        m.params.tree_depth = p.at("tree_depth").get<std::size_t>();
        m.params.ada_rounds = p.at("ada_rounds").get<std::size_t>();
        m.params.forest_trees = p.at("forest_trees").get<std::size_t>();
        m.params.forest_depth = p.at("forest_depth").get<std::size_t>();
        m.params.seed = p.at("seed").get<std::uint64_t>();
        m.params.standardize = p.at("standardize").get<bool>();
        m.model = model_from_json(m.kind, body.at("model"));
        m.warnings = body.at("warnings").get<std::vector<std::string>>();
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& m) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write model file " + path.string());
    save_model(out, m);
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open model file " + path.string());
    return load_model(in);
}

} // namespace farmlens::learn
