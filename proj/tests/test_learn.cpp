#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "farmlens/error.hpp"
#include "farmlens/learn.hpp"
#include "farmlens/rng.hpp"
#include "fixtures.hpp"

using namespace farmlens;
using namespace farmlens::learn;

namespace {

FeatureMatrix blobs(Rng& rng, std::size_t per_class, double shift, std::size_t dims = 3) {
    FeatureMatrix m;
    for (std::size_t c = 0; c < dims; ++c) m.columns.push_back("c" + std::to_string(c));
    for (int cls : {1, -1}) {
        for (std::size_t i = 0; i < per_class; ++i) {
            Row r(dims);
            for (std::size_t c = 0; c < dims; ++c) r[c] = rng.normal(cls * shift, 1.0) * (c + 1) + 10.0 * c;
            m.ids.push_back((cls > 0 ? "f" : "b") + std::to_string(i));
            m.rows.push_back(r);
            m.labels.push_back(cls);
        }
    }
    return m;
}

} // namespace

TEST_SUITE("learn") {

TEST_CASE("feature sets select the documented columns") {
    CHECK(feature_columns(FeatureSet::non_lexical) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(feature_columns(FeatureSet::lexical).size() == 12);
    CHECK(feature_columns(FeatureSet::lexical).front() == 4);
    CHECK(feature_columns(FeatureSet::combined).size() == 16);
    CHECK(feature_columns(FeatureSet::extended).size() == 17);
    CHECK(parse_feature_set("nl") == FeatureSet::non_lexical);
    CHECK(parse_feature_set("lex") == FeatureSet::lexical);
    CHECK(parse_feature_set("all") == FeatureSet::combined);
    CHECK_FALSE(parse_feature_set("everything").has_value());
}

TEST_CASE("matrices from feature vectors") {
    const auto fv = featurize(fixtures::small_dataset());
    const auto m = to_matrix(fv, FeatureSet::combined);
    CHECK(m.size() == 3);
    CHECK(m.width() == 16);
    CHECK(m.labels == std::vector<int>{-1, 1, 1});
    CHECK(m.columns[0] == "avg_words_per_post");
    const auto e = english_only(fv, FeatureSet::lexical);
    CHECK(e.ids == std::vector<std::string>{"u1"});
    const std::vector<std::size_t> pick = {2, 0};
    CHECK(subset(m, pick).ids == std::vector<std::string>{"u3", "u1"});
}

TEST_CASE("standardization uses training statistics") {
    FeatureMatrix train;
    train.columns = {"a", "k"};
    train.rows = {{1, 5}, {2, 5}, {3, 5}};
    train.labels = {1, -1, 1};
    const auto s = Standardizer::fit(train);
    const auto z = s.apply(train);
    double mean = 0, var = 0;
    for (const auto& r : z.rows) mean += r[0] / 3.0;
    for (const auto& r : z.rows) var += (r[0] - mean) * (r[0] - mean) / 3.0;
    CHECK(mean == doctest::Approx(0.0));
    CHECK(var == doctest::Approx(1.0));
    for (const auto& r : z.rows) CHECK(r[1] == 0.0);

    // Two test rows, transformed with the training mean 2 and stdev sqrt(2/3).
    const Row t = s.apply(Row{4.0, 9.0});
    CHECK(t[0] == doctest::Approx(2.0 / std::sqrt(2.0 / 3.0)));
    CHECK(t[1] == 0.0);
    const Row u = s.apply(Row{2.0, 5.0});
    CHECK(u[0] == doctest::Approx(0.0));
}

TEST_CASE("evaluation arithmetic") {
    const auto r = EvaluationReport::from_counts(116, 1, 278, 4);
    CHECK(r.precision() == doctest::Approx(0.991).epsilon(1e-3));
    CHECK(r.recall() == doctest::Approx(0.967).epsilon(1e-3));
    CHECK(r.accuracy() == doctest::Approx(0.987).epsilon(1e-3));
    const auto perfect = EvaluationReport::from_counts(10, 0, 10, 0);
    CHECK(perfect.precision() == 1.0);
    CHECK(perfect.recall() == 1.0);
    CHECK(perfect.accuracy() == 1.0);
    const auto half = EvaluationReport::from_counts(5, 5, 0, 0);
    CHECK(half.f1() == doctest::Approx(2.0 / 3.0));
    CHECK(EvaluationReport{}.f1() == 0.0);
    CHECK(EvaluationReport::from_counts(0, 3, 7, 0).false_positive_rate() == doctest::Approx(0.3));
}

TEST_CASE("stratified folds") {
    std::vector<int> y(23, -1);
    for (int i = 0; i < 10; ++i) y[i] = 1;
    const auto f = stratified_folds(y, 5, 3);
    CHECK(f == stratified_folds(y, 5, 3));
    for (std::size_t k = 0; k < 5; ++k) {
        std::size_t pos = 0, neg = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (f[i] != k) continue;
            (y[i] > 0 ? pos : neg) += 1;
        }
        CHECK(pos == 2);
        CHECK(neg >= 2);
        CHECK(neg <= 3);
    }
    CHECK_THROWS_AS(stratified_folds(y, 1, 3), InvalidArgument);
}

TEST_CASE("grid search") {
    Rng rng(1);
    const auto m = blobs(rng, 30, 4.0);
    HyperParams base;
    GridSpec one{-4, -4, -2, -2, 3};
    const auto single = grid_search(m, one, base);
    CHECK(single.best.gamma == std::ldexp(1.0, -4));
    CHECK(single.best.nu == std::ldexp(1.0, -2));
    CHECK(single.points.size() == 1);

    // Separable data: every point reaches CV F1 1, so the tie-break decides.
    GridSpec tie{-3, -2, -2, -2, 3};
    const auto g = grid_search(m, tie, base);
    CHECK(g.best_f1 == 1.0);
    CHECK(g.best.gamma == std::ldexp(1.0, -3));
    CHECK(g.best.nu == std::ldexp(1.0, -2));

    GridSpec full{-10, 0, -10, 0, 3};
    const auto f = grid_search(m, full, base);
    CHECK(f.best_f1 == 1.0);
    for (const auto& p : f.points) CHECK(p.nu < 1.0);
    CHECK_THROWS_AS(grid_search(m, GridSpec{0, -1, -2, -2, 3}, base), InvalidArgument);
}

TEST_CASE("every classifier trains, agrees with its decision sign and is reproducible") {
    Rng rng(2);
    const auto train_m = blobs(rng, 60, 1.0);
    const auto test_m = blobs(rng, 40, 1.0);
    HyperParams h;
    h.gamma = 0.25;
    h.nu = 0.25;
    h.seed = 9;
    for (auto kind : kAllClassifiers) {
        CAPTURE(to_string(kind));
        const auto a = train(kind, train_m, h);
        const auto b = train(kind, train_m, h);
        const auto r = evaluate(a, test_m);
        CHECK(r.total() == test_m.size());
        CHECK(r == evaluate(b, test_m));
        const auto pred = predict_all(a, test_m);
        for (std::size_t i = 0; i < test_m.size(); ++i) {
            CHECK(pred[i] == (a.decision(test_m.rows[i]) > 0 ? 1 : -1));
            CHECK(a.decision(test_m.rows[i]) == b.decision(test_m.rows[i]));
        }
        CHECK(r.f1() > 0.7);
    }
}

TEST_CASE("SVM duals satisfy the nu-SVC constraints") {
    Rng rng(3);
    const auto m = blobs(rng, 50, 0.5, 5);
    HyperParams h;
    for (int ge : {-10, -5, 0}) {
        for (int ne : {-10, -4, -1}) {
            h.gamma = std::ldexp(1.0, ge);
            h.nu = std::ldexp(1.0, ne);
            const auto model = train(ClassifierKind::svm, m, h);
            const auto& svm = std::get<NuSvmModel>(model.model);
            CHECK(svm.kkt_residual < 1e-6);
            double sum = 0, sum_y = 0;
            const double cap = 1.0 / static_cast<double>(m.size());
            for (double c : svm.coef) {
                CHECK(std::abs(c) <= cap * (1 + 1e-12));
                sum += std::abs(c);
                sum_y += c;
            }
            CHECK(std::abs(sum_y) < 1e-6);
            CHECK(sum >= svm.nu - 1e-6);
        }
    }
}

TEST_CASE("training rejects a single class") {
    Rng rng(4);
    auto m = blobs(rng, 5, 1.0);
    for (auto& y : m.labels) y = 1;
    CHECK_THROWS_AS(train(ClassifierKind::svm, m, HyperParams{}), InvalidArgument);
}

TEST_CASE("model persistence round-trips and detects tampering") {
    Rng rng(5);
    const auto m = blobs(rng, 30, 1.0);
    HyperParams h;
    h.seed = 4;
    h.forest_trees = 5;
    for (auto kind : kAllClassifiers) {
        CAPTURE(to_string(kind));
        const auto model = train(kind, m, h);
        std::stringstream s;
        save_model(s, model);
        const auto back = load_model(s);
        CHECK(back.kind == kind);
        CHECK(back.columns == model.columns);
        for (const auto& row : m.rows) CHECK(back.decision(row) == model.decision(row));
    }

    const auto model = train(ClassifierKind::svm, m, h);
    std::stringstream s;
    save_model(s, model);
    auto doc = nlohmann::json::parse(s.str());
    doc["body"]["params"]["gamma"] = 0.5;
    std::istringstream tampered(doc.dump());
    CHECK_THROWS_AS(load_model(tampered), SchemaError);
    std::istringstream garbage("not json");
    CHECK_THROWS_AS(load_model(garbage), SchemaError);

    fixtures::TempDir dir;
    save_model(dir / "m.json", model);
    CHECK(load_model(dir / "m.json").decision(m.rows[0]) == model.decision(m.rows[0]));
}

TEST_CASE("lexical-free features cannot beat the combined set on stealthy-style data") {
    Rng rng(6);
    FeatureMatrix all;
    for (std::size_t c = 0; c < 16; ++c) all.columns.push_back(std::string(kFeatureNames[c]));
    for (int cls : {1, -1}) {
        for (int i = 0; i < 120; ++i) {
            Row r(16);
            for (std::size_t c = 0; c < 16; ++c) r[c] = rng.normal(c < 4 ? cls * 0.2 : cls * 1.5, 1.0);
            all.rows.push_back(r);
            all.labels.push_back(cls);
            all.ids.push_back(std::to_string(all.ids.size()));
        }
    }
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < all.size(); ++i) (i % 5 == 0 ? test_idx : train_idx).push_back(i);
    auto nl = [](const FeatureMatrix& m) {
        FeatureMatrix out = m;
        out.columns.resize(4);
        for (auto& r : out.rows) r.resize(4);
        return out;
    };
    HyperParams h;
    h.gamma = 0.05;
    h.nu = 0.2;
    const auto tr = subset(all, train_idx);
    const auto te = subset(all, test_idx);
    const double f_all = evaluate(train(ClassifierKind::svm, tr, h), te).f1();
    const double f_nl = evaluate(train(ClassifierKind::svm, nl(tr), h), nl(te)).f1();
    CHECK(f_nl < f_all);
}

}
