#include <doctest.h>

#include <set>
#include <sstream>

#include "farmlens/error.hpp"
#include "farmlens/model.hpp"
#include "farmlens/rng.hpp"
#include "fixtures.hpp"

using namespace farmlens;

namespace {

// The reader records where a dataset came from; drop that tag before comparing.
Dataset without_source(Dataset d) {
    d.provenance.erase("source");
    return d;
}

Dataset roundtrip(const Dataset& d) {
    std::stringstream s;
    write_dataset(s, d);
    return without_source(read_dataset(s));
}

Dataset labeled(std::size_t farm, std::size_t baseline, const std::string& campaign = "BL-USA") {
    Dataset d;
    for (std::size_t i = 0; i < farm; ++i) d.accounts.push_back(fixtures::account("f" + std::to_string(i), Label::farm(campaign)));
    for (std::size_t i = 0; i < baseline; ++i) d.accounts.push_back(fixtures::account("b" + std::to_string(i), Label::baseline()));
    return d;
}

std::set<std::string> ids(const Dataset& d) {
    std::set<std::string> out;
    for (const auto& a : d.accounts) out.insert(a.id);
    return out;
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("three-account fixture round-trips through JSONL") {
    const auto d = fixtures::small_dataset();
    validate(d);
    const auto back = roundtrip(d);
    CHECK(back.accounts.size() == 3);
    CHECK(back == d);
}

TEST_CASE("label strings") {
    CHECK(Label::baseline().str() == "baseline");
    CHECK(Label::farm("SF-ALL").str() == "farm:SF-ALL");
    CHECK(Label::parse("farm:MS-USA") == Label::farm("MS-USA"));
    CHECK_FALSE(Label::parse("farm:").has_value());
    CHECK_FALSE(Label::parse("robot").has_value());
}

TEST_CASE("duplicate account id is rejected by name") {
    auto d = fixtures::small_dataset();
    d.accounts[1].id = "u1";
    d.accounts[0].friends.clear();
    try {
        validate(d);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("u1") != std::string::npos);
    }
}

TEST_CASE("negative like count is a schema violation") {
    auto d = fixtures::small_dataset();
    d.accounts[0].posts[0].n_likes = -1;
    CHECK_THROWS_AS(validate(d), SchemaError);

    std::stringstream s;
    write_dataset(s, fixtures::small_dataset());
    std::string text = s.str();
    const auto at = text.find("\"likes\":2");
    REQUIRE(at != std::string::npos);
    text.replace(at, 9, "\"likes\":-1");
    std::istringstream in(text);
    CHECK_THROWS_AS(read_dataset(in), SchemaError);
}

TEST_CASE("dangling page reference and self-friendship") {
    auto d = fixtures::small_dataset();
    d.accounts[0].liked_pages.push_back({"nope", 1});
    CHECK_THROWS_AS(validate(d), SchemaError);
    d = fixtures::small_dataset();
    d.accounts[0].friends.push_back("u1");
    CHECK_THROWS_AS(validate(d), SchemaError);
}

TEST_CASE("missing or wrong schema header") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_dataset(empty), SchemaError);
    std::istringstream wrong("{\"schema\":\"farmlens/0\"}\n");
    CHECK_THROWS_AS(read_dataset(wrong), SchemaError);
    std::istringstream no_header("{\"page\":\"p\",\"total_likes\":1}\n");
    CHECK_THROWS_AS(read_dataset(no_header), SchemaError);
}

TEST_CASE("stratified split counts") {
    const auto d = labeled(100, 100);
    const auto [train, test] = split_train_test(d, 0.8, 7);
    CHECK(train.count(Label::Kind::farm) == 80);
    CHECK(train.count(Label::Kind::baseline) == 80);
    CHECK(test.count(Label::Kind::farm) == 20);
    CHECK(test.count(Label::Kind::baseline) == 20);

    const auto [train2, test2] = split_train_test(d, 0.8, 7);
    CHECK(train2 == train);
    CHECK(test2 == test);
}

TEST_CASE("paper-sized BL-USA split keeps 466 farm accounts for training") {
    const auto [train, test] = split_train_test(labeled(583, 1408), 0.8, 1);
    CHECK(train.count(Label::Kind::farm) == 466);
    CHECK(test.count(Label::Kind::farm) == 117);
}

TEST_CASE("split is a partition with per-label rounding, on random fixtures") {
    Rng rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        Dataset d = labeled(2 + rng.below(60), 2 + rng.below(60));
        const auto extra = labeled(2 + rng.below(30), 0, "SF-ALL");
        for (auto a : extra.accounts) {
            a.id = "s" + a.id;
            d.accounts.push_back(a);
        }
        const double fraction = rng.uniform(0.1, 0.9);
        const auto [train, test] = split_train_test(d, fraction, rng.next_u64());

        auto all = ids(train);
        const auto t = ids(test);
        std::size_t overlap = 0;
        for (const auto& id : t) overlap += all.count(id);
        CHECK(overlap == 0);
        all.insert(t.begin(), t.end());
        CHECK(all == ids(d));

        std::map<std::string, std::size_t> total, kept;
        for (const auto& a : d.accounts) ++total[a.label.str()];
        for (const auto& a : train.accounts) ++kept[a.label.str()];
        for (const auto& [label, n] : total) {
            CHECK(kept[label] == static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n))));
        }
    }
}

TEST_CASE("split preconditions") {
    CHECK_THROWS_AS(split_train_test(labeled(10, 10), 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(split_train_test(labeled(10, 0), 0.5, 1), InvalidArgument);
    CHECK_THROWS_AS(split_train_test(labeled(1, 10), 0.5, 1), InvalidArgument);
}

TEST_CASE("merge unions accounts and keeps page invariant") {
    auto a = fixtures::small_dataset();
    Dataset b;
    b.pages["p1"] = Page{"p1", 1, "Brand", false};
    auto x = fixtures::account("v1", Label::baseline());
    x.liked_pages = {{"p1", 5}};
    b.accounts.push_back(x);
    const auto m = merge(a, b);
    CHECK(m.accounts.size() == 4);
    CHECK(m.pages.at("p1").total_likes == 500);
    validate(m);
    CHECK_THROWS_AS(merge(a, a), SchemaError);
}

TEST_CASE("save and load through a file") {
    fixtures::TempDir dir;
    const auto d = fixtures::small_dataset();
    save_dataset(dir / "d.jsonl", d);
    const auto back = load_dataset(dir / "d.jsonl");
    CHECK(back.provenance.contains("source"));
    CHECK(without_source(back) == d);
    CHECK_THROWS_AS(load_dataset(dir / "missing.jsonl"), SchemaError);
}

}
