#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "farmlens/cocluster.hpp"
#include "farmlens/error.hpp"
#include "farmlens/rng.hpp"
#include "fixtures.hpp"

using namespace farmlens;
using namespace farmlens::cocluster;

namespace {

// users[i] likes pages[j] for each listed pair.
Dataset likes_dataset(const std::vector<std::pair<std::string, std::vector<std::string>>>& likes,
                      const std::set<std::string>& farm_users = {}) {
    Dataset d;
    for (const auto& [user, pages] : likes) {
        auto a = fixtures::account(user, farm_users.contains(user) ? Label::farm("X") : Label::baseline());
        std::int64_t ts = 0;
        for (const auto& p : pages) {
            a.liked_pages.push_back({p, ++ts});
            auto& page = d.pages[p];
            page.id = p;
            ++page.total_likes;
        }
        d.accounts.push_back(a);
    }
    return d;
}

std::string id(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%02d", prefix, i);
    return buf;
}

// Users u00..u09 like pages a0..a4, users u10..u19 like b0..b4.
Dataset two_bicliques(bool cross_edge) {
    std::vector<std::pair<std::string, std::vector<std::string>>> likes;
    for (int u = 0; u < 20; ++u) {
        std::vector<std::string> pages;
        for (int p = 0; p < 5; ++p) pages.push_back(id(u < 10 ? "a" : "b", p));
        if (cross_edge && u == 0) pages.push_back(id("b", 0));
        likes.emplace_back(id("u", u), pages);
    }
    std::set<std::string> farm;
    for (int u = 0; u < 10; ++u) farm.insert(id("u", u));
    return likes_dataset(likes, farm);
}

// Iterate-to-stability without the incremental bookkeeping of the library.
std::pair<std::set<std::string>, std::set<std::string>> brute_fixpoint(const Dataset& d, std::size_t t) {
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& a : d.accounts)
        for (const auto& l : a.liked_pages) edges[a.id].insert(l.page);
    auto size = [&] {
        std::size_t n = edges.size();
        for (const auto& [u, ps] : edges) n += ps.size();
        return n;
    };
    for (std::size_t before = 0; before != size();) {
        before = size();
        std::map<std::string, std::size_t> page_deg;
        for (const auto& [u, ps] : edges)
            for (const auto& p : ps) ++page_deg[p];
        for (auto& [u, ps] : edges) std::erase_if(ps, [&](const std::string& p) { return page_deg[p] < t; });
        std::erase_if(edges, [&](const auto& e) { return e.second.size() < t; });
    }
    std::set<std::string> users, pages;
    for (const auto& [u, ps] : edges) {
        users.insert(u);
        pages.insert(ps.begin(), ps.end());
    }
    return {users, pages};
}

std::size_t agreement(const std::vector<int>& cluster) {
    std::size_t same = 0;
    for (int u = 0; u < 20; ++u) same += cluster[u] == (u < 10 ? cluster[0] : 1 - cluster[0]);
    return same;
}

} // namespace

TEST_SUITE("cocluster") {

TEST_CASE("min_likes filter") {
    std::vector<std::pair<std::string, std::vector<std::string>>> likes;
    for (int u = 0; u < 12; ++u) {
        std::vector<std::string> pages;
        for (int p = 0; p < (u == 0 ? 3 : 10); ++p) pages.push_back(id("p", p));
        likes.emplace_back(id("u", u), pages);
    }
    const auto d = likes_dataset(likes);
    CoclusterConfig cfg;
    cfg.min_likes = 10;
    const auto g = build_bipartite(d, cfg);
    CHECK(g.dropped_users == std::vector<std::string>{"u00"});
    CHECK(g.users.size() == 11);
    CHECK(g.pages.size() == 10);

    cfg.min_likes = 0;
    const auto all = build_bipartite(d, cfg);
    CHECK(all.users.size() == 12);
    CHECK(all.edge_count() == 3 + 11 * 10);
    CHECK(all.dropped_users.empty());
    CHECK(all.dropped_pages.empty());

    cfg.min_likes = 100;
    CHECK_THROWS_AS(build_bipartite(d, cfg), InvalidArgument);
}

TEST_CASE("drop cascade reaches the brute-force fixpoint") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::pair<std::string, std::vector<std::string>>> likes;
        const int users = 5 + static_cast<int>(rng.below(20));
        for (int u = 0; u < users; ++u) {
            std::vector<std::string> pages;
            for (int p = 0; p < 15; ++p)
                if (rng.bernoulli(0.35)) pages.push_back(id("p", p));
            likes.emplace_back(id("u", u), pages);
        }
        const auto d = likes_dataset(likes);
        CoclusterConfig cfg;
        cfg.min_likes = 2 + static_cast<std::int64_t>(rng.below(5));
        const auto [users_ref, pages_ref] = brute_fixpoint(d, static_cast<std::size_t>(cfg.min_likes));
        if (users_ref.empty()) {
            CHECK_THROWS_AS(build_bipartite(d, cfg), InvalidArgument);
            continue;
        }
        const auto g = build_bipartite(d, cfg);
        CHECK(std::set<std::string>(g.users.begin(), g.users.end()) == users_ref);
        CHECK(std::set<std::string>(g.pages.begin(), g.pages.end()) == pages_ref);
        for (auto deg : g.page_degrees()) CHECK(deg >= static_cast<std::size_t>(cfg.min_likes));
        for (const auto& up : g.user_pages) CHECK(up.size() >= static_cast<std::size_t>(cfg.min_likes));
    }
}

TEST_CASE("page that falls below the threshold only after a user is removed") {
    // u0 has 2 likes and is dropped at threshold 3; page c is then left with 2 likers.
    const auto d = likes_dataset({{"u0", {"a", "c"}},
                                  {"u1", {"a", "b", "c"}},
                                  {"u2", {"a", "b", "c", "d"}},
                                  {"u3", {"a", "b", "d"}},
                                  {"u4", {"a", "b", "d"}}});
    CoclusterConfig cfg;
    cfg.min_likes = 3;
    const auto g = build_bipartite(d, cfg);
    const auto [users_ref, pages_ref] = brute_fixpoint(d, 3);
    CHECK(std::set<std::string>(g.users.begin(), g.users.end()) == users_ref);
    CHECK(std::set<std::string>(g.pages.begin(), g.pages.end()) == pages_ref);
    CHECK(std::find(g.dropped_pages.begin(), g.dropped_pages.end(), "c") != g.dropped_pages.end());
}

TEST_CASE("two disjoint bicliques are recovered exactly") {
    CoclusterConfig cfg;
    cfg.min_likes = 1;
    const auto g = build_bipartite(two_bicliques(false), cfg);
    const auto r = spectral_cocluster(g, cfg);
    CHECK(agreement(r.user_cluster) == 20);
    for (std::size_t p = 0; p < g.pages.size(); ++p) {
        const bool a_side = g.pages[p][0] == 'a';
        CHECK((r.page_cluster[p] == r.user_cluster[0]) == a_side);
    }
}

TEST_CASE("one cross edge keeps the blocks") {
    CoclusterConfig cfg;
    cfg.min_likes = 1;
    const auto g = build_bipartite(two_bicliques(true), cfg);
    const auto r = spectral_cocluster(g, cfg);
    CHECK(agreement(r.user_cluster) >= 19);
    const auto again = spectral_cocluster(g, cfg);
    CHECK(again.user_cluster == r.user_cluster);
    CHECK(r.singular_values.size() >= 2);
    CHECK(r.singular_values[0] >= r.singular_values[1]);
}

TEST_CASE("user order does not change the partition") {
    auto d = two_bicliques(true);
    auto shuffled = d;
    Rng rng(3);
    rng.shuffle(shuffled.accounts);
    CoclusterConfig cfg;
    cfg.min_likes = 1;
    const auto a = run_cocluster(d, cfg);
    const auto b = run_cocluster(shuffled, cfg);
    CHECK(a.report == b.report);
    CHECK(a.graph.users == b.graph.users);
    CHECK(a.result.user_cluster == b.result.user_cluster);
}

TEST_CASE("degenerate spectrum") {
    std::vector<std::pair<std::string, std::vector<std::string>>> likes;
    for (int u = 0; u < 6; ++u) likes.emplace_back(id("u", u), std::vector<std::string>{"a", "b", "c"});
    CoclusterConfig cfg;
    cfg.min_likes = 1;
    const auto g = build_bipartite(likes_dataset(likes), cfg);
    CHECK_THROWS_AS(spectral_cocluster(g, cfg), NumericalError);
}

TEST_CASE("cluster labelling") {
    const auto rep = EvaluationReport::from_counts(681, 9, 0, 4);
    CHECK(rep.precision() == doctest::Approx(0.987).epsilon(1e-3));
    CHECK(rep.recall() == doctest::Approx(0.994).epsilon(1e-3));

    const std::vector<bool> truth = {true, true, false, false};
    const auto perfect = label_clusters({1, 1, 0, 0}, truth, 2);
    CHECK(perfect.precision() == 1.0);
    CHECK(perfect.recall() == 1.0);
    CHECK_FALSE(perfect.tie_warning);

    const auto lumped = label_clusters({0, 0, 0, 0}, truth, 2);
    CHECK(lumped.recall() == 1.0);
    CHECK(lumped.precision() == 0.5);

    bool tie = false;
    CHECK(positive_cluster({0, 1, 0, 1}, truth, 2, &tie) == 0);
    CHECK(tie);
    CHECK(label_clusters({0, 1, 0, 1}, truth, 2).tie_warning);
}

TEST_CASE("scatter CSV lists every surviving like") {
    CoclusterConfig cfg;
    cfg.min_likes = 1;
    const auto d = two_bicliques(true);
    const auto o = run_cocluster(d, cfg);
    std::ostringstream out;
    write_scatter_csv(out, d, o);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        const auto outcome = line.substr(line.rfind(',') + 1);
        CHECK((outcome == "TP" || outcome == "FP" || outcome == "TN" || outcome == "FN"));
    }
    CHECK(rows == o.graph.edge_count());
}

}
