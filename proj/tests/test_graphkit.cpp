#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "farmlens/graphkit.hpp"
#include "farmlens/reference_tables.hpp"
#include "farmlens/rng.hpp"
#include "farmlens/synth.hpp"

using namespace farmlens;
using namespace farmlens::graph;

namespace {

using Edges = std::vector<std::pair<std::string, std::string>>;

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back("n" + std::to_string(i));
    return v;
}

SocialGraph random_graph(Rng& rng, std::size_t n, double p) {
    const auto ids = names(n);
    Edges e;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (rng.bernoulli(p)) e.emplace_back(ids[u], ids[v]);
        }
    }
    return SocialGraph(ids, e);
}

std::vector<std::size_t> brute_triangles(const SocialGraph& g) {
    std::vector<std::size_t> t(g.size(), 0);
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = a + 1; b < g.size(); ++b)
            for (std::size_t c = b + 1; c < g.size(); ++c)
                if (g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) {
                    ++t[a];
                    ++t[b];
                    ++t[c];
                }
    return t;
}

// Every vertex subset that is a clique and cannot be extended.
std::vector<std::vector<int>> brute_cliques(const SocialGraph& g) {
    const std::size_t n = g.size();
    auto is_clique = [&](unsigned mask) {
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v)
                if ((mask >> u & 1) && (mask >> v & 1) && !g.has_edge(u, v)) return false;
        return true;
    };
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (!is_clique(mask)) continue;
        bool maximal = true;
        for (std::size_t w = 0; w < n && maximal; ++w) {
            if (!(mask >> w & 1) && is_clique(mask | (1u << w))) maximal = false;
        }
        if (!maximal) continue;
        std::vector<int> c;
        for (std::size_t u = 0; u < n; ++u)
            if (mask >> u & 1) c.push_back(static_cast<int>(u));
        out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double kl_reference(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) s += p[i] * std::log2(p[i] / q[i]);
    return s;
}

std::vector<std::string> age_bins() { return {kAgeBinNames.begin(), kAgeBinNames.end()}; }

} // namespace

TEST_SUITE("graphkit") {

TEST_CASE("triangles and maximal cliques match brute force on 200 random small graphs") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(8);
        const auto g = random_graph(rng, n, rng.uniform(0.1, 0.9));
        const auto tri = triangle_counts(g);
        CHECK(tri == brute_triangles(g));
        CHECK(std::accumulate(tri.begin(), tri.end(), std::size_t{0}) % 3 == 0);
        CHECK(maximal_cliques(g) == brute_cliques(g));
    }
}

TEST_CASE("K4 and a path") {
    const auto ids = names(4);
    Edges e;
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v) e.emplace_back(ids[u], ids[v]);
    const auto r = structure_report(SocialGraph(ids, e));
    for (const auto& n : r.nodes) {
        CHECK(n.degree == 3);
        CHECK(n.triangles == 3);
        CHECK(n.clustering == 1.0);
        CHECK(n.max_clique == 4);
    }
    REQUIRE(r.maximal_cliques.size() == 1);
    CHECK(r.maximal_cliques[0].size() == 4);

    const Edges path = {{"a", "b"}, {"b", "c"}};
    const auto p = structure_report(SocialGraph({"a", "b", "c"}, path));
    for (const auto& n : p.nodes) CHECK(n.triangles == 0);
    CHECK(p.nodes[1].clustering == 0.0);
    CHECK(p.mean_degree() == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("simple graph invariants") {
    const Edges e = {{"a", "b"}, {"b", "a"}, {"a", "a"}, {"a", "b"}};
    const SocialGraph g({"b", "a"}, e);
    CHECK(g.edge_count() == 1);
    CHECK(g.ids() == std::vector<std::string>{"a", "b"});
    CHECK(g.index_of("b") == 1);
    CHECK_THROWS_AS(g.index_of("z"), InvalidArgument);
    const Edges bad = {{"a", "q"}};
    CHECK_THROWS(SocialGraph({"a"}, bad));
}

TEST_CASE("clique cap") {
    Rng rng(1);
    const auto g = random_graph(rng, 8, 0.5);
    CHECK_THROWS_AS(maximal_cliques(g, 1), CliqueCapExceeded);
}

TEST_CASE("two-hop graph joins likers sharing a friend") {
    const SocialGraph g({"u", "v"}, Edges{});
    const auto h = two_hop_graph(g, {{"u", {"w"}}, {"v", {"w"}}});
    CHECK(h.has_edge(0, 1));
    const SocialGraph direct({"u", "v"}, Edges{{"u", "v"}});
    CHECK(two_hop_graph(direct, {}).has_edge(0, 1));
}

TEST_CASE("two-hop graph matches pairwise mutual-friend check") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ids = names(5);
        const auto g = random_graph(rng, 5, 0.2);
        std::map<std::string, std::set<std::string>> friends;
        for (const auto& id : ids) {
            for (int k = 0; k < 3; ++k)
                if (rng.bernoulli(0.3)) friends[id].insert("x" + std::to_string(rng.below(6)));
        }
        const auto h = two_hop_graph(g, friends);
        for (std::size_t u = 0; u < 5; ++u) {
            for (std::size_t v = u + 1; v < 5; ++v) {
                const auto& a = friends[ids[u]];
                const auto& b = friends[ids[v]];
                const bool shared = std::any_of(a.begin(), a.end(), [&](const auto& x) { return b.contains(x); });
                CHECK(h.has_edge(u, v) == (g.has_edge(u, v) || shared));
            }
        }
    }
}

TEST_CASE("Jaccard") {
    CHECK(jaccard({"1", "2", "3"}, {"2", "3", "4"}) == 0.5);
    CHECK(jaccard({"1", "2"}, {"1", "2"}) == 1.0);
    CHECK(jaccard({"1"}, {"2"}) == 0.0);
    CHECK(jaccard({}, {}) == 0.0);

    Rng rng(5);
    std::vector<NamedSet> sets;
    for (int i = 0; i < 5; ++i) {
        NamedSet s{"s" + std::to_string(i), {}};
        for (int k = 0; k < 10; ++k) s.members.insert(std::to_string(rng.below(15)));
        sets.push_back(s);
    }
    const auto m = jaccard_matrix(sets);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(m.values[i][i] == 1.0);
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(m.values[i][j] == m.values[j][i]);
            CHECK(m.values[i][j] == jaccard(sets[i].members, sets[j].members));
        }
    }
}

TEST_CASE("KL divergence") {
    const CategoricalDist p({"a", "b"}, {1.0, 0.0});
    const CategoricalDist q({"a", "b"}, {0.5, 0.5});
    CHECK(kl_divergence(p, q) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kl_divergence(p, q, LogBase::e) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(kl_divergence(q, q) == 0.0);
    CHECK(kl_divergence(p, p) == 0.0);
    const CategoricalDist r({"x", "y"}, {0.5, 0.5});
    CHECK_THROWS(kl_divergence(p, r));
    CHECK_THROWS(CategoricalDist({"a", "b"}, {0.7, 0.7}));

    // q with a zero bin where p has mass: smoothed, finite, large.
    const double smoothed = kl_divergence(q, p);
    CHECK(std::isfinite(smoothed));
    CHECK(smoothed > 5.0);

    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> a(6), b(6);
        for (auto& x : a) x = rng.uniform(0.01, 1.0);
        for (auto& x : b) x = rng.uniform(0.01, 1.0);
        const auto pa = CategoricalDist::from_weights(age_bins(), a);
        const auto pb = CategoricalDist::from_weights(age_bins(), b);
        const double kl = kl_divergence(pa, pb);
        CHECK(kl >= 0.0);
        CHECK(kl == doctest::Approx(kl_reference(pa.probabilities(), pb.probabilities())).epsilon(1e-12));
        CHECK(kl_divergence(pa, pa) == 0.0);
    }
}

TEST_CASE("FB-ALL age row against the Facebook population") {
    const auto& fb_all = reference::kCampaignAges[4];
    REQUIRE(fb_all.campaign == "FB-ALL");
    const auto p = CategoricalDist::from_weights(age_bins(), fb_all.age);
    const auto q = CategoricalDist::from_weights(age_bins(), reference::kFacebookAges.age);
    CHECK(std::abs(kl_divergence(p, q) - 1.04) <= 0.15);
}

TEST_CASE("burst profile") {
    std::vector<std::int64_t> ts;
    for (int i = 0; i < 1000; ++i) ts.push_back(1000 + i * 7);
    CHECK(burst_profile(LikeTimeline(ts), 7200).burstiness == 1.0);

    ts.clear();
    for (int i = 0; i < 1000; ++i) ts.push_back(static_cast<std::int64_t>(i) * 15 * 86400 / 1000);
    const auto uniform = burst_profile(LikeTimeline(ts), 7200);
    CHECK(uniform.burstiness == doctest::Approx(2.0 / 360.0).epsilon(0.1));

    CHECK(burst_profile(LikeTimeline(std::vector<std::int64_t>{}), 7200).burstiness == 0.0);
    CHECK_THROWS(burst_profile(LikeTimeline({1, 2}), 0));

    Rng rng(12);
    for (int i = 0; i < 30; ++i) {
        std::vector<std::int64_t> t;
        for (int k = 0; k < 50; ++k) t.push_back(static_cast<std::int64_t>(rng.below(100000)));
        const LikeTimeline tl(t);
        double prev = 0;
        for (std::int64_t w : {10, 100, 1000, 10000, 100000}) {
            const double b = burst_profile(tl, w).burstiness;
            CHECK(b > 0.0);
            CHECK(b <= 1.0);
            CHECK(b >= prev);
            prev = b;
        }
    }
}

TEST_CASE("half-open windows") {
    const auto p = burst_profile(LikeTimeline({0, 10}), 10);
    CHECK(p.max_window_count == 1);
}

TEST_CASE("order summary") {
    const auto s = order_summary({3, 1, 2});
    CHECK(s.median == 2.0);
    CHECK(s.min == 1.0);
    CHECK(s.max == 3.0);
    CHECK(s.q1 == 1.5);
    CHECK(order_summary({1, 2, 3, 4}).median == 2.5);
}

TEST_CASE("synthetic cohorts hit the paper's page-like medians") {
    const auto base = synth::generate(synth::preset("baseline"), 21);
    const auto bs = page_like_count_summary(base, [](const Label&) { return true; });
    CHECK(bs.median == doctest::Approx(34).epsilon(0.2));
    const auto farm = synth::generate(synth::preset("sf_all"), 21);
    const auto fs = page_like_count_summary(farm, [](const Label& l) { return l.is_farm(); });
    CHECK(fs.median >= 1200);
    CHECK(fs.median <= 1800);
    CHECK_THROWS(page_like_count_summary(farm, [](const Label& l) { return !l.is_farm(); }));
}

TEST_CASE("bursty farm honeypot likes arrive within hours") {
    const auto d = synth::generate(synth::preset("ms_usa"), 4);
    std::string honeypot;
    for (const auto& [id, page] : d.pages)
        if (page.category == "Honeypot") honeypot = id;
    REQUIRE_FALSE(honeypot.empty());
    CHECK(burst_profile(page_timeline(d, honeypot), 2 * 3600).burstiness > 0.5);
}

TEST_CASE("BoostLikes-style cohort forms a dense clique-rich two-hop graph") {
    const auto d = synth::generate(synth::preset("bl_usa"), 9);
    const auto r = structure_report(two_hop_graph(d));
    CHECK(r.mean_degree() == doctest::Approx(18).epsilon(0.17));
    CHECK(r.share_in_clique_larger_than(10) > 0.25);
}

}
