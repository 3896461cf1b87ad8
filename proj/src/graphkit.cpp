#include "farmlens/graphkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "report_util.hpp"

namespace farmlens::graph {

SocialGraph::SocialGraph(std::vector<std::string> nodes, std::span<const std::pair<std::string, std::string>> edges)
    : ids_(std::move(nodes)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
        throw InvalidArgument("SocialGraph: duplicate node id");
    }
    adj_.resize(ids_.size());
    for (const auto& [u, v] : edges) add_edge(index_of(u), index_of(v));
}

SocialGraph SocialGraph::from_dataset(const Dataset& d) {
    std::vector<std::string> ids;
    ids.reserve(d.accounts.size());
    for (const auto& a : d.accounts) ids.push_back(a.id);
    SocialGraph g(std::move(ids), {});
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < g.ids_.size(); ++i) index.emplace(g.ids_[i], i);
    for (const auto& a : d.accounts) {
        const std::size_t u = index.at(a.id);
        for (const auto& f : a.friends) {
            if (auto it = index.find(f); it != index.end()) g.add_edge(u, it->second);
        }
    }
    return g;
}

std::size_t SocialGraph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& n : adj_) twice += n.size();
    return twice / 2;
}

bool SocialGraph::has_edge(std::size_t u, std::size_t v) const {
    const auto& n = adj_[u];
    return std::binary_search(n.begin(), n.end(), static_cast<int>(v));
}

std::size_t SocialGraph::index_of(std::string_view id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) throw InvalidArgument("SocialGraph: unknown node '" + std::string(id) + "'");
    return static_cast<std::size_t>(it - ids_.begin());
}

void SocialGraph::add_edge(std::size_t u, std::size_t v) {
    if (u == v) return;
    auto insert = [](std::vector<int>& n, int x) {
        auto it = std::lower_bound(n.begin(), n.end(), x);
        if (it == n.end() || *it != x) n.insert(it, x);
    };
    insert(adj_[u], static_cast<int>(v));
    insert(adj_[v], static_cast<int>(u));
}

SocialGraph two_hop_graph(const SocialGraph& g, const std::map<std::string, std::set<std::string>>& mutual_friends) {
    SocialGraph out = g;
    // Every group of likers sharing a friend w becomes a clique.
    std::map<std::string_view, std::vector<std::size_t>> by_friend;
    for (const auto& [liker, friends] : mutual_friends) {
        auto it = std::lower_bound(g.ids().begin(), g.ids().end(), liker);
        if (it == g.ids().end() || *it != liker) continue;
        const auto u = static_cast<std::size_t>(it - g.ids().begin());
        for (const auto& w : friends) by_friend[w].push_back(u);
    }
    for (const auto& [w, likers] : by_friend) {
        for (std::size_t a = 0; a < likers.size(); ++a) {
            for (std::size_t b = a + 1; b < likers.size(); ++b) out.add_edge(likers[a], likers[b]);
        }
    }
    return out;
}

SocialGraph two_hop_graph(const Dataset& d) {
    std::map<std::string, std::set<std::string>> mutual;
    for (const auto& a : d.accounts) mutual[a.id] = std::set<std::string>(a.friends.begin(), a.friends.end());
    return two_hop_graph(SocialGraph::from_dataset(d), mutual);
}

double StructureReport::mean_degree() const {
    if (nodes.empty()) return 0;
    double sum = 0;
    for (const auto& n : nodes) sum += static_cast<double>(n.degree);
    return sum / static_cast<double>(nodes.size());
}

double StructureReport::share_in_clique_larger_than(std::size_t size) const {
    if (nodes.empty()) return 0;
    const auto k = std::count_if(nodes.begin(), nodes.end(), [&](const NodeStructure& n) { return n.max_clique > size; });
    return static_cast<double>(k) / static_cast<double>(nodes.size());
}

std::vector<std::size_t> triangle_counts(const SocialGraph& g) {
    std::vector<std::size_t> t(g.size(), 0);
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto& nu = g.neighbors(u);
        for (int v : nu) {
            if (static_cast<std::size_t>(v) <= u) continue;
            const auto& nv = g.neighbors(static_cast<std::size_t>(v));
            // common neighbours w > v close a triangle u < v < w exactly once
            auto iu = std::upper_bound(nu.begin(), nu.end(), v);
            auto iv = std::upper_bound(nv.begin(), nv.end(), v);
            while (iu != nu.end() && iv != nv.end()) {
                if (*iu < *iv) {
                    ++iu;
                } else if (*iv < *iu) {
                    ++iv;
                } else {
                    ++t[u];
                    ++t[static_cast<std::size_t>(v)];
                    ++t[static_cast<std::size_t>(*iu)];
                    ++iu;
                    ++iv;
                }
            }
        }
    }
    return t;
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

class CliqueEnumerator {
public:
    CliqueEnumerator(const SocialGraph& g, std::size_t cap) : g_(g), cap_(cap) {}

    std::vector<std::vector<int>> run() {
        // Degeneracy-free outer loop: vertex v with later neighbours as P and
        // earlier neighbours as X; each maximal clique is reported once.
        for (std::size_t v = 0; v < g_.size(); ++v) {
            std::vector<int> p, x;
            for (int w : g_.neighbors(v)) (static_cast<std::size_t>(w) > v ? p : x).push_back(w);
            std::vector<int> r{static_cast<int>(v)};
            expand(r, std::move(p), std::move(x));
        }
        for (auto& c : out_) std::sort(c.begin(), c.end());
        std::sort(out_.begin(), out_.end());
        return std::move(out_);
    }

private:
    void expand(std::vector<int>& r, std::vector<int> p, std::vector<int> x) {
        if (p.empty() && x.empty()) {
            if (out_.size() >= cap_) {
                throw CliqueCapExceeded("maximal clique enumeration exceeded the cap of " + std::to_string(cap_) +
                                        " cliques");
            }
            out_.push_back(r);
            return;
        }
        // Tomita pivot: the vertex of P ∪ X with most neighbours in P.
        int pivot = -1;
        std::size_t best = 0;
        for (const auto* set : {&p, &x}) {
            for (int u : *set) {
                const std::size_t k = intersect(p, g_.neighbors(static_cast<std::size_t>(u))).size();
                if (pivot < 0 || k > best) {
                    pivot = u;
                    best = k;
                }
            }
        }
        std::vector<int> candidates;
        const auto& pn = g_.neighbors(static_cast<std::size_t>(pivot));
        std::set_difference(p.begin(), p.end(), pn.begin(), pn.end(), std::back_inserter(candidates));
        for (int v : candidates) {
            const auto& nv = g_.neighbors(static_cast<std::size_t>(v));
            r.push_back(v);
            expand(r, intersect(p, nv), intersect(x, nv));
            r.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

    const SocialGraph& g_;
    std::size_t cap_;
    std::vector<std::vector<int>> out_;
};

} // namespace

std::vector<std::vector<int>> maximal_cliques(const SocialGraph& g, std::size_t cap) {
    return CliqueEnumerator(g, cap).run();
}

StructureReport structure_report(const SocialGraph& g, std::size_t clique_cap) {
    StructureReport r;
    const auto tri = triangle_counts(g);
    r.nodes.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto& n = r.nodes[i];
        n.degree = g.degree(i);
        n.triangles = tri[i];
        if (n.degree >= 2) {
            const double pairs = static_cast<double>(n.degree) * static_cast<double>(n.degree - 1) / 2.0;
            n.clustering = static_cast<double>(n.triangles) / pairs;
        }
    }
    r.maximal_cliques = maximal_cliques(g, clique_cap);
    for (const auto& c : r.maximal_cliques) {
        for (int v : c) {
            auto& m = r.nodes[static_cast<std::size_t>(v)].max_clique;
            m = std::max(m, c.size());
        }
    }
    return r;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

SimilarityMatrix jaccard_matrix(std::span<const NamedSet> sets) {
    SimilarityMatrix m;
    const std::size_t n = sets.size();
    m.values.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        m.names.push_back(sets[i].name);
        for (std::size_t j = i; j < n; ++j) {
            const double v = jaccard(sets[i].members, sets[j].members);
            m.values[i][j] = m.values[j][i] = v;
        }
    }
    return m;
}

namespace {
std::string campaign_name(const Label& l) { return l.is_farm() ? l.campaign : std::string("baseline"); }
} // namespace

std::vector<NamedSet> campaign_page_sets(const Dataset& d) {
    std::map<std::string, std::set<std::string>> sets;
    for (const auto& a : d.accounts) {
        auto& s = sets[campaign_name(a.label)];
        for (const auto& l : a.liked_pages) s.insert(l.page);
    }
    std::vector<NamedSet> out;
    for (auto& [k, v] : sets) out.push_back({k, std::move(v)});
    return out;
}

std::vector<NamedSet> campaign_liker_sets(const Dataset& d) {
    std::map<std::string, std::set<std::string>> sets;
    for (const auto& a : d.accounts) sets[campaign_name(a.label)].insert(a.id);
    std::vector<NamedSet> out;
    for (auto& [k, v] : sets) out.push_back({k, std::move(v)});
    return out;
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& m) {
    out << "campaign";
    for (const auto& n : m.names) out << ',' << csv_field(n);
    out << '\n';
    for (std::size_t i = 0; i < m.names.size(); ++i) {
        out << csv_field(m.names[i]);
        for (double v : m.values[i]) out << ',' << format_fixed(100.0 * v, 1);
        out << '\n';
    }
}

CategoricalDist::CategoricalDist(std::vector<std::string> bins, std::vector<double> probabilities)
    : bins_(std::move(bins)), p_(std::move(probabilities)) {
    if (bins_.size() != p_.size() || bins_.empty()) {
        throw InvalidArgument("CategoricalDist: bins and probabilities must be non-empty and equally sized");
    }
    double sum = 0;
    for (double v : p_) {
        if (!(v >= 0.0)) throw InvalidArgument("CategoricalDist: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("CategoricalDist: probabilities do not sum to 1");
}

CategoricalDist CategoricalDist::from_weights(std::vector<std::string> bins, std::span<const double> weights) {
    double sum = 0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidArgument("CategoricalDist: negative weight");
        sum += w;
    }
    if (!(sum > 0.0)) throw InvalidArgument("CategoricalDist: weights sum to zero");
    std::vector<double> p;
    p.reserve(weights.size());
    for (double w : weights) p.push_back(w / sum);
    return CategoricalDist(std::move(bins), std::move(p));
}

double kl_divergence(const CategoricalDist& p, const CategoricalDist& q, LogBase base) {
    if (p.bins() != q.bins()) throw InvalidArgument("kl_divergence: bin mismatch");
    const auto& pp = p.probabilities();
    std::vector<double> qq = q.probabilities();
    if (pp == qq) return 0.0;

    bool needs_smoothing = false;
    for (std::size_t i = 0; i < pp.size(); ++i) needs_smoothing |= (qq[i] == 0.0 && pp[i] > 0.0);
    if (needs_smoothing) {
        const double norm = 1.0 + kKlSmoothing * static_cast<double>(qq.size());
        for (double& v : qq) v = (v + kKlSmoothing) / norm;
    }

    double kl = 0;
    for (std::size_t i = 0; i < pp.size(); ++i) {
        if (pp[i] > 0.0) kl += pp[i] * std::log(pp[i] / qq[i]);
    }
    if (base == LogBase::two) kl /= std::log(2.0);
    return std::max(kl, 0.0);
}

CategoricalDist age_distribution(const Dataset& d) {
    std::vector<double> counts(kAgeBinCount, 0.0);
    for (const auto& a : d.accounts) counts[static_cast<std::size_t>(a.demographics.age_bin)] += 1.0;
    return CategoricalDist::from_weights({kAgeBinNames.begin(), kAgeBinNames.end()}, counts);
}

std::map<std::string, std::size_t> country_histogram(const Dataset& d) {
    std::map<std::string, std::size_t> h;
    for (const auto& a : d.accounts) ++h[a.demographics.country];
    return h;
}

LikeTimeline::LikeTimeline(std::vector<std::int64_t> timestamps) : ts_(std::move(timestamps)) {
    std::sort(ts_.begin(), ts_.end());
}

LikeTimeline page_timeline(const Dataset& d, std::string_view page_id) {
    std::vector<std::int64_t> ts;
    for (const auto& a : d.accounts) {
        for (const auto& l : a.liked_pages) {
            if (l.page == page_id) ts.push_back(l.timestamp);
        }
    }
    return LikeTimeline(std::move(ts));
}

BurstProfile burst_profile(const LikeTimeline& t, std::int64_t window_seconds) {
    if (window_seconds <= 0) throw InvalidArgument("burst_profile: window must be positive");
    BurstProfile b;
    const auto& ts = t.timestamps();
    if (ts.empty()) return b;

    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < ts.size(); ++hi) {
        while (ts[hi] - ts[lo] >= window_seconds) ++lo;
        b.max_window_count = std::max(b.max_window_count, hi - lo + 1);
    }
    b.burstiness = static_cast<double>(b.max_window_count) / static_cast<double>(ts.size());

    for (std::int64_t boundary = ts.front() + window_seconds;; boundary += window_seconds) {
        const auto n = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), boundary) - ts.begin());
        b.cumulative.emplace_back(boundary, n);
        if (n == ts.size()) break;
    }
    return b;
}

OrderSummary order_summary(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("order_summary: empty cohort");
    std::sort(values.begin(), values.end());
    auto q = [&](double f) {
        const double pos = f * static_cast<double>(values.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(i);
        return i + 1 < values.size() ? values[i] + frac * (values[i + 1] - values[i]) : values[i];
    };
    return {values.front(), q(0.25), q(0.5), q(0.75), values.back(), values.size()};
}

OrderSummary page_like_count_summary(const Dataset& d, const std::function<bool(const Label&)>& cohort) {
    std::vector<double> counts;
    for (const auto& a : d.accounts) {
        if (cohort(a.label)) counts.push_back(static_cast<double>(a.liked_pages.size()));
    }
    return order_summary(std::move(counts));
}

} // namespace farmlens::graph
