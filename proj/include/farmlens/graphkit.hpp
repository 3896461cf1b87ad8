#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "farmlens/error.hpp"
#include "farmlens/model.hpp"

namespace farmlens::graph {

// Simple undirected graph over account ids. Node indices follow the sorted id order.
class SocialGraph {
public:
    SocialGraph() = default;
    // Self-loops and repeated edges are dropped; endpoints must be listed in nodes.
    SocialGraph(std::vector<std::string> nodes, std::span<const std::pair<std::string, std::string>> edges);

    // Friendships among the dataset's accounts (an edge if either side lists the other).
    static SocialGraph from_dataset(const Dataset& d);

    std::size_t size() const { return ids_.size(); }
    std::size_t edge_count() const;
    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<int>& neighbors(std::size_t i) const { return adj_[i]; }
    std::size_t degree(std::size_t i) const { return adj_[i].size(); }
    bool has_edge(std::size_t u, std::size_t v) const;
    std::size_t index_of(std::string_view id) const;  // throws InvalidArgument if absent

    void add_edge(std::size_t u, std::size_t v);

    bool operator==(const SocialGraph&) const = default;

private:
    std::vector<std::string> ids_;
    std::vector<std::vector<int>> adj_;  // sorted
};

// Edge u-v iff u-v are direct friends or share at least one friend in mutual_friends.
SocialGraph two_hop_graph(const SocialGraph& g, const std::map<std::string, std::set<std::string>>& mutual_friends);
SocialGraph two_hop_graph(const Dataset& d);

struct NodeStructure {
    std::size_t degree = 0;
    std::size_t triangles = 0;
    double clustering = 0;      // triangles / (deg*(deg-1)/2), 0 when deg < 2
    std::size_t max_clique = 0; // largest maximal clique containing the node
};

struct StructureReport {
    std::vector<NodeStructure> nodes;               // indexed like the graph
    std::vector<std::vector<int>> maximal_cliques;  // each sorted; list sorted

    double mean_degree() const;
    // Share of nodes belonging to some maximal clique with more than `size` members.
    double share_in_clique_larger_than(std::size_t size) const;
};

class CliqueCapExceeded : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kDefaultCliqueCap = 1'000'000;

std::vector<std::size_t> triangle_counts(const SocialGraph& g);
// Pivoted Bron-Kerbosch; singletons count as maximal cliques of size 1.
std::vector<std::vector<int>> maximal_cliques(const SocialGraph& g, std::size_t cap = kDefaultCliqueCap);
StructureReport structure_report(const SocialGraph& g, std::size_t clique_cap = kDefaultCliqueCap);

// |A ∩ B| / |A ∪ B|; 0 when both are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct NamedSet {
    std::string name;
    std::set<std::string> members;
};

struct SimilarityMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
};

SimilarityMatrix jaccard_matrix(std::span<const NamedSet> sets);
// Union of liked page ids per label, and liker ids per label; sorted by label string.
std::vector<NamedSet> campaign_page_sets(const Dataset& d);
std::vector<NamedSet> campaign_liker_sets(const Dataset& d);
// Header row/column of names; entries x100 with one decimal.
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& m);

class CategoricalDist {
public:
    // Probabilities must be >= 0 and sum to 1 within 1e-9.
    CategoricalDist(std::vector<std::string> bins, std::vector<double> probabilities);
    // Normalizes non-negative weights (e.g. rounded percentages).
    static CategoricalDist from_weights(std::vector<std::string> bins, std::span<const double> weights);

    const std::vector<std::string>& bins() const { return bins_; }
    const std::vector<double>& probabilities() const { return p_; }

private:
    std::vector<std::string> bins_;
    std::vector<double> p_;
};

enum class LogBase { two, e };

inline constexpr double kKlSmoothing = 1e-6;

// Σ p_i log(p_i / q_i). When q has a zero bin where p does not, q is smoothed
// with ε = 1e-6 per bin and renormalized. 0 log 0 = 0.
double kl_divergence(const CategoricalDist& p, const CategoricalDist& q, LogBase base = LogBase::two);

CategoricalDist age_distribution(const Dataset& d);
std::map<std::string, std::size_t> country_histogram(const Dataset& d);

class LikeTimeline {
public:
    explicit LikeTimeline(std::vector<std::int64_t> timestamps);  // sorted on construction
    const std::vector<std::int64_t>& timestamps() const { return ts_; }
    bool empty() const { return ts_.empty(); }

private:
    std::vector<std::int64_t> ts_;
};

LikeTimeline page_timeline(const Dataset& d, std::string_view page_id);

struct BurstProfile {
    std::vector<std::pair<std::int64_t, std::size_t>> cumulative;  // (boundary, likes before it)
    std::size_t max_window_count = 0;
    double burstiness = 0;
};

// Windows are half-open: a window starting at t covers [t, t + window).
BurstProfile burst_profile(const LikeTimeline& t, std::int64_t window_seconds);

struct OrderSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    std::size_t n = 0;
};

// Linear-interpolation quantiles.
OrderSummary order_summary(std::vector<double> values);
OrderSummary page_like_count_summary(const Dataset& d, const std::function<bool(const Label&)>& cohort);

} // namespace farmlens::graph
