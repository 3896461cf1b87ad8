#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "farmlens/evaluation.hpp"
#include "farmlens/model.hpp"

namespace farmlens::cocluster {

struct CoclusterConfig {
    std::size_t k = 2;
    std::int64_t min_likes = 10;  // users and pages with fewer likes are dropped
    std::uint64_t seed = 0;
    double tolerance = 1e-8;
    std::size_t max_iterations = 5000;
    std::size_t restarts = 10;  // k-means++ restarts
};

// User x page like incidence. Users and pages are indexed in sorted id order.
struct BipartiteLikeGraph {
    std::vector<std::string> users;
    std::vector<std::string> pages;
    std::vector<std::vector<int>> user_pages;  // sorted page indices per user
    std::vector<std::string> dropped_users;
    std::vector<std::string> dropped_pages;

    std::size_t edge_count() const;
    std::vector<std::size_t> page_degrees() const;
};

// Iteratively removes users and pages with fewer than min_likes likes until
// nothing changes. Throws InvalidArgument if nothing survives.
BipartiteLikeGraph build_bipartite(const Dataset& d, const CoclusterConfig& cfg);

struct CoclusterResult {
    std::vector<int> user_cluster;  // aligned with BipartiteLikeGraph::users
    std::vector<int> page_cluster;  // aligned with BipartiteLikeGraph::pages
    std::vector<double> singular_values;  // of the normalized incidence, leading first
    std::size_t iterations = 0;
    bool converged = false;
};

// Normalized-incidence spectral co-clustering: D_r^-1/2 A D_c^-1/2 is
// decomposed by power iteration (top pair deflated analytically), users and
// pages are embedded with the next ceil(log2 k) singular vectors and grouped
// by seeded k-means. Throws NumericalError on a degenerate spectrum.
CoclusterResult spectral_cocluster(const BipartiteLikeGraph& g, const CoclusterConfig& cfg);

// Positive cluster = highest share of farm users (ties: lowest id, flagged).
int positive_cluster(const std::vector<int>& user_cluster, const std::vector<bool>& is_farm, std::size_t k,
                     bool* tie = nullptr);
EvaluationReport label_clusters(const std::vector<int>& user_cluster, const std::vector<bool>& is_farm,
                                std::size_t k);

struct CoclusterOutcome {
    BipartiteLikeGraph graph;
    CoclusterResult result;
    int positive = 0;
    // Over every dataset account; filtered-out users count as predicted negative.
    EvaluationReport report;
};

CoclusterOutcome run_cocluster(const Dataset& d, const CoclusterConfig& cfg);

// One row per like edge surviving the filter: user index, page index, outcome.
void write_scatter_csv(std::ostream& out, const Dataset& d, const CoclusterOutcome& o);

} // namespace farmlens::cocluster
