#include "farmlens/cocluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_map>

#include "farmlens/error.hpp"
#include "farmlens/rng.hpp"

namespace farmlens::cocluster {

std::size_t BipartiteLikeGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& row : user_pages) n += row.size();
    return n;
}

std::vector<std::size_t> BipartiteLikeGraph::page_degrees() const {
    std::vector<std::size_t> deg(pages.size(), 0);
    for (const auto& row : user_pages) {
        for (int p : row) ++deg[static_cast<std::size_t>(p)];
    }
    return deg;
}

BipartiteLikeGraph build_bipartite(const Dataset& d, const CoclusterConfig& cfg) {
    if (d.accounts.empty()) throw InvalidArgument("build_bipartite: dataset has no accounts");
    // Rows with no likes at all can never be embedded, so the effective threshold is at least 1.
    const auto threshold = static_cast<std::size_t>(std::max<std::int64_t>(cfg.min_likes, 1));

    std::vector<const Account*> accounts;
    for (const auto& a : d.accounts) accounts.push_back(&a);
    std::sort(accounts.begin(), accounts.end(), [](const Account* a, const Account* b) { return a->id < b->id; });

    std::map<std::string, std::size_t> page_index;
    for (const auto* a : accounts) {
        for (const auto& l : a->liked_pages) page_index.emplace(l.page, 0);
    }
    std::vector<std::string> page_ids;
    for (auto& [id, idx] : page_index) {
        idx = page_ids.size();
        page_ids.push_back(id);
    }
    std::vector<std::vector<std::size_t>> rows(accounts.size());
    for (std::size_t u = 0; u < accounts.size(); ++u) {
        for (const auto& l : accounts[u]->liked_pages) rows[u].push_back(page_index.at(l.page));
    }

    std::vector<bool> user_alive(accounts.size(), true), page_alive(page_ids.size(), true);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::size_t> page_deg(page_ids.size(), 0);
        for (std::size_t u = 0; u < rows.size(); ++u) {
            if (!user_alive[u]) continue;
            std::size_t deg = 0;
            for (auto p : rows[u]) deg += page_alive[p] ? 1 : 0;
            if (deg < threshold) {
                user_alive[u] = false;
                changed = true;
                continue;
            }
            for (auto p : rows[u]) page_deg[p] += page_alive[p] ? 1 : 0;
        }
        if (changed) continue;  // recount pages against the surviving users
        for (std::size_t p = 0; p < page_ids.size(); ++p) {
            if (page_alive[p] && page_deg[p] < threshold) {
                page_alive[p] = false;
                changed = true;
            }
        }
    }

    BipartiteLikeGraph g;
    std::vector<int> new_page(page_ids.size(), -1);
    for (std::size_t p = 0; p < page_ids.size(); ++p) {
        if (page_alive[p]) {
            new_page[p] = static_cast<int>(g.pages.size());
            g.pages.push_back(page_ids[p]);
        } else {
            g.dropped_pages.push_back(page_ids[p]);
        }
    }
    for (std::size_t u = 0; u < accounts.size(); ++u) {
        if (!user_alive[u]) {
            g.dropped_users.push_back(accounts[u]->id);
            continue;
        }
        std::vector<int> row;
        for (auto p : rows[u]) {
            if (new_page[p] >= 0) row.push_back(new_page[p]);
        }
        std::sort(row.begin(), row.end());
        g.users.push_back(accounts[u]->id);
        g.user_pages.push_back(std::move(row));
    }
    if (g.users.empty() || g.pages.empty()) {
        throw InvalidArgument("build_bipartite: no users or pages survive min_likes = " + std::to_string(cfg.min_likes));
    }
    return g;
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Normalized incidence A_n = D_r^-1/2 A D_c^-1/2 in CSR form.
struct NormalizedIncidence {
    const BipartiteLikeGraph& g;
    Vec inv_sqrt_dr, inv_sqrt_dc;

    explicit NormalizedIncidence(const BipartiteLikeGraph& graph) : g(graph) {
        inv_sqrt_dr.resize(g.users.size());
        for (std::size_t u = 0; u < g.users.size(); ++u) {
            inv_sqrt_dr[u] = 1.0 / std::sqrt(static_cast<double>(g.user_pages[u].size()));
        }
        const auto dc = g.page_degrees();
        inv_sqrt_dc.resize(dc.size());
        for (std::size_t p = 0; p < dc.size(); ++p) inv_sqrt_dc[p] = 1.0 / std::sqrt(static_cast<double>(dc[p]));
    }

    Vec times(const Vec& v) const {  // A_n v
        Vec out(g.users.size(), 0.0);
        for (std::size_t u = 0; u < g.users.size(); ++u) {
            double s = 0;
            for (int p : g.user_pages[u]) s += v[static_cast<std::size_t>(p)] * inv_sqrt_dc[static_cast<std::size_t>(p)];
            out[u] = s * inv_sqrt_dr[u];
        }
        return out;
    }

    Vec transpose_times(const Vec& w) const {  // A_n^T w
        Vec out(g.pages.size(), 0.0);
        for (std::size_t u = 0; u < g.users.size(); ++u) {
            const double x = w[u] * inv_sqrt_dr[u];
            for (int p : g.user_pages[u]) out[static_cast<std::size_t>(p)] += x;
        }
        for (std::size_t p = 0; p < out.size(); ++p) out[p] *= inv_sqrt_dc[p];
        return out;
    }
};

// Orthonormalizes the columns against `fixed` and each other (modified Gram-Schmidt).
// Returns the smallest column norm left after projection, before scaling.
double orthonormalize(std::vector<Vec>& cols, const Vec& fixed) {
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        axpy(-dot(cols[i], fixed), fixed, cols[i]);
        for (std::size_t j = 0; j < i; ++j) axpy(-dot(cols[i], cols[j]), cols[j], cols[i]);
        const double n = norm(cols[i]);
        smallest = std::min(smallest, n);
        if (n > 0) {
            for (double& x : cols[i]) x /= n;
        }
    }
    return smallest;
}

struct KMeansFit {
    std::vector<int> assignment;
    double inertia = std::numeric_limits<double>::infinity();
};

double sq_dist(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

KMeansFit kmeans_once(const std::vector<Vec>& pts, std::size_t k, Rng& rng) {
    const std::size_t n = pts.size();
    std::vector<Vec> centers;
    centers.push_back(pts[rng.below(n)]);
    Vec d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(pts[i], centers[0]);
    while (centers.size() < k) {
        Vec cumulative(n);
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) cumulative[i] = (total += d2[i]);
        const std::size_t pick = total > 0 ? rng.pick_cumulative(cumulative) : rng.below(n);
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(pts[i], centers.back()));
    }

    KMeansFit fit;
    fit.assignment.assign(n, -1);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(pts[i], centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double dc = sq_dist(pts[i], centers[c]);
                if (dc < best_d) {
                    best_d = dc;
                    best = static_cast<int>(c);
                }
            }
            if (fit.assignment[i] != best) {
                fit.assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<Vec> sums(k, Vec(pts[0].size(), 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            axpy(1.0, pts[i], sums[static_cast<std::size_t>(fit.assignment[i])]);
            ++counts[static_cast<std::size_t>(fit.assignment[i])];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster at the point farthest from its centre.
                std::size_t far = 0;
                double far_d = -1;
                for (std::size_t i = 0; i < n; ++i) {
                    const double di = sq_dist(pts[i], centers[static_cast<std::size_t>(fit.assignment[i])]);
                    if (di > far_d) {
                        far_d = di;
                        far = i;
                    }
                }
                centers[c] = pts[far];
            } else {
                for (double& x : sums[c]) x /= static_cast<double>(counts[c]);
                centers[c] = std::move(sums[c]);
            }
        }
    }
    fit.inertia = 0;
    for (std::size_t i = 0; i < n; ++i) fit.inertia += sq_dist(pts[i], centers[static_cast<std::size_t>(fit.assignment[i])]);
    return fit;
}

} // namespace

CoclusterResult spectral_cocluster(const BipartiteLikeGraph& g, const CoclusterConfig& cfg) {
    if (cfg.k < 2) throw InvalidArgument("spectral_cocluster: k must be at least 2");
    const std::size_t nu = g.users.size();
    const std::size_t np = g.pages.size();
    if (nu < cfg.k || np < 2) throw NumericalError("spectral_cocluster: degenerate spectrum (too few users or pages)");

    const NormalizedIncidence an(g);
    std::size_t dims = 0;
    while ((std::size_t{1} << dims) < cfg.k) ++dims;
    if (dims >= std::min(nu, np)) throw NumericalError("spectral_cocluster: degenerate spectrum (rank too small)");

    // Leading right singular vector (sigma = 1) is D_c^1/2 1, known in closed form.
    const auto dc = g.page_degrees();
    Vec v1(np);
    for (std::size_t p = 0; p < np; ++p) v1[p] = std::sqrt(static_cast<double>(dc[p]));
    {
        const double n = norm(v1);
        for (double& x : v1) x /= n;
    }

    Rng rng(derive_seed(cfg.seed, fnv1a("cocluster-init")));
    std::vector<Vec> basis(dims, Vec(np));
    for (auto& col : basis) {
        for (double& x : col) x = rng.normal();
    }
    orthonormalize(basis, v1);

    CoclusterResult res;
    Vec eigen(dims, 0.0);
    for (res.iterations = 1; res.iterations <= cfg.max_iterations; ++res.iterations) {
        std::vector<Vec> next(dims);
        for (std::size_t c = 0; c < dims; ++c) {
            next[c] = an.transpose_times(an.times(basis[c]));
            eigen[c] = dot(next[c], basis[c]);
        }
        // A^T A maps the unit columns to (near) nothing outside v1: the
        // remaining spectrum is zero and what is left is round-off.
        if (orthonormalize(next, v1) < 1e-12) {
            throw NumericalError("spectral_cocluster: degenerate spectrum (second singular value is zero)");
        }
        double delta = 0;
        for (std::size_t c = 0; c < dims; ++c) {
            Vec diff = next[c];
            axpy(-1.0, basis[c], diff);
            delta = std::max(delta, norm(diff));
        }
        basis = std::move(next);
        if (delta < cfg.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.iterations = std::min(res.iterations, cfg.max_iterations);

    res.singular_values.push_back(1.0);
    for (double e : eigen) res.singular_values.push_back(std::sqrt(std::max(e, 0.0)));
    if (res.singular_values.back() < 1e-10) {
        throw NumericalError("spectral_cocluster: degenerate spectrum (second singular value is zero)");
    }

    // Z = [D_r^-1/2 U; D_c^-1/2 V]
    std::vector<Vec> points(nu + np, Vec(dims));
    for (std::size_t c = 0; c < dims; ++c) {
        const Vec u = an.times(basis[c]);
        const double sigma = res.singular_values[c + 1];
        for (std::size_t i = 0; i < nu; ++i) points[i][c] = u[i] / sigma * an.inv_sqrt_dr[i];
        for (std::size_t p = 0; p < np; ++p) points[nu + p][c] = basis[c][p] * an.inv_sqrt_dc[p];
    }

    KMeansFit best;
    for (std::size_t r = 0; r < std::max<std::size_t>(cfg.restarts, 1); ++r) {
        Rng krng(derive_seed(cfg.seed, r + 1));
        auto fit = kmeans_once(points, cfg.k, krng);
        if (fit.inertia < best.inertia) best = std::move(fit);
    }

    // Relabel by first appearance so ids do not depend on the random init.
    std::vector<int> relabel(cfg.k, -1);
    int next_id = 0;
    for (int a : best.assignment) {
        if (relabel[static_cast<std::size_t>(a)] < 0) relabel[static_cast<std::size_t>(a)] = next_id++;
    }
    res.user_cluster.resize(nu);
    res.page_cluster.resize(np);
    for (std::size_t i = 0; i < nu; ++i) res.user_cluster[i] = relabel[static_cast<std::size_t>(best.assignment[i])];
    for (std::size_t p = 0; p < np; ++p) {
        res.page_cluster[p] = relabel[static_cast<std::size_t>(best.assignment[nu + p])];
    }
    return res;
}

int positive_cluster(const std::vector<int>& user_cluster, const std::vector<bool>& is_farm, std::size_t k,
                     bool* tie) {
    if (user_cluster.size() != is_farm.size()) throw InvalidArgument("label_clusters: size mismatch");
    std::vector<std::size_t> farm(k, 0), size(k, 0);
    for (std::size_t i = 0; i < user_cluster.size(); ++i) {
        const auto c = static_cast<std::size_t>(user_cluster[i]);
        if (c >= k) throw InvalidArgument("label_clusters: cluster id out of range");
        ++size[c];
        if (is_farm[i]) ++farm[c];
    }
    // Compare farm shares exactly by cross-multiplication; empty clusters never win.
    int best = -1;
    bool tied = false;
    for (std::size_t c = 0; c < k; ++c) {
        if (size[c] == 0) continue;
        if (best < 0) {
            best = static_cast<int>(c);
            continue;
        }
        const auto b = static_cast<std::size_t>(best);
        const auto lhs = farm[c] * size[b];
        const auto rhs = farm[b] * size[c];
        if (lhs > rhs) {
            best = static_cast<int>(c);
            tied = false;
        } else if (lhs == rhs) {
            tied = true;
        }
    }
    if (tie) *tie = tied;
    return std::max(best, 0);
}

EvaluationReport label_clusters(const std::vector<int>& user_cluster, const std::vector<bool>& is_farm,
                                std::size_t k) {
    bool tie = false;
    const int pos = positive_cluster(user_cluster, is_farm, k, &tie);
    EvaluationReport report;
    for (std::size_t i = 0; i < is_farm.size(); ++i) {
        const bool predicted = user_cluster[i] == pos;
        if (is_farm[i]) {
            (predicted ? report.tp : report.fn) += 1;
        } else {
            (predicted ? report.fp : report.tn) += 1;
        }
    }
    report.tie_warning = tie;
    return report;
}

CoclusterOutcome run_cocluster(const Dataset& d, const CoclusterConfig& cfg) {
    CoclusterOutcome o;
    o.graph = build_bipartite(d, cfg);
    o.result = spectral_cocluster(o.graph, cfg);

    std::unordered_map<std::string_view, const Account*> by_id;
    for (const auto& a : d.accounts) by_id.emplace(a.id, &a);
    std::vector<bool> farm(o.graph.users.size());
    for (std::size_t i = 0; i < o.graph.users.size(); ++i) farm[i] = by_id.at(o.graph.users[i])->label.is_farm();

    o.positive = positive_cluster(o.result.user_cluster, farm, cfg.k);
    o.report = label_clusters(o.result.user_cluster, farm, cfg.k);
    auto& r = o.report;
    for (const auto& id : o.graph.dropped_users) (by_id.at(id)->label.is_farm() ? r.fn : r.tn) += 1;
    return o;
}

void write_scatter_csv(std::ostream& out, const Dataset& d, const CoclusterOutcome& o) {
    std::unordered_map<std::string_view, bool> farm;
    for (const auto& a : d.accounts) farm.emplace(a.id, a.label.is_farm());
    out << "user,page,outcome\n";
    for (std::size_t u = 0; u < o.graph.users.size(); ++u) {
        const bool predicted = o.result.user_cluster[u] == o.positive;
        const bool truth = farm.at(o.graph.users[u]);
        const char* outcome = truth ? (predicted ? "TP" : "FN") : (predicted ? "FP" : "TN");
        for (int p : o.graph.user_pages[u]) out << u << ',' << p << ',' << outcome << '\n';
    }
}

} // namespace farmlens::cocluster
