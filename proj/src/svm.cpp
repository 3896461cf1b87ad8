#include "farmlens/svm.hpp"

#include <algorithm>
#include <limits>

#include "farmlens/error.hpp"

namespace farmlens::learn {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

SquareMatrix pairwise_sq_distances(std::span<const Row> x) {
    SquareMatrix d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) d(i, j) = d(j, i) = squared_distance(x[i], x[j]);
    }
    return d;
}

SquareMatrix rbf_from_distances(const SquareMatrix& d2, double gamma) {
    SquareMatrix k(d2.n);
    for (std::size_t i = 0; i < d2.data.size(); ++i) k.data[i] = std::exp(-gamma * d2.data[i]);
    return k;
}

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// SMO on the C = 1 form: 0 <= a_i <= 1, per-class sums nu*l/2. Working pairs
// are always taken from one class, which keeps both equality constraints.
class NuSolver {
public:
    NuSolver(const SquareMatrix& k, std::span<const int> y) : k_(k), y_(y), a_(y.size(), 0.0), g_(y.size(), 0.0) {}

    void init(double nu) {
        const double l = static_cast<double>(y_.size());
        double pos = nu * l / 2.0;
        double neg = pos;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            double& remaining = y_[i] > 0 ? pos : neg;
            a_[i] = std::min(1.0, remaining);
            remaining -= a_[i];
        }
        for (std::size_t j = 0; j < y_.size(); ++j) {
            if (a_[j] == 0.0) continue;
            for (std::size_t i = 0; i < y_.size(); ++i) g_[i] += q(i, j) * a_[j];
        }
    }

    // Largest violating-pair gap over both classes (raw, unscaled).
    double gap() const {
        double up_p = -kInf, low_p = -kInf, up_n = -kInf, low_n = -kInf;
        for (std::size_t t = 0; t < y_.size(); ++t) {
            if (y_[t] > 0) {
                if (a_[t] < 1.0) up_p = std::max(up_p, -g_[t]);
                if (a_[t] > 0.0) low_p = std::max(low_p, g_[t]);
            } else {
                if (a_[t] > 0.0) up_n = std::max(up_n, g_[t]);
                if (a_[t] < 1.0) low_n = std::max(low_n, -g_[t]);
            }
        }
        double gap = 0;
        if (up_p > -kInf && low_p > -kInf) gap = std::max(gap, up_p + low_p);
        if (up_n > -kInf && low_n > -kInf) gap = std::max(gap, up_n + low_n);
        return gap;
    }

    std::size_t run(double eps, std::size_t max_updates) {
        for (std::size_t it = 0; it < max_updates; ++it) {
            std::size_t i = 0, j = 0;
            if (!select(eps, i, j)) return it;
            update(i, j);
        }
        if (gap() < eps) return max_updates;
        throw NumericalError("nu-SVC solver did not converge after " + std::to_string(max_updates) +
                             " updates (KKT residual " + std::to_string(gap() / static_cast<double>(y_.size())) +
                             ")");
    }

    // (r1 - r2) / 2 as in the standard nu-SVC bias recovery.
    double rho() const {
        double ub[2] = {kInf, kInf}, lb[2] = {-kInf, -kInf}, sum[2] = {0, 0};
        std::size_t free[2] = {0, 0};
        for (std::size_t t = 0; t < y_.size(); ++t) {
            const int c = y_[t] > 0 ? 0 : 1;
            if (a_[t] >= 1.0) {
                lb[c] = std::max(lb[c], g_[t]);
            } else if (a_[t] <= 0.0) {
                ub[c] = std::min(ub[c], g_[t]);
            } else {
                ++free[c];
                sum[c] += g_[t];
            }
        }
        double r[2];
        for (int c = 0; c < 2; ++c) {
            r[c] = free[c] > 0 ? sum[c] / static_cast<double>(free[c]) : (ub[c] + lb[c]) / 2.0;
        }
        return (r[0] - r[1]) / 2.0;
    }

    const std::vector<double>& alpha() const { return a_; }

private:
    double q(std::size_t i, std::size_t j) const { return static_cast<double>(y_[i] * y_[j]) * k_(i, j); }

    bool select(double eps, std::size_t& out_i, std::size_t& out_j) const {
        const std::size_t l = y_.size();
        double gmax_p = -kInf, gmax_n = -kInf;
        std::size_t ip = l, in = l;
        for (std::size_t t = 0; t < l; ++t) {
            if (y_[t] > 0) {
                if (a_[t] < 1.0 && -g_[t] >= gmax_p) {
                    gmax_p = -g_[t];
                    ip = t;
                }
            } else if (a_[t] > 0.0 && g_[t] >= gmax_n) {
                gmax_n = g_[t];
                in = t;
            }
        }
        double gmax_p2 = -kInf, gmax_n2 = -kInf, best = kInf;
        std::size_t jmin = l;
        for (std::size_t j = 0; j < l; ++j) {
            if (y_[j] > 0) {
                if (a_[j] <= 0.0) continue;
                gmax_p2 = std::max(gmax_p2, g_[j]);
                const double diff = gmax_p + g_[j];
                if (ip < l && diff > 0) {
                    double quad = k_(ip, ip) + k_(j, j) - 2.0 * k_(ip, j);
                    if (quad <= 0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best) {
                        best = obj;
                        jmin = j;
                    }
                }
            } else {
                if (a_[j] >= 1.0) continue;
                gmax_n2 = std::max(gmax_n2, -g_[j]);
                const double diff = gmax_n - g_[j];
                if (in < l && diff > 0) {
                    double quad = k_(in, in) + k_(j, j) - 2.0 * k_(in, j);
                    if (quad <= 0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best) {
                        best = obj;
                        jmin = j;
                    }
                }
            }
        }
        const double gap_p = (ip < l && gmax_p2 > -kInf) ? gmax_p + gmax_p2 : 0.0;
        const double gap_n = (in < l && gmax_n2 > -kInf) ? gmax_n + gmax_n2 : 0.0;
        if (std::max(gap_p, gap_n) < eps || jmin == l) return false;
        out_i = y_[jmin] > 0 ? ip : in;
        out_j = jmin;
        return true;
    }

    void update(std::size_t i, std::size_t j) {
        double quad = k_(i, i) + k_(j, j) - 2.0 * k_(i, j);
        if (quad <= 0) quad = kTau;
        const double old_i = a_[i], old_j = a_[j];
        const double delta = (g_[i] - g_[j]) / quad;
        const double sum = old_i + old_j;
        double ai = old_i - delta, aj = old_j + delta;
        if (sum > 1.0) {
            if (ai > 1.0) {
                ai = 1.0;
                aj = sum - 1.0;
            }
            if (aj > 1.0) {
                aj = 1.0;
                ai = sum - 1.0;
            }
        } else {
            if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        a_[i] = ai;
        a_[j] = aj;
        const double di = ai - old_i, dj = aj - old_j;
        for (std::size_t t = 0; t < y_.size(); ++t) g_[t] += q(t, i) * di + q(t, j) * dj;
    }

    const SquareMatrix& k_;
    std::span<const int> y_;
    std::vector<double> a_;
    std::vector<double> g_;
};

} // namespace

NuSvmSolution solve_nu_svc(const SquareMatrix& kernel, std::span<const int> labels, double nu,
                           const NuSvmOptions& opts) {
    const std::size_t l = labels.size();
    if (kernel.n != l) throw InvalidArgument("solve_nu_svc: kernel size does not match labels");
    if (!(nu > 0.0) || nu > 1.0) throw InvalidArgument("solve_nu_svc: nu must lie in (0, 1]");
    std::size_t npos = 0;
    for (int y : labels) {
        if (y != 1 && y != -1) throw InvalidArgument("solve_nu_svc: labels must be +1 or -1");
        npos += y > 0 ? 1 : 0;
    }
    const std::size_t nneg = l - npos;
    if (npos == 0 || nneg == 0) throw InvalidArgument("solve_nu_svc: both classes must be present");

    NuSvmSolution s;
    const double nu_max = 2.0 * static_cast<double>(std::min(npos, nneg)) / static_cast<double>(l);
    s.nu = nu;
    if (nu > nu_max) {
        s.nu = nu_max;
        s.nu_clamped = true;
    }

    NuSolver solver(kernel, labels);
    solver.init(s.nu);
    const double eps = opts.tolerance * static_cast<double>(l);
    s.updates = solver.run(eps, opts.max_updates);
    s.kkt_residual = solver.gap() / static_cast<double>(l);
    s.b = -solver.rho() / static_cast<double>(l);
    s.alpha = solver.alpha();
    for (double& a : s.alpha) a /= static_cast<double>(l);
    return s;
}

double FeasibilityReport::worst() const { return std::max({box, equality, nu_bound, kkt}); }

FeasibilityReport check_solution(const SquareMatrix& kernel, std::span<const int> labels, const NuSvmSolution& s) {
    FeasibilityReport r;
    const std::size_t l = labels.size();
    const double cap = 1.0 / static_cast<double>(l);
    double sum = 0, sum_y = 0;
    for (std::size_t i = 0; i < l; ++i) {
        r.box = std::max({r.box, -s.alpha[i], s.alpha[i] - cap});
        sum += s.alpha[i];
        sum_y += s.alpha[i] * labels[i];
    }
    r.equality = std::abs(sum_y);
    r.nu_bound = std::max(0.0, s.nu - sum - 1e-12);

    // Recompute the gradient from scratch rather than trusting the solver's copy.
    double up_p = -kInf, low_p = -kInf, up_n = -kInf, low_n = -kInf;
    for (std::size_t t = 0; t < l; ++t) {
        double g = 0;
        for (std::size_t j = 0; j < l; ++j) g += labels[t] * labels[j] * kernel(t, j) * s.alpha[j];
        const bool below_cap = s.alpha[t] < cap * (1 - 1e-12);
        const bool above_zero = s.alpha[t] > 0.0;
        if (labels[t] > 0) {
            if (below_cap) up_p = std::max(up_p, -g);
            if (above_zero) low_p = std::max(low_p, g);
        } else {
            if (above_zero) up_n = std::max(up_n, g);
            if (below_cap) low_n = std::max(low_n, -g);
        }
    }
    if (up_p > -kInf && low_p > -kInf) r.kkt = std::max(r.kkt, up_p + low_p);
    if (up_n > -kInf && low_n > -kInf) r.kkt = std::max(r.kkt, up_n + low_n);
    return r;
}

double NuSvmModel::decision(std::span<const double> x) const {
    double f = b;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) f += coef[i] * rbf_kernel(support_vectors[i], x, gamma);
    return f;
}

NuSvmModel train_nu_svm(std::span<const Row> x, std::span<const int> labels, double gamma, double nu,
                        const NuSvmOptions& opts) {
    if (x.size() != labels.size()) throw InvalidArgument("train_nu_svm: row/label count mismatch");
    if (!(gamma > 0.0)) throw InvalidArgument("train_nu_svm: gamma must be positive");
    const auto kernel = rbf_from_distances(pairwise_sq_distances(x), gamma);
    const auto s = solve_nu_svc(kernel, labels, nu, opts);
    NuSvmModel m;
    m.gamma = gamma;
    m.nu = s.nu;
    m.b = s.b;
    m.kkt_residual = s.kkt_residual;
    m.nu_clamped = s.nu_clamped;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (s.alpha[i] > 0.0) {
            m.support_vectors.push_back(x[i]);
            m.coef.push_back(s.alpha[i] * labels[i]);
        }
    }
    return m;
}

} // namespace farmlens::learn
