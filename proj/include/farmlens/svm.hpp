#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace farmlens::learn {

using Row = std::vector<double>;

double squared_distance(std::span<const double> a, std::span<const double> b);
inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// Dense symmetric matrix stored row-major.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
};

SquareMatrix pairwise_sq_distances(std::span<const Row> x);
SquareMatrix rbf_from_distances(const SquareMatrix& d2, double gamma);

struct NuSvmOptions {
    double tolerance = 1e-7;          // bound on the KKT residual of the 1/l-scaled dual
    std::size_t max_updates = 1'000'000;
};

// Solution of the nu-SVC dual
//   max -1/2 sum_ij a_i a_j y_i y_j K_ij
//   s.t. 0 <= a_i <= 1/l, sum_i a_i y_i = 0, sum_i a_i >= nu
// with decision function sum_i a_i y_i K(x_i, x) + b.
struct NuSvmSolution {
    std::vector<double> alpha;  // in [0, 1/l]
    double b = 0;
    double nu = 0;              // after clamping
    bool nu_clamped = false;
    double kkt_residual = 0;    // maximal violating-pair gap of the scaled dual
    std::size_t updates = 0;
};

// labels are +1 / -1. Throws InvalidArgument for nu outside (0, 1] or a missing
// class, NumericalError (with the residual) when max_updates is exhausted.
NuSvmSolution solve_nu_svc(const SquareMatrix& kernel, std::span<const int> labels, double nu,
                           const NuSvmOptions& opts = {});

struct FeasibilityReport {
    double box = 0;       // worst violation of 0 <= a_i <= 1/l
    double equality = 0;  // |sum a_i y_i|
    double nu_bound = 0;  // max(0, nu - sum a_i)
    double kkt = 0;
    double worst() const;
};

FeasibilityReport check_solution(const SquareMatrix& kernel, std::span<const int> labels,
                                 const NuSvmSolution& s);

struct NuSvmModel {
    double gamma = 0;
    double nu = 0;
    double b = 0;
    std::vector<Row> support_vectors;
    std::vector<double> coef;  // a_i * y_i for each support vector
    double kkt_residual = 0;
    bool nu_clamped = false;

    double decision(std::span<const double> x) const;
};

NuSvmModel train_nu_svm(std::span<const Row> x, std::span<const int> labels, double gamma, double nu,
                        const NuSvmOptions& opts = {});

inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    return std::exp(-gamma * squared_distance(a, b));
}

} // namespace farmlens::learn

