#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace farmlens {

// Confusion counts with the usual derived ratios. A ratio whose denominator
// is zero is reported as 0.
struct EvaluationReport {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    bool tie_warning = false;  // positive class chosen by tie-break (co-clustering)

    std::size_t total() const { return tp + fp + tn + fn; }
    double precision() const;
    double recall() const;
    double accuracy() const;
    double f1() const;
    double false_positive_rate() const;  // FP / (FP + TN)

    static EvaluationReport from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);
    // truth/predicted: true = farm (positive).
    static EvaluationReport from_predictions(std::span<const bool> truth, std::span<const bool> predicted);

    std::string to_json() const;

    bool operator==(const EvaluationReport&) const = default;
};

} // namespace farmlens
