#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "farmlens/evaluation.hpp"
#include "farmlens/learn.hpp"

namespace farmlens::attack {

enum class AttackMode { mimic_all, mimic_subset };

struct AttackSpec {
    AttackMode mode = AttackMode::mimic_all;
    double fraction = 0;                // mimic_all: share of farm rows replaced
    std::vector<std::string> features;  // mimic_subset: canonical feature names
    std::size_t repeats = 10;
    std::uint64_t seed = 0;

    static AttackSpec mimic_all(double p, std::size_t repeats = 10, std::uint64_t seed = 0);
    static AttackSpec mimic_subset(std::vector<std::string> names, std::size_t repeats = 10, std::uint64_t seed = 0);

    std::string mode_name() const;  // "mimic_all" or "mimic_subset"
    std::string parameter() const;  // the fraction, or names joined by '+'
};

// Throws InvalidArgument when the spec itself is unusable.
void validate(const AttackSpec& spec);

// Replaces raw (unstandardized) feature values of farm rows with those of
// donors drawn uniformly with replacement from baseline_pool. Labels are kept.
learn::FeatureMatrix apply_attack(const learn::FeatureMatrix& test, const learn::FeatureMatrix& baseline_pool,
                                  const AttackSpec& spec, std::uint64_t seed);

struct RepeatResult {
    std::size_t repeat = 0;
    EvaluationReport report;
    double delta_f1 = 0;  // reference F1 minus attacked F1
};

struct RobustnessReport {
    AttackSpec spec;
    double reference_f1 = 0;
    double mean_f1 = 0, mean_fpr = 0, mean_delta_f1 = 0;
    double delta_f1_sd = 0;  // sample stdev over repeats
    std::vector<RepeatResult> repeats;

    std::string to_json() const;
};

// The model and both matrices are read-only; repeat r uses derive_seed(spec.seed, r).
RobustnessReport run_robustness(const learn::TrainedModel& model, const learn::FeatureMatrix& test,
                                const learn::FeatureMatrix& baseline_pool, const AttackSpec& spec);

// Baseline rows of a matrix (the donor pool).
learn::FeatureMatrix baseline_rows(const learn::FeatureMatrix& m);

// Canonical feature names ordered by decreasing absolute standardized mean
// difference between the classes; ties keep column order.
std::vector<std::string> rank_features(const learn::FeatureMatrix& train);

// Columns: mode,parameter,repeat,F1,FPR,dF1 (one row per repeat).
void write_robustness_header(std::ostream& out, bool with_campaign);
void write_robustness_rows(std::ostream& out, const RobustnessReport& r, const std::string& campaign = {});

} // namespace farmlens::attack
