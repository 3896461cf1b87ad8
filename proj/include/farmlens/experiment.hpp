#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "farmlens/attack.hpp"
#include "farmlens/cocluster.hpp"
#include "farmlens/features.hpp"
#include "farmlens/learn.hpp"
#include "farmlens/model.hpp"
#include "farmlens/synth.hpp"

// End-to-end runs over the shipped presets: each farm cohort is evaluated
// against the shared baseline cohort.
namespace farmlens::experiment {

struct ReproConfig {
    std::uint64_t seed = 7;
    std::string baseline_preset = "baseline";
    std::vector<std::string> farm_presets = {"bl_usa", "al_all", "sf_all", "ms_usa"};
    double train_fraction = 0.8;
    learn::GridSpec grid;
    std::int64_t min_likes = 10;
    std::size_t attack_repeats = 10;
    std::vector<double> attack_fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<std::size_t> subset_sizes = {1, 2, 3, 4, 8};
};

struct Cohort {
    synth::CohortSpec spec;
    Dataset data;
};

struct Cohorts {
    Cohort baseline;
    std::vector<Cohort> farms;  // in ReproConfig::farm_presets order

    const Cohort& farm(const std::string& preset) const;
    Dataset campaign(const std::string& preset) const;  // baseline merged with one farm
};

Cohorts generate_cohorts(const ReproConfig& cfg);

// Feature matrices of one campaign split; both share the column set.
struct Split {
    learn::FeatureMatrix train, test;
};

// Stratified train/test split of the campaign dataset (seeded by cfg.seed);
// the lexical set keeps only accounts with English posts.
Split make_split(const std::vector<FeatureVector>& features, const Dataset& campaign, learn::FeatureSet set,
                 const ReproConfig& cfg);

struct SvmRun {
    learn::GridResult grid;
    learn::TrainedModel model;
    EvaluationReport report;
    std::size_t total = 0, train = 0, test = 0;
};

SvmRun run_svm(const Split& split, const ReproConfig& cfg);

// Every comparison classifier trained on the combined split; the SVM entry
// reuses params (normally the grid-search winner).
std::map<learn::ClassifierKind, EvaluationReport> run_classifier_suite(const Split& split,
                                                                      const learn::HyperParams& params);

struct RobustnessRun {
    std::vector<attack::RobustnessReport> fractions;  // mimic_all per fraction
    std::vector<attack::RobustnessReport> subsets;    // mimic_subset of the top-k ranked features
};

RobustnessRun run_attacks(const SvmRun& svm, const Split& split, const ReproConfig& cfg);

struct LexicalSummary {
    std::string campaign;
    std::size_t accounts = 0, english_accounts = 0;
    // Means over accounts with English posts.
    double chars = 0, words = 0, sentences = 0, word_length = 0, sentence_length = 0, richness = 0, ari = 0,
           flesch = 0;
};

LexicalSummary lexical_summary(const std::string& campaign, const std::vector<FeatureVector>& features);

struct CampaignResult {
    std::string preset, campaign;
    synth::Archetype archetype = synth::Archetype::baseline;
    cocluster::CoclusterOutcome cocluster;
    std::map<learn::FeatureSet, SvmRun> svm;  // non_lexical, lexical, combined
    std::map<learn::ClassifierKind, EvaluationReport> suite;
    RobustnessRun robustness;
};

struct ReproResult {
    ReproConfig config;
    Cohorts cohorts;
    std::vector<LexicalSummary> lexical;  // baseline first
    std::vector<CampaignResult> campaigns;
};

// Co-clustering per campaign; throws what the underlying module throws.
cocluster::CoclusterOutcome run_campaign_cocluster(const Dataset& campaign, const ReproConfig& cfg);

ReproResult run_repro(const ReproConfig& cfg);

struct BandCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The qualitative claims checked on a reproduction run.
std::vector<BandCheck> check_cocluster_contrast(const ReproResult& r);
std::vector<BandCheck> check_feature_sets(const ReproResult& r);
std::vector<BandCheck> check_classifier_order(const ReproResult& r);
std::vector<BandCheck> check_robustness(const ReproResult& r);
std::vector<BandCheck> check_all(const ReproResult& r);

} // namespace farmlens::experiment
