#include "farmlens/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "farmlens/error.hpp"
#include "farmlens/rng.hpp"

namespace farmlens::experiment {

const Cohort& Cohorts::farm(const std::string& preset) const {
    for (const auto& f : farms) {
        if (f.spec.name == preset) return f;
    }
    throw InvalidArgument("no farm cohort named '" + preset + "'");
}

Dataset Cohorts::campaign(const std::string& preset) const {
    return merge(baseline.data, farm(preset).data);
}

Cohorts generate_cohorts(const ReproConfig& cfg) {
    Cohorts c;
    c.baseline.spec = synth::preset(cfg.baseline_preset);
    c.baseline.data = synth::generate(c.baseline.spec, cfg.seed);
    for (const auto& name : cfg.farm_presets) {
        Cohort f;
        f.spec = synth::preset(name);
        if (f.spec.archetype == synth::Archetype::baseline) {
            throw InvalidArgument("preset '" + name + "' is not a farm preset");
        }
        f.data = synth::generate(f.spec, cfg.seed);
        c.farms.push_back(std::move(f));
    }
    return c;
}

Split make_split(const std::vector<FeatureVector>& features, const Dataset& campaign, learn::FeatureSet set,
                 const ReproConfig& cfg) {
    const auto [train_ds, test_ds] = split_train_test(campaign, cfg.train_fraction, derive_seed(cfg.seed, fnv1a("split")));
    std::set<std::string> train_ids;
    for (const auto& a : train_ds.accounts) train_ids.insert(a.id);

    const auto all = set == learn::FeatureSet::lexical ? learn::english_only(features, set)
                                                       : learn::to_matrix(features, set);
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < all.size(); ++i) (train_ids.contains(all.ids[i]) ? tr : te).push_back(i);
    return Split{learn::subset(all, tr), learn::subset(all, te)};
}

SvmRun run_svm(const Split& split, const ReproConfig& cfg) {
    learn::HyperParams base;
    base.seed = derive_seed(cfg.seed, fnv1a("svm"));
    SvmRun r;
    r.grid = learn::grid_search(split.train, cfg.grid, base);
    r.model = learn::train(learn::ClassifierKind::svm, split.train, r.grid.best);
    r.report = learn::evaluate(r.model, split.test);
    r.train = split.train.size();
    r.test = split.test.size();
    r.total = r.train + r.test;
    return r;
}

std::map<learn::ClassifierKind, EvaluationReport> run_classifier_suite(const Split& split,
                                                                      const learn::HyperParams& params) {
    std::map<learn::ClassifierKind, EvaluationReport> out;
    for (auto kind : learn::kAllClassifiers) {
        const auto model = learn::train(kind, split.train, params);
        out[kind] = learn::evaluate(model, split.test);
    }
    return out;
}

RobustnessRun run_attacks(const SvmRun& svm, const Split& split, const ReproConfig& cfg) {
    RobustnessRun out;
    const auto pool = attack::baseline_rows(split.train);
    const auto attack_seed = derive_seed(cfg.seed, fnv1a("attack"));
    for (double p : cfg.attack_fractions) {
        out.fractions.push_back(attack::run_robustness(
            svm.model, split.test, pool, attack::AttackSpec::mimic_all(p, cfg.attack_repeats, attack_seed)));
    }
    const auto ranked = attack::rank_features(split.train);
    for (auto k : cfg.subset_sizes) {
        if (k == 0 || k > ranked.size()) continue;
        std::vector<std::string> names(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));
        out.subsets.push_back(attack::run_robustness(
            svm.model, split.test, pool, attack::AttackSpec::mimic_subset(std::move(names), cfg.attack_repeats, attack_seed)));
    }
    return out;
}

LexicalSummary lexical_summary(const std::string& campaign, const std::vector<FeatureVector>& features) {
    LexicalSummary s;
    s.campaign = campaign;
    s.accounts = features.size();
    for (const auto& f : features) {
        if (!f.lexical.has_english) continue;
        const auto& t = f.lexical.stats;
        ++s.english_accounts;
        s.chars += static_cast<double>(t.n_chars);
        s.words += static_cast<double>(t.n_words);
        s.sentences += static_cast<double>(t.n_sentences);
        s.word_length += t.avg_word_length;
        s.sentence_length += t.avg_sentence_length;
        s.richness += t.richness;
        s.ari += t.ari;
        s.flesch += t.flesch;
    }
    if (s.english_accounts > 0) {
        const auto n = static_cast<double>(s.english_accounts);
        for (double* v : {&s.chars, &s.words, &s.sentences, &s.word_length, &s.sentence_length, &s.richness, &s.ari,
                          &s.flesch}) {
            *v /= n;
        }
    }
    return s;
}

cocluster::CoclusterOutcome run_campaign_cocluster(const Dataset& campaign, const ReproConfig& cfg) {
    cocluster::CoclusterConfig cc;
    cc.min_likes = cfg.min_likes;
    cc.seed = derive_seed(cfg.seed, fnv1a("cocluster"));
    return cocluster::run_cocluster(campaign, cc);
}

ReproResult run_repro(const ReproConfig& cfg) {
    ReproResult r;
    r.config = cfg;
    r.cohorts = generate_cohorts(cfg);
    r.lexical.push_back(lexical_summary("Baseline", featurize(r.cohorts.baseline.data)));

    for (const auto& farm : r.cohorts.farms) {
        CampaignResult c;
        c.preset = farm.spec.name;
        c.campaign = farm.spec.campaign;
        c.archetype = farm.spec.archetype;
        r.lexical.push_back(lexical_summary(c.campaign, featurize(farm.data)));

        const Dataset campaign = r.cohorts.campaign(farm.spec.name);
        const auto features = featurize(campaign);
        c.cocluster = run_campaign_cocluster(campaign, cfg);

        Split combined;
        for (auto set : {learn::FeatureSet::non_lexical, learn::FeatureSet::lexical, learn::FeatureSet::combined}) {
            auto split = make_split(features, campaign, set, cfg);
            c.svm[set] = run_svm(split, cfg);
            if (set == learn::FeatureSet::combined) combined = std::move(split);
        }
        const auto& svm = c.svm.at(learn::FeatureSet::combined);
        c.suite = run_classifier_suite(combined, svm.grid.best);
        c.robustness = run_attacks(svm, combined, cfg);
        r.campaigns.push_back(std::move(c));
    }
    return r;
}

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool is_bursty(const CampaignResult& c) { return c.archetype == synth::Archetype::bursty_farm; }

} // namespace

std::vector<BandCheck> check_cocluster_contrast(const ReproResult& r) {
    std::vector<BandCheck> out;
    for (const auto& c : r.campaigns) {
        const auto& rep = c.cocluster.report;
        if (is_bursty(c)) {
            out.push_back({c.campaign + " cocluster precision >= 0.85", rep.precision() >= 0.85,
                           fmt("precision=%.4f", rep.precision())});
        } else {
            out.push_back({c.campaign + " cocluster precision <= 0.60", rep.precision() <= 0.60,
                           fmt("precision=%.4f", rep.precision())});
            out.push_back({c.campaign + " cocluster recall >= 0.95", rep.recall() >= 0.95,
                           fmt("recall=%.4f", rep.recall())});
        }
    }
    return out;
}

std::vector<BandCheck> check_feature_sets(const ReproResult& r) {
    std::vector<BandCheck> out;
    for (const auto& c : r.campaigns) {
        const double all = c.svm.at(learn::FeatureSet::combined).report.f1();
        out.push_back({c.campaign + " combined SVM F1 >= 0.95", all >= 0.95, fmt("F1=%.4f", all)});
        if (!is_bursty(c)) {
            const double nl = c.svm.at(learn::FeatureSet::non_lexical).report.f1();
            out.push_back({c.campaign + " combined F1 - non-lexical F1 >= 0.10", all - nl >= 0.10,
                           fmt("combined=%.4f non_lexical=%.4f gap=%.4f", all, nl, all - nl)});
        }
    }
    return out;
}

std::vector<BandCheck> check_classifier_order(const ReproResult& r) {
    std::vector<BandCheck> out;
    for (const auto& c : r.campaigns) {
        const double svm = c.suite.at(learn::ClassifierKind::svm).f1();
        for (const auto& [kind, rep] : c.suite) {
            if (kind == learn::ClassifierKind::svm) continue;
            out.push_back({c.campaign + " SVM F1 >= " + std::string(learn::display_name(kind)) + " F1", svm >= rep.f1(),
                           fmt("svm=%.4f other=%.4f", svm, rep.f1())});
        }
    }
    return out;
}

std::vector<BandCheck> check_robustness(const ReproResult& r) {
    std::vector<BandCheck> out;
    for (const auto& c : r.campaigns) {
        const auto& fr = c.robustness.fractions;
        auto at = [&](double p) -> const attack::RobustnessReport* {
            for (const auto& x : fr) {
                if (std::abs(x.spec.fraction - p) < 1e-12) return &x;
            }
            return nullptr;
        };
        if (const auto* z = at(0.0)) {
            bool exact = true;
            for (const auto& rep : z->repeats) exact = exact && rep.delta_f1 == 0.0;
            out.push_back({c.campaign + " p=0 leaves F1 unchanged", exact, fmt("mean dF1=%.3g", z->mean_delta_f1)});
        }
        if (const auto* p3 = at(0.3)) {
            out.push_back({c.campaign + " p=0.3 mean F1 >= 0.70", p3->mean_f1 >= 0.70, fmt("F1=%.4f", p3->mean_f1)});
            out.push_back({c.campaign + " p=0.3 mean FPR <= 0.20", p3->mean_fpr <= 0.20, fmt("FPR=%.4f", p3->mean_fpr)});
        }
        for (const auto& s : c.robustness.subsets) {
            if (s.spec.features.size() != 1) continue;
            out.push_back({c.campaign + " single-feature mimicry dF1 <= 0.10 (" + s.spec.features[0] + ")",
                           s.mean_delta_f1 <= 0.10, fmt("dF1=%.4f", s.mean_delta_f1)});
        }
        // Repeat means must not fall by more than the combined 95% half-width.
        bool monotone = true;
        std::string detail;
        const attack::RobustnessReport* prev = nullptr;
        for (double p : {0.0, 0.1, 0.2, 0.3}) {
            const auto* cur = at(p);
            if (!cur) continue;
            detail += fmt("%.2f", cur->mean_delta_f1) + " ";
            if (prev) {
                const double n = static_cast<double>(cur->repeats.size());
                const double hw = 1.96 * std::sqrt((prev->delta_f1_sd * prev->delta_f1_sd +
                                                    cur->delta_f1_sd * cur->delta_f1_sd) / n);
                if (cur->mean_delta_f1 < prev->mean_delta_f1 - hw) monotone = false;
            }
            prev = cur;
        }
        out.push_back({c.campaign + " dF1 non-decreasing over p", monotone, "means " + detail});
    }
    return out;
}

std::vector<BandCheck> check_all(const ReproResult& r) {
    std::vector<BandCheck> out;
    for (auto part : {check_cocluster_contrast(r), check_feature_sets(r), check_classifier_order(r), check_robustness(r)}) {
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

} // namespace farmlens::experiment
