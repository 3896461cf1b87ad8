#include "farmlens/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "farmlens/error.hpp"
#include "farmlens/features.hpp"
#include "farmlens/parallel.hpp"
#include "farmlens/rng.hpp"
#include "report_util.hpp"

namespace farmlens::attack {

AttackSpec AttackSpec::mimic_all(double p, std::size_t repeats, std::uint64_t seed) {
    AttackSpec s;
    s.mode = AttackMode::mimic_all;
    s.fraction = p;
    s.repeats = repeats;
    s.seed = seed;
    return s;
}

AttackSpec AttackSpec::mimic_subset(std::vector<std::string> names, std::size_t repeats, std::uint64_t seed) {
    AttackSpec s;
    s.mode = AttackMode::mimic_subset;
    s.features = std::move(names);
    s.repeats = repeats;
    s.seed = seed;
    return s;
}

std::string AttackSpec::mode_name() const {
    return mode == AttackMode::mimic_all ? "mimic_all" : "mimic_subset";
}

std::string AttackSpec::parameter() const {
    if (mode == AttackMode::mimic_all) return format_double(fraction);
    std::string out;
    for (const auto& f : features) {
        if (!out.empty()) out += '+';
        out += f;
    }
    return out;
}

void validate(const AttackSpec& spec) {
    if (spec.repeats == 0) throw InvalidArgument("attack: repeats must be positive");
    if (spec.mode == AttackMode::mimic_all) {
        if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) throw InvalidArgument("attack: fraction must lie in [0, 1]");
        return;
    }
    if (spec.features.empty()) throw InvalidArgument("attack: mimic_subset needs at least one feature");
    for (const auto& f : spec.features) {
        const auto it = std::find(kFeatureNames.begin(), kFeatureNames.begin() + kPaperFeatureCount, f);
        if (it == kFeatureNames.begin() + kPaperFeatureCount) throw InvalidArgument("attack: unknown feature '" + f + "'");
    }
}

namespace {

std::vector<std::size_t> farm_rows(const learn::FeatureMatrix& m) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.labels[i] > 0) out.push_back(i);
    }
    return out;
}

} // namespace

learn::FeatureMatrix apply_attack(const learn::FeatureMatrix& test, const learn::FeatureMatrix& baseline_pool,
                                  const AttackSpec& spec, std::uint64_t seed) {
    validate(spec);
    if (baseline_pool.size() == 0) throw InvalidArgument("attack: baseline donor pool is empty");
    if (baseline_pool.columns != test.columns) throw InvalidArgument("attack: donor pool columns differ from test columns");

    std::vector<std::size_t> columns;
    if (spec.mode == AttackMode::mimic_all) {
        columns.resize(test.width());
        std::iota(columns.begin(), columns.end(), 0);
    } else {
        for (const auto& f : spec.features) {
            const auto it = std::find(test.columns.begin(), test.columns.end(), f);
            if (it == test.columns.end()) throw InvalidArgument("attack: feature '" + f + "' is not a column of the matrix");
            columns.push_back(static_cast<std::size_t>(it - test.columns.begin()));
        }
    }

    const auto farms = farm_rows(test);
    std::vector<std::size_t> targets;
    if (spec.mode == AttackMode::mimic_all) {
        const double want = spec.fraction * static_cast<double>(farms.size());
        const auto k = static_cast<std::size_t>(std::ceil(want - 1e-9));
        Rng pick(derive_seed(seed, 1));
        auto chosen = pick.sample_without_replacement(farms.size(), std::min(k, farms.size()));
        std::sort(chosen.begin(), chosen.end());
        for (auto c : chosen) targets.push_back(farms[c]);
    } else {
        targets = farms;
    }

    // Donors come from their own stream so that mimicking every column of
    // every farm row matches mimic_all at p = 1 for the same seed.
    Rng donors(derive_seed(seed, 2));
    learn::FeatureMatrix out = test;
    for (auto row : targets) {
        const auto& donor = baseline_pool.rows[donors.below(baseline_pool.size())];
        for (auto c : columns) out.rows[row][c] = donor[c];
    }
    return out;
}

learn::FeatureMatrix baseline_rows(const learn::FeatureMatrix& m) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.labels[i] < 0) idx.push_back(i);
    }
    return learn::subset(m, idx);
}

RobustnessReport run_robustness(const learn::TrainedModel& model, const learn::FeatureMatrix& test,
                                const learn::FeatureMatrix& baseline_pool, const AttackSpec& spec) {
    validate(spec);
    RobustnessReport r;
    r.spec = spec;
    r.reference_f1 = learn::evaluate(model, test).f1();
    r.repeats.resize(spec.repeats);
    parallel_for(spec.repeats, [&](std::size_t i) {
        const auto attacked = apply_attack(test, baseline_pool, spec, derive_seed(spec.seed, i));
        auto& rep = r.repeats[i];
        rep.repeat = i;
        rep.report = learn::evaluate(model, attacked);
        rep.delta_f1 = r.reference_f1 - rep.report.f1();
    });
    const auto n = static_cast<double>(spec.repeats);
    for (const auto& rep : r.repeats) {
        r.mean_f1 += rep.report.f1();
        r.mean_fpr += rep.report.false_positive_rate();
        r.mean_delta_f1 += rep.delta_f1;
    }
    r.mean_f1 /= n;
    r.mean_fpr /= n;
    r.mean_delta_f1 /= n;
    if (spec.repeats > 1) {
        double ss = 0;
        for (const auto& rep : r.repeats) ss += (rep.delta_f1 - r.mean_delta_f1) * (rep.delta_f1 - r.mean_delta_f1);
        r.delta_f1_sd = std::sqrt(ss / (n - 1));
    }
    return r;
}

std::string RobustnessReport::to_json() const {
    nlohmann::json j;
    j["mode"] = spec.mode_name();
    j["parameter"] = spec.parameter();
    j["repeats"] = spec.repeats;
    j["seed"] = spec.seed;
    j["reference_f1"] = reference_f1;
    j["mean_f1"] = mean_f1;
    j["mean_fpr"] = mean_fpr;
    j["mean_delta_f1"] = mean_delta_f1;
    j["delta_f1_sd"] = delta_f1_sd;
    auto& per = j["per_repeat"] = nlohmann::json::array();
    for (const auto& rep : repeats) {
        per.push_back({{"repeat", rep.repeat},
                       {"f1", rep.report.f1()},
                       {"fpr", rep.report.false_positive_rate()},
                       {"delta_f1", rep.delta_f1}});
    }
    return j.dump();
}

std::vector<std::string> rank_features(const learn::FeatureMatrix& train) {
    struct Score {
        double effect;
        std::size_t column;
    };
    std::vector<Score> scores;
    for (std::size_t c = 0; c < train.width(); ++c) {
        double sum[2] = {0, 0}, sq[2] = {0, 0};
        std::size_t n[2] = {0, 0};
        for (std::size_t i = 0; i < train.size(); ++i) {
            const int k = train.labels[i] > 0 ? 1 : 0;
            sum[k] += train.rows[i][c];
            sq[k] += train.rows[i][c] * train.rows[i][c];
            ++n[k];
        }
        double effect = 0;
        if (n[0] > 0 && n[1] > 0) {
            const double m0 = sum[0] / static_cast<double>(n[0]), m1 = sum[1] / static_cast<double>(n[1]);
            const double v0 = std::max(0.0, sq[0] / static_cast<double>(n[0]) - m0 * m0);
            const double v1 = std::max(0.0, sq[1] / static_cast<double>(n[1]) - m1 * m1);
            const double pooled = std::sqrt((v0 + v1) / 2.0);
            effect = pooled > 1e-12 ? std::abs(m1 - m0) / pooled : 0.0;
        }
        scores.push_back({effect, c});
    }
    std::stable_sort(scores.begin(), scores.end(), [](const Score& a, const Score& b) { return a.effect > b.effect; });
    std::vector<std::string> out;
    for (const auto& s : scores) out.push_back(train.columns[s.column]);
    return out;
}

void write_robustness_header(std::ostream& out, bool with_campaign) {
    if (with_campaign) out << "campaign,";
    out << "mode,parameter,repeat,F1,FPR,dF1\n";
}

void write_robustness_rows(std::ostream& out, const RobustnessReport& r, const std::string& campaign) {
    for (const auto& rep : r.repeats) {
        if (!campaign.empty()) out << csv_field(campaign) << ',';
        out << r.spec.mode_name() << ',' << csv_field(r.spec.parameter()) << ',' << rep.repeat << ','
            << format_double(rep.report.f1()) << ',' << format_double(rep.report.false_positive_rate()) << ','
            << format_double(rep.delta_f1) << '\n';
    }
}

} // namespace farmlens::attack
