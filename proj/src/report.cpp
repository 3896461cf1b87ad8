#include "farmlens/report.hpp"

#include <fstream>
#include <ostream>

#include "farmlens/error.hpp"
#include "farmlens/graphkit.hpp"
#include "farmlens/reference_tables.hpp"
#include "report_util.hpp"

namespace farmlens::report {

namespace {

std::vector<std::string> age_bins() { return {kAgeBinNames.begin(), kAgeBinNames.end()}; }

std::string pct(double v) { return format_fixed(100.0 * v, 2); }

void write_confusion(std::ostream& out, const EvaluationReport& r) {
    out << r.tp << ',' << r.fp << ',' << r.tn << ',' << r.fn << ',' << pct(r.precision()) << ',' << pct(r.recall())
        << ',' << pct(r.accuracy()) << ',' << pct(r.f1());
}

const char* const kConfusionHeader = "TP,FP,TN,FN,precision,recall,accuracy,F1";

} // namespace

std::vector<KlRow> kl_rows(const experiment::ReproResult* r) {
    const auto facebook = graph::CategoricalDist::from_weights(age_bins(), reference::kFacebookAges.age);
    auto make = [&](std::string source, std::string campaign, const graph::CategoricalDist& d, double printed) {
        KlRow row;
        row.source = std::move(source);
        row.campaign = std::move(campaign);
        for (std::size_t i = 0; i < kAgeBinCount; ++i) row.age[i] = 100.0 * d.probabilities()[i];
        row.printed = printed;
        row.kl_base2 = graph::kl_divergence(d, facebook, graph::LogBase::two);
        row.kl_reverse_nats = graph::kl_divergence(facebook, d, graph::LogBase::e);
        return row;
    };
    std::vector<KlRow> rows;
    for (const auto& ref : reference::kCampaignAges) {
        rows.push_back(make("published", std::string(ref.campaign),
                            graph::CategoricalDist::from_weights(age_bins(), ref.age), ref.kl));
    }
    if (r) {
        for (const auto& f : r->cohorts.farms) {
            rows.push_back(make("synthetic", f.spec.campaign, graph::age_distribution(f.data), -1));
        }
    }
    return rows;
}

void write_table2(std::ostream& out, const std::vector<KlRow>& rows) {
    out << "source,campaign";
    for (auto b : kAgeBinNames) out << ",age_" << b;
    out << ",kl_printed,kl_bits_campaign_facebook,kl_nats_facebook_campaign\n";
    for (const auto& row : rows) {
        out << row.source << ',' << row.campaign;
        for (double a : row.age) out << ',' << format_fixed(a, 2);
        out << ',' << (row.printed >= 0 ? format_fixed(row.printed, 2) : std::string()) << ','
            << format_fixed(row.kl_base2, 4) << ',' << format_fixed(row.kl_reverse_nats, 4) << '\n';
    }
}

void write_table4(std::ostream& out, const experiment::ReproResult& r) {
    out << "campaign,archetype,users_kept,pages_kept,users_dropped," << kConfusionHeader << ",tie_warning\n";
    for (const auto& c : r.campaigns) {
        const auto& o = c.cocluster;
        out << c.campaign << ',' << synth::to_string(c.archetype) << ',' << o.graph.users.size() << ','
            << o.graph.pages.size() << ',' << o.graph.dropped_users.size() << ',';
        write_confusion(out, o.report);
        out << ',' << (o.report.tie_warning ? 1 : 0) << '\n';
    }
}

void write_table5(std::ostream& out, const experiment::ReproResult& r) {
    out << "campaign,accounts,english_accounts,avg_chars,avg_words,avg_sentences,avg_word_length,"
           "avg_sentence_length,richness,ari,flesch\n";
    for (const auto& s : r.lexical) {
        out << s.campaign << ',' << s.accounts << ',' << s.english_accounts << ',' << format_fixed(s.chars, 1) << ','
            << format_fixed(s.words, 1) << ',' << format_fixed(s.sentences, 1) << ',' << format_fixed(s.word_length, 3)
            << ',' << format_fixed(s.sentence_length, 3) << ',' << format_fixed(s.richness, 4) << ','
            << format_fixed(s.ari, 3) << ',' << format_fixed(s.flesch, 3) << '\n';
    }
}

void write_table6(std::ostream& out, const experiment::ReproResult& r) {
    out << "campaign";
    for (auto k : learn::kAllClassifiers) out << ',' << learn::to_string(k);
    out << '\n';
    for (const auto& c : r.campaigns) {
        out << c.campaign;
        for (auto k : learn::kAllClassifiers) out << ',' << pct(c.suite.at(k).f1());
        out << '\n';
    }
}

namespace {
void write_svm_rows(std::ostream& out, const experiment::ReproResult& r, bool combined_only) {
    out << "campaign,features,total,train,test," << kConfusionHeader << ",gamma,nu,cv_f1\n";
    for (const auto& c : r.campaigns) {
        for (const auto& [set, run] : c.svm) {
            if (combined_only && set != learn::FeatureSet::combined) continue;
            out << c.campaign << ',' << learn::to_string(set) << ',' << run.total << ',' << run.train << ','
                << run.test << ',';
            write_confusion(out, run.report);
            out << ',' << format_double(run.grid.best.gamma) << ',' << format_double(run.grid.best.nu) << ','
                << format_fixed(run.grid.best_f1, 4) << '\n';
        }
    }
}
} // namespace

void write_table7(std::ostream& out, const experiment::ReproResult& r) { write_svm_rows(out, r, false); }

void write_table8(std::ostream& out, const experiment::ReproResult& r) { write_svm_rows(out, r, true); }

void write_table9(std::ostream& out, const experiment::ReproResult& r) {
    attack::write_robustness_header(out, true);
    for (const auto& c : r.campaigns) {
        for (const auto& rep : c.robustness.fractions) attack::write_robustness_rows(out, rep, c.campaign);
        for (const auto& rep : c.robustness.subsets) attack::write_robustness_rows(out, rep, c.campaign);
    }
}

std::map<std::string, std::string> provenance(const experiment::ReproConfig& cfg) {
    std::string presets = cfg.baseline_preset;
    for (const auto& p : cfg.farm_presets) presets += "+" + p;
    return {{"seed", std::to_string(cfg.seed)}, {"preset", presets}, {"version", std::string(kSchemaVersion)}};
}

std::vector<std::string> write_repro_outputs(const std::filesystem::path& dir, const experiment::ReproResult& r) {
    std::filesystem::create_directories(dir);
    const auto prov = provenance(r.config);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, auto&& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        write_provenance(out, prov);
        body(out);
        if (!out) throw Error("failed writing " + (dir / name).string());
        written.push_back(name);
    };
    emit("table2_kl.csv", [&](std::ostream& o) { write_table2(o, kl_rows(&r)); });
    emit("table4_cocluster.csv", [&](std::ostream& o) { write_table4(o, r); });
    emit("table5_lexical.csv", [&](std::ostream& o) { write_table5(o, r); });
    emit("table6_classifiers.csv", [&](std::ostream& o) { write_table6(o, r); });
    emit("table7_feature_sets.csv", [&](std::ostream& o) { write_table7(o, r); });
    emit("table8_combined.csv", [&](std::ostream& o) { write_table8(o, r); });
    emit("table9_attack.csv", [&](std::ostream& o) { write_table9(o, r); });
    return written;
}

} // namespace farmlens::report
