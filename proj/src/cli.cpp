#include "farmlens/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "farmlens/attack.hpp"
#include "farmlens/cocluster.hpp"
#include "farmlens/error.hpp"
#include "farmlens/experiment.hpp"
#include "farmlens/features.hpp"
#include "farmlens/graphkit.hpp"
#include "farmlens/learn.hpp"
#include "farmlens/model.hpp"
#include "farmlens/report.hpp"
#include "farmlens/rng.hpp"
#include "farmlens/synth.hpp"
#include "report_util.hpp"

namespace farmlens::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// "lo:hi" exponents of two, e.g. "-10:0".
std::pair<int, int> parse_range(const std::string& s, const char* flag) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument("no colon");
        std::size_t used = 0;
        const int lo = std::stoi(s.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing");
        const auto rest = s.substr(colon + 1);
        const int hi = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("trailing");
        if (lo > hi) throw std::invalid_argument("order");
        if (lo < -10 || hi > 0) throw InvalidArgument(std::string(flag) + " exponents must lie in [-10, 0]");
        return {lo, hi};
    } catch (const InvalidArgument&) {
        throw;
    } catch (const std::exception&) {
        throw InvalidArgument(std::string(flag) + " expects lo:hi exponents with lo <= hi, got '" + s + "'");
    }
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + p.string() + "'");
    return out;
}

Dataset load_input(const std::string& path) {
    if (!fs::exists(path)) throw InvalidArgument("input file '" + path + "' does not exist");
    return load_dataset(path);
}

learn::FeatureSet feature_set_of(const std::string& s) {
    const auto set = learn::parse_feature_set(s);
    if (!set) throw InvalidArgument("--features must be nl, lex, all or all+r");
    return *set;
}

learn::FeatureMatrix matrix_for(const Dataset& d, learn::FeatureSet set) {
    const auto features = featurize(d);
    return set == learn::FeatureSet::lexical ? learn::english_only(features, set) : learn::to_matrix(features, set);
}

struct Options {
    std::vector<std::string> presets;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out, in, model, pool;
    double train_fraction = 0;
    std::string features = "all";
    std::string clf = "svm";
    std::string gamma_range = "-10:0", nu_range = "-10:0";
    bool grid = false;
    double gamma = 0.125, nu = 0.125;
    std::int64_t min_likes = 10;
    std::size_t k = 2;
    std::size_t folds = 5;
    std::size_t repeats = 10;
    double fraction = -1;
    std::vector<std::string> mimic;
    bool strict = false;
    bool no_audit = false;
};

int cmd_gen(const Options& o, std::ostream& out) {
    if (o.presets.empty()) throw InvalidArgument("gen needs at least one --preset");
    Dataset d;
    bool first = true;
    for (const auto& name : o.presets) {
        auto spec = synth::preset(name);
        if (o.n > 0) spec.n_accounts = o.n;
        auto part = synth::generate(spec, o.seed, false);
        const auto audit = synth::verify(part, spec);
        for (const auto& e : audit.entries) {
            out << "audit " << name << ' ' << e.target << '=' << format_double(e.measured) << " band [" << format_double(e.band.lo)
                << ", " << format_double(e.band.hi) << "] " << (e.pass ? "pass" : "FAIL") << '\n';
        }
        if (!o.no_audit && !audit.pass()) {
            throw Error("synthetic cohort '" + name + "' failed its audit: " + audit.failures());
        }
        d = first ? std::move(part) : merge(d, part);
        first = false;
    }
    std::string joined;
    for (const auto& p : o.presets) joined += (joined.empty() ? "" : "+") + p;
    d.provenance["preset"] = joined;
    save_dataset(o.out, d);
    if (o.train_fraction > 0) {
        if (o.train_fraction >= 1) throw InvalidArgument("--train-fraction must lie in (0, 1)");
        const auto [train, test] = split_train_test(d, o.train_fraction, derive_seed(o.seed, fnv1a("split")));
        const fs::path base(o.out);
        const auto stem = (base.parent_path() / base.stem()).string();
        save_dataset(stem + ".train.jsonl", train);
        save_dataset(stem + ".test.jsonl", test);
        out << "wrote " << stem << ".train.jsonl (" << train.accounts.size() << ") and " << stem << ".test.jsonl ("
            << test.accounts.size() << ")\n";
    }
    out << "wrote " << o.out << " (" << d.accounts.size() << " accounts, " << d.pages.size() << " pages)\n";
    return kExitOk;
}

int cmd_featurize(const Options& o, std::ostream& out) {
    const auto d = load_input(o.in);
    const auto f = featurize(d);
    auto file = open_out(o.out);
    write_provenance(file, {{"seed", std::to_string(o.seed)},
                            {"preset", d.provenance.count("preset") ? d.provenance.at("preset") : "-"},
                            {"version", std::string(kSchemaVersion)}});
    write_features_csv(file, f);
    out << "wrote " << f.size() << " feature rows to " << o.out << '\n';
    return kExitOk;
}

std::map<std::string, std::string> data_provenance(const Dataset& d, std::uint64_t seed) {
    return {{"seed", std::to_string(seed)},
            {"preset", d.provenance.count("preset") ? d.provenance.at("preset") : "-"},
            {"version", std::string(kSchemaVersion)}};
}

int cmd_graph_report(const Options& o, std::ostream& out) {
    const auto d = load_input(o.in);
    const fs::path dir(o.out);
    fs::create_directories(dir);
    const auto prov = data_provenance(d, o.seed);

    std::set<Label> labels;
    for (const auto& a : d.accounts) labels.insert(a.label);
    const Dataset baseline = filter_accounts(d, [](const Account& a) { return !a.label.is_farm(); });
    std::optional<graph::CategoricalDist> baseline_ages;
    if (!baseline.accounts.empty()) baseline_ages = graph::age_distribution(baseline);

    auto summary = open_out(dir / "cohorts.csv");
    write_provenance(summary, prov);
    summary << "cohort,accounts,internal_friendships,two_hop_nodes,two_hop_mean_degree,share_in_clique_gt10,"
               "page_likes_median,kl_age_bits_vs_baseline,max_burstiness_2h\n";
    for (const auto& label : labels) {
        const Dataset c = filter_accounts(d, [&](const Account& a) { return a.label == label; });
        const auto friends = graph::SocialGraph::from_dataset(c);
        const auto two_hop = graph::two_hop_graph(c);
        const auto structure = graph::structure_report(two_hop);
        const auto likes = graph::page_like_count_summary(c, [&](const Label& l) { return l == label; });
        std::string kl;
        if (baseline_ages) kl = format_fixed(graph::kl_divergence(graph::age_distribution(c), *baseline_ages), 4);
        std::map<std::string, std::size_t> likers;
        for (const auto& a : c.accounts) {
            for (const auto& l : a.liked_pages) ++likers[l.page];
        }
        double burst = 0;
        for (const auto& [page, n] : likers) {
            if (n < 10) continue;
            burst = std::max(burst, graph::burst_profile(graph::page_timeline(c, page), 2 * 3600).burstiness);
        }
        summary << csv_field(label.str()) << ',' << c.accounts.size() << ',' << friends.edge_count() << ','
                << two_hop.size() << ',' << format_fixed(structure.mean_degree(), 3) << ','
                << format_fixed(structure.share_in_clique_larger_than(10), 4) << ',' << format_double(likes.median)
                << ',' << kl << ',' << format_fixed(burst, 4) << '\n';
    }

    auto pages = open_out(dir / "jaccard_pages.csv");
    write_provenance(pages, prov);
    graph::write_similarity_csv(pages, graph::jaccard_matrix(graph::campaign_page_sets(d)));
    auto likers = open_out(dir / "jaccard_likers.csv");
    write_provenance(likers, prov);
    graph::write_similarity_csv(likers, graph::jaccard_matrix(graph::campaign_liker_sets(d)));
    out << "wrote cohorts.csv, jaccard_pages.csv, jaccard_likers.csv to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_cocluster(const Options& o, std::ostream& out) {
    const auto d = load_input(o.in);
    cocluster::CoclusterConfig cfg;
    cfg.k = o.k;
    cfg.min_likes = o.min_likes;
    cfg.seed = o.seed;
    const auto outcome = cocluster::run_cocluster(d, cfg);
    if (!o.out.empty()) {
        auto file = open_out(o.out);
        write_provenance(file, data_provenance(d, o.seed));
        cocluster::write_scatter_csv(file, d, outcome);
    }
    auto j = json::parse(outcome.report.to_json());
    j["positive_cluster"] = outcome.positive;
    j["users_kept"] = outcome.graph.users.size();
    j["pages_kept"] = outcome.graph.pages.size();
    j["singular_values"] = outcome.result.singular_values;
    out << j.dump() << '\n';
    return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    const auto d = load_input(o.in);
    const auto kind = learn::parse_classifier(o.clf);
    if (!kind) throw InvalidArgument("--clf must be one of svm, knn, nb, tree, ada, rf");
    const auto m = matrix_for(d, feature_set_of(o.features));
    learn::HyperParams h;
    h.seed = o.seed;
    h.gamma = o.gamma;
    h.nu = o.nu;
    if (o.grid) {
        if (*kind != learn::ClassifierKind::svm) throw InvalidArgument("--grid applies to --clf svm only");
        learn::GridSpec g;
        std::tie(g.gamma_lo, g.gamma_hi) = parse_range(o.gamma_range, "--gamma-range");
        std::tie(g.nu_lo, g.nu_hi) = parse_range(o.nu_range, "--nu-range");
        g.folds = o.folds;
        const auto result = learn::grid_search(m, g, h);
        h = result.best;
        out << "grid search: gamma=" << format_double(h.gamma) << " nu=" << format_double(h.nu)
            << " cv_f1=" << format_fixed(result.best_f1, 4) << '\n';
    }
    const auto model = learn::train(*kind, m, h);
    for (const auto& w : model.warnings) out << "warning: " << w << '\n';
    auto file = open_out(o.out);
    learn::save_model(file, model);
    out << "trained " << learn::display_name(*kind) << " on " << m.size() << " rows; wrote " << o.out << '\n';
    return kExitOk;
}

learn::FeatureSet set_of_model(const learn::TrainedModel& model) {
    for (auto s : {learn::FeatureSet::non_lexical, learn::FeatureSet::lexical, learn::FeatureSet::combined,
                   learn::FeatureSet::extended}) {
        std::vector<std::string> names;
        for (auto c : learn::feature_columns(s)) names.emplace_back(kFeatureNames[c]);
        if (names == model.columns) return s;
    }
    throw SchemaError("model columns do not match a known feature set");
}

int cmd_eval(const Options& o, std::ostream& out) {
    const auto model = learn::load_model(o.model);
    const auto d = load_input(o.in);
    const auto m = matrix_for(d, set_of_model(model));
    const auto report = learn::evaluate(model, m);
    if (!o.out.empty()) {
        auto file = open_out(o.out);
        write_provenance(file, data_provenance(d, o.seed));
        file << "classifier,features,TP,FP,TN,FN,precision,recall,accuracy,F1\n"
             << learn::to_string(model.kind) << ',' << learn::to_string(set_of_model(model)) << ',' << report.tp << ','
             << report.fp << ',' << report.tn << ',' << report.fn << ',' << format_double(report.precision()) << ','
             << format_double(report.recall()) << ',' << format_double(report.accuracy()) << ','
             << format_double(report.f1()) << '\n';
    }
    out << report.to_json() << '\n';
    return kExitOk;
}

int cmd_attack(const Options& o, std::ostream& out) {
    const auto model = learn::load_model(o.model);
    const auto set = set_of_model(model);
    const auto test = matrix_for(load_input(o.in), set);
    const auto pool = attack::baseline_rows(matrix_for(load_input(o.pool), set));
    const bool subset = !o.mimic.empty();
    if (subset == (o.fraction >= 0)) throw InvalidArgument("attack needs exactly one of --fraction or --mimic");
    const auto spec = subset ? attack::AttackSpec::mimic_subset(o.mimic, o.repeats, o.seed)
                             : attack::AttackSpec::mimic_all(o.fraction, o.repeats, o.seed);
    const auto r = attack::run_robustness(model, test, pool, spec);
    if (!o.out.empty()) {
        auto file = open_out(o.out);
        write_provenance(file, {{"seed", std::to_string(o.seed)}, {"preset", "-"}, {"version", std::string(kSchemaVersion)}});
        attack::write_robustness_header(file, false);
        attack::write_robustness_rows(file, r);
    }
    out << r.to_json() << '\n';
    return kExitOk;
}

int cmd_repro(const Options& o, std::ostream& out) {
    experiment::ReproConfig cfg;
    cfg.seed = o.seed;
    cfg.min_likes = o.min_likes;
    cfg.attack_repeats = o.repeats;
    std::tie(cfg.grid.gamma_lo, cfg.grid.gamma_hi) = parse_range(o.gamma_range, "--gamma-range");
    std::tie(cfg.grid.nu_lo, cfg.grid.nu_hi) = parse_range(o.nu_range, "--nu-range");
    cfg.grid.folds = o.folds;
    if (!o.presets.empty()) cfg.farm_presets = o.presets;
    const auto result = experiment::run_repro(cfg);
    const auto files = report::write_repro_outputs(o.out, result);
    for (const auto& f : files) out << "wrote " << (fs::path(o.out) / f).string() << '\n';
    if (!o.strict) return kExitOk;
    bool ok = true;
    for (const auto& c : experiment::check_all(result)) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << " [" << c.detail << "]\n";
        ok = ok && c.pass;
    }
    return ok ? kExitOk : kExitBandFailure;
}

} // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"farmlens: like-farm measurement and detection toolkit"};
    app.require_subcommand(1, 1);
    Options o;

    auto seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "Master seed")->capture_default_str(); };
    auto input = [&](CLI::App* s) { s->add_option("--in", o.in, "Input dataset (JSONL)")->required(); };

    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset from presets");
    gen->add_option("--preset", o.presets, "Preset name (repeatable): " + [] {
        std::string s;
        for (const auto& n : synth::preset_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }())->required();
    gen->add_option("--n", o.n, "Override the account count of every preset");
    gen->add_option("-o,--out", o.out, "Output JSONL path")->required();
    gen->add_option("--train-fraction", o.train_fraction, "Also write stratified .train/.test splits");
    gen->add_flag("--no-audit", o.no_audit, "Skip the post-generation audit");
    seed(gen);

    auto* feat = app.add_subcommand("featurize", "Extract per-account feature vectors to CSV");
    input(feat);
    feat->add_option("-o,--out", o.out, "Output CSV path")->required();
    seed(feat);

    auto* graph_cmd = app.add_subcommand("graph-report", "Social-graph, demographic and temporal summaries");
    input(graph_cmd);
    graph_cmd->add_option("-o,--out", o.out, "Output directory")->required();
    seed(graph_cmd);

    auto* cc = app.add_subcommand("cocluster", "Spectral co-clustering of the user-page like graph");
    input(cc);
    cc->add_option("--min-likes", o.min_likes, "Drop users and pages with fewer likes")->capture_default_str();
    cc->add_option("--k", o.k, "Number of clusters")->capture_default_str();
    cc->add_option("-o,--out", o.out, "Scatter CSV path");
    seed(cc);

    auto* train = app.add_subcommand("train", "Train a classifier on a labeled dataset");
    input(train);
    train->add_option("--features", o.features, "Feature set: nl, lex, all, all+r")->capture_default_str();
    train->add_option("--clf", o.clf, "Classifier: svm, knn, nb, tree, ada, rf")->capture_default_str();
    train->add_option("--gamma", o.gamma, "RBF gamma (without --grid)")->capture_default_str();
    train->add_option("--nu", o.nu, "nu (without --grid)")->capture_default_str();
    train->add_flag("--grid", o.grid, "Select gamma and nu by cross-validated grid search");
    train->add_option("--gamma-range", o.gamma_range, "Grid exponents lo:hi for gamma")->capture_default_str();
    train->add_option("--nu-range", o.nu_range, "Grid exponents lo:hi for nu")->capture_default_str();
    train->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 100));
    train->add_option("-o,--out", o.out, "Model JSON path")->required();
    seed(train);

    auto* eval = app.add_subcommand("eval", "Evaluate a saved model on a labeled dataset");
    input(eval);
    eval->add_option("--model", o.model, "Model JSON")->required();
    eval->add_option("-o,--out", o.out, "Metrics CSV path");
    seed(eval);

    auto* atk = app.add_subcommand("attack", "Mimicry attack against a saved model");
    input(atk);
    atk->add_option("--model", o.model, "Model JSON")->required();
    atk->add_option("--pool", o.pool, "Dataset whose baseline accounts donate features")->required();
    atk->add_option("--fraction", o.fraction, "Share of farm accounts mimicking every feature");
    atk->add_option("--mimic", o.mimic, "Feature names every farm account mimics")->delimiter(',');
    atk->add_option("--repeats", o.repeats, "Repeats")->capture_default_str();
    atk->add_option("-o,--out", o.out, "Per-repeat CSV path");
    seed(atk);

    auto* repro = app.add_subcommand("repro", "Run the full reproduction on the shipped presets");
    repro->add_option("-o,--out", o.out, "Output directory")->required();
    repro->add_option("--min-likes", o.min_likes, "Co-clustering like threshold")->capture_default_str();
    repro->add_option("--gamma-range", o.gamma_range, "Grid exponents lo:hi for gamma")->capture_default_str();
    repro->add_option("--nu-range", o.nu_range, "Grid exponents lo:hi for nu")->capture_default_str();
    repro->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 100));
    repro->add_option("--repeats", o.repeats, "Attack repeats")->capture_default_str();
    repro->add_option("--farm", o.presets, "Farm presets to evaluate (repeatable; default: all shipped farm presets)");
    repro->add_flag("--strict", o.strict, "Exit 2 when a reproduction band fails");
    seed(repro);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            err << "see: farmlens " << sub->get_name() << " --help\n";
        }
        return kExitInvalid;
    }

    try {
        if (*gen) return cmd_gen(o, out);
        if (*feat) return cmd_featurize(o, out);
        if (*graph_cmd) return cmd_graph_report(o, out);
        if (*cc) return cmd_cocluster(o, out);
        if (*train) return cmd_train(o, out);
        if (*eval) return cmd_eval(o, out);
        if (*atk) return cmd_attack(o, out);
        if (*repro) return cmd_repro(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}

} // namespace farmlens::cli
