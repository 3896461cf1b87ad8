#include <doctest.h>

#include <json.hpp>

#include <initializer_list>
#include <sstream>

#include "farmlens/cli.hpp"
#include "farmlens/model.hpp"
#include "fixtures.hpp"

using namespace farmlens;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run cli_run(std::initializer_list<std::string> args) {
    std::vector<std::string> storage = {"farmlens"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Small mixed dataset written once per test through the CLI itself.
std::string make_dataset(const fixtures::TempDir& dir, const std::string& seed = "1") {
    const auto path = (dir / ("d" + seed + ".jsonl")).string();
    const auto r = cli_run({"gen", "--preset", "baseline", "--preset", "al_all", "--n", "120", "--seed", seed,
                            "--no-audit", "--train-fraction", "0.8", "-o", path});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    return path;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("gen writes a valid dataset and reports the audit") {
    fixtures::TempDir dir;
    const auto path = (dir / "base.jsonl").string();
    const auto r = cli_run({"gen", "--preset", "baseline", "--n", "200", "--seed", "1", "-o", path});
    CHECK_MESSAGE(r.code == cli::kExitOk, r.err);
    CHECK(r.out.find("audit baseline richness=") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    const auto d = load_dataset(path);
    CHECK(d.accounts.size() == 200);
    CHECK(d.provenance.at("preset") == "baseline");
}

TEST_CASE("usage errors exit 1") {
    CHECK(cli_run({}).code == cli::kExitInvalid);
    CHECK(cli_run({"frobnicate"}).code == cli::kExitInvalid);
    CHECK(cli_run({"gen", "--preset", "baseline", "--bogus", "-o", "x"}).code == cli::kExitInvalid);
    const auto missing = cli_run({"featurize", "--in", "/nonexistent/x.jsonl", "-o", "/tmp/never.csv"});
    CHECK(missing.code == cli::kExitInvalid);
    CHECK(missing.err.find("does not exist") != std::string::npos);
    CHECK(cli_run({"gen", "--preset", "unknown", "-o", "/tmp/never.jsonl"}).code == cli::kExitInvalid);
    CHECK(cli_run({"train", "--in", "x", "--folds", "1", "-o", "y"}).code == cli::kExitInvalid);
    CHECK(cli_run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("featurize writes a provenance line and one row per account") {
    fixtures::TempDir dir;
    const auto data = make_dataset(dir);
    const auto csv = (dir / "f.csv").string();
    const auto r = cli_run({"featurize", "--in", data, "-o", csv, "--seed", "1"});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    std::istringstream in(fixtures::slurp(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# ", 0) == 0);
    CHECK(line.find("seed=1") != std::string::npos);
    CHECK(line.find("version=farmlens/1") != std::string::npos);
    std::getline(in, line);
    CHECK(line.rfind("account_id,avg_words_per_post", 0) == 0);
    std::size_t rows = 0;
    while (std::getline(in, line)) rows += !line.empty();
    CHECK(rows == 240);
}

TEST_CASE("cocluster prints a JSON report and a scatter file") {
    fixtures::TempDir dir;
    const auto data = make_dataset(dir);
    const auto scatter = (dir / "s.csv").string();
    const auto r = cli_run({"cocluster", "--in", data, "--min-likes", "5", "-o", scatter});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("precision"));
    CHECK(j.at("users_kept").get<int>() > 0);
    CHECK(fixtures::slurp(scatter).find("user,page,outcome") != std::string::npos);
}

TEST_CASE("train, eval and attack chain through saved files") {
    fixtures::TempDir dir;
    const auto data = make_dataset(dir);
    const auto train = (dir / "d1.train.jsonl").string();
    const auto test = (dir / "d1.test.jsonl").string();
    const auto model = (dir / "m.json").string();

    auto r = cli_run({"train", "--in", train, "--grid", "--gamma-range", "-4:-2", "--nu-range", "-3:-2", "--folds", "3",
                      "-o", model});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    CHECK(r.out.find("grid search: gamma=") != std::string::npos);

    const auto metrics = (dir / "metrics.csv").string();
    r = cli_run({"eval", "--in", test, "--model", model, "-o", metrics});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("f1").get<double>() > 0.8);
    CHECK(fixtures::slurp(metrics).find("classifier,features,TP,FP,TN,FN") != std::string::npos);

    const auto atk = (dir / "atk.csv").string();
    r = cli_run({"attack", "--in", test, "--pool", train, "--model", model, "--fraction", "0.5", "--repeats", "3", "-o",
                 atk});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    CHECK(nlohmann::json::parse(r.out).at("per_repeat").size() == 3);
    r = cli_run({"attack", "--in", test, "--pool", train, "--model", model, "--mimic", "richness,ari", "--repeats", "2"});
    CHECK_MESSAGE(r.code == cli::kExitOk, r.err);
    r = cli_run({"attack", "--in", test, "--pool", train, "--model", model});
    CHECK(r.code == cli::kExitInvalid);

    r = cli_run({"train", "--in", train, "--clf", "rf", "--features", "nl", "--seed", "3", "-o", model});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    r = cli_run({"eval", "--in", test, "--model", model});
    CHECK_MESSAGE(r.code == cli::kExitOk, r.err);
    CHECK(cli_run({"train", "--in", train, "--clf", "perceptron", "-o", model}).code == cli::kExitInvalid);
    CHECK(cli_run({"train", "--in", train, "--grid", "--gamma-range", "2:1", "-o", model}).code == cli::kExitInvalid);
}

TEST_CASE("seeded commands are reproducible") {
    fixtures::TempDir a, b;
    const auto da = make_dataset(a, "4");
    const auto db = make_dataset(b, "4");
    CHECK(fixtures::slurp(da) == fixtures::slurp(db));
    const auto fa = (a / "f.csv").string(), fb = (b / "f.csv").string();
    REQUIRE(cli_run({"featurize", "--in", da, "-o", fa}).code == 0);
    REQUIRE(cli_run({"featurize", "--in", db, "-o", fb}).code == 0);
    CHECK(fixtures::slurp(fa) == fixtures::slurp(fb));
}

TEST_CASE("graph-report writes its summaries") {
    fixtures::TempDir dir;
    const auto data = make_dataset(dir);
    const auto r = cli_run({"graph-report", "--in", data, "-o", (dir / "g").string()});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    const auto cohorts = fixtures::slurp(dir / "g" / "cohorts.csv");
    CHECK(cohorts.find("AL-ALL") != std::string::npos);
    CHECK(cohorts.find("baseline") != std::string::npos);
}

}
