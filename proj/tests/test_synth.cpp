#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "farmlens/error.hpp"
#include "farmlens/features.hpp"
#include "farmlens/synth.hpp"
#include "farmlens/textmetrics.hpp"

using namespace farmlens;
using namespace farmlens::synth;

namespace {

std::string serialize(const Dataset& d) {
    std::ostringstream s;
    write_dataset(s, d);
    return s.str();
}

double mean_richness(const Dataset& d) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& f : featurize(d)) {
        if (!f.lexical.has_english) continue;
        sum += f.values()[feature_index("richness")];
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

const AuditEntry* entry(const AuditReport& r, const std::string& target) {
    for (const auto& e : r.entries)
        if (e.target == target) return &e;
    return nullptr;
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("generation is deterministic per seed") {
    auto spec = preset("baseline");
    spec.n_accounts = 80;
    const auto a = serialize(generate(spec, 5, false));
    CHECK(a == serialize(generate(spec, 5, false)));
    CHECK(a != serialize(generate(spec, 6, false)));
}

TEST_CASE("every shipped preset passes its own audit") {
    const auto names = preset_names();
    CHECK(std::find(names.begin(), names.end(), "baseline") != names.end());
    CHECK(names.size() == 5);
    for (const auto& name : names) {
        CAPTURE(name);
        const auto spec = preset(name);
        const auto d = generate(spec, 1, false);
        CHECK_NOTHROW(validate(d));
        CHECK(d.accounts.size() == spec.n_accounts);
        const auto audit = verify(d, spec);
        CHECK_MESSAGE(audit.pass(), audit.failures());
        for (const auto& a : d.accounts) CHECK(a.label == spec.label());
    }
    CHECK_THROWS_AS(preset("nope"), InvalidArgument);
}

TEST_CASE("baseline lexical richness on a small cohort") {
    auto spec = preset("baseline");
    spec.n_accounts = 200;
    const auto d = generate(spec, 3, false);
    CHECK(mean_richness(d) == doctest::Approx(0.70).epsilon(0.05 / 0.70));
}

TEST_CASE("the audit notices a fragment that does not match its spec") {
    auto spec = preset("baseline");
    spec.n_accounts = 100;
    auto d = generate(spec, 2, false);
    for (auto& a : d.accounts)
        for (auto& p : a.posts) p.text.clear();
    const auto r = verify(d, spec);
    CHECK_FALSE(r.pass());
    const auto* richness = entry(r, "richness");
    REQUIRE(richness != nullptr);
    CHECK_FALSE(richness->pass);
    CHECK(r.failures().find("richness") != std::string::npos);

    // A baseline cohort judged against the stealthy farm bands.
    auto base = preset("baseline");
    base.n_accounts = 150;
    const auto b = generate(base, 4, false);
    const auto cross = verify(b, preset("bl_usa"));
    const auto* rich = entry(cross, "richness");
    REQUIRE(rich != nullptr);
    CHECK_FALSE(rich->pass);
}

TEST_CASE("stealthy farm text is measurably poorer than baseline text") {
    auto base = preset("baseline");
    base.n_accounts = 200;
    auto farm = preset("bl_usa");
    farm.n_accounts = 200;
    const double gap = mean_richness(generate(base, 8, false)) - mean_richness(generate(farm, 8, false));
    CHECK(gap >= 0.08);
}

TEST_CASE("stealthy farms like popular pages") {
    const auto spec = preset("bl_usa");
    const auto d = generate(spec, 2, false);
    std::size_t popular = 0, total = 0;
    for (const auto& a : d.accounts) {
        for (const auto& l : a.liked_pages) {
            ++total;
            popular += d.pages.at(l.page).total_likes >= kPopularLikes;
        }
    }
    REQUIRE(total > 0);
    CHECK(static_cast<double>(popular) / static_cast<double>(total) >= 0.30);
}

TEST_CASE("bursty farms receive a honeypot page") {
    const auto spec = preset("ms_usa");
    const auto d = generate(spec, 1, false);
    const auto hp = std::find_if(d.pages.begin(), d.pages.end(), [](const auto& kv) { return kv.second.category == "Honeypot"; });
    REQUIRE(hp != d.pages.end());
    CHECK(hp->first.rfind("hp-", 0) == 0);
    std::size_t likers = 0;
    for (const auto& a : d.accounts) {
        for (const auto& l : a.liked_pages) {
            if (l.page != hp->first) continue;
            ++likers;
            CHECK(l.timestamp >= kCampaignStart);
        }
    }
    CHECK(likers > 0);
}

TEST_CASE("spec parsing rejects bad values") {
    CHECK_NOTHROW(parse_spec(R"({"name": "x", "archetype": "baseline", "n_accounts": 10})"));
    CHECK_THROWS_AS(parse_spec("{"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec(R"({"name": "x", "archetype": "robot", "n_accounts": 10})"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec(R"({"name": "x", "archetype": "baseline", "n_accounts": 0})"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec(R"({"name": "x", "archetype": "baseline", "n_accounts": 10,
                                   "bands": {"richness": [0.9, 0.1]}})"),
                    InvalidArgument);
    CHECK_THROWS_AS(parse_spec(R"({"name": "x", "archetype": "baseline", "n_accounts": 10,
                                   "text": {"richness": 1.5}})"),
                    InvalidArgument);
}

TEST_CASE("synthetic words") {
    const auto w = synth_word(7, 4.4, 11);
    CHECK(w.size() == 7);
    CHECK(w == synth_word(7, 4.4, 11));
    CHECK(std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; }));
    CHECK(text::count_syllables(synth_word(12, 3.0, 2)) >= 2);
}

}
