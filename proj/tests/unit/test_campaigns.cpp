#include "fivewise/campaigns.hpp"

#include <doctest.h>

#include <atomic>

using namespace fivewise;

TEST_CASE("catalog lists every campaign and all")
{
    auto const& names = campaign_catalog();
    for (char const* n : {"measures", "chain", "hierarchy", "independence", "moments", "tails", "blocks",
                          "double-one", "cross-mode", "all"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    CHECK_THROWS_AS(run_campaign("nope", {}), std::invalid_argument);
}

TEST_CASE("exact suite passes")
{
    auto const r = exact_suite();
    CHECK(r.pass);
    for (char const* g : {"transition-law", "measure-suite", "gap-identity", "pattern-probability"})
        CHECK(r.group_pass(g));
    CHECK_FALSE(r.has_group("tails"));
}

TEST_CASE("small campaigns are reproducible and round-trip through JSON")
{
    CampaignOptions o;
    o.seed = 3;
    o.replicates = 20;
    o.positions = 40000;
    o.nmax = 3;
    auto const a = run_campaign("tails", o);
    o.threads = 1;
    auto const b = run_campaign("tails", o);
    CHECK(to_json(a).dump() == to_json(b).dump());
    auto const back = report_from_json(to_json(a));
    CHECK(back.campaign == "tails");
    CHECK(back.seed == 3);
    REQUIRE(back.estimates.size() == a.estimates.size());
    CHECK(back.estimates[1].value == a.estimates[1].value);
    CHECK(back.pass == a.pass);
    auto const j = to_json(a);
    for (char const* field : {"campaign", "params", "seed", "estimates", "pass"})
        CHECK(j.contains(field));
    for (char const* field : {"name", "value", "stderr", "target", "verdict"})
        CHECK(j["estimates"][0].contains(field));
}

TEST_CASE("parallel_for visits every index once")
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, 4, [&](std::int64_t i) { hits[static_cast<std::size_t>(i)]++; });
    for (auto const& h : hits)
        CHECK(h.load() == 1);
    CHECK_THROWS(parallel_for(10, 2, [](std::int64_t i) {
        if (i == 7)
            throw std::runtime_error("boom");
    }));
}

TEST_CASE("process source is independent of batch position")
{
    SamplerConfig sampler;
    auto const src = process_source(9, sampler, 2);
    std::vector<std::int8_t> first, again;
    src(5, 50, first);
    src(3000, 50, again);
    src(5, 50, again);
    CHECK(first == again);
}
