#include "fivewise/coding.hpp"
#include "fivewise/errors.hpp"
#include "fivewise/hierarchy.hpp"
#include "fivewise/parity_measures.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace fivewise;

namespace {

SamplerConfig seeded(std::uint64_t seed, int min_depth = 0)
{
    SamplerConfig c;
    c.seed = seed;
    c.min_depth = min_depth;
    return c;
}

} // namespace

TEST_CASE("config keys, aliases and guards")
{
    SamplerConfig c;
    apply_config(c, {{"seed", "17"}, {"budget_level", "9"}, {"depth", "3"}, {"locate_anchors", "true"}});
    CHECK(c.seed == 17);
    CHECK(c.max_level == 9);
    CHECK(c.min_depth == 3);
    CHECK(c.locate_anchors);
    CHECK_THROWS_AS(apply_config(c, {{"colour", "red"}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_config(c, {{"max_level", "25"}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_config(c, {{"extension_factor", "1"}}), std::invalid_argument);
}

TEST_CASE("key-value files ignore comments and blank lines")
{
    auto const path = std::string("fivewise_test_config.txt");
    {
        std::ofstream out(path);
        out << "# sampler\nseed = 5\n\nmax_level=12 # guard\n";
    }
    auto const kv = read_key_value_file(path);
    std::remove(path.c_str());
    CHECK(kv.size() == 2);
    CHECK(kv.at("seed") == "5");
    CHECK(kv.at("max_level") == "12");
}

TEST_CASE("depth and rank follow the level symbols")
{
    auto const h = build(-300, 3000, seeded(21, 3));
    REQUIRE(h.depth() >= 3);
    for (std::int64_t k = h.a(); k <= h.b(); ++k)
    {
        int const n = h.n_at(k);
        CHECK((n >= 1) == (h.symbol(1, k) != 0));
        CHECK(h.j_at(k) >= 0);
        CHECK(h.j_at(k) < six_pow(n));
        if (h.symbol(1, k) == 1)
            CHECK(n >= 1);
        auto const r = h.record(k);
        CHECK(r.n == n);
        CHECK(r.j == h.j_at(k));
        CHECK(static_cast<int>(r.deltas.size()) == n + 1);
        CHECK(r.deltas.back() == 0);
        std::int64_t j = 0, scale = 1;
        for (int u = 0; u < n; ++u, scale *= 6)
            j += scale * (r.deltas[static_cast<std::size_t>(u)] - 1);
        CHECK(j == r.j);
    }
}

TEST_CASE("every level satisfies condition S")
{
    auto const h = build(0, 20000, seeded(22, 4));
    for (auto const& level : h.levels())
    {
        auto const report = check_condition_S(level.w);
        CHECK(report.pass);
        CHECK(level.symbol(level.lo) == 1);
    }
}

TEST_CASE("windows agree where they overlap")
{
    auto const inner = build(100, 900, seeded(23));
    auto const outer = build(-5000, 4000, seeded(23));
    for (std::int64_t k = 100; k <= 900; ++k)
    {
        CHECK(inner.n_at(k) == outer.n_at(k));
        CHECK(inner.j_at(k) == outer.j_at(k));
        CHECK(inner.anchor_ordinal_at(k) == outer.anchor_ordinal_at(k));
        if (inner.anchor_at(k) != kUnknownPosition)
            CHECK(inner.anchor_at(k) == outer.anchor_at(k));
        for (int n = 1; n <= std::min(inner.depth(), outer.depth()); ++n)
            CHECK(inner.symbol(n, k) == outer.symbol(n, k));
    }
}

TEST_CASE("anchor location")
{
    auto config = seeded(24, 2);
    config.locate_anchors = true;
    auto const h = build(0, 2000, config);
    CHECK(h.all_anchors_located());
    for (std::int64_t k = 0; k <= 2000; ++k)
    {
        auto const anchor = h.anchor_at(k);
        REQUIRE(anchor != kUnknownPosition);
        CHECK(anchor <= k);
        if (h.n_at(k) == 0)
            CHECK(anchor == k);
    }
    auto const r = resolve_position(1234, h);
    CHECK(r.n == h.n_at(1234));
    CHECK(r.anchor == h.anchor_at(1234));
}

TEST_CASE("level guard trips on a forced depth")
{
    auto config = seeded(25, 5);
    config.max_level = 3;
    try
    {
        build(0, 100, config);
        FAIL("expected a budget error");
    }
    catch (BudgetExceeded const& e)
    {
        CHECK(e.level() >= 3);
    }
}

TEST_CASE("literal evaluation reproduces the coupled hierarchy")
{
    // Level 1 only: a literal level-2 scan costs about 5e8 ordinals (the campaign runs it).
    auto config = seeded(26, 3);
    config.literal_depth = 1;
    auto const fast = build(-100, 600, config);
    auto const slow = literal_build(-100, 600, config);
    REQUIRE(fast.depth() == slow.depth());
    for (std::int64_t k = -100; k <= 600; ++k)
    {
        CHECK(fast.n_at(k) == slow.n_at(k));
        CHECK(fast.j_at(k) == slow.j_at(k));
    }
    CHECK(fast.level(1).w == slow.level(1).w);
    CHECK(fast.level(2).w == slow.level(2).w);
}

TEST_CASE("double-one estimator")
{
    auto const key = StreamKey::root(27);
    CHECK(double_one_probability(1, 50, key, 1).estimate == 0.0);
    auto const e = double_one_probability(1, 200, key);
    CHECK(e.estimate >= 0.9);
    CHECK_THROWS(double_one_probability(0, 10, key));
}
