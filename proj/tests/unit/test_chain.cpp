#include "fivewise/chain.hpp"
#include "fivewise/errors.hpp"

#include <doctest.h>

#include <algorithm>

using namespace fivewise;

TEST_CASE("xi columns take each bit with probability 3/8")
{
    CHECK(xi_from_word(0).mask == 63);
    CHECK(xi_from_word(~std::uint64_t{0}).mask == 0);
    // Coordinate i reads three bits at 3i; exactly the values 0, 1, 2 set it.
    for (int i = 0; i < 6; ++i)
    {
        int set = 0;
        for (std::uint64_t v = 0; v < 8; ++v)
            set += xi_from_word(v << (3 * i))[i + 1] ? 1 : 0;
        CHECK(set == 3);
    }
}

TEST_CASE("transition matrix in closed form")
{
    auto const p = derive_transition_matrix();
    for (std::size_t i = 0; i < 6; ++i)
    {
        Rational row = 0;
        for (std::size_t j = 0; j < 6; ++j)
        {
            row += p[i][j];
            if (j == i)
                CHECK(p[i][j] == Rational(5, 8));
            else if (j == (i + 1) % 6)
                CHECK(p[i][j] == Rational(3, 8));
            else
                CHECK(p[i][j] == 0);
        }
        CHECK(row == 1);
    }
    CHECK(uniform_is_stationary(p));
    auto q = p;
    q[0][0] = Rational(1, 2);
    q[0][1] = Rational(1, 2);
    CHECK_FALSE(uniform_is_stationary(q));
}

TEST_CASE("identity pattern probability")
{
    Rational const column = rpow(Rational(5, 8), 5) * Rational(3, 8);
    CHECK(identity_pattern_probability() == rpow(column, 6));
    CHECK(fraction_string(identity_pattern_probability()) ==
          "678934156894683837890625/324518553658426726783156020576256");
}

TEST_CASE("spaced symbols mark changes")
{
    std::vector<std::uint8_t> const states{3, 3, 4, 4, 5, 6, 6, 1};
    std::vector<std::uint8_t> const want{0, 4, 0, 5, 6, 0, 1};
    CHECK(spaced_from_states(states) == want);
}

TEST_CASE("canonical segments are consistent across overlapping requests")
{
    XiSource const xi{innovation_key(5, 1)};
    auto const inner = canonical_segment(xi, 0, 200, 1 << 20);
    auto const outer = canonical_segment(xi, -3000, 900, 1 << 20);
    REQUIRE(inner.size() == 201);
    for (std::size_t i = 0; i < inner.size(); ++i)
        CHECK(inner[i] == outer[i + 3000]);
    for (std::size_t i = 1; i < outer.size(); ++i)
        CHECK(outer[i] == chain_step(outer[i - 1], xi(-3000 + static_cast<std::int64_t>(i))));
}

TEST_CASE("coupling and literal evaluation give the same path")
{
    XiSource const xi{innovation_key(2, 1)};
    auto const a = canonical_segment(xi, -20, 400, 1 << 20);
    auto const b = literal_segment(xi, -20, 400, std::int64_t{1} << 34);
    CHECK(a == b);
}

TEST_CASE("budgets surface as BudgetExceeded with the level")
{
    XiSource const xi{innovation_key(3, 1)};
    try
    {
        canonical_segment(xi, 0, 10, 4, 3);
        FAIL("expected a budget error");
    }
    catch (BudgetExceeded const& e)
    {
        CHECK(e.level() == 3);
    }
    CHECK_THROWS_AS(literal_segment(xi, 0, 10, 1000), BudgetExceeded);
}

TEST_CASE("path samplers")
{
    auto const key = innovation_key(9, 1);
    auto const p = sample_stationary_path_cftp(10, 60, key);
    CHECK(p.first() == 10);
    CHECK(p.last() == 60);
    for (std::int64_t k = 10; k <= 60; ++k)
        CHECK(p.w(k) == (p.u(k) != p.u(k - 1) ? p.u(k) : 0));
    auto const q = sample_stationary_path(10, 60, key);
    CHECK(q.last() == 60);
    for (std::int64_t k = 10; k <= 60; ++k)
        CHECK(q.u(k) == chain_step(q.u(k - 1), XiSource{key}(k)));
}

TEST_CASE("return times are at least six")
{
    auto const gaps = return_time_samples(20000, innovation_key(4, 1));
    REQUIRE(gaps.size() > 1000);
    CHECK(*std::min_element(gaps.begin(), gaps.end()) >= 6);
}

TEST_CASE("prefix counts equal a direct scan")
{
    auto const key = innovation_key(8, 1);
    XiSource const xi{key};
    auto const pattern = identity_pattern();
    std::int64_t const n = 300000;
    auto const counts = count_pattern_prefixes(n, key);
    for (int p = 1; p <= 3; ++p)
    {
        std::int64_t direct = 0;
        for (std::int64_t t = 1; t <= n; ++t)
        {
            bool match = true;
            for (int i = 0; match && i < p; ++i)
                match = xi(t - p + 1 + i) == pattern[static_cast<std::size_t>(i)];
            direct += match ? 1 : 0;
        }
        CHECK(counts[static_cast<std::size_t>(p)] == direct);
    }
    CHECK(count_identity_patterns(n, key) == counts[6]);
}
