#include "fivewise/coding.hpp"
#include "fivewise/errors.hpp"
#include "fivewise/rng.hpp"

#include <doctest.h>

#include <vector>

using namespace fivewise;

namespace {

std::vector<Bit6> random_columns(std::uint64_t seed, std::size_t count, int sparse)
{
    KeyedStream s(StreamKey::root(seed));
    std::vector<Bit6> out;
    for (std::size_t i = 0; i < count; ++i)
    {
        // With `sparse` set, draw a unit column most of the time so patterns appear.
        if (sparse && s.below(4) != 0)
            out.push_back(Bit6::unit(1 + static_cast<int>(s.below(6))));
        else
            out.push_back(Bit6{static_cast<std::uint8_t>(s.below(64))});
    }
    return out;
}

int fold(int state, std::vector<Bit6> const& columns)
{
    for (auto c : columns)
        state = chain_step(state, c);
    return state;
}

} // namespace

TEST_CASE("chain_step moves one step along the cycle on the right bit only")
{
    for (int s = 1; s <= 6; ++s)
        for (int mask = 0; mask < 64; ++mask)
        {
            int const next = s % 6 + 1;
            Bit6 const beta{static_cast<std::uint8_t>(mask)};
            CHECK(chain_step(s, beta) == (beta[next] ? next : s));
        }
    CHECK(chain_step(6, Bit6::unit(1)) == 1);
    CHECK(chain_step(3, Bit6::unit(3)) == 3);
}

TEST_CASE("the identity pattern sends every state to 6")
{
    auto const p = identity_pattern();
    std::vector<Bit6> const cols(p.begin(), p.end());
    for (int s = 1; s <= 6; ++s)
        CHECK(fold(s, cols) == 6);
}

TEST_CASE("IdentityMatcher agrees with a direct window comparison")
{
    auto const cols = random_columns(1, 200000, 1);
    auto const pattern = identity_pattern();
    IdentityMatcher m;
    int hits = 0;
    for (std::size_t t = 0; t < cols.size(); ++t)
    {
        bool direct = t >= 5;
        for (std::size_t i = 0; direct && i < 6; ++i)
            direct = cols[t - 5 + i] == pattern[i];
        bool const seen = m.push(cols[t]);
        REQUIRE(seen == direct);
        hits += seen ? 1 : 0;
    }
    CHECK(hits > 0);
}

TEST_CASE("detector progress is the matched prefix length")
{
    IdentityMatcher m;
    m.push(Bit6::unit(1));
    m.push(Bit6::unit(1));
    CHECK(m.progress() == 1);
    m.push(Bit6::unit(2));
    m.push(Bit6::unit(3));
    CHECK(m.progress() == 3);
    m.push(Bit6{3});
    CHECK(m.progress() == 0);
}

TEST_CASE("anchored codes do not depend on the state before the pattern")
{
    for (int trial = 0; trial < 50; ++trial)
    {
        RegenerationAnchoredHistory h{random_columns(100 + static_cast<std::uint64_t>(trial), 1 + trial * 7, 0)};
        auto const cols = h.columns();
        REQUIRE(cols.size() == h.suffix.size() + 6);
        int const g = g_basic_anchored(h);
        for (int s = 1; s <= 6; ++s)
            CHECK(fold(s, cols) == g);
        auto before = h.suffix;
        before.pop_back();
        int const prev = g_basic_anchored(RegenerationAnchoredHistory{before});
        CHECK(g_spaced_anchored(h) == (g != prev ? g : 0));
    }
}

TEST_CASE("a later pattern inside the suffix restarts the code")
{
    auto const p = identity_pattern();
    RegenerationAnchoredHistory h{{Bit6::unit(1), Bit6::unit(2)}};
    h.suffix.insert(h.suffix.end(), p.begin(), p.end());
    h.suffix.push_back(Bit6::unit(1));
    CHECK(g_basic_anchored(h) == 1);
}

TEST_CASE("edge cases of the anchored codes")
{
    RegenerationAnchoredHistory const empty{};
    CHECK(g_basic_anchored(empty) == 6);
    CHECK_THROWS_AS(g_spaced_anchored(empty), std::invalid_argument);
    CHECK(g_spaced_anchored(RegenerationAnchoredHistory{{Bit6::unit(1)}}) == 1);
    CHECK(g_spaced_anchored(RegenerationAnchoredHistory{{Bit6::unit(2)}}) == 0);
}

TEST_CASE("coding_trace matches the streaming folder")
{
    RegenerationAnchoredHistory const h{random_columns(7, 500, 0)};
    auto const rows = coding_trace(h);
    REQUIRE(rows.size() == 500);
    CodingFolder f;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        int const spaced = f.push(h.suffix[i]);
        CHECK(rows[i].k == static_cast<std::int64_t>(i + 1));
        CHECK(rows[i].g_basic == f.state());
        CHECK(rows[i].g_spaced == spaced);
    }
}

TEST_CASE("psi finds the (j+1)-th mark into the past")
{
    std::vector<std::uint8_t> const marks{0, 1, 0, 1, 1, 0};
    CHECK(psi(0, marks) == 1);
    CHECK(psi(1, marks) == 3);
    CHECK(psi(2, marks) == 4);
    CHECK_THROWS_AS(psi(3, marks), InsufficientMarks);
}

TEST_CASE("condition S")
{
    auto check = [](std::vector<std::uint8_t> v) { return check_condition_S(v); };
    CHECK(check({}).pass);
    CHECK(check({0, 0, 0}).pass);
    CHECK(check({4, 0, 5, 6, 0, 0, 1, 2}).pass);
    auto const bad = check({1, 0, 2, 4});
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.first_violation.has_value());
    CHECK(*bad.first_violation == 3);
    CHECK_FALSE(check({1, 7}).pass);
    CHECK_FALSE(check({2, 2}).pass);
}
