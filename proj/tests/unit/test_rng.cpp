#include "fivewise/rng.hpp"

#include <doctest.h>

#include <array>
#include <limits>

using namespace fivewise;

TEST_CASE("draws follow the published SplitMix64 sequence")
{
    // Reference outputs of SplitMix64 seeded with 0.
    StreamKey const zero{0};
    CHECK(zero.draw(0) == 0xe220a8397b1dcdafull);
    CHECK(zero.draw(1) == 0x6e789e6aa1b965f4ull);
    CHECK(zero.draw(2) == 0x06c45d188009454full);
}

TEST_CASE("keys are pure functions of their derivation path")
{
    auto const a = StreamKey::root(42).child(Tag::xi).child(3);
    auto const b = StreamKey::root(42).child(Tag::xi).child(3);
    CHECK(a == b);
    CHECK(a.draw(17) == b.draw(17));
    CHECK_FALSE(a == StreamKey::root(42).child(Tag::xi).child(4));
    CHECK_FALSE(a == StreamKey::root(43).child(Tag::xi).child(3));
    CHECK_FALSE(StreamKey::root(1).child(Tag::x0) == StreamKey::root(1).child(Tag::cen));
}

TEST_CASE("integer ids wrap modulo 2^64")
{
    auto const k = StreamKey::root(5);
    CHECK(k.child(-1) == k.child(std::numeric_limits<std::uint64_t>::max()));
    CHECK(k.child(7) == k.child(std::int64_t{7}));
    CHECK(k.child(7) == k.child(7u));
}

TEST_CASE("below is in range and close to uniform")
{
    KeyedStream s(StreamKey::root(9));
    std::array<int, 6> counts{};
    int const draws = 60000;
    for (int i = 0; i < draws; ++i)
    {
        auto const v = s.below(6);
        REQUIRE(v < 6);
        ++counts[v];
    }
    double chi = 0;
    for (int c : counts)
        chi += (c - draws / 6.0) * (c - draws / 6.0) / (draws / 6.0);
    CHECK(chi < 25.7); // 5 dof, far tail
}

TEST_CASE("uniform lies in [0, 1)")
{
    KeyedStream s(StreamKey::root(10));
    double sum = 0;
    for (int i = 0; i < 100000; ++i)
    {
        double const u = s.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
