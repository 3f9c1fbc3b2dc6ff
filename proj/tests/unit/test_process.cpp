#include "fivewise/errors.hpp"
#include "fivewise/parity_measures.hpp"
#include "fivewise/process.hpp"

#include <doctest.h>

#include <set>

using namespace fivewise;

namespace {

SamplerConfig seeded(std::uint64_t seed, int min_depth = 0)
{
    SamplerConfig c;
    c.seed = seed;
    c.min_depth = min_depth;
    return c;
}

// Members of the level-m bracket around k, found by scanning the level-m symbols.
std::vector<std::int64_t> bracket_members(HierarchyWindow const& h, int m, std::int64_t k)
{
    auto is_anchor = [&](std::int64_t j) { return h.symbol(m, j) == 1; };
    std::int64_t lo = k;
    while (lo >= h.a() && !is_anchor(lo))
        --lo;
    std::int64_t hi = k + 1;
    while (hi <= h.b() && !is_anchor(hi))
        ++hi;
    if (lo < h.a() || hi > h.b())
        return {};
    std::vector<std::int64_t> out;
    for (std::int64_t j = lo; j < hi; ++j)
        if (h.n_at(j) >= m)
            out.push_back(j);
    return out;
}

} // namespace

TEST_CASE("depth-zero positions carry the keyed fair sign")
{
    auto const h = build(0, 5000, seeded(31));
    auto const p = sample_path(h);
    REQUIRE(p.size() == 5001);
    auto const key = StreamKey::root(h.seed()).child(Tag::x0);
    for (std::int64_t k = 0; k <= 5000; ++k)
    {
        REQUIRE((p.x_at(k) == 1 || p.x_at(k) == -1));
        if (h.n_at(k) == 0)
            CHECK(p.x_at(k) == ((key.draw(k) >> 63) ? -1 : 1));
    }
}

TEST_CASE("deeper positions read the keyed centered tree")
{
    auto const h = build(0, 5000, seeded(32, 3));
    auto const p = sample_path(h);
    int checked = 0;
    for (std::int64_t k = 0; k <= 5000; ++k)
    {
        int const n = h.n_at(k);
        if (n == 0)
            continue;
        auto const key = StreamKey::root(h.seed()).child(Tag::cen).child(n).child(h.anchor_ordinal_at(k));
        CHECK(p.x_at(k) == LevelTree(n, MeasureKind::cen, key).coordinate(h.j_at(k)));
        CHECK(p.x_at(k) == block_value(h.seed(), n, h.anchor_ordinal_at(k), h.j_at(k)));
        ++checked;
    }
    CHECK(checked > 1000);
}

TEST_CASE("blocks have 6^m members and pass every audit")
{
    for (std::uint64_t seed : {33u, 34u, 35u})
    {
        auto const h = build(0, 60000, seeded(seed, 3));
        auto const blocks = decompose_blocks(h);
        CHECK(audit_structure(h, blocks).empty());
        auto const audit = audit_block_contents(sample_path(h), h, blocks);
        CHECK(audit.pass);
        CHECK_FALSE(audit.entries.empty());
        for (int m = 1; m <= 2; ++m)
        {
            REQUIRE(static_cast<int>(blocks.blocks.size()) > m);
            CHECK_FALSE(blocks.blocks[static_cast<std::size_t>(m)].empty());
            for (auto const& b : blocks.blocks[static_cast<std::size_t>(m)])
            {
                CHECK(static_cast<std::int64_t>(b.members.size()) == six_pow(m));
                CHECK(b.members.front() == b.anchor);
                CHECK(b.members == bracket_members(h, m, b.anchor));
            }
        }
    }
}

TEST_CASE("complete D_1 blocks multiply to -1 and sum to 0")
{
    auto const h = build(0, 20000, seeded(36, 2));
    auto const p = sample_path(h);
    auto const blocks = decompose_blocks(h);
    auto const d1 = blocks.d_blocks(1);
    REQUIRE_FALSE(d1.empty());
    for (auto const* b : d1)
    {
        int product = 1, sum = 0;
        for (auto k : b->members)
        {
            product *= p.x_at(k);
            sum += p.x_at(k);
            CHECK(h.n_at(k) == 1);
        }
        CHECK(product == -1);
        CHECK(sum == 0);
    }
}

TEST_CASE("covering agrees with a brute-force bracket scan")
{
    auto const h = build(0, 30000, seeded(37, 3));
    auto const blocks = decompose_blocks(h);
    KeyedStream rng(StreamKey::root(37));
    int built = 0;
    for (int t = 0; t < 200; ++t)
    {
        std::set<std::int64_t> s;
        auto const base = static_cast<std::int64_t>(1000 + rng.below(28000));
        auto const size = 1 + rng.below(6);
        while (s.size() < size)
            s.insert(base + static_cast<std::int64_t>(rng.below(300)));
        int const n = 1 + static_cast<int>(rng.below(3));
        Covering q;
        try
        {
            q = covering_of(s, n, h, blocks);
        }
        catch (IncompleteBlock const&)
        {
            continue;
        }
        ++built;
        CHECK(is_class_covering(q, s, n));
        std::set<std::vector<std::int64_t>> expect;
        for (auto k : s)
        {
            int const m = std::min(h.n_at(k), n);
            expect.insert(m == 0 ? std::vector<std::int64_t>{k} : bracket_members(h, m, k));
        }
        CHECK(std::set<std::vector<std::int64_t>>(q.begin(), q.end()) == expect);
    }
    CHECK(built > 100);
}

TEST_CASE("class covering properties reject malformed covers")
{
    std::set<std::int64_t> const s{3, 4};
    CHECK(is_class_covering({{3}, {4}}, s, 1));
    CHECK_FALSE(is_class_covering({{3}}, s, 1));          // 4 uncovered
    CHECK_FALSE(is_class_covering({{3}, {3}, {4}}, s, 1)); // overlap
    CHECK_FALSE(is_class_covering({{3, 4}}, s, 1));       // size not a power of 6
    CHECK_FALSE(is_class_covering({{3}, {4}, {9}}, s, 1)); // member misses S
}

TEST_CASE("paths are deterministic in the seed")
{
    auto const a = sample_path(-200, 800, seeded(38));
    auto const b = sample_path(-200, 800, seeded(38));
    auto const c = sample_path(-200, 800, seeded(39));
    CHECK(a.x == b.x);
    CHECK(a.j == b.j);
    CHECK(a.x != c.x);
}

TEST_CASE("block audit JSON lists per-block summaries")
{
    auto const h = build(0, 5000, seeded(40, 2));
    auto const audit = audit_block_contents(sample_path(h), h, decompose_blocks(h));
    auto const j = to_json(audit);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == audit.entries.size());
    REQUIRE_FALSE(j.empty());
    auto const& first = j[0];
    for (char const* field : {"m", "min", "max", "sum", "product", "pass"})
        CHECK(first.contains(field));
}
