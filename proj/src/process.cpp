#include "fivewise/process.hpp"

#include "fivewise/coding.hpp"
#include "fivewise/errors.hpp"
#include "fivewise/parity_measures.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fivewise {

namespace {

StreamKey block_key(std::uint64_t seed, int level, std::int64_t anchor_ordinal)
{
    return StreamKey::root(seed).child(Tag::cen).child(level).child(anchor_ordinal);
}

} // namespace

int block_value(std::uint64_t seed, int level, std::int64_t anchor_ordinal, std::int64_t j)
{
    if (level == 0)
        return (StreamKey::root(seed).child(Tag::x0).draw(anchor_ordinal) >> 63) ? -1 : 1;
    // J < 6^level always holds for resolved records, so no padding is needed.
    if (j < 0 || j >= six_pow(level))
        throw std::logic_error("block coordinate outside 0 .. 6^level - 1");
    return LevelTree(level, MeasureKind::cen, block_key(seed, level, anchor_ordinal)).coordinate(j);
}

PathSample sample_path(HierarchyWindow const& window)
{
    PathSample p;
    p.a = window.a();
    p.b = window.b();
    p.seed = window.seed();
    auto const count = static_cast<std::size_t>(p.b - p.a + 1);
    p.x.resize(count);
    p.n.resize(count);
    p.anchor.resize(count);
    p.j.resize(count);
    StreamKey const x0 = StreamKey::root(p.seed).child(Tag::x0);
    for (std::int64_t k = p.a; k <= p.b; ++k)
    {
        auto const i = static_cast<std::size_t>(k - p.a);
        int const n = window.n_at(k);
        p.n[i] = static_cast<std::uint8_t>(n);
        p.anchor[i] = window.anchor_at(k);
        p.j[i] = window.j_at(k);
        int const v = n == 0 ? ((x0.draw(k) >> 63) ? -1 : 1)
                             : block_value(p.seed, n, window.anchor_ordinal_at(k), p.j[i]);
        p.x[i] = static_cast<std::int8_t>(v);
    }
    return p;
}

PathSample sample_path(std::int64_t a, std::int64_t b, SamplerConfig const& config)
{
    return sample_path(build(a, b, config));
}

std::vector<Block const*> BlockDecomposition::d_blocks(int m) const
{
    std::vector<Block const*> out;
    if (m >= 1 && m < static_cast<int>(blocks.size()))
        for (auto const& blk : blocks[static_cast<std::size_t>(m)])
            if (blk.in_d)
                out.push_back(&blk);
    return out;
}

std::vector<Block const*> BlockDecomposition::e_blocks(int m) const
{
    std::vector<Block const*> out;
    if (m >= 1 && m < static_cast<int>(blocks.size()))
        for (auto const& blk : blocks[static_cast<std::size_t>(m)])
            out.push_back(&blk);
    return out;
}

Block const* BlockDecomposition::find(int m, std::int64_t k) const
{
    if (m < 1 || m >= static_cast<int>(blocks.size()))
        return nullptr;
    auto const& level = blocks[static_cast<std::size_t>(m)];
    auto it = std::upper_bound(level.begin(), level.end(), k, [](std::int64_t v, Block const& blk) {
        return v < blk.anchor;
    });
    if (it == level.begin())
        return nullptr;
    --it;
    if (k >= it->next_anchor || !std::binary_search(it->members.begin(), it->members.end(), k))
        return nullptr;
    return &*it;
}

BlockDecomposition decompose_blocks(HierarchyWindow const& window)
{
    BlockDecomposition d;
    d.a = window.a();
    d.b = window.b();
    d.blocks.resize(1);
    for (int m = 1; m <= window.depth(); ++m)
    {
        auto const anchors = window.anchors_in(m, window.a(), window.b());
        std::vector<Block> level;
        for (std::size_t i = 0; i + 1 < anchors.size(); ++i)
        {
            Block blk;
            blk.level = m;
            blk.anchor = anchors[i];
            blk.next_anchor = anchors[i + 1];
            blk.in_d = window.n_at(blk.anchor) == m;
            for (std::int64_t k = blk.anchor; k < blk.next_anchor; ++k)
                if (window.n_at(k) >= m)
                    blk.members.push_back(k);
            level.push_back(std::move(blk));
        }
        if (!level.empty())
            d.top_level = m;
        d.blocks.push_back(std::move(level));
    }
    return d;
}

bool is_class_covering(Covering const& q, std::set<std::int64_t> const& s, int n)
{
    std::set<std::int64_t> seen;
    for (auto const& member : q)
    {
        bool size_ok = false;
        for (int m = 0; m <= n; ++m)
            size_ok = size_ok || static_cast<std::int64_t>(member.size()) == six_pow(m);
        if (!size_ok)
            return false;
        bool meets = false;
        for (auto k : member)
        {
            if (!seen.insert(k).second)
                return false;
            meets = meets || s.count(k) > 0;
        }
        if (!meets)
            return false;
    }
    return std::all_of(s.begin(), s.end(), [&](std::int64_t k) { return seen.count(k) > 0; });
}

Covering covering_of(std::set<std::int64_t> const& s, int n, HierarchyWindow const& window,
                     BlockDecomposition const& blocks)
{
    if (n < 1)
        throw std::invalid_argument("covering_of: n must be positive");
    std::map<std::pair<int, std::int64_t>, std::vector<std::int64_t>> chosen;
    for (auto k : s)
    {
        if (k < window.a() || k > window.b())
            throw std::out_of_range("covering_of: S leaves the window");
        int const nk = window.n_at(k);
        if (nk == 0)
        {
            chosen[{0, k}] = {k};
            continue;
        }
        int const m = std::min(nk, n);
        Block const* blk = blocks.find(m, k);
        if (!blk)
            throw IncompleteBlock("position " + std::to_string(k) + " lies in a level-" + std::to_string(m) +
                                  " block cut by the window");
        chosen[{m, blk->anchor}] = blk->members;
    }
    Covering q;
    for (auto& [key, members] : chosen)
        q.push_back(std::move(members));
    std::sort(q.begin(), q.end());
    if (!is_class_covering(q, s, n))
        throw std::logic_error("covering_of: result violates the covering properties");
    return q;
}

BlockAudit audit_block_contents(PathSample const& path, HierarchyWindow const& window,
                                BlockDecomposition const& blocks)
{
    BlockAudit audit;
    for (int m = 1; m < static_cast<int>(blocks.blocks.size()); ++m)
    {
        for (auto const* blk : blocks.d_blocks(m))
        {
            BlockAuditEntry e;
            e.m = m;
            e.min = blk->members.front();
            e.max = blk->members.back();
            bool matches = static_cast<std::int64_t>(blk->members.size()) == six_pow(m);
            LevelTree const tree(m, MeasureKind::cen,
                                 block_key(path.seed, m, window.anchor_ordinal_at(blk->anchor)));
            for (std::size_t v = 0; v < blk->members.size(); ++v)
            {
                int const x = path.x_at(blk->members[v]);
                e.sum += x;
                e.product *= x;
                matches = matches && x == tree.coordinate(static_cast<std::int64_t>(v));
            }
            e.pass = matches && e.sum == 0 && e.product == (m == 1 ? -1 : 1);
            audit.pass = audit.pass && e.pass;
            audit.entries.push_back(e);
        }
    }
    return audit;
}

std::vector<std::string> audit_structure(HierarchyWindow const& window, BlockDecomposition const& blocks)
{
    std::vector<std::string> issues;
    auto fail = [&](std::string msg) {
        if (issues.size() < 50)
            issues.push_back(std::move(msg));
    };

    for (auto const& level : window.levels())
    {
        auto const report = check_condition_S(level.w);
        if (!report.pass)
            fail("condition S fails at level " + std::to_string(level.level) + ", index " +
                 std::to_string(level.lo + static_cast<std::int64_t>(*report.first_violation)));
    }

    int const depth = window.depth();
    for (std::int64_t k = window.a(); k <= window.b(); ++k)
    {
        // Shape: a run of 1's, then at most one symbol in 2..6, then zeros.
        int phase = 0;
        for (int n = 1; n <= depth; ++n)
        {
            int const w = window.symbol(n, k);
            if (w == 1 && window.n_at(k) < n)
                fail("position " + std::to_string(k) + " has W=1 at level " + std::to_string(n) + " but smaller N");
            if (phase == 0 && w == 1)
                continue;
            if (phase == 0 && w >= 2)
                phase = 1;
            else if (w != 0)
                fail("position " + std::to_string(k) + " has an invalid level shape");
            else
                phase = 2;
        }
        int const nk = window.n_at(k);
        if (window.j_at(k) < 0 || (nk > 0 && window.j_at(k) >= six_pow(nk)) || (nk == 0 && window.j_at(k) != 0))
            fail("position " + std::to_string(k) + " has J out of range");
    }

    for (int n = 1; n < depth; ++n)
    {
        auto const lower = window.anchors_in(n, window.a(), window.b());
        auto const upper = window.anchors_in(n + 1, window.a(), window.b());
        if (6 * static_cast<std::int64_t>(upper.size()) > 6 + static_cast<std::int64_t>(lower.size()))
            fail("nesting bound fails between levels " + std::to_string(n) + " and " + std::to_string(n + 1));
    }

    for (int m = 1; m < static_cast<int>(blocks.blocks.size()); ++m)
    {
        for (auto const& blk : blocks.blocks[static_cast<std::size_t>(m)])
        {
            std::string const where = "level-" + std::to_string(m) + " block at " + std::to_string(blk.anchor);
            if (static_cast<std::int64_t>(blk.members.size()) != six_pow(m))
                fail(where + " has " + std::to_string(blk.members.size()) + " members");
            for (std::size_t v = 0; v < blk.members.size(); ++v)
            {
                auto const k = blk.members[v];
                if (window.j_at(k) % six_pow(m) != static_cast<std::int64_t>(v))
                    fail(where + " breaks the J ordering at " + std::to_string(k));
                if (blk.in_d && (window.n_at(k) != m || window.anchor_at(k) != blk.anchor))
                    fail(where + " mixes depths or anchors at " + std::to_string(k));
            }
            if (m >= 2)
            {
                std::vector<std::int64_t> joined;
                int parts = 0;
                for (auto const& sub : blocks.blocks[static_cast<std::size_t>(m - 1)])
                {
                    if (sub.anchor < blk.anchor || sub.anchor >= blk.next_anchor || sub.in_d)
                        continue;
                    ++parts;
                    if (window.symbol(m, sub.anchor) != parts)
                        fail(where + " has sub-block " + std::to_string(parts) + " out of cycle order");
                    joined.insert(joined.end(), sub.members.begin(), sub.members.end());
                }
                if (parts != 6 || joined != blk.members)
                    fail(where + " is not the union of six level-" + std::to_string(m - 1) + " blocks");
            }
        }
    }
    return issues;
}

nlohmann::json to_json(BlockAudit const& audit)
{
    auto arr = nlohmann::json::array();
    for (auto const& e : audit.entries)
        arr.push_back({{"m", e.m}, {"min", e.min}, {"max", e.max}, {"sum", e.sum}, {"product", e.product},
                       {"pass", e.pass}});
    return arr;
}

} // namespace fivewise
