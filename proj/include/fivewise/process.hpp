#pragma once

#include "fivewise/hierarchy.hpp"

#include <json.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace fivewise {

struct PathSample
{
    std::int64_t a = 0;
    std::int64_t b = -1;
    std::uint64_t seed = 0;
    std::vector<std::int8_t> x;
    std::vector<std::uint8_t> n;
    std::vector<std::int64_t> anchor; // kUnknownPosition when left of the resolved range
    std::vector<std::int64_t> j;

    std::size_t size() const noexcept { return x.size(); }
    int x_at(std::int64_t k) const { return x[static_cast<std::size_t>(k - a)]; }
};

// Fair sign for N_k = 0, else coordinate J of the centered block vector keyed
// by (level, anchor ordinal).
PathSample sample_path(HierarchyWindow const& window);
PathSample sample_path(std::int64_t a, std::int64_t b, SamplerConfig const& config);

// X_k for the given record, evaluated independently of any window.
int block_value(std::uint64_t seed, int level, std::int64_t anchor_ordinal, std::int64_t j);

struct Block
{
    int level = 0;
    std::int64_t anchor = 0;     // first level-`level` 1-position of the bracket
    std::int64_t next_anchor = 0; // the following one (exclusive end of the bracket)
    bool in_d = false;           // every member has N_k == level
    std::vector<std::int64_t> members;
};

struct BlockDecomposition
{
    std::int64_t a = 0;
    std::int64_t b = -1;
    int top_level = 0;
    // blocks[m] holds the complete level-m blocks (m >= 1), ordered by anchor.
    std::vector<std::vector<Block>> blocks;

    std::vector<Block const*> d_blocks(int m) const;
    std::vector<Block const*> e_blocks(int m) const;
    // Complete level-m block whose bracket contains k, if any.
    Block const* find(int m, std::int64_t k) const;
};

BlockDecomposition decompose_blocks(HierarchyWindow const& window);

using Covering = std::vector<std::vector<std::int64_t>>;

// Members of D_0 .. D_{n-1} and E_n meeting S. Throws IncompleteBlock when S
// touches a block cut by the window, std::logic_error if (i)-(iv) fail.
Covering covering_of(std::set<std::int64_t> const& s, int n, HierarchyWindow const& window,
                     BlockDecomposition const& blocks);

// Properties (i)-(iv) of a class C(n) covering of S.
bool is_class_covering(Covering const& q, std::set<std::int64_t> const& s, int n);

struct BlockAuditEntry
{
    int m = 0;
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::int64_t sum = 0;
    int product = 1;
    bool pass = true;
};

struct BlockAudit
{
    std::vector<BlockAuditEntry> entries;
    bool pass = true;
};

// Every complete D_m block (m >= 1): zero sum, parity -1 at m = 1 and +1 above,
// entries equal to the block vector keyed at its anchor.
BlockAudit audit_block_contents(PathSample const& path, HierarchyWindow const& window,
                                BlockDecomposition const& blocks);

// Deterministic structure checks on a resolved window; returns one message per violation.
std::vector<std::string> audit_structure(HierarchyWindow const& window, BlockDecomposition const& blocks);

nlohmann::json to_json(BlockAudit const& audit);

} // namespace fivewise
