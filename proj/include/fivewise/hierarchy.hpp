#pragma once

#include "fivewise/rng.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fivewise {

inline constexpr std::int64_t kUnknownPosition = std::numeric_limits<std::int64_t>::min();

struct SamplerConfig
{
    std::uint64_t seed = 0;
    double extension_factor = 2.0;                // growth of a left search after each miss
    std::int64_t max_extension = std::int64_t{1} << 28; // memory guard on any left extension
    int max_level = 24;                           // level guard; also keeps J within 64 bits
    std::int64_t backward_budget = std::int64_t{1} << 24; // coupling guard per level
    int min_depth = 0;                            // build at least this many levels
    bool locate_anchors = false;                  // extend left until every anchor has a position
    int literal_depth = 0;                        // levels evaluated by identity-pattern scans
    std::int64_t literal_scan_budget = std::int64_t{1} << 33;
};

// Applies key=value pairs; unknown keys throw std::invalid_argument.
void apply_config(SamplerConfig& config, std::map<std::string, std::string> const& values);
// Flat file: one key=value per line, '#' starts a comment.
std::map<std::string, std::string> read_key_value_file(std::string const& path);

// Level n of the hierarchy. Its chain runs over the ordinals of level-(n-1)
// anchors (positions at level 1). Ordinal 0 of level n is the last level-n
// anchor at or before position 0, so ordinals do not depend on the window.
struct LevelState
{
    int level = 0;
    std::int64_t lo = 0; // first index with a known symbol; always an anchor
    std::int64_t hi = -1;
    std::vector<std::uint8_t> u; // chain states on [lo - 1, hi]
    std::vector<std::uint8_t> w; // spaced symbols on [lo, hi]
    std::vector<std::int64_t> anchors;          // indices with symbol 1, ascending
    std::vector<std::int64_t> anchor_positions; // physical positions or kUnknownPosition
    std::int64_t origin_rank = 0;               // rank of ordinal 0 in `anchors`

    bool covers(std::int64_t index) const noexcept { return index >= lo && index <= hi; }
    int symbol(std::int64_t index) const { return w[static_cast<std::size_t>(index - lo)]; }
    std::int64_t ordinal_of_rank(std::int64_t rank) const noexcept { return rank - origin_rank; }
    std::int64_t rank_of_ordinal(std::int64_t ordinal) const noexcept { return ordinal + origin_rank; }
    // Level-n ordinal of the last level-n anchor with index <= `index`.
    std::int64_t last_anchor_ordinal(std::int64_t index) const;
    std::int64_t position_of_ordinal(std::int64_t ordinal) const;
};

struct PositionRecord
{
    int n = 0;                                 // N_k
    std::int64_t anchor = kUnknownPosition;    // k - Psi(N_k, k, 0)
    std::int64_t anchor_ordinal = 0;           // level-N_k ordinal of the anchor (k itself at N_k = 0)
    std::int64_t j = 0;                        // J(N_k, k)
    std::vector<int> deltas;                   // delta^(1..N_k+1)
};

class HierarchyWindow
{
  public:
    std::int64_t a() const noexcept { return a_; }
    std::int64_t b() const noexcept { return b_; }
    std::uint64_t seed() const noexcept { return seed_; }
    int depth() const noexcept { return static_cast<int>(levels_.size()); }
    LevelState const& level(int n) const { return levels_.at(static_cast<std::size_t>(n - 1)); }
    std::vector<LevelState> const& levels() const noexcept { return levels_; }

    int n_at(std::int64_t k) const { return n_[idx(k)]; }
    std::int64_t j_at(std::int64_t k) const { return j_[idx(k)]; }
    std::int64_t anchor_at(std::int64_t k) const { return anchor_[idx(k)]; }
    std::int64_t anchor_ordinal_at(std::int64_t k) const { return anchor_ordinal_[idx(k)]; }

    PositionRecord record(std::int64_t k) const;
    // W^(n)_k at a window position; 0 beyond the built depth.
    int symbol(int n, std::int64_t k) const;
    // Physical level-n anchors inside [lo, hi], ascending.
    std::vector<std::int64_t> anchors_in(int n, std::int64_t lo, std::int64_t hi) const;
    bool all_anchors_located() const;

  private:
    friend class HierarchyBuilder;
    std::size_t idx(std::int64_t k) const { return static_cast<std::size_t>(k - a_); }

    std::int64_t a_ = 0;
    std::int64_t b_ = -1;
    std::uint64_t seed_ = 0;
    std::vector<LevelState> levels_;
    std::vector<std::uint8_t> n_;
    std::vector<std::int64_t> j_;
    std::vector<std::int64_t> anchor_;
    std::vector<std::int64_t> anchor_ordinal_;
};

// Canonical (coupling-from-the-past) evaluation at every level.
HierarchyWindow build(std::int64_t a, std::int64_t b, SamplerConfig const& config);
// Identity-pattern scans on levels 1..config.literal_depth (default 2), canonical above.
// Same values as build() for the same seed.
HierarchyWindow literal_build(std::int64_t a, std::int64_t b, SamplerConfig config);

PositionRecord resolve_position(std::int64_t k, HierarchyWindow const& window);

struct DoubleOneEstimate
{
    int n = 0;
    std::int64_t replicates = 0;
    double estimate = 0;
    double stderr_ = 0;
};

// Fraction of replicates whose window [1, 6 * 16^n] has two or more level-n 1's.
DoubleOneEstimate double_one_probability(int n, std::int64_t replicates, StreamKey key,
                                         std::int64_t window_length = -1);

} // namespace fivewise
