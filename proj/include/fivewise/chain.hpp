#pragma once

#include "fivewise/coding.hpp"
#include "fivewise/rational.hpp"
#include "fivewise/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace fivewise {

// Each coordinate is 1 with probability 3/8: three fair bits, value < 3.
constexpr Bit6 xi_from_word(std::uint64_t h) noexcept
{
    std::uint8_t mask = 0;
    for (int i = 0; i < 6; ++i)
        if (((h >> (3 * i)) & 7u) < 3u)
            mask |= static_cast<std::uint8_t>(1u << i);
    return Bit6{mask};
}

// Innovation columns of one level, keyed by index in that level's index space.
struct XiSource
{
    StreamKey key;
    Bit6 operator()(std::int64_t index) const noexcept { return xi_from_word(key.draw(index)); }
};

// Innovation key of hierarchy level n under a seed; level 1 is the chain itself.
inline StreamKey innovation_key(std::uint64_t seed, int level)
{
    return StreamKey::root(seed).child(Tag::xi).child(level);
}

using TransitionMatrix = std::array<std::array<Rational, 6>, 6>;

TransitionMatrix derive_transition_matrix();
// (1/6, ..., 1/6) P == (1/6, ..., 1/6) in exact arithmetic.
bool uniform_is_stationary(TransitionMatrix const& p);

Rational identity_pattern_probability();

// U on [start_index, start_index + states.size()), W from start_index + 1 on.
struct ChainPath
{
    std::int64_t start_index = 0;
    std::vector<std::uint8_t> states;
    std::vector<std::uint8_t> spaced;

    std::int64_t first() const noexcept { return start_index + 1; }
    std::int64_t last() const noexcept { return start_index + static_cast<std::int64_t>(states.size()) - 1; }
    int u(std::int64_t k) const { return states[static_cast<std::size_t>(k - start_index)]; }
    int w(std::int64_t k) const { return spaced[static_cast<std::size_t>(k - start_index - 1)]; }
};

// Spaced symbols of a state sequence: element i corresponds to states[i + 1].
std::vector<std::uint8_t> spaced_from_states(std::vector<std::uint8_t> const& states);

// Canonical U on [lo, hi] by coupling from the past: six copies run from
// successively earlier starts (doubling) until they coalesce by lo. Values are
// independent of the start, so overlapping requests agree. `level` only labels
// the budget error.
std::vector<std::uint8_t>
canonical_segment(XiSource const& xi, std::int64_t lo, std::int64_t hi, std::int64_t backward_budget, int level = 1);

// The same values by literal evaluation: scan back to an identity pattern ending
// at or before lo, then evaluate the code forward, restarting at every pattern.
std::vector<std::uint8_t>
literal_segment(XiSource const& xi, std::int64_t lo, std::int64_t hi, std::int64_t scan_budget, int level = 1);

ChainPath sample_stationary_path(std::int64_t a, std::int64_t b, StreamKey key);
ChainPath sample_stationary_path_cftp(std::int64_t a, std::int64_t b, StreamKey key,
                                      std::int64_t backward_budget = std::int64_t{1} << 24);
ChainPath literal_level1_sampler(std::int64_t a, std::int64_t b, std::int64_t scan_budget, StreamKey key);

// Gaps between consecutive W = 1 on a canonical path over [1, path_length].
std::vector<std::int64_t> return_time_samples(std::int64_t path_length, StreamKey key);

// Number of positions t in [1, positions] where the identity pattern ends.
std::int64_t count_identity_patterns(std::int64_t positions, StreamKey key);

// counts[p], p = 1..6: positions t in [1, positions] where e_1..e_p ends at t
// (the detector's progress equals p). The columns are distinct, so these events
// are exact and have probability ((5/8)^5 (3/8))^p.
using PrefixCounts = std::array<std::int64_t, 7>;
PrefixCounts count_pattern_prefixes(std::int64_t positions, StreamKey key);

} // namespace fivewise
