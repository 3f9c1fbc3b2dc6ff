#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fivewise {

// Element of {0,1}^6; coordinate i (1..6) lives in bit i-1.
struct Bit6
{
    std::uint8_t mask = 0;

    constexpr bool operator[](int i) const noexcept { return (mask >> (i - 1)) & 1; }
    static constexpr Bit6 unit(int i) noexcept { return Bit6{static_cast<std::uint8_t>(1u << (i - 1))}; }
    friend constexpr bool operator==(Bit6, Bit6) = default;
};

inline constexpr Bit6 kZeroBit6{0};

// One update of the cyclic code: j -> j+1 on bit j+1, 6 -> 1 on bit 1.
constexpr int chain_step(int state, Bit6 beta) noexcept
{
    int const next = state == 6 ? 1 : state + 1;
    return beta[next] ? next : state;
}

// Six columns e_1..e_6, oldest first.
constexpr std::array<Bit6, 6> identity_pattern() noexcept
{
    return {Bit6::unit(1), Bit6::unit(2), Bit6::unit(3), Bit6::unit(4), Bit6::unit(5), Bit6::unit(6)};
}

// Sliding detector: reports whether the last six pushed columns are e_1..e_6.
class IdentityMatcher
{
  public:
    bool push(Bit6 beta) noexcept
    {
        // progress_ = length of the longest prefix e_1..e_p ending at the newest column.
        if (progress_ < 6 && beta == Bit6::unit(progress_ + 1))
            ++progress_;
        else
            progress_ = beta == Bit6::unit(1) ? 1 : 0;
        return progress_ == 6;
    }
    void reset() noexcept { progress_ = 0; }
    int progress() const noexcept { return progress_; }

  private:
    int progress_ = 0;
};

// A history whose six columns just before `suffix` form the identity pattern.
// The anchor is implicit, so the non-back-standard branch cannot be reached.
struct RegenerationAnchoredHistory
{
    std::vector<Bit6> suffix; // oldest first

    std::size_t anchor_offset() const noexcept { return suffix.size(); }
    // Pattern followed by suffix, oldest first.
    std::vector<Bit6> columns() const;
};

// Streaming form of the coding functions: one state per step.
class CodingFolder
{
  public:
    // Starts at an anchor, where the basic code is 6.
    CodingFolder() = default;
    explicit CodingFolder(int state) : state_(state) {}

    // Returns the spaced symbol of the pushed column.
    int push(Bit6 beta) noexcept
    {
        int const prev = state_;
        state_ = chain_step(state_, beta);
        return state_ != prev ? state_ : 0;
    }
    int state() const noexcept { return state_; }

  private:
    int state_ = 6;
};

int g_basic_anchored(RegenerationAnchoredHistory const& history);

// Throws std::invalid_argument on an empty suffix.
int g_spaced_anchored(RegenerationAnchoredHistory const& history);

struct CodingTraceRow
{
    std::int64_t k;
    int g_basic;
    int g_spaced;
};

// Per suffix element, k = 1 .. suffix length.
std::vector<CodingTraceRow> coding_trace(RegenerationAnchoredHistory const& history);

// Index of the (j+1)-th mark, marks indexed into the past. Throws InsufficientMarks.
std::size_t psi(std::size_t j, std::span<std::uint8_t const> marks);

struct ConditionSReport
{
    bool pass = true;
    std::optional<std::size_t> first_violation;
};

ConditionSReport check_condition_S(std::span<std::uint8_t const> window);

} // namespace fivewise
