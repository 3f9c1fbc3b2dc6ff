#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <type_traits>

namespace fivewise {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stream tags. Values are part of the reproducibility contract: changing one
// changes every sample drawn under it.
enum class Tag : std::uint64_t
{
    xi = 1,        // innovation bits of the level chains
    x0 = 2,        // level-0 fair signs of the process
    cen = 3,       // block vectors of the process
    start = 4,     // uniform start state of the non-canonical chain sampler
    replicate = 5, // per-replicate sub-seeds of campaigns
    measure = 6,   // direct draws from the parity measures
    synthetic = 7, // i.i.d. reference streams used by the harness
};

// A 64-bit stream identity. Draws are a pure function of (key, counter), so any
// value can be recomputed in any order.
struct StreamKey
{
    std::uint64_t value = 0;

    static constexpr StreamKey root(std::uint64_t seed) noexcept
    {
        return StreamKey{mix64(seed ^ 0x6a09e667f3bcc909ull)};
    }
    // Integer ids are taken modulo 2^64, so child(-1) and child(2^64 - 1) coincide.
    template <class Int>
        requires std::is_integral_v<Int>
    constexpr StreamKey child(Int id) const noexcept
    {
        return derive(static_cast<std::uint64_t>(id));
    }
    constexpr StreamKey child(Tag tag) const noexcept
    {
        return derive(static_cast<std::uint64_t>(tag) * 0x100000001b3ull);
    }

    // Counter-mode output: SplitMix64 state `value + (counter + 1) * golden`.
    constexpr std::uint64_t draw(std::int64_t counter) const noexcept
    {
        return mix64(value + (static_cast<std::uint64_t>(counter) + 1) * kGolden);
    }

    friend constexpr bool operator==(StreamKey, StreamKey) = default;

  private:
    constexpr StreamKey derive(std::uint64_t id) const noexcept { return StreamKey{mix64(value ^ mix64(id + kGolden))}; }
};

// Sequential reader over a key.
class KeyedStream
{
  public:
    constexpr explicit KeyedStream(StreamKey key) noexcept : key_(key) {}

    constexpr std::uint64_t next() noexcept { return key_.draw(counter_++); }

    // Exactly uniform on [0, n) by Lemire's rejection method. n > 0.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n)
        {
            std::uint64_t const threshold = (0 - n) % n;
            while (low < threshold)
            {
                m = static_cast<unsigned __int128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    int sign() noexcept { return (next() >> 63) ? -1 : 1; }

    // Uniform on [0, 1) with 53 bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    constexpr StreamKey key() const noexcept { return key_; }

  private:
    StreamKey key_;
    std::int64_t counter_ = 0;
};

} // namespace fivewise
