#pragma once

#include "fivewise/rational.hpp"
#include "fivewise/rng.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fivewise {

// Number of coordinates of a level-n vector, 6^n. n <= 24.
std::int64_t six_pow(int n);

// Bit-packed element of {-1,+1}^(6^level); a set bit is a -1.
class SignVector
{
  public:
    SignVector() = default;
    explicit SignVector(int level);
    static SignVector from_string(std::string_view pluses_and_minuses);

    int level() const noexcept { return level_; }
    std::int64_t size() const noexcept { return size_; }

    int operator[](std::int64_t i) const noexcept { return (bits_[i >> 6] >> (i & 63)) & 1 ? -1 : 1; }
    void set(std::int64_t i, int value) noexcept
    {
        auto const mask = std::uint64_t{1} << (i & 63);
        if (value < 0)
            bits_[i >> 6] |= mask;
        else
            bits_[i >> 6] &= ~mask;
    }

    std::int64_t sum() const noexcept;
    int product() const noexcept;
    SignVector negated() const;
    std::string to_string() const;

    friend bool operator==(SignVector const&, SignVector const&) = default;
    friend bool operator<(SignVector const& a, SignVector const& b) { return a.to_string() < b.to_string(); }

  private:
    int level_ = 0;
    std::int64_t size_ = 0;
    std::vector<std::uint64_t> bits_;
};

using KeyVector = std::array<int, 6>;

enum class MeasureKind
{
    ord,
    cen,
    fri,
    pos
};

enum class SumConstraint
{
    none,
    sum0,
    abs4,
    sum4
};

char const* to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(std::string_view name);
SumConstraint constraint_of(MeasureKind kind);
bool admits_level(MeasureKind kind, int n);

// The 32 members of Upsilon, lexicographic with -1 before +1.
std::vector<KeyVector> const& enumerate_upsilon();

// Members of Upsilon satisfying the constraint, in the same order.
std::vector<KeyVector> const& upsilon_subset(SumConstraint constraint);

KeyVector sample_key(SumConstraint constraint, KeyedStream& stream);

// Lazily evaluated draw from the recursive family. The top node carries the
// kind's constraint, every lower node a sum4 key; each node's key vector is a
// pure function of its stream key, so coordinates can be read in any order
// without materializing 6^n entries.
class LevelTree
{
  public:
    LevelTree(int level, MeasureKind kind, StreamKey key);

    int level() const noexcept { return level_; }
    MeasureKind kind() const noexcept { return kind_; }

    // Coordinate j in 0 .. 6^level - 1, O(level) work.
    int coordinate(std::int64_t j) const;
    SignVector materialize() const;

  private:
    void fill(SignVector& out, StreamKey node, int depth, std::int64_t offset, int sign) const;

    int level_;
    MeasureKind kind_;
    StreamKey key_;
};

SignVector sample_level(int n, MeasureKind kind, StreamKey key);

struct ExactDistribution
{
    std::vector<std::pair<SignVector, Rational>> support; // sorted by vector string

    Rational total_mass() const;
    Rational mass_of(SignVector const& x) const;
};

ExactDistribution exact_distribution(int n, MeasureKind kind);

// Law of the coordinate sum, keyed by the sum value.
std::map<std::int64_t, Rational> sum_distribution(int n, MeasureKind kind);

struct ExactMoments
{
    Rational coordinate_mean_pos;
    std::optional<Rational> sixth_moment_sum_ord; // needs n >= 1
    // Almost-sure product per kind; empty when the product is not a.s. constant.
    std::map<MeasureKind, std::optional<int>> product_parity;
};

ExactMoments exact_moments(int n);

Rational sixth_moment_gap(int n, std::array<std::int64_t, 6> const& block_counts);

nlohmann::json to_json(ExactDistribution const& dist);
nlohmann::json to_json(std::map<std::int64_t, Rational> const& law);

} // namespace fivewise
