#include "fivewise/parity_measures.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace fivewise {

std::int64_t six_pow(int n)
{
    if (n < 0 || n > 24)
        throw std::out_of_range("six_pow: level out of range");
    std::int64_t r = 1;
    for (int i = 0; i < n; ++i)
        r *= 6;
    return r;
}

SignVector::SignVector(int level)
    : level_(level), size_(six_pow(level)), bits_(static_cast<std::size_t>((size_ + 63) / 64), 0)
{
}

SignVector SignVector::from_string(std::string_view s)
{
    int level = 0;
    std::int64_t n = 1;
    while (n < static_cast<std::int64_t>(s.size()))
    {
        n *= 6;
        ++level;
    }
    if (n != static_cast<std::int64_t>(s.size()))
        throw std::invalid_argument("SignVector: length is not a power of six");
    SignVector v(level);
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        if (s[i] != '+' && s[i] != '-')
            throw std::invalid_argument("SignVector: expected '+' or '-'");
        v.set(static_cast<std::int64_t>(i), s[i] == '-' ? -1 : 1);
    }
    return v;
}

std::int64_t SignVector::sum() const noexcept
{
    std::int64_t minus = 0;
    for (auto word : bits_)
        minus += std::popcount(word);
    return size_ - 2 * minus;
}

int SignVector::product() const noexcept
{
    std::int64_t minus = 0;
    for (auto word : bits_)
        minus += std::popcount(word);
    return (minus & 1) ? -1 : 1;
}

SignVector SignVector::negated() const
{
    SignVector r(level_);
    for (std::int64_t i = 0; i < size_; ++i)
        r.set(i, -(*this)[i]);
    return r;
}

std::string SignVector::to_string() const
{
    std::string s(static_cast<std::size_t>(size_), '+');
    for (std::int64_t i = 0; i < size_; ++i)
        if ((*this)[i] < 0)
            s[static_cast<std::size_t>(i)] = '-';
    return s;
}

char const* to_string(MeasureKind kind)
{
    switch (kind)
    {
    case MeasureKind::ord: return "ord";
    case MeasureKind::cen: return "cen";
    case MeasureKind::fri: return "fri";
    case MeasureKind::pos: return "pos";
    }
    return "?";
}

MeasureKind measure_kind_from_string(std::string_view name)
{
    if (name == "ord")
        return MeasureKind::ord;
    if (name == "cen")
        return MeasureKind::cen;
    if (name == "fri")
        return MeasureKind::fri;
    if (name == "pos")
        return MeasureKind::pos;
    throw std::invalid_argument("unknown measure kind: " + std::string(name));
}

SumConstraint constraint_of(MeasureKind kind)
{
    switch (kind)
    {
    case MeasureKind::ord: return SumConstraint::none;
    case MeasureKind::cen: return SumConstraint::sum0;
    case MeasureKind::fri: return SumConstraint::abs4;
    case MeasureKind::pos: return SumConstraint::sum4;
    }
    return SumConstraint::none;
}

bool admits_level(MeasureKind kind, int n)
{
    if (n < 0)
        return false;
    return n >= 1 || kind == MeasureKind::fri || kind == MeasureKind::pos;
}

namespace {

int key_sum(KeyVector const& v)
{
    int s = 0;
    for (int x : v)
        s += x;
    return s;
}

bool satisfies(KeyVector const& v, SumConstraint c)
{
    int const s = key_sum(v);
    switch (c)
    {
    case SumConstraint::none: return true;
    case SumConstraint::sum0: return s == 0;
    case SumConstraint::abs4: return s == 4 || s == -4;
    case SumConstraint::sum4: return s == 4;
    }
    return false;
}

} // namespace

std::vector<KeyVector> const& enumerate_upsilon()
{
    static std::vector<KeyVector> const all = [] {
        std::vector<KeyVector> out;
        for (int code = 0; code < 64; ++code)
        {
            KeyVector v{};
            int minus = 0;
            for (int i = 0; i < 6; ++i)
            {
                // Most significant bit first; a zero bit is -1 so -1 sorts first.
                bool const plus = (code >> (5 - i)) & 1;
                v[static_cast<std::size_t>(i)] = plus ? 1 : -1;
                minus += plus ? 0 : 1;
            }
            if (minus % 2 == 1)
                out.push_back(v);
        }
        return out;
    }();
    return all;
}

std::vector<KeyVector> const& upsilon_subset(SumConstraint constraint)
{
    static std::array<std::vector<KeyVector>, 4> const subsets = [] {
        std::array<std::vector<KeyVector>, 4> out;
        for (int c = 0; c < 4; ++c)
            for (auto const& v : enumerate_upsilon())
                if (satisfies(v, static_cast<SumConstraint>(c)))
                    out[static_cast<std::size_t>(c)].push_back(v);
        return out;
    }();
    return subsets[static_cast<std::size_t>(constraint)];
}

KeyVector sample_key(SumConstraint constraint, KeyedStream& stream)
{
    auto const& pool = upsilon_subset(constraint);
    return pool[static_cast<std::size_t>(stream.below(pool.size()))];
}

LevelTree::LevelTree(int level, MeasureKind kind, StreamKey key) : level_(level), kind_(kind), key_(key)
{
    if (!admits_level(kind, level))
        throw std::invalid_argument(std::string("measure ") + to_string(kind) + " needs level >= 1");
    six_pow(level);
}

int LevelTree::coordinate(std::int64_t j) const
{
    if (level_ == 0)
    {
        if (kind_ == MeasureKind::pos)
            return 1;
        KeyedStream s(key_);
        return s.sign();
    }
    std::int64_t stride = six_pow(level_ - 1);
    StreamKey node = key_;
    int sign = 1;
    for (int depth = 0; depth < level_; ++depth)
    {
        auto const digit = static_cast<int>(j / stride);
        j %= stride;
        stride /= 6;
        KeyedStream s(node);
        auto const v = sample_key(depth == 0 ? constraint_of(kind_) : SumConstraint::sum4, s);
        sign *= v[static_cast<std::size_t>(digit)];
        node = node.child(digit);
    }
    return sign;
}

void LevelTree::fill(SignVector& out, StreamKey node, int depth, std::int64_t offset, int sign) const
{
    if (depth == level_)
    {
        out.set(offset, sign);
        return;
    }
    KeyedStream s(node);
    auto const v = sample_key(depth == 0 ? constraint_of(kind_) : SumConstraint::sum4, s);
    std::int64_t const stride = six_pow(level_ - 1 - depth);
    for (int i = 0; i < 6; ++i)
        fill(out, node.child(i), depth + 1, offset + i * stride, sign * v[static_cast<std::size_t>(i)]);
}

SignVector LevelTree::materialize() const
{
    SignVector out(level_);
    if (level_ == 0)
    {
        out.set(0, coordinate(0));
        return out;
    }
    fill(out, key_, 0, 0, 1);
    return out;
}

SignVector sample_level(int n, MeasureKind kind, StreamKey key) { return LevelTree(n, kind, key).materialize(); }

Rational ExactDistribution::total_mass() const
{
    Rational t = 0;
    for (auto const& [x, p] : support)
        t += p;
    return t;
}

Rational ExactDistribution::mass_of(SignVector const& x) const
{
    for (auto const& [y, p] : support)
        if (y == x)
            return p;
    return 0;
}

namespace {

ExactDistribution normalized(std::map<std::string, Rational> const& weights)
{
    Rational total = 0;
    for (auto const& [s, w] : weights)
        total += w;
    ExactDistribution d;
    for (auto const& [s, w] : weights)
        if (w != 0)
            d.support.emplace_back(SignVector::from_string(s), w / total);
    return d;
}

} // namespace

ExactDistribution exact_distribution(int n, MeasureKind kind)
{
    if (n < 0 || n > 1)
        throw std::invalid_argument("exact_distribution: only levels 0 and 1 are enumerable");
    if (!admits_level(kind, n))
        throw std::invalid_argument(std::string("measure ") + to_string(kind) + " needs level >= 1");

    std::map<std::string, Rational> weights;
    if (n == 0)
    {
        if (kind == MeasureKind::pos)
            weights["+"] = 1;
        else
            weights["+"] = weights["-"] = Rational(1, 2);
        return normalized(weights);
    }
    // Level 1: Z_i = V_i * W^(i)_0 with V ~ uniform on Upsilon and each W^(i) the
    // level-0 pos law, then conditioned on the kind's event for sum(Z).
    for (auto const& v : enumerate_upsilon())
    {
        std::string z(6, '+');
        int sum = 0;
        for (std::size_t i = 0; i < 6; ++i)
        {
            int const zi = v[i] * 1;
            z[i] = zi < 0 ? '-' : '+';
            sum += zi;
        }
        bool keep = false;
        switch (kind)
        {
        case MeasureKind::ord: keep = true; break;
        case MeasureKind::cen: keep = sum == 0; break;
        case MeasureKind::fri: keep = sum == 4 || sum == -4; break;
        case MeasureKind::pos: keep = sum == 4; break;
        }
        if (keep)
            weights[z] += Rational(1, 32);
    }
    return normalized(weights);
}

std::map<std::int64_t, Rational> sum_distribution(int n, MeasureKind kind)
{
    if (n < 1 || n > 30)
        throw std::invalid_argument("sum_distribution: level must be in 1..30");
    std::int64_t scale = 1;
    for (int i = 0; i < n; ++i)
        scale *= 4;
    // sum(Z) = sum(V) * 4^(n-1) with sum(V) in {-4, 0, 4}; the V law restricted
    // to the kind's constraint is uniform on the matching subset of Upsilon.
    std::map<std::int64_t, Rational> law;
    auto const& pool = upsilon_subset(constraint_of(kind));
    Rational const w(1, static_cast<long long>(pool.size()));
    for (auto const& v : pool)
        law[static_cast<std::int64_t>(key_sum(v)) / 4 * scale] += w;
    return law;
}

namespace {

// Almost-sure product of a level-n draw, or empty if not a.s. constant.
std::optional<int> parity(int n, MeasureKind kind)
{
    if (n == 0)
        return kind == MeasureKind::pos ? std::optional<int>(1) : std::nullopt;
    // prod(Z) = prod(V)^(6^(n-1)) * prod over six children of prod(W^(i)).
    int const v_part = (n - 1 == 0) ? -1 : 1; // prod(V) = -1, raised to 6^(n-1)
    auto const child = parity(n - 1, MeasureKind::pos);
    return v_part * (*child) * (*child) * (*child) * (*child) * (*child) * (*child);
}

} // namespace

ExactMoments exact_moments(int n)
{
    if (n < 0)
        throw std::invalid_argument("exact_moments: negative level");
    ExactMoments m;
    m.coordinate_mean_pos = rpow(Rational(2, 3), static_cast<unsigned>(n));
    if (n >= 1)
    {
        Rational sixth = 0;
        for (auto const& [s, p] : sum_distribution(n, MeasureKind::ord))
        {
            BigInt s6 = 1;
            for (int i = 0; i < 6; ++i)
                s6 *= s;
            sixth += p * Rational(s6);
        }
        m.sixth_moment_sum_ord = sixth;
    }
    for (auto kind : {MeasureKind::ord, MeasureKind::cen, MeasureKind::fri, MeasureKind::pos})
        if (admits_level(kind, n))
            m.product_parity[kind] = parity(n, kind);
    return m;
}

Rational sixth_moment_gap(int n, std::array<std::int64_t, 6> const& block_counts)
{
    auto const cap = six_pow(n);
    Rational r = rpow(Rational(2, 3), static_cast<unsigned>(6 * n)) * 720;
    for (auto c : block_counts)
    {
        if (c < 0 || c > cap)
            throw std::invalid_argument("sixth_moment_gap: block count out of range");
        r *= c;
    }
    return r;
}

nlohmann::json to_json(ExactDistribution const& dist)
{
    auto arr = nlohmann::json::array();
    auto sorted = dist.support;
    std::sort(sorted.begin(), sorted.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
    for (auto const& [x, p] : sorted)
        arr.push_back({{"vector", x.to_string()}, {"prob_num", numerator_string(p)}, {"prob_den", denominator_string(p)}});
    return arr;
}

nlohmann::json to_json(std::map<std::int64_t, Rational> const& law)
{
    auto arr = nlohmann::json::array();
    for (auto const& [s, p] : law)
        arr.push_back({{"sum", s}, {"prob_num", numerator_string(p)}, {"prob_den", denominator_string(p)}});
    return arr;
}

} // namespace fivewise
