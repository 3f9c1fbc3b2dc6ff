#include "fivewise/chain.hpp"

#include "fivewise/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace fivewise {

TransitionMatrix derive_transition_matrix()
{
    TransitionMatrix p{};
    for (int code = 0; code < 64; ++code)
    {
        Bit6 const beta{static_cast<std::uint8_t>(code)};
        Rational weight = 1;
        for (int i = 1; i <= 6; ++i)
            weight *= beta[i] ? Rational(3, 8) : Rational(5, 8);
        for (int from = 1; from <= 6; ++from)
            p[static_cast<std::size_t>(from - 1)][static_cast<std::size_t>(chain_step(from, beta) - 1)] += weight;
    }
    return p;
}

bool uniform_is_stationary(TransitionMatrix const& p)
{
    for (std::size_t j = 0; j < 6; ++j)
    {
        Rational col = 0;
        for (std::size_t i = 0; i < 6; ++i)
            col += Rational(1, 6) * p[i][j];
        if (col != Rational(1, 6))
            return false;
    }
    return true;
}

Rational identity_pattern_probability() { return rpow(Rational(5, 8), 30) * rpow(Rational(3, 8), 6); }

std::vector<std::uint8_t> spaced_from_states(std::vector<std::uint8_t> const& states)
{
    std::vector<std::uint8_t> w;
    if (states.size() < 2)
        return w;
    w.resize(states.size() - 1);
    for (std::size_t i = 1; i < states.size(); ++i)
        w[i - 1] = states[i] != states[i - 1] ? states[i] : 0;
    return w;
}

namespace {

std::vector<std::uint8_t> run_forward(XiSource const& xi, int state, std::int64_t lo, std::int64_t hi)
{
    std::vector<std::uint8_t> out(static_cast<std::size_t>(hi - lo + 1));
    out[0] = static_cast<std::uint8_t>(state);
    for (std::int64_t t = lo + 1; t <= hi; ++t)
    {
        state = chain_step(state, xi(t));
        out[static_cast<std::size_t>(t - lo)] = static_cast<std::uint8_t>(state);
    }
    return out;
}

} // namespace

std::vector<std::uint8_t>
canonical_segment(XiSource const& xi, std::int64_t lo, std::int64_t hi, std::int64_t backward_budget, int level)
{
    if (hi < lo)
        throw std::invalid_argument("canonical_segment: empty range");
    for (std::int64_t back = 32;; back *= 2)
    {
        if (back > backward_budget)
            throw BudgetExceeded("coupling did not coalesce within " + std::to_string(backward_budget) + " steps",
                                 level);
        std::array<int, 6> copies{1, 2, 3, 4, 5, 6};
        for (std::int64_t t = lo - back + 1; t <= lo; ++t)
        {
            Bit6 const beta = xi(t);
            for (auto& c : copies)
                c = chain_step(c, beta);
            if (std::all_of(copies.begin() + 1, copies.end(), [&](int c) { return c == copies[0]; }))
            {
                int state = copies[0];
                for (++t; t <= lo; ++t)
                    state = chain_step(state, xi(t));
                return run_forward(xi, state, lo, hi);
            }
        }
    }
}

std::vector<std::uint8_t>
literal_segment(XiSource const& xi, std::int64_t lo, std::int64_t hi, std::int64_t scan_budget, int level)
{
    if (hi < lo)
        throw std::invalid_argument("literal_segment: empty range");
    auto const pattern = identity_pattern();
    std::int64_t end = lo;
    for (;; --end)
    {
        if (lo - end > scan_budget)
            throw BudgetExceeded("no identity pattern within " + std::to_string(scan_budget) + " columns", level);
        int i = 5;
        while (i >= 0 && xi(end - (5 - i)) == pattern[static_cast<std::size_t>(i)])
            --i;
        if (i < 0)
            break;
    }
    IdentityMatcher matcher;
    for (auto beta : pattern)
        matcher.push(beta);
    int state = 6;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(hi - lo + 1));
    if (end == lo)
        out[0] = 6;
    for (std::int64_t t = end + 1; t <= hi; ++t)
    {
        Bit6 const beta = xi(t);
        state = matcher.push(beta) ? 6 : chain_step(state, beta);
        if (t >= lo)
            out[static_cast<std::size_t>(t - lo)] = static_cast<std::uint8_t>(state);
    }
    return out;
}

namespace {

ChainPath make_path(std::int64_t a, std::vector<std::uint8_t> states)
{
    ChainPath path;
    path.start_index = a - 1;
    path.spaced = spaced_from_states(states);
    path.states = std::move(states);
    return path;
}

} // namespace

ChainPath sample_stationary_path(std::int64_t a, std::int64_t b, StreamKey key)
{
    if (b < a)
        throw std::invalid_argument("sample_stationary_path: a > b");
    KeyedStream start(key.child(Tag::start).child(a));
    int const u0 = static_cast<int>(start.below(6)) + 1;
    return make_path(a, run_forward(XiSource{key}, u0, a - 1, b));
}

ChainPath sample_stationary_path_cftp(std::int64_t a, std::int64_t b, StreamKey key, std::int64_t backward_budget)
{
    if (b < a)
        throw std::invalid_argument("sample_stationary_path_cftp: a > b");
    return make_path(a, canonical_segment(XiSource{key}, a - 1, b, backward_budget));
}

ChainPath literal_level1_sampler(std::int64_t a, std::int64_t b, std::int64_t scan_budget, StreamKey key)
{
    if (b < a)
        throw std::invalid_argument("literal_level1_sampler: a > b");
    return make_path(a, literal_segment(XiSource{key}, a - 1, b, scan_budget));
}

std::vector<std::int64_t> return_time_samples(std::int64_t path_length, StreamKey key)
{
    auto const path = sample_stationary_path_cftp(1, path_length, key);
    std::vector<std::int64_t> gaps;
    std::int64_t last = 0;
    for (std::int64_t k = 1; k <= path_length; ++k)
    {
        if (path.w(k) != 1)
            continue;
        if (last != 0)
            gaps.push_back(k - last);
        last = k;
    }
    return gaps;
}

PrefixCounts count_pattern_prefixes(std::int64_t positions, StreamKey key)
{
    XiSource const xi{key};
    IdentityMatcher matcher;
    // Prime with the five columns before position 1 so every end in range counts.
    for (std::int64_t t = -4; t <= 0; ++t)
        matcher.push(xi(t));
    PrefixCounts counts{};
    for (std::int64_t t = 1; t <= positions; ++t)
    {
        matcher.push(xi(t));
        ++counts[static_cast<std::size_t>(matcher.progress())];
    }
    counts[0] = 0;
    return counts;
}

std::int64_t count_identity_patterns(std::int64_t positions, StreamKey key)
{
    return count_pattern_prefixes(positions, key)[6];
}

} // namespace fivewise
