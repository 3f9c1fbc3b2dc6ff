#include "fivewise/coding.hpp"

#include "fivewise/errors.hpp"

#include <stdexcept>
#include <string>

namespace fivewise {

std::vector<Bit6> RegenerationAnchoredHistory::columns() const
{
    auto const pattern = identity_pattern();
    std::vector<Bit6> out(pattern.begin(), pattern.end());
    out.insert(out.end(), suffix.begin(), suffix.end());
    return out;
}

int g_basic_anchored(RegenerationAnchoredHistory const& history)
{
    // Greatest pattern end inside the suffix; the anchor itself is the fallback.
    IdentityMatcher matcher;
    std::size_t restart = 0;
    for (auto beta : identity_pattern())
        matcher.push(beta);
    for (std::size_t i = 0; i < history.suffix.size(); ++i)
        if (matcher.push(history.suffix[i]))
            restart = i + 1;
    int state = 6;
    for (std::size_t i = restart; i < history.suffix.size(); ++i)
        state = chain_step(state, history.suffix[i]);
    return state;
}

int g_spaced_anchored(RegenerationAnchoredHistory const& history)
{
    if (history.suffix.empty())
        throw std::invalid_argument("g_spaced_anchored: empty suffix has no predecessor");
    int const now = g_basic_anchored(history);
    RegenerationAnchoredHistory shorter{{history.suffix.begin(), history.suffix.end() - 1}};
    return now != g_basic_anchored(shorter) ? now : 0;
}

std::vector<CodingTraceRow> coding_trace(RegenerationAnchoredHistory const& history)
{
    std::vector<CodingTraceRow> rows;
    rows.reserve(history.suffix.size());
    CodingFolder folder;
    for (std::size_t i = 0; i < history.suffix.size(); ++i)
    {
        int const spaced = folder.push(history.suffix[i]);
        rows.push_back({static_cast<std::int64_t>(i + 1), folder.state(), spaced});
    }
    return rows;
}

std::size_t psi(std::size_t j, std::span<std::uint8_t const> marks)
{
    std::size_t seen = 0;
    for (std::size_t k = 0; k < marks.size(); ++k)
        if (marks[k] == 1 && seen++ == j)
            return k;
    throw InsufficientMarks("psi: need " + std::to_string(j + 1) + " marks, window has " + std::to_string(seen));
}

ConditionSReport check_condition_S(std::span<std::uint8_t const> window)
{
    ConditionSReport report;
    int last = 0;
    for (std::size_t k = 0; k < window.size(); ++k)
    {
        int const v = window[k];
        if (v == 0)
            continue;
        if (v < 0 || v > 6 || (last != 0 && v != (last == 6 ? 1 : last + 1)))
        {
            report.pass = false;
            report.first_violation = k;
            return report;
        }
        last = v;
    }
    return report;
}

} // namespace fivewise
