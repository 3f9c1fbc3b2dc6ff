#include "fivewise/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fivewise {

double chi_square_sf(double statistic, int dof)
{
    if (dof <= 0)
        return 1.0;
    if (statistic <= 0)
        return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

namespace {

ChiSquareReport finish(ChiSquareReport r)
{
    r.p_value = chi_square_sf(r.statistic, r.dof);
    r.pass = r.p_value >= r.significance;
    return r;
}

} // namespace

ChiSquareReport chi_square_gof(std::vector<double> const& counts, std::vector<double> const& probabilities,
                               double significance)
{
    if (counts.size() != probabilities.size() || counts.empty())
        throw std::invalid_argument("chi_square_gof: cell count mismatch");
    double const total = std::accumulate(counts.begin(), counts.end(), 0.0);
    ChiSquareReport r;
    r.counts = counts;
    r.expected = probabilities;
    r.significance = significance;
    int cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
    {
        if (counts[i] < 0)
            throw std::invalid_argument("chi_square_gof: negative count");
        double const e = probabilities[i] * total;
        if (e <= 0)
        {
            if (counts[i] > 0)
                r.statistic = INFINITY;
            continue;
        }
        ++cells;
        r.statistic += (counts[i] - e) * (counts[i] - e) / e;
    }
    r.dof = cells - 1;
    if (std::isinf(r.statistic))
    {
        r.p_value = 0;
        r.pass = false;
        return r;
    }
    return finish(r);
}

ChiSquareReport chi_square_independence(std::vector<std::vector<double>> const& table, double significance)
{
    if (table.empty() || table[0].empty())
        throw std::invalid_argument("chi_square_independence: empty table");
    std::size_t const rows = table.size();
    std::size_t const cols = table[0].size();
    std::vector<double> row_sum(rows, 0.0);
    std::vector<double> col_sum(cols, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
        {
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
            total += table[i][j];
        }
    ChiSquareReport r;
    r.significance = significance;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
        {
            double const e = row_sum[i] * col_sum[j] / total;
            r.counts.push_back(table[i][j]);
            r.expected.push_back(e / total);
            if (e > 0)
                r.statistic += (table[i][j] - e) * (table[i][j] - e) / e;
        }
    r.dof = static_cast<int>((rows - 1) * (cols - 1));
    return finish(r);
}

ChiSquareReport chi_square_two_sample(std::vector<double> const& a, std::vector<double> const& b, double significance)
{
    if (a.size() != b.size())
        throw std::invalid_argument("chi_square_two_sample: cell count mismatch");
    std::vector<std::vector<double>> table(2);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] + b[i] > 0)
        {
            table[0].push_back(a[i]);
            table[1].push_back(b[i]);
        }
    return chi_square_independence(table, significance);
}

MomentEstimate mean_estimate(std::vector<double> const& values, int order)
{
    if (values.size() < 2)
        throw std::invalid_argument("mean_estimate: need at least two values");
    double const n = static_cast<double>(values.size());
    double const mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return MomentEstimate{order, mean, std::sqrt(ss / (n - 1) / n), static_cast<std::int64_t>(values.size())};
}

std::vector<ChiSquareReport> ktuple_independence_test(int k, std::vector<std::vector<std::int64_t>> const& index_sets,
                                                      std::int64_t samples_per_set, std::int64_t span,
                                                      PathSource const& source, double significance)
{
    if (k < 1 || k > 6)
        throw std::invalid_argument("ktuple_independence_test: k must be in 1..6");
    std::size_t const cells = std::size_t{1} << k;
    std::vector<std::vector<double>> counts(index_sets.size(), std::vector<double>(cells, 0.0));
    std::vector<std::int8_t> path;
    for (std::int64_t r = 0; r < samples_per_set; ++r)
    {
        source(r, span, path);
        for (std::size_t s = 0; s < index_sets.size(); ++s)
        {
            std::size_t cell = 0;
            for (auto idx : index_sets[s])
                cell = (cell << 1) | (path[static_cast<std::size_t>(idx)] < 0 ? 1u : 0u);
            counts[s][cell] += 1;
        }
    }
    std::vector<ChiSquareReport> out;
    std::vector<double> const uniform(cells, 1.0 / static_cast<double>(cells));
    for (auto const& c : counts)
        out.push_back(chi_square_gof(c, uniform, significance));
    return out;
}

std::vector<MomentEstimate> partial_sum_moment_suite(std::int64_t m, std::int64_t replicates, PathSource const& source)
{
    if (m < 1 || replicates < 2)
        throw std::invalid_argument("partial_sum_moment_suite: need M >= 1 and two replicates");
    std::vector<double> p2, p4, p6;
    p2.reserve(static_cast<std::size_t>(replicates));
    p4.reserve(static_cast<std::size_t>(replicates));
    p6.reserve(static_cast<std::size_t>(replicates));
    std::vector<std::int8_t> path;
    double const scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::int64_t r = 0; r < replicates; ++r)
    {
        source(r, m, path);
        std::int64_t s = 0;
        for (std::int64_t i = 0; i < m; ++i)
            s += path[static_cast<std::size_t>(i)];
        double const z2 = static_cast<double>(s) * static_cast<double>(s) * scale * scale;
        p2.push_back(z2);
        p4.push_back(z2 * z2);
        p6.push_back(z2 * z2 * z2);
    }
    return {mean_estimate(p2, 2), mean_estimate(p4, 4), mean_estimate(p6, 6)};
}

double rademacher_moment(int order, std::int64_t m)
{
    double const x = static_cast<double>(m);
    switch (order)
    {
    case 2: return 1.0;
    case 4: return 3.0 - 2.0 / x;
    case 6: return 15.0 - 30.0 / x + 16.0 / (x * x);
    default: throw std::invalid_argument("rademacher_moment: order must be 2, 4 or 6");
    }
}

std::vector<TailEstimate> tail_suite(int n_max, std::vector<std::vector<std::int64_t>> const& depth_counts,
                                     std::vector<std::int64_t> const& window_sizes)
{
    if (depth_counts.size() != window_sizes.size() || depth_counts.size() < 2)
        throw std::invalid_argument("tail_suite: need at least two windows");
    double const windows = static_cast<double>(window_sizes.size());
    double const total = static_cast<double>(std::accumulate(window_sizes.begin(), window_sizes.end(), std::int64_t{0}));
    double const mean_size = total / windows;
    std::vector<TailEstimate> out;
    for (int n = 0; n <= n_max; ++n)
    {
        double hits = 0;
        for (auto const& c : depth_counts)
            hits += n < static_cast<int>(c.size()) ? static_cast<double>(c[static_cast<std::size_t>(n)]) : 0.0;
        TailEstimate t;
        t.n = n;
        t.estimate = hits / total;
        t.target = std::pow(3.0 / 8.0, n);
        t.stderr_ = std::sqrt(t.estimate * (1 - t.estimate) / total);
        // Ratio-estimator spread across windows.
        double ss = 0;
        for (std::size_t w = 0; w < depth_counts.size(); ++w)
        {
            auto const& c = depth_counts[w];
            double const cw = n < static_cast<int>(c.size()) ? static_cast<double>(c[static_cast<std::size_t>(n)]) : 0.0;
            double const d = cw - t.estimate * static_cast<double>(window_sizes[w]);
            ss += d * d;
        }
        t.replicate_stderr = std::sqrt(ss / (windows - 1) / windows) / mean_size;
        out.push_back(t);
    }
    return out;
}

double negbin_pmf(std::int64_t t, int r, double p)
{
    if (t < r)
        return 0.0;
    double const log_choose = std::lgamma(static_cast<double>(t)) - std::lgamma(static_cast<double>(r)) -
                              std::lgamma(static_cast<double>(t - r + 1));
    return std::exp(log_choose + r * std::log(p) + static_cast<double>(t - r) * std::log1p(-p));
}

ChiSquareReport negbin_goodness_of_fit(std::vector<std::int64_t> const& gaps, int r, double p, double significance)
{
    if (gaps.empty())
        throw std::invalid_argument("negbin_goodness_of_fit: no gaps");
    double const n = static_cast<double>(gaps.size());
    // Cells: one below the support (must stay empty), then r, r+1, ... until the
    // remaining tail expects fewer than 5, which is pooled into the last cell.
    std::vector<double> probs{0.0};
    double tail = 1.0;
    std::int64_t t = r;
    while (true)
    {
        double const q = negbin_pmf(t, r, p);
        if ((tail - q) * n < 5.0)
            break;
        probs.push_back(q);
        tail -= q;
        ++t;
    }
    probs.push_back(tail);
    std::int64_t const last = t; // first value of the pooled cell
    std::vector<double> counts(probs.size(), 0.0);
    for (auto g : gaps)
    {
        std::size_t cell = g < r ? 0 : (g >= last ? probs.size() - 1 : static_cast<std::size_t>(g - r + 1));
        counts[cell] += 1;
    }
    return chi_square_gof(counts, probs, significance);
}

} // namespace fivewise
