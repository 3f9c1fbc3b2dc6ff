#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace fivewise {

struct MomentEstimate
{
    int order = 0;
    double value = 0;
    double stderr_ = 0;
    std::int64_t replicates = 0;
};

struct ChiSquareReport
{
    std::vector<double> counts;
    std::vector<double> expected; // probabilities, summing to 1
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
    double significance = 1e-3;
    bool pass = true;
};

// Upper tail of the chi-square law with `dof` degrees of freedom.
double chi_square_sf(double statistic, int dof);

// Pearson goodness of fit; cells with zero expectation must have zero counts.
ChiSquareReport chi_square_gof(std::vector<double> const& counts, std::vector<double> const& probabilities,
                               double significance = 1e-3);

// Pearson independence test on an r x c contingency table.
ChiSquareReport chi_square_independence(std::vector<std::vector<double>> const& table, double significance = 1e-3);

// Homogeneity of two histograms over the same cells (empty cells dropped).
ChiSquareReport chi_square_two_sample(std::vector<double> const& a, std::vector<double> const& b,
                                      double significance = 1e-3);

// Per-test level for m simultaneous tests at family level alpha.
inline double bonferroni(double alpha, std::size_t tests) { return alpha / static_cast<double>(tests ? tests : 1); }

// Sample mean with standard error sd / sqrt(n); n >= 2.
MomentEstimate mean_estimate(std::vector<double> const& values, int order = 1);

// Fills a window [1, length] of +-1 values for replicate r.
using PathSource = std::function<void(std::int64_t replicate, std::int64_t length, std::vector<std::int8_t>& out)>;

// Joint law of (X_{k_1}, ..., X_{k_m}) against the uniform law on 2^m cells.
// Index sets are offsets inside a window of `span` positions; every set reads
// the same replicates.
std::vector<ChiSquareReport> ktuple_independence_test(int k, std::vector<std::vector<std::int64_t>> const& index_sets,
                                                      std::int64_t samples_per_set, std::int64_t span,
                                                      PathSource const& source, double significance = 1e-3);

// E(S_M / sqrt(M))^r for r = 2, 4, 6, one replicate per window.
std::vector<MomentEstimate> partial_sum_moment_suite(std::int64_t m, std::int64_t replicates, PathSource const& source);

// Exact Rademacher moments of S_M / sqrt(M): 1, 3 - 2/M, 15 - 30/M + 16/M^2.
double rademacher_moment(int order, std::int64_t m);

struct TailEstimate
{
    int n = 0;
    double estimate = 0;
    double stderr_ = 0;         // binomial, positions treated as independent
    double replicate_stderr = 0; // between-window spread
    double target = 0;
};

// Frequencies of N_k >= n from per-window depth counts. `depth_counts[w][n]`
// is the number of positions of window w with N_k >= n.
std::vector<TailEstimate> tail_suite(int n_max, std::vector<std::vector<std::int64_t>> const& depth_counts,
                                     std::vector<std::int64_t> const& window_sizes);

double negbin_pmf(std::int64_t t, int r, double p);

// Trials-until-r-successes law on t >= r, tail pooled so each cell expects >= 5.
ChiSquareReport negbin_goodness_of_fit(std::vector<std::int64_t> const& gaps, int r = 6, double p = 3.0 / 8.0,
                                       double significance = 1e-3);

} // namespace fivewise
