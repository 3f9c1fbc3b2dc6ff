#include "fivewise/campaigns.hpp"

#include "fivewise/chain.hpp"
#include "fivewise/errors.hpp"
#include "fivewise/parity_measures.hpp"
#include "fivewise/process.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace fivewise {

bool CampaignReport::group_pass(std::string const& group) const
{
    bool any = false;
    for (auto const& e : estimates)
        if (e.group == group)
        {
            any = true;
            if (!e.pass)
                return false;
        }
    return any;
}

bool CampaignReport::has_group(std::string const& group) const
{
    return std::any_of(estimates.begin(), estimates.end(), [&](Estimate const& e) { return e.group == group; });
}

void parallel_for(std::int64_t count, unsigned threads, std::function<void(std::int64_t)> const& body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads == 1 || count < 2)
    {
        for (std::int64_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    auto const workers = static_cast<std::int64_t>(std::min<std::int64_t>(threads, count));
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::int64_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&, w] {
            std::int64_t const lo = count * w / workers;
            std::int64_t const hi = count * (w + 1) / workers;
            try
            {
                for (std::int64_t i = lo; i < hi; ++i)
                    body(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

namespace {

std::uint64_t replicate_seed(std::uint64_t seed, std::int64_t r)
{
    return StreamKey::root(seed).child(Tag::replicate).child(r).value;
}

SamplerConfig replicate_config(SamplerConfig config, std::uint64_t seed, std::int64_t r)
{
    config.seed = replicate_seed(seed, r);
    return config;
}

} // namespace

PathSource process_source(std::uint64_t seed, SamplerConfig const& sampler, unsigned threads)
{
    struct Batch
    {
        std::int64_t start = -1;
        std::int64_t length = -1;
        std::vector<std::vector<std::int8_t>> paths;
    };
    auto batch = std::make_shared<Batch>();
    return [=](std::int64_t r, std::int64_t length, std::vector<std::int8_t>& out) {
        constexpr std::int64_t kBatch = 2048;
        if (batch->length != length || r < batch->start || r >= batch->start + kBatch)
        {
            batch->start = r;
            batch->length = length;
            batch->paths.assign(kBatch, {});
            parallel_for(kBatch, threads, [&](std::int64_t i) {
                batch->paths[static_cast<std::size_t>(i)] =
                    sample_path(0, length - 1, replicate_config(sampler, seed, r + i)).x;
            });
        }
        out = batch->paths[static_cast<std::size_t>(r - batch->start)];
    };
}

PathSource rademacher_source(std::uint64_t seed)
{
    StreamKey const key = StreamKey::root(seed).child(Tag::synthetic);
    return [key](std::int64_t r, std::int64_t length, std::vector<std::int8_t>& out) {
        out.resize(static_cast<std::size_t>(length));
        StreamKey const row = key.child(r);
        for (std::int64_t i = 0; i < length; ++i)
        {
            // One draw yields 64 signs.
            std::uint64_t const word = row.draw(i >> 6);
            out[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(((word >> (i & 63)) & 1) ? -1 : 1);
        }
    };
}

namespace {

constexpr double kSigmas = 4.0;

Estimate exact(std::string group, std::string name, bool ok, std::string note = {})
{
    return Estimate{std::move(group), std::move(name), ok ? 1.0 : 0.0, 0.0, 1.0, ok, std::move(note)};
}

Estimate near(std::string group, std::string name, double value, double se, double target)
{
    bool const ok = std::abs(value - target) <= kSigmas * se + 1e-12 * std::max(1.0, std::abs(target));
    return Estimate{std::move(group), std::move(name), value, se, target, ok, "|estimate - target| <= 4 stderr"};
}

Estimate below(std::string group, std::string name, double value, double se, double bound)
{
    bool const ok = value - kSigmas * se <= bound;
    return Estimate{std::move(group), std::move(name), value, se, bound, ok, "estimate - 4 stderr <= target"};
}

Estimate above(std::string group, std::string name, double value, double se, double bound)
{
    bool const ok = value + kSigmas * se >= bound;
    return Estimate{std::move(group), std::move(name), value, se, bound, ok, "estimate + 4 stderr >= target"};
}

Estimate chi2(std::string group, std::string name, ChiSquareReport const& r)
{
    return Estimate{std::move(group), std::move(name), r.p_value, 0.0, r.significance, r.pass,
                    "chi-square p-value vs per-test significance; statistic " + std::to_string(r.statistic) +
                        ", dof " + std::to_string(r.dof)};
}

std::int64_t pick(std::int64_t requested, std::int64_t fallback) { return requested > 0 ? requested : fallback; }

// ---------------------------------------------------------------- measures

} // namespace

CampaignReport exact_suite()
{
    CampaignReport rep;
    rep.campaign = "exact";
    auto const p = derive_transition_matrix();
    bool closed_form = true;
    for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= 6; ++j)
        {
            Rational want = 0;
            if (i == j)
                want = Rational(5, 8);
            else if (j == (i == 6 ? 1 : i + 1))
                want = Rational(3, 8);
            closed_form = closed_form && p[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] == want;
        }
    rep.add(exact("transition-law", "matrix equals the cyclic 5/8-3/8 law", closed_form));
    rep.add(exact("transition-law", "uniform vector is stationary", uniform_is_stationary(p)));

    auto const& ups = enumerate_upsilon();
    bool odd = ups.size() == 32;
    for (auto const& v : ups)
        odd = odd && v[0] * v[1] * v[2] * v[3] * v[4] * v[5] == -1;
    rep.add(exact("measure-suite", "Upsilon has 32 odd-parity atoms", odd));

    auto const ord = exact_distribution(1, MeasureKind::ord);
    bool ord_is_key = ord.support.size() == 32;
    for (auto const& v : ups)
    {
        SignVector x(1);
        for (int i = 0; i < 6; ++i)
            x.set(i, v[static_cast<std::size_t>(i)]);
        ord_is_key = ord_is_key && ord.mass_of(x) == Rational(1, 32);
    }
    rep.add(exact("measure-suite", "level-1 ord equals the uniform key law", ord_is_key));

    std::map<MeasureKind, std::size_t> const atoms{
        {MeasureKind::cen, 20}, {MeasureKind::fri, 12}, {MeasureKind::pos, 6}};
    for (auto const& [kind, count] : atoms)
    {
        auto const d = exact_distribution(1, kind);
        bool ok = d.support.size() == count && d.total_mass() == 1;
        for (auto const& [x, mass] : d.support)
            ok = ok && mass == Rational(1, static_cast<long long>(count));
        rep.add(exact("measure-suite", std::string("level-1 ") + to_string(kind) + " uniform on " +
                                           std::to_string(count) + " atoms",
                      ok));
    }

    auto const cen = exact_distribution(1, MeasureKind::cen);
    auto const fri = exact_distribution(1, MeasureKind::fri);
    bool mixture = true;
    for (auto const& v : ups)
    {
        SignVector x(1);
        for (int i = 0; i < 6; ++i)
            x.set(i, v[static_cast<std::size_t>(i)]);
        mixture = mixture && ord.mass_of(x) == Rational(5, 8) * cen.mass_of(x) + Rational(3, 8) * fri.mass_of(x);
    }
    rep.add(exact("measure-suite", "ord = 5/8 cen + 3/8 fri atom by atom", mixture));

    bool symmetric = true;
    for (int n = 0; n <= 1; ++n)
        for (auto kind : {MeasureKind::ord, MeasureKind::cen, MeasureKind::fri})
        {
            if (!admits_level(kind, n))
                continue;
            auto const d = exact_distribution(n, kind);
            for (auto const& [x, mass] : d.support)
                symmetric = symmetric && d.mass_of(x.negated()) == mass;
        }
    rep.add(exact("measure-suite", "ord/cen/fri are sign-symmetric", symmetric));

    bool sums = true;
    for (int n = 1; n <= 4; ++n)
    {
        std::int64_t const s = static_cast<std::int64_t>(std::llround(std::pow(4.0, n)));
        sums = sums && sum_distribution(n, MeasureKind::ord) ==
                           std::map<std::int64_t, Rational>{{-s, Rational(3, 16)}, {0, Rational(5, 8)},
                                                            {s, Rational(3, 16)}};
        sums = sums && sum_distribution(n, MeasureKind::cen) == std::map<std::int64_t, Rational>{{0, 1}};
        sums = sums && sum_distribution(n, MeasureKind::fri) ==
                           std::map<std::int64_t, Rational>{{-s, Rational(1, 2)}, {s, Rational(1, 2)}};
        sums = sums && sum_distribution(n, MeasureKind::pos) == std::map<std::int64_t, Rational>{{s, 1}};
    }
    rep.add(exact("measure-suite", "sum laws 5/8, 3/16, 3/16 for n <= 4", sums));

    bool marginal = true;
    for (int drop = 0; drop < 6; ++drop)
    {
        std::map<std::string, Rational> m;
        for (auto const& [x, mass] : ord.support)
        {
            std::string key;
            for (int i = 0; i < 6; ++i)
                if (i != drop)
                    key += x[i] < 0 ? '-' : '+';
            m[key] += mass;
        }
        marginal = marginal && m.size() == 32;
        for (auto const& [key, mass] : m)
            marginal = marginal && mass == Rational(1, 32);
    }
    rep.add(exact("measure-suite", "every 5-coordinate marginal of ord is uniform", marginal));

    // Sixth moment of a sum of six fair signs by enumeration.
    Rational rad = 0;
    for (int code = 0; code < 64; ++code)
    {
        long long s = 0;
        for (int i = 0; i < 6; ++i)
            s += (code >> i) & 1 ? -1 : 1;
        rad += Rational(s * s * s * s * s * s, 64);
    }
    Rational key6 = 0;
    for (auto const& [x, mass] : ord.support)
    {
        long long const s = x.sum();
        key6 += mass * Rational(s * s * s * s * s * s);
    }
    auto const gap0 = sixth_moment_gap(0, {1, 1, 1, 1, 1, 1});
    rep.add(Estimate{"gap-identity", "sixth moment, six fair signs", to_double(rad), 0, 2256, rad == 2256, "exact"});
    rep.add(Estimate{"gap-identity", "sixth moment, level-1 ord sum", to_double(key6), 0, 1536, key6 == 1536, "exact"});
    rep.add(Estimate{"gap-identity", "gap at n = 0", to_double(gap0), 0, 720, gap0 == rad - key6 && gap0 == 720,
                     "exact"});
    bool full = true;
    for (int n = 0; n <= 3; ++n)
    {
        auto const c = six_pow(n);
        full = full && sixth_moment_gap(n, {c, c, c, c, c, c}) == Rational(720) * rpow(Rational(4), 6 * n);
        auto const m = exact_moments(n);
        if (n >= 1)
            full = full && *m.sixth_moment_sum_ord == Rational(3, 8) * rpow(Rational(4), 6 * n);
    }
    rep.add(exact("gap-identity", "full-block gap equals 720 * 4^(6n) for n <= 3", full));

    // Probability that six given columns are e_1..e_6, bit by bit.
    Rational aligned = 1;
    for (auto beta : identity_pattern())
        for (int i = 1; i <= 6; ++i)
            aligned *= beta[i] ? Rational(3, 8) : Rational(5, 8);
    bool const pattern_ok = aligned == identity_pattern_probability() &&
                            identity_pattern_probability() == rpow(Rational(5, 8), 30) * rpow(Rational(3, 8), 6);
    rep.add(Estimate{"pattern-probability", "identity pattern probability", to_double(aligned), 0,
                     to_double(identity_pattern_probability()), pattern_ok,
                     "exact: " + fraction_string(identity_pattern_probability())});
    return rep;
}

namespace {

void sampled_measure_checks(CampaignReport& rep, CampaignOptions const& o)
{
    std::int64_t const draws = pick(o.replicates, 1'000'000);
    StreamKey const base = StreamKey::root(o.seed).child(Tag::measure);
    int const tests = 4;
    for (auto kind : {MeasureKind::ord, MeasureKind::cen, MeasureKind::fri, MeasureKind::pos})
    {
        auto const d = exact_distribution(1, kind);
        std::map<std::string, std::size_t> index;
        std::vector<double> probs;
        for (auto const& [x, mass] : d.support)
        {
            index[x.to_string()] = probs.size();
            probs.push_back(to_double(mass));
        }
        probs.push_back(0.0); // anything off the support
        std::vector<double> counts(probs.size(), 0.0);
        StreamKey const kk = base.child(static_cast<int>(kind));
        for (std::int64_t r = 0; r < draws; ++r)
        {
            auto const it = index.find(sample_level(1, kind, kk.child(r)).to_string());
            counts[it == index.end() ? probs.size() - 1 : it->second] += 1;
        }
        rep.add(chi2("measure-sampler", std::string("level-1 ") + to_string(kind) + " sampler vs exact law",
                     chi_square_gof(counts, probs, bonferroni(o.significance, tests))));
    }

    bool sums = true;
    for (int n = 0; n <= 3; ++n)
        for (std::int64_t r = 0; r < 10'000; ++r)
            sums = sums && sample_level(n, MeasureKind::pos, base.child(100 + n).child(r)).sum() ==
                               static_cast<std::int64_t>(std::llround(std::pow(4.0, n)));
    rep.add(exact("measure-sampler", "pos draws have sum 4^n (n <= 3, 10^4 each)", sums));

    bool cen2 = true;
    for (std::int64_t r = 0; r < 10'000; ++r)
    {
        auto const v = sample_level(2, MeasureKind::cen, base.child(200).child(r));
        cen2 = cen2 && v.sum() == 0 && v.product() == 1;
    }
    rep.add(exact("measure-sampler", "level-2 cen draws have sum 0 and product +1", cen2));

    for (int n = 1; n <= 3; ++n)
    {
        auto const size = six_pow(n);
        for (std::int64_t j : {std::int64_t{0}, size / 2, size - 1})
        {
            std::vector<double> values;
            values.reserve(static_cast<std::size_t>(draws));
            StreamKey const kk = base.child(300 + n);
            for (std::int64_t r = 0; r < draws; ++r)
                values.push_back(LevelTree(n, MeasureKind::pos, kk.child(r)).coordinate(j));
            auto const m = mean_estimate(values);
            rep.add(near("measure-sampler",
                         "pos coordinate mean, n=" + std::to_string(n) + ", j=" + std::to_string(j), m.value,
                         m.stderr_, std::pow(2.0 / 3.0, n)));
        }
    }
}

CampaignReport measures_campaign(CampaignOptions const& o)
{
    CampaignReport rep = exact_suite();
    rep.params = {{"draws", pick(o.replicates, 1'000'000)}};
    sampled_measure_checks(rep, o);
    return rep;
}

// ---------------------------------------------------------------- chain

void overlap_checks(CampaignReport& rep, CampaignOptions const& o)
{
    KeyedStream rng(StreamKey::root(o.seed).child(Tag::synthetic).child(1));
    bool chain_ok = true;
    for (int t = 0; t < 100; ++t)
    {
        std::int64_t const a = static_cast<std::int64_t>(rng.below(4001)) - 2000;
        std::int64_t const b = a + static_cast<std::int64_t>(rng.below(500));
        std::int64_t const a2 = a - 1 - static_cast<std::int64_t>(rng.below(5000));
        std::int64_t const b2 = b + static_cast<std::int64_t>(rng.below(500));
        StreamKey const key = innovation_key(replicate_seed(o.seed, t), 1);
        auto const inner = sample_stationary_path_cftp(a, b, key);
        auto const outer = sample_stationary_path_cftp(a2, b2, key);
        for (std::int64_t k = a - 1; k <= b; ++k)
            chain_ok = chain_ok && inner.u(k) == outer.u(k);
    }
    rep.add(exact("overlap-determinism", "canonical chain agrees on 100 nested window pairs", chain_ok));

    bool tower_ok = true;
    for (int t = 0; t < 20; ++t)
    {
        std::int64_t const a = static_cast<std::int64_t>(rng.below(20001)) - 10000;
        std::int64_t const b = a + static_cast<std::int64_t>(rng.below(3000));
        std::int64_t const a2 = a - static_cast<std::int64_t>(rng.below(20000));
        std::int64_t const b2 = b + static_cast<std::int64_t>(rng.below(20000));
        auto const config = replicate_config(o.sampler, o.seed, 1000 + t);
        auto const inner = sample_path(build(a, b, config));
        auto const outer = sample_path(build(a2, b2, config));
        for (std::int64_t k = a; k <= b; ++k)
        {
            auto const i = static_cast<std::size_t>(k - a);
            auto const i2 = static_cast<std::size_t>(k - a2);
            tower_ok = tower_ok && inner.x[i] == outer.x[i2] && inner.n[i] == outer.n[i2] && inner.j[i] == outer.j[i2];
            tower_ok = tower_ok && (inner.anchor[i] == kUnknownPosition || inner.anchor[i] == outer.anchor[i2]);
        }
    }
    rep.add(exact("overlap-determinism", "hierarchy and X agree on 20 nested window pairs", tower_ok));
}

CampaignReport chain_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const path_length = pick(o.positions, 1'700'000);
    std::int64_t const windows = pick(o.replicates, 200'000);
    std::int64_t const scanned = 100'000'000;
    rep.params = {{"path_length", path_length}, {"windows", windows}, {"pattern_scan", scanned}};

    auto const gaps = return_time_samples(path_length, innovation_key(o.seed, 1));
    std::vector<double> g(gaps.begin(), gaps.end());
    auto const mean = mean_estimate(g);
    double m2 = 0, m4 = 0;
    for (double x : g)
    {
        double const d = x - mean.value;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    double const n = static_cast<double>(g.size());
    m2 /= n - 1;
    m4 /= n;
    double const var_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    rep.add(Estimate{"return-times", "number of gaps", n, 0, 100'000, n >= 100'000, "at least 10^5"});
    rep.add(near("return-times", "mean return time", mean.value, mean.stderr_, 16.0));
    rep.add(near("return-times", "return time variance", m2, var_se, 80.0 / 3.0));
    auto const min_gap = *std::min_element(gaps.begin(), gaps.end());
    rep.add(Estimate{"return-times", "minimum gap", static_cast<double>(min_gap), 0, 6, min_gap >= 6, "at least 6"});
    rep.add(chi2("return-times", "negative binomial (6, 3/8) fit", negbin_goodness_of_fit(gaps, 6, 0.375, o.significance)));

    // Independent stationary windows [0, 1]: exact i.i.d. samples of (U_-1, U_0, U_1).
    std::vector<std::array<std::uint8_t, 3>> u(static_cast<std::size_t>(windows));
    std::vector<std::uint8_t> w0_uniform(static_cast<std::size_t>(windows));
    parallel_for(windows, o.threads, [&](std::int64_t r) {
        StreamKey const key = innovation_key(replicate_seed(o.seed, r), 1);
        auto const p = sample_stationary_path_cftp(0, 1, key, o.sampler.backward_budget);
        u[static_cast<std::size_t>(r)] = {static_cast<std::uint8_t>(p.u(-1)), static_cast<std::uint8_t>(p.u(0)),
                                          static_cast<std::uint8_t>(p.u(1))};
        w0_uniform[static_cast<std::size_t>(r)] = static_cast<std::uint8_t>(sample_stationary_path(0, 0, key).w(0));
    });
    auto const tp = derive_transition_matrix();
    std::vector<double> states(6, 0), spaced(7, 0), spaced_u(7, 0), trans(36, 0), trans_p(36, 0);
    std::vector<std::vector<double>> ind(2, std::vector<double>(2, 0));
    for (std::size_t r = 0; r < u.size(); ++r)
    {
        auto const [um, u0, u1] = u[r];
        states[u0 - 1u] += 1;
        int const w0 = u0 != um ? u0 : 0;
        int const w1 = u1 != u0 ? u1 : 0;
        spaced[static_cast<std::size_t>(w0)] += 1;
        spaced_u[w0_uniform[r]] += 1;
        trans[static_cast<std::size_t>((um - 1) * 6 + (u0 - 1))] += 1;
        ind[w0 != 0][w1 != 0] += 1;
    }
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            trans_p[i * 6 + j] = to_double(tp[i][j]) / 6.0;
    std::vector<double> const w_law{5.0 / 8, 1.0 / 16, 1.0 / 16, 1.0 / 16, 1.0 / 16, 1.0 / 16, 1.0 / 16};
    double const alpha = bonferroni(o.significance, 5);
    rep.add(chi2("chain-law", "state marginal uniform (coupled sampler)",
                 chi_square_gof(states, std::vector<double>(6, 1.0 / 6), alpha)));
    rep.add(chi2("chain-law", "spaced marginal 5/8, 1/16 (coupled sampler)", chi_square_gof(spaced, w_law, alpha)));
    rep.add(chi2("chain-law", "spaced marginal 5/8, 1/16 (uniform-start sampler)", chi_square_gof(spaced_u, w_law, alpha)));
    rep.add(chi2("chain-law", "one-step transitions vs exact matrix", chi_square_gof(trans, trans_p, alpha)));
    rep.add(chi2("chain-law", "indicators of consecutive nonzero symbols independent",
                 chi_square_independence(ind, alpha)));

    // The full pattern is too rare for 10^8 columns to say much; the detector's
    // prefix states test the same machinery at rates with real power.
    auto const prefix = count_pattern_prefixes(scanned, innovation_key(o.seed, 7));
    double const q = std::pow(5.0 / 8.0, 5) * (3.0 / 8.0);
    for (int p : {3, 4, 6})
    {
        double const lambda = static_cast<double>(scanned) * std::pow(q, p);
        rep.add(near("pattern-rate", "detector progress " + std::to_string(p) + " in 10^8 columns",
                     static_cast<double>(prefix[static_cast<std::size_t>(p)]), std::sqrt(lambda), lambda));
    }

    overlap_checks(rep, o);
    return rep;
}

// ---------------------------------------------------------------- hierarchy

struct RatioAccumulator
{
    std::vector<double> num, den;
    void add(double n, double d)
    {
        num.push_back(n);
        den.push_back(d);
    }
    std::pair<double, double> estimate() const
    {
        double sn = 0, sd = 0;
        for (std::size_t i = 0; i < num.size(); ++i)
        {
            sn += num[i];
            sd += den[i];
        }
        double const p = sn / sd;
        double const w = static_cast<double>(num.size());
        double ss = 0;
        for (std::size_t i = 0; i < num.size(); ++i)
            ss += (num[i] - p * den[i]) * (num[i] - p * den[i]);
        double const se = w > 1 ? std::sqrt(ss / (w - 1) / w) / (sd / w) : 0.0;
        return {p, se};
    }
};

CampaignReport hierarchy_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const windows = pick(o.replicates, 100);
    std::int64_t const length = pick(o.positions, 10'000'000) / windows;
    rep.params = {{"windows", windows}, {"window_length", length}};

    struct WindowStats
    {
        std::array<std::array<double, 7>, 4> symbol{}; // [n][i], n = 1..3
        std::array<std::array<double, 7>, 3> refresh{}; // [n][i]: W^(n+1) at level-n anchors
        std::array<double, 3> anchors{};
        std::array<std::vector<double>, 3> gaps;
    };
    std::vector<WindowStats> stats(static_cast<std::size_t>(windows));
    parallel_for(windows, o.threads, [&](std::int64_t r) {
        auto config = replicate_config(o.sampler, o.seed, r);
        config.min_depth = std::max(config.min_depth, 4);
        auto const h = build(0, length - 1, config);
        auto& s = stats[static_cast<std::size_t>(r)];
        for (std::int64_t k = 0; k < length; ++k)
            s.symbol[1][static_cast<std::size_t>(h.symbol(1, k))] += 1;
        for (int n = 1; n <= 2; ++n)
        {
            auto const anchors = h.anchors_in(n, 0, length - 1);
            auto const slot = static_cast<std::size_t>(n);
            s.anchors[slot] = static_cast<double>(anchors.size());
            for (std::size_t i = 0; i < anchors.size(); ++i)
            {
                // W^(n+1) lives on level-n anchors: it is both the next marginal and the refresh draw.
                auto const up = static_cast<std::size_t>(h.symbol(n + 1, anchors[i]));
                s.refresh[slot][up] += 1;
                s.symbol[slot + 1][up] += 1;
                if (i > 0)
                    s.gaps[slot].push_back(static_cast<double>(anchors[i] - anchors[i - 1]));
            }
        }
    });

    for (int n = 1; n <= 3; ++n)
        for (int i = 1; i <= 6; ++i)
        {
            RatioAccumulator acc;
            for (auto const& s : stats)
                acc.add(s.symbol[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)], static_cast<double>(length));
            auto const [p, se] = acc.estimate();
            rep.add(near("level-marginals", "P(W^(" + std::to_string(n) + ") = " + std::to_string(i) + ")", p, se,
                         std::pow(16.0, -n)));
        }
    for (int n = 1; n <= 2; ++n)
        for (int i = 1; i <= 6; ++i)
        {
            RatioAccumulator acc;
            for (auto const& s : stats)
                acc.add(s.refresh[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)],
                        s.anchors[static_cast<std::size_t>(n)]);
            auto const [p, se] = acc.estimate();
            rep.add(near("level-refresh",
                         "P(W^(" + std::to_string(n + 1) + ") = " + std::to_string(i) + " | W^(" + std::to_string(n) +
                             ") = 1)",
                         p, se, 1.0 / 16));
        }
    for (int n = 1; n <= 2; ++n)
    {
        std::vector<double> all, sq;
        for (auto const& s : stats)
            for (double gap : s.gaps[static_cast<std::size_t>(n)])
            {
                all.push_back(gap);
                sq.push_back(gap * gap);
            }
        double const need = n == 1 ? 100'000 : 10'000;
        rep.add(Estimate{"level-gaps", "level-" + std::to_string(n) + " gaps observed", static_cast<double>(all.size()),
                         0, need, static_cast<double>(all.size()) >= need, "minimum sample size"});
        if (all.size() < 2)
            continue;
        auto const m = mean_estimate(all);
        auto const m2 = mean_estimate(sq);
        rep.add(near("level-gaps", "level-" + std::to_string(n) + " mean gap", m.value, m.stderr_, std::pow(16.0, n)));
        rep.add(below("level-gaps", "level-" + std::to_string(n) + " gap second moment", m2.value, m2.stderr_,
                      2.0 * std::pow(16.0, 2 * n)));
    }
    return rep;
}

// ---------------------------------------------------------------- tails

CampaignReport tails_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const windows = pick(o.replicates, 1000);
    std::int64_t const length = pick(o.positions, 10'000'000) / windows;
    int const nmax = o.nmax;
    rep.params = {{"windows", windows}, {"window_length", length}, {"nmax", nmax}};
    std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(windows));
    parallel_for(windows, o.threads, [&](std::int64_t r) {
        auto const h = build(0, length - 1, replicate_config(o.sampler, o.seed, r));
        auto& c = counts[static_cast<std::size_t>(r)];
        c.assign(static_cast<std::size_t>(nmax + 1), 0);
        for (std::int64_t k = 0; k < length; ++k)
            for (int n = 0; n <= std::min(nmax, h.n_at(k)); ++n)
                ++c[static_cast<std::size_t>(n)];
    });
    auto const tails = tail_suite(nmax, counts, std::vector<std::int64_t>(static_cast<std::size_t>(windows), length));
    for (auto const& t : tails)
    {
        // Positions within a window are dependent; the between-window spread governs.
        double const se = std::max(t.stderr_, t.replicate_stderr);
        auto e = near("tails", "P(N >= " + std::to_string(t.n) + ")", t.estimate, se, t.target);
        if (t.n == 0)
            e.pass = t.estimate == 1.0;
        rep.add(e);
    }
    return rep;
}

// ---------------------------------------------------------------- double one

CampaignReport double_one_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const r1 = pick(o.replicates, 10'000);
    std::int64_t const r2 = std::max<std::int64_t>(2, r1 / 10);
    rep.params = {{"replicates_n1", r1}, {"replicates_n2", r2}};
    StreamKey const key = StreamKey::root(o.seed).child(Tag::replicate).child(std::int64_t{-1});
    for (auto [n, reps] : {std::pair<int, std::int64_t>{1, r1}, {2, r2}})
    {
        auto const e = double_one_probability(n, reps, key.child(n));
        rep.add(above("double-one", "p_" + std::to_string(n) + " on [1, 6*16^" + std::to_string(n) + "]", e.estimate,
                      e.stderr_, 0.5));
    }
    auto const degenerate = double_one_probability(1, 100, key.child(9), 1);
    rep.add(Estimate{"double-one", "single-position window", degenerate.estimate, 0, 0, degenerate.estimate == 0,
                     "exactly 0"});
    return rep;
}

// ---------------------------------------------------------------- blocks

CampaignReport blocks_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const windows = pick(o.replicates, 40);
    std::int64_t const length = pick(o.positions, 2'000'000) / windows;
    rep.params = {{"windows", windows}, {"window_length", length}};
    std::vector<std::vector<std::string>> issues(static_cast<std::size_t>(windows));
    std::vector<std::array<std::int64_t, 8>> d_counts(static_cast<std::size_t>(windows));
    std::vector<std::array<std::int64_t, 3>> cover(static_cast<std::size_t>(windows)); // ok, bad, skipped
    parallel_for(windows, o.threads, [&](std::int64_t r) {
        auto const config = replicate_config(o.sampler, o.seed, r);
        auto const h = build(0, length - 1, config);
        auto const blocks = decompose_blocks(h);
        auto const path = sample_path(h);
        auto& out = issues[static_cast<std::size_t>(r)];
        out = audit_structure(h, blocks);
        auto const audit = audit_block_contents(path, h, blocks);
        auto& dc = d_counts[static_cast<std::size_t>(r)];
        dc.fill(0);
        for (auto const& e : audit.entries)
        {
            dc[static_cast<std::size_t>(std::min(e.m, 7))] += 1;
            if (!e.pass)
                out.push_back("block content fails at level " + std::to_string(e.m) + " [" + std::to_string(e.min) +
                              ", " + std::to_string(e.max) + "]");
        }
        KeyedStream rng(StreamKey::root(config.seed).child(Tag::synthetic));
        auto& cv = cover[static_cast<std::size_t>(r)];
        cv.fill(0);
        for (int t = 0; t < 10; ++t)
        {
            std::int64_t const base = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(std::max<std::int64_t>(1, length - 400))));
            std::set<std::int64_t> s;
            auto const size = 1 + rng.below(6);
            while (s.size() < size)
                s.insert(base + static_cast<std::int64_t>(rng.below(std::min<std::int64_t>(400, length))));
            int const n = 1 + static_cast<int>(rng.below(3));
            try
            {
                auto const q = covering_of(s, n, h, blocks);
                ++cv[is_class_covering(q, s, n) ? 0 : 1];
            }
            catch (IncompleteBlock const&)
            {
                ++cv[2];
            }
        }
    });
    std::int64_t violations = 0;
    std::string first;
    for (auto const& v : issues)
    {
        violations += static_cast<std::int64_t>(v.size());
        if (first.empty() && !v.empty())
            first = v.front();
    }
    rep.add(Estimate{"path-invariants", "structural and block-content violations", static_cast<double>(violations), 0, 0,
                     violations == 0, first.empty() ? "zero tolerance" : first});
    for (int m = 1; m <= 3; ++m)
    {
        std::int64_t total = 0;
        for (auto const& dc : d_counts)
            total += dc[static_cast<std::size_t>(m)];
        rep.add(Estimate{"path-invariants", "complete level-" + std::to_string(m) + " D blocks audited",
                         static_cast<double>(total), 0, 1, total >= 1, "coverage: at least one"});
    }
    std::int64_t ok = 0, bad = 0, skipped = 0;
    for (auto const& cv : cover)
    {
        ok += cv[0];
        bad += cv[1];
        skipped += cv[2];
    }
    rep.add(Estimate{"path-invariants", "coverings satisfying (i)-(iv)", static_cast<double>(ok), 0,
                     static_cast<double>(ok + bad), bad == 0 && ok > 0,
                     std::to_string(skipped) + " sets skipped for touching cut blocks"});
    return rep;
}

// ---------------------------------------------------------------- independence

CampaignReport independence_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const reps = pick(o.replicates, 200'000);
    std::int64_t const span = 200;
    std::int64_t const sets = 50;
    rep.params = {{"replicates", reps}, {"span", span}, {"five_sets", sets}};

    KeyedStream rng(StreamKey::root(o.seed).child(Tag::synthetic).child(5));
    std::vector<std::vector<std::int64_t>> index_sets;
    while (static_cast<std::int64_t>(index_sets.size()) < sets)
    {
        std::set<std::int64_t> s;
        while (s.size() < 5)
            s.insert(static_cast<std::int64_t>(rng.below(span)));
        index_sets.emplace_back(s.begin(), s.end());
    }
    std::vector<std::vector<std::int64_t>> const pairs{{0, 1}, {99, 100}, {0, 2}, {50, 53}};
    std::vector<std::vector<double>> five(index_sets.size(), std::vector<double>(32, 0));
    std::vector<std::vector<double>> two(pairs.size(), std::vector<double>(4, 0));
    std::vector<double> ones(1, 0);
    auto const source = process_source(o.seed, o.sampler, o.threads);
    std::vector<std::int8_t> path;
    for (std::int64_t r = 0; r < reps; ++r)
    {
        source(r, span, path);
        auto cell = [&](std::vector<std::int64_t> const& idx) {
            std::size_t c = 0;
            for (auto i : idx)
                c = (c << 1) | (path[static_cast<std::size_t>(i)] < 0 ? 1u : 0u);
            return c;
        };
        for (std::size_t s = 0; s < index_sets.size(); ++s)
            five[s][cell(index_sets[s])] += 1;
        for (std::size_t s = 0; s < pairs.size(); ++s)
            two[s][cell(pairs[s])] += 1;
        for (auto x : path)
            ones[0] += x > 0 ? 1 : 0;
    }
    double const alpha5 = bonferroni(o.significance, static_cast<std::size_t>(sets));
    int passed = 0;
    double worst = 1.0;
    for (std::size_t s = 0; s < five.size(); ++s)
    {
        auto const c = chi_square_gof(five[s], std::vector<double>(32, 1.0 / 32), alpha5);
        passed += c.pass ? 1 : 0;
        worst = std::min(worst, c.p_value);
    }
    rep.add(Estimate{"five-wise", "5-index sets uniform on 32 cells", static_cast<double>(passed), 0,
                     static_cast<double>(sets), passed == sets,
                     "smallest p-value " + std::to_string(worst) + " vs " + std::to_string(alpha5)});
    for (std::size_t s = 0; s < pairs.size(); ++s)
        rep.add(chi2("five-wise", "pair (" + std::to_string(pairs[s][0]) + ", " + std::to_string(pairs[s][1]) + ") uniform",
                     chi_square_gof(two[s], std::vector<double>(4, 0.25), bonferroni(o.significance, pairs.size()))));
    double const total = static_cast<double>(reps * span);
    // Pairwise independence makes the indicators uncorrelated, so the binomial error is exact.
    double const frac = ones[0] / total;
    rep.add(near("five-wise", "P(X = 1)", frac, std::sqrt(0.25 / total), 0.5));

    // Six-wise: the six values of a complete D_1 block always multiply to -1.
    std::int64_t const block_windows = std::max<std::int64_t>(100, reps / 50);
    std::vector<std::vector<double>> per(static_cast<std::size_t>(block_windows), std::vector<double>(64, 0));
    parallel_for(block_windows, o.threads, [&](std::int64_t r) {
        auto const h = build(0, 499, replicate_config(o.sampler, o.seed ^ 0x5a5a5a5aull, r));
        auto const p = sample_path(h);
        auto const blocks = decompose_blocks(h);
        for (auto const* blk : blocks.d_blocks(1))
        {
            std::size_t c = 0;
            for (auto k : blk->members)
                c = (c << 1) | (p.x_at(k) < 0 ? 1u : 0u);
            per[static_cast<std::size_t>(r)][c] += 1;
        }
    });
    std::vector<double> six(64, 0);
    for (auto const& v : per)
        for (std::size_t c = 0; c < 64; ++c)
            six[c] += v[c];
    double even = 0, samples = 0;
    for (std::size_t c = 0; c < 64; ++c)
    {
        samples += six[c];
        if (std::popcount(c) % 2 == 0)
            even += six[c];
    }
    auto const c6 = chi_square_gof(six, std::vector<double>(64, 1.0 / 64), o.significance);
    rep.add(Estimate{"six-wise", "block-aligned sextuples rejected as uniform", c6.p_value, 0, o.significance,
                     !c6.pass && samples > 0, std::to_string(static_cast<std::int64_t>(samples)) + " sextuples"});
    rep.add(Estimate{"six-wise", "sextuples with product +1", even, 0, 0, even == 0, "must be zero"});
    return rep;
}

// ---------------------------------------------------------------- moments

CampaignReport moments_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const reps = pick(o.replicates, 100'000);
    rep.params = {{"replicates", reps}, {"block_lengths", {96, 1000}}};
    for (std::int64_t m : {std::int64_t{96}, std::int64_t{1000}})
    {
        auto const est = partial_sum_moment_suite(m, reps, process_source(o.seed + static_cast<std::uint64_t>(m), o.sampler, o.threads));
        std::string const tag = "M=" + std::to_string(m);
        rep.add(near("partial-sums", tag + " second moment", est[0].value, est[0].stderr_, 1.0));
        rep.add(below("partial-sums", tag + " fourth moment", est[1].value, est[1].stderr_, 3.0));
        rep.add(below("partial-sums", tag + " sixth moment", est[2].value, est[2].stderr_, 15.0));

        auto const rad = partial_sum_moment_suite(m, reps, rademacher_source(o.seed + static_cast<std::uint64_t>(m)));
        for (std::size_t i = 0; i < 3; ++i)
            rep.add(near("harness-oracle", tag + " Rademacher moment " + std::to_string(rad[i].order), rad[i].value,
                         rad[i].stderr_, rademacher_moment(rad[i].order, m)));
    }
    return rep;
}

// ---------------------------------------------------------------- cross mode

CampaignReport cross_mode_campaign(CampaignOptions const& o)
{
    CampaignReport rep;
    std::int64_t const length = pick(o.positions, 1'700'000);
    rep.params = {{"window_length", length}, {"literal_depth", 2}};

    // Same seed: both evaluations must produce the same canonical values.
    {
        auto config = replicate_config(o.sampler, o.seed, 77);
        config.min_depth = 3;
        auto const fast = build(0, 3000, config);
        auto const slow = literal_build(0, 3000, config);
        bool same = fast.depth() == slow.depth();
        for (int n = 1; same && n <= 2; ++n)
        {
            auto const& x = fast.level(n);
            auto const& y = slow.level(n);
            same = x.lo == y.lo && x.hi == y.hi && x.w == y.w && x.anchors == y.anchors;
        }
        for (std::int64_t k = 0; same && k <= 3000; ++k)
            same = fast.n_at(k) == slow.n_at(k) && fast.j_at(k) == slow.j_at(k) &&
                   fast.anchor_ordinal_at(k) == slow.anchor_ordinal_at(k);
        rep.add(exact("cross-mode", "literal and coupled evaluation agree pathwise (same seed)", same));
    }

    // Different seeds: histograms of level-1 symbols and of level-2 symbols at level-1 anchors.
    auto histogram = [&](HierarchyWindow const& h) {
        std::array<std::vector<double>, 2> out{std::vector<double>(7, 0), std::vector<double>(7, 0)};
        for (std::int64_t k = h.a(); k <= h.b(); ++k)
            out[0][static_cast<std::size_t>(h.symbol(1, k))] += 1;
        for (auto p : h.anchors_in(1, h.a(), h.b()))
            out[1][static_cast<std::size_t>(h.symbol(2, p))] += 1;
        return out;
    };
    auto cfg_a = replicate_config(o.sampler, o.seed, 78);
    auto cfg_b = replicate_config(o.sampler, o.seed, 79);
    cfg_a.min_depth = cfg_b.min_depth = 2;
    auto const lit = histogram(literal_build(0, length - 1, cfg_a));
    auto const cft = histogram(build(0, length - 1, cfg_b));
    double const alpha = bonferroni(o.significance, 2);
    double const anchors = std::min(std::accumulate(lit[1].begin(), lit[1].end(), 0.0),
                                    std::accumulate(cft[1].begin(), cft[1].end(), 0.0));
    rep.add(Estimate{"cross-mode", "level-2 anchor samples per mode", anchors, 0, 100'000, anchors >= 100'000,
                     "at least 10^5"});
    rep.add(chi2("cross-mode", "level-1 symbol histograms agree", chi_square_two_sample(lit[0], cft[0], alpha)));
    rep.add(chi2("cross-mode", "level-2 symbol histograms agree", chi_square_two_sample(lit[1], cft[1], alpha)));

    overlap_checks(rep, o);
    return rep;
}

using Runner = CampaignReport (*)(CampaignOptions const&);

std::vector<std::pair<std::string, Runner>> const& runners()
{
    static std::vector<std::pair<std::string, Runner>> const table{
        {"measures", measures_campaign},   {"chain", chain_campaign},
        {"hierarchy", hierarchy_campaign}, {"independence", independence_campaign},
        {"moments", moments_campaign},     {"tails", tails_campaign},
        {"blocks", blocks_campaign},       {"double-one", double_one_campaign},
        {"cross-mode", cross_mode_campaign}};
    return table;
}

} // namespace

std::vector<std::string> const& campaign_catalog()
{
    static std::vector<std::string> const names = [] {
        std::vector<std::string> out;
        for (auto const& [name, fn] : runners())
            out.push_back(name);
        out.push_back("all");
        return out;
    }();
    return names;
}

CampaignReport run_campaign(std::string const& name, CampaignOptions const& options)
{
    if (name == "all")
    {
        CampaignReport all;
        all.campaign = "all";
        all.seed = options.seed;
        for (auto const& [sub, fn] : runners())
        {
            auto r = fn(options);
            all.params[sub] = r.params;
            for (auto& e : r.estimates)
            {
                e.name = sub + ": " + e.name;
                all.add(std::move(e));
            }
        }
        return all;
    }
    for (auto const& [sub, fn] : runners())
        if (sub == name)
        {
            auto r = fn(options);
            r.campaign = name;
            r.seed = options.seed;
            r.params["significance"] = options.significance;
            return r;
        }
    throw std::invalid_argument("unknown campaign: " + name);
}

nlohmann::json to_json(CampaignReport const& report)
{
    auto est = nlohmann::json::array();
    for (auto const& e : report.estimates)
        est.push_back({{"group", e.group},
                       {"name", e.name},
                       {"value", e.value},
                       {"stderr", e.stderr_},
                       {"target", e.target},
                       {"verdict", e.pass ? "pass" : "fail"},
                       {"note", e.note}});
    return {{"campaign", report.campaign},
            {"params", report.params},
            {"seed", report.seed},
            {"estimates", est},
            {"pass", report.pass}};
}

CampaignReport report_from_json(nlohmann::json const& j)
{
    CampaignReport r;
    r.campaign = j.at("campaign").get<std::string>();
    r.params = j.value("params", nlohmann::json::object());
    r.seed = j.value("seed", std::uint64_t{0});
    for (auto const& e : j.at("estimates"))
        r.estimates.push_back(Estimate{e.value("group", ""), e.at("name").get<std::string>(), e.at("value").get<double>(),
                                       e.value("stderr", 0.0), e.value("target", 0.0),
                                       e.at("verdict").get<std::string>() == "pass", e.value("note", "")});
    r.pass = j.at("pass").get<bool>();
    return r;
}

} // namespace fivewise
