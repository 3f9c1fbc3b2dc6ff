#include "fivewise/hierarchy.hpp"

#include "fivewise/chain.hpp"
#include "fivewise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fivewise {

namespace {

std::string trim(std::string s)
{
    auto const first = s.find_first_not_of(" \t\r");
    auto const last = s.find_last_not_of(" \t\r");
    return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

bool parse_bool(std::string const& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw std::invalid_argument("not a boolean: " + v);
}

} // namespace

void apply_config(SamplerConfig& config, std::map<std::string, std::string> const& values)
{
    for (auto const& [key, value] : values)
    {
        if (key == "seed")
            config.seed = std::stoull(value);
        else if (key == "extension_factor")
            config.extension_factor = std::stod(value);
        else if (key == "max_extension")
            config.max_extension = std::stoll(value);
        else if (key == "max_level" || key == "budget_level")
            config.max_level = std::stoi(value);
        else if (key == "backward_budget" || key == "budget_backward")
            config.backward_budget = std::stoll(value);
        else if (key == "min_depth" || key == "depth")
            config.min_depth = std::stoi(value);
        else if (key == "locate_anchors")
            config.locate_anchors = parse_bool(value);
        else if (key == "literal_depth")
            config.literal_depth = std::stoi(value);
        else if (key == "literal_scan_budget")
            config.literal_scan_budget = std::stoll(value);
        else
            throw std::invalid_argument("unknown sampler key: " + key);
    }
    if (config.extension_factor <= 1.0 || config.max_extension <= 0 || config.max_level <= 0 ||
        config.max_level > 24 || config.backward_budget <= 0 || config.literal_scan_budget <= 0)
        throw std::invalid_argument("sampler guards must be positive (max_level <= 24, extension_factor > 1)");
}

std::map<std::string, std::string> read_key_value_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line))
    {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line without '=': " + line);
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::int64_t LevelState::last_anchor_ordinal(std::int64_t index) const
{
    auto const it = std::upper_bound(anchors.begin(), anchors.end(), index);
    return ordinal_of_rank(static_cast<std::int64_t>(it - anchors.begin()) - 1);
}

std::int64_t LevelState::position_of_ordinal(std::int64_t ordinal) const
{
    auto const rank = rank_of_ordinal(ordinal);
    if (rank < 0 || rank >= static_cast<std::int64_t>(anchor_positions.size()))
        return kUnknownPosition;
    return anchor_positions[static_cast<std::size_t>(rank)];
}

PositionRecord HierarchyWindow::record(std::int64_t k) const
{
    if (k < a_ || k > b_)
        throw std::out_of_range("position outside the hierarchy window");
    PositionRecord r;
    r.n = n_at(k);
    r.anchor = anchor_at(k);
    r.anchor_ordinal = anchor_ordinal_at(k);
    r.j = j_at(k);
    std::int64_t o = k;
    for (int n = 1; n <= r.n + 1; ++n)
    {
        auto const& level = levels_[static_cast<std::size_t>(n - 1)];
        int const d = level.symbol(o);
        r.deltas.push_back(d);
        if (d != 0)
            o = level.last_anchor_ordinal(o);
    }
    return r;
}

int HierarchyWindow::symbol(int n, std::int64_t k) const
{
    if (k < a_ || k > b_)
        throw std::out_of_range("position outside the hierarchy window");
    if (n < 1 || n > depth())
        return 0;
    if (n == 1)
        return levels_[0].symbol(k);
    auto const& below = levels_[static_cast<std::size_t>(n - 2)];
    auto const it = std::lower_bound(below.anchor_positions.begin(), below.anchor_positions.end(), k);
    if (it == below.anchor_positions.end() || *it != k)
        return 0;
    auto const ordinal = below.ordinal_of_rank(it - below.anchor_positions.begin());
    auto const& here = levels_[static_cast<std::size_t>(n - 1)];
    return here.covers(ordinal) ? here.symbol(ordinal) : 0;
}

std::vector<std::int64_t> HierarchyWindow::anchors_in(int n, std::int64_t lo, std::int64_t hi) const
{
    std::vector<std::int64_t> out;
    if (n < 1 || n > depth())
        return out;
    auto const& p = levels_[static_cast<std::size_t>(n - 1)].anchor_positions;
    auto it = std::lower_bound(p.begin(), p.end(), lo);
    for (; it != p.end() && *it <= hi; ++it)
        out.push_back(*it);
    return out;
}

bool HierarchyWindow::all_anchors_located() const
{
    return std::none_of(anchor_.begin(), anchor_.end(), [](std::int64_t p) { return p == kUnknownPosition; });
}

class HierarchyBuilder
{
  public:
    HierarchyBuilder(std::int64_t a, std::int64_t b, SamplerConfig const& config) : a_(a), b_(b), config_(config)
    {
        if (b < a)
            throw std::invalid_argument("hierarchy window is empty");
    }

    HierarchyWindow run()
    {
        std::int64_t extra = 0;
        for (;;)
        {
            auto window = attempt(extra);
            if (!config_.locate_anchors || window.all_anchors_located())
                return window;
            extra = std::max<std::int64_t>(1024, static_cast<std::int64_t>(extra * config_.extension_factor));
            if (extra > config_.max_extension)
            {
                int deepest = 0;
                for (std::int64_t k = a_; k <= b_; ++k)
                    if (window.anchor_at(k) == kUnknownPosition)
                        deepest = std::max(deepest, window.n_at(k));
                throw BudgetExceeded("anchor lies more than " + std::to_string(config_.max_extension) +
                                         " positions left of the window",
                                     deepest);
            }
        }
    }

  private:
    std::vector<std::uint8_t> evaluate(int n, std::int64_t lo, std::int64_t hi) const
    {
        XiSource const xi{innovation_key(config_.seed, n)};
        if (n <= config_.literal_depth)
            return literal_segment(xi, lo, hi, config_.literal_scan_budget, n);
        return canonical_segment(xi, lo, hi, config_.backward_budget, n);
    }

    // Symbols over [need_lo, need_hi], extended left to the last anchor at or before need_lo.
    LevelState make_level(int n, std::int64_t need_lo, std::int64_t need_hi) const
    {
        LevelState level;
        level.level = n;
        std::int64_t ext = n <= config_.literal_depth ? 4096 : 64;
        for (;;)
        {
            std::int64_t const lo_try = need_lo - ext;
            auto u = evaluate(n, lo_try - 1, need_hi);
            std::int64_t found = kUnknownPosition;
            for (std::int64_t t = need_lo; t >= lo_try; --t)
            {
                auto const i = static_cast<std::size_t>(t - lo_try + 1);
                if (u[i] == 1 && u[i - 1] != 1)
                {
                    found = t;
                    break;
                }
            }
            if (found != kUnknownPosition)
            {
                level.lo = found;
                level.hi = need_hi;
                u.erase(u.begin(), u.begin() + (found - lo_try));
                level.u = std::move(u);
                break;
            }
            ext = static_cast<std::int64_t>(std::ceil(static_cast<double>(ext) * config_.extension_factor));
            if (ext > config_.max_extension)
                throw BudgetExceeded("no anchor within " + std::to_string(config_.max_extension) + " indices", n);
        }
        level.w = spaced_from_states(level.u);
        for (std::int64_t t = level.lo; t <= level.hi; ++t)
            if (level.symbol(t) == 1)
                level.anchors.push_back(t);
        auto const origin = std::upper_bound(level.anchors.begin(), level.anchors.end(), std::int64_t{0});
        level.origin_rank = static_cast<std::int64_t>(origin - level.anchors.begin()) - 1;
        return level;
    }

    void locate(LevelState& level, LevelState const* below) const
    {
        level.anchor_positions.resize(level.anchors.size());
        for (std::size_t r = 0; r < level.anchors.size(); ++r)
            level.anchor_positions[r] = below ? below->position_of_ordinal(level.anchors[r]) : level.anchors[r];
    }

    HierarchyWindow attempt(std::int64_t extra)
    {
        HierarchyWindow out;
        out.a_ = a_;
        out.b_ = b_;
        out.seed_ = config_.seed;

        std::int64_t need_lo = std::min<std::int64_t>(a_, 0) - extra;
        std::int64_t need_hi = std::max<std::int64_t>(b_, 0);
        std::vector<std::int64_t> alive; // level-(n-1) ordinals reached by some window position
        for (int n = 1;; ++n)
        {
            if (n > config_.max_level)
                throw BudgetExceeded("hierarchy deeper than the level guard", n);
            auto level = make_level(n, need_lo, need_hi);
            locate(level, n == 1 ? nullptr : &out.levels_.back());

            std::vector<std::int64_t> next;
            auto advance = [&](std::int64_t o) {
                if (level.symbol(o) == 0)
                    return;
                auto const g = level.last_anchor_ordinal(o);
                if (next.empty() || next.back() != g)
                    next.push_back(g);
            };
            if (n == 1)
                for (std::int64_t k = a_; k <= b_; ++k)
                    advance(k);
            else
                for (auto o : alive)
                    advance(o);

            need_lo = level.ordinal_of_rank(0);
            need_hi = level.ordinal_of_rank(static_cast<std::int64_t>(level.anchors.size()) - 1);
            out.levels_.push_back(std::move(level));
            alive = std::move(next);
            if (alive.empty() && n >= config_.min_depth)
                break;
        }
        resolve_all(out);
        return out;
    }

    void resolve_all(HierarchyWindow& out) const
    {
        auto const count = static_cast<std::size_t>(b_ - a_ + 1);
        out.n_.assign(count, 0);
        out.j_.assign(count, 0);
        out.anchor_.assign(count, kUnknownPosition);
        out.anchor_ordinal_.assign(count, 0);
        auto const& levels = out.levels_;
        for (std::int64_t k = a_; k <= b_; ++k)
        {
            std::int64_t o = k;
            std::int64_t j = 0;
            std::int64_t weight = 1;
            int n = 0;
            for (;;)
            {
                auto const& level = levels[static_cast<std::size_t>(n)];
                int const d = level.symbol(o);
                if (d == 0)
                    break;
                j += weight * (d - 1);
                weight *= 6;
                o = level.last_anchor_ordinal(o);
                ++n;
                if (n >= static_cast<int>(levels.size()))
                    throw BudgetExceeded("position unresolved at the built depth", n);
            }
            auto const i = static_cast<std::size_t>(k - a_);
            out.n_[i] = static_cast<std::uint8_t>(n);
            out.j_[i] = j;
            out.anchor_ordinal_[i] = o;
            out.anchor_[i] = n == 0 ? k : levels[static_cast<std::size_t>(n - 1)].position_of_ordinal(o);
        }
    }

    std::int64_t a_;
    std::int64_t b_;
    SamplerConfig config_;
};

HierarchyWindow build(std::int64_t a, std::int64_t b, SamplerConfig const& config)
{
    SamplerConfig c = config;
    c.literal_depth = 0;
    return HierarchyBuilder(a, b, c).run();
}

HierarchyWindow literal_build(std::int64_t a, std::int64_t b, SamplerConfig config)
{
    if (config.literal_depth <= 0)
        config.literal_depth = 2;
    return HierarchyBuilder(a, b, config).run();
}

PositionRecord resolve_position(std::int64_t k, HierarchyWindow const& window) { return window.record(k); }

DoubleOneEstimate double_one_probability(int n, std::int64_t replicates, StreamKey key, std::int64_t window_length)
{
    if (n < 1 || replicates < 1)
        throw std::invalid_argument("double_one_probability: need n >= 1 and replicates >= 1");
    if (window_length < 0)
    {
        window_length = 6;
        for (int i = 0; i < n; ++i)
            window_length *= 16;
    }
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < replicates; ++r)
    {
        SamplerConfig config;
        config.seed = key.child(Tag::replicate).child(r).value;
        config.min_depth = n;
        auto const window = build(1, window_length, config);
        hits += window.anchors_in(n, 1, window_length).size() >= 2 ? 1 : 0;
    }
    DoubleOneEstimate e;
    e.n = n;
    e.replicates = replicates;
    e.estimate = static_cast<double>(hits) / static_cast<double>(replicates);
    e.stderr_ = std::sqrt(e.estimate * (1 - e.estimate) / static_cast<double>(replicates));
    return e;
}

} // namespace fivewise
