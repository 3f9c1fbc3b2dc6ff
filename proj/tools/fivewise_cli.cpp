// Command-line front end. Exit status: 0 pass, 1 failed check, 2 budget exceeded.

#include "fivewise/campaigns.hpp"
#include "fivewise/chain.hpp"
#include "fivewise/errors.hpp"
#include "fivewise/parity_measures.hpp"
#include "fivewise/process.hpp"
#include "fivewise/rational.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fw = fivewise;
using nlohmann::json;

namespace {

struct Globals
{
    std::uint64_t seed = 1;
    std::string config_file;
    bool ci = false;
    unsigned threads = 0;
    std::string out;
    std::string format;
    std::int64_t budget_backward = 0;
    int budget_level = 0;
};

struct Window
{
    std::int64_t a = 0;
    std::int64_t b = -1;
};

Window parse_window(std::string const& text)
{
    auto const colon = text.find(':', text.front() == '-' ? 1 : 0);
    if (colon == std::string::npos)
        throw CLI::ValidationError("--window", "expected a:b");
    Window w{std::stoll(text.substr(0, colon)), std::stoll(text.substr(colon + 1))};
    if (w.b < w.a)
        throw CLI::ValidationError("--window", "window must be nonempty");
    return w;
}

// Output sink: --out, else $FIVEWISE_OUT_DIR/<default_name>, else stdout.
class Sink
{
  public:
    Sink(std::string const& out, std::string const& default_name)
    {
        std::string path = out;
        if (path.empty())
            if (char const* dir = std::getenv("FIVEWISE_OUT_DIR"); dir && *dir)
            {
                std::filesystem::create_directories(dir);
                path = (std::filesystem::path(dir) / default_name).string();
            }
        if (!path.empty())
        {
            file_.open(path);
            if (!file_)
                throw std::runtime_error("cannot write " + path);
            path_ = path;
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    bool to_file() const { return !path_.empty(); }
    std::string const& path() const { return path_; }

  private:
    std::ofstream file_;
    std::string path_;
};

std::string anchor_text(std::int64_t anchor)
{
    return anchor == fw::kUnknownPosition ? "NA" : std::to_string(anchor);
}

fw::SamplerConfig sampler_config(Globals const& g, CLI::App const& app)
{
    fw::SamplerConfig c;
    if (!g.config_file.empty())
        fw::apply_config(c, fw::read_key_value_file(g.config_file));
    // Flags win over the file.
    if (app.count("--seed") || g.config_file.empty())
        c.seed = g.seed;
    if (g.budget_backward > 0)
        c.backward_budget = g.budget_backward;
    if (g.budget_level > 0)
        c.max_level = g.budget_level;
    return c;
}

// ---------------------------------------------------------------- sample-path

int run_sample_path(Globals const& g, CLI::App const& root, std::string const& window_text, int depth,
                    std::string const& dump, bool locate)
{
    auto const w = parse_window(window_text);
    auto config = sampler_config(g, root);
    if (depth > config.max_level)
        throw CLI::ValidationError("--depth", "exceeds the level guard");
    config.min_depth = std::max(config.min_depth, depth);
    config.locate_anchors = config.locate_anchors || locate;
    std::string const format = g.format.empty() ? "csv" : g.format;
    Sink sink(g.out, dump + ".csv");
    auto& os = sink.stream();

    if (dump == "chain")
    {
        auto const p = fw::sample_stationary_path_cftp(w.a, w.b, fw::innovation_key(config.seed, 1),
                                                       config.backward_budget);
        if (format == "json")
        {
            json rows = json::array();
            for (std::int64_t k = w.a; k <= w.b; ++k)
                rows.push_back({{"k", k}, {"U", p.u(k)}, {"W", p.w(k)}});
            os << rows.dump(1) << '\n';
        }
        else
        {
            os << "k,U,W\n";
            for (std::int64_t k = w.a; k <= w.b; ++k)
                os << k << ',' << p.u(k) << ',' << p.w(k) << '\n';
        }
        return 0;
    }

    auto const h = fw::build(w.a, w.b, config);
    if (dump == "hierarchy")
    {
        os << "k";
        for (int n = 1; n <= h.depth(); ++n)
            os << ",W" << n;
        os << ",N,anchor,J\n";
        for (std::int64_t k = w.a; k <= w.b; ++k)
        {
            os << k;
            for (int n = 1; n <= h.depth(); ++n)
                os << ',' << h.symbol(n, k);
            os << ',' << h.n_at(k) << ',' << anchor_text(h.anchor_at(k)) << ',' << h.j_at(k) << '\n';
        }
        return 0;
    }

    auto const p = fw::sample_path(h);
    if (format == "json")
    {
        json rows = json::array();
        for (std::size_t i = 0; i < p.size(); ++i)
            rows.push_back({{"k", p.a + static_cast<std::int64_t>(i)},
                            {"X", p.x[i]},
                            {"N", p.n[i]},
                            {"anchor", p.anchor[i] == fw::kUnknownPosition ? json(nullptr) : json(p.anchor[i])},
                            {"J", p.j[i]}});
        os << rows.dump(1) << '\n';
    }
    else
    {
        os << "k,X,N,anchor,J\n";
        for (std::size_t i = 0; i < p.size(); ++i)
            os << p.a + static_cast<std::int64_t>(i) << ',' << int(p.x[i]) << ',' << int(p.n[i]) << ','
               << anchor_text(p.anchor[i]) << ',' << p.j[i] << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- exact

json matrix_json(fw::TransitionMatrix const& m)
{
    json rows = json::array();
    for (auto const& row : m)
    {
        json r = json::array();
        for (auto const& x : row)
            r.push_back(fw::fraction_string(x));
        rows.push_back(r);
    }
    return rows;
}

int run_exact(Globals const& g, std::string const& which)
{
    bool ok = true;
    json doc = json::object();
    std::ostringstream text;

    if (which == "transition-matrix" || which == "all")
    {
        auto const m = fw::derive_transition_matrix();
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
            {
                fw::Rational want = 0;
                if (i == j)
                    want = fw::Rational(5, 8);
                else if (j == (i + 1) % 6)
                    want = fw::Rational(3, 8);
                ok = ok && m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == want;
            }
        ok = ok && fw::uniform_is_stationary(m);
        doc["transition_matrix"] = matrix_json(m);
        text << "transition matrix (rows: from state 1..6)\n";
        for (auto const& row : m)
        {
            for (std::size_t j = 0; j < row.size(); ++j)
                text << (j ? " " : "") << std::setw(4) << fw::fraction_string(row[j]);
            text << '\n';
        }
    }
    if (which == "measures" || which == "all")
    {
        json measures = json::object();
        text << "level-1 measures\n";
        for (auto kind : {fw::MeasureKind::ord, fw::MeasureKind::cen, fw::MeasureKind::fri, fw::MeasureKind::pos})
        {
            auto const d = fw::exact_distribution(1, kind);
            ok = ok && d.total_mass() == 1;
            json entry = {{"distribution", fw::to_json(d)}};
            json sums = json::object();
            for (int n = 1; n <= 3; ++n)
                sums[std::to_string(n)] = fw::to_json(fw::sum_distribution(n, kind));
            entry["sum_laws"] = sums;
            measures[fw::to_string(kind)] = entry;
            text << "  " << fw::to_string(kind) << ": " << d.support.size() << " atoms of mass "
                 << fw::fraction_string(d.support.front().second) << "; sum law n=1:";
            for (auto const& [s, p] : fw::sum_distribution(1, kind))
                text << ' ' << s << '@' << fw::fraction_string(p);
            text << '\n';
        }
        auto const ord = fw::sum_distribution(2, fw::MeasureKind::ord);
        ok = ok && ord.at(0) == fw::Rational(5, 8) && ord.at(16) == fw::Rational(3, 16);
        doc["measures"] = measures;
    }
    if (which == "gap-identity" || which == "all")
    {
        auto const gap = fw::sixth_moment_gap(0, {1, 1, 1, 1, 1, 1});
        json rows = json::array();
        text << "sixth-moment gap, full blocks\n";
        for (int n = 0; n <= 3; ++n)
        {
            auto const c = fw::six_pow(n);
            auto const v = fw::sixth_moment_gap(n, {c, c, c, c, c, c});
            auto const want = fw::Rational(720) * fw::rpow(fw::Rational(4), 6 * n);
            ok = ok && v == want;
            rows.push_back({{"n", n}, {"gap", fw::fraction_string(v)}});
            text << "  n=" << n << ": " << fw::fraction_string(v) << '\n';
        }
        ok = ok && gap == 720;
        doc["gap_identity"] = rows;
    }
    if (which == "pattern-probability" || which == "all")
    {
        auto const p = fw::identity_pattern_probability();
        doc["pattern_probability"] = {{"fraction", fw::fraction_string(p)}, {"value", fw::to_double(p)}};
        text << "identity pattern probability " << fw::fraction_string(p) << " (" << std::setprecision(6)
             << fw::to_double(p) << ")\n";
    }
    if (doc.empty())
        throw CLI::ValidationError("exact", "unknown suite " + which);
    doc["pass"] = ok;
    Sink sink(g.out, "exact-" + which + (g.format == "json" ? ".json" : ".txt"));
    if (g.format == "json")
        sink.stream() << doc.dump(2) << '\n';
    else
        sink.stream() << text.str() << (ok ? "exact checks: pass\n" : "exact checks: FAIL\n");
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------- verify / report

void print_summary(std::ostream& os, fw::CampaignReport const& r)
{
    for (auto const& e : r.estimates)
        os << (e.pass ? "PASS " : "FAIL ") << e.name << ": " << std::setprecision(8) << e.value << " (stderr "
           << e.stderr_ << ", target " << e.target << ")\n";
    os << r.campaign << ": " << (r.pass ? "PASS" : "FAIL") << '\n';
}

std::string xml_escape(std::string const& s)
{
    std::string out;
    for (char c : s)
        switch (c)
        {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    return out;
}

// One row per estimate: standardized deviation from its target, clipped to +-8.
void write_svg(std::string const& path, std::vector<fw::CampaignReport> const& reports)
{
    std::vector<fw::Estimate> rows;
    for (auto const& r : reports)
        rows.insert(rows.end(), r.estimates.begin(), r.estimates.end());
    int const row_h = 16, label_w = 520, plot_w = 400;
    int const height = row_h * static_cast<int>(rows.size() + 2);
    double const mid = label_w + plot_w / 2.0, scale = plot_w / 16.0;
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + plot_w + 20 << "\" height=\"" << height
       << "\" font-family=\"monospace\" font-size=\"11\">\n";
    os << "<rect x=\"" << mid - 4 * scale << "\" y=\"0\" width=\"" << 8 * scale << "\" height=\"" << height
       << "\" fill=\"#eef\"/>\n";
    os << "<line x1=\"" << mid << "\" y1=\"0\" x2=\"" << mid << "\" y2=\"" << height << "\" stroke=\"#888\"/>\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        auto const& e = rows[i];
        double z = 0;
        if (e.stderr_ > 0)
            z = (e.value - e.target) / e.stderr_;
        z = std::clamp(z, -8.0, 8.0);
        double const y = row_h * (static_cast<double>(i) + 1.5);
        os << "<text x=\"4\" y=\"" << y + 4 << "\">" << xml_escape(e.name) << "</text>\n";
        os << "<circle cx=\"" << mid + z * scale << "\" cy=\"" << y << "\" r=\"4\" fill=\""
           << (e.pass ? "#2a2" : "#c22") << "\"/>\n";
    }
    os << "</svg>\n";
}

int run_verify(Globals const& g, CLI::App const& root, std::string const& campaign, fw::CampaignOptions options,
               std::string const& plot)
{
    if (g.ci && !root.count("--seed"))
        throw CLI::ValidationError("--seed", "required in CI mode");
    options.seed = g.seed;
    options.threads = g.threads;
    options.sampler = sampler_config(g, root);
    auto const report = fw::run_campaign(campaign, options);
    Sink sink(g.out, campaign + ".json");
    sink.stream() << fw::to_json(report).dump(2) << '\n';
    if (sink.to_file())
        print_summary(std::cout, report);
    if (!plot.empty())
        write_svg(plot, {report});
    return report.pass ? 0 : 1;
}

int run_report(Globals const& g, std::vector<std::string> const& files, std::string const& plot)
{
    std::vector<fw::CampaignReport> reports;
    bool pass = true;
    for (auto const& f : files)
    {
        std::ifstream in(f);
        if (!in)
            throw std::runtime_error("cannot read " + f);
        reports.push_back(fw::report_from_json(json::parse(in)));
        pass = pass && reports.back().pass;
    }
    Sink sink(g.out, "report.txt");
    for (auto const& r : reports)
        print_summary(sink.stream(), r);
    sink.stream() << "overall: " << (pass ? "PASS" : "FAIL") << '\n';
    if (!plot.empty())
        write_svg(plot, reports);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------- blocks

int run_blocks(Globals const& g, CLI::App const& root, std::string const& window_text, int depth)
{
    auto const w = parse_window(window_text);
    auto config = sampler_config(g, root);
    config.min_depth = std::max(config.min_depth, depth);
    auto const h = fw::build(w.a, w.b, config);
    auto const blocks = fw::decompose_blocks(h);
    auto const audit = fw::audit_block_contents(fw::sample_path(h), h, blocks);
    auto const issues = fw::audit_structure(h, blocks);
    json doc = {{"blocks", fw::to_json(audit)}, {"structure_violations", issues},
                {"pass", audit.pass && issues.empty()}};
    Sink sink(g.out, "blocks.json");
    sink.stream() << doc.dump(2) << '\n';
    return audit.pass && issues.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sampler and verification harness for the five-wise independent sign process"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--config", g.config_file, "Flat key=value sampler configuration")->check(CLI::ExistingFile);
    app.add_flag("--ci", g.ci, "CI mode: the seed must be given explicitly");
    app.add_option("--threads", g.threads, "Worker threads (0: all cores)");
    app.add_option("--out", g.out, "Output file (default: $FIVEWISE_OUT_DIR or stdout)");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
    app.add_option("--budget-backward", g.budget_backward, "Backward coupling budget per level")
        ->check(CLI::PositiveNumber);
    app.add_option("--budget-level", g.budget_level, "Level guard")->check(CLI::Range(1, 24));

    std::string window;
    int depth = 0;

    auto* sample = app.add_subcommand("sample-path", "Emit a window of the process, hierarchy or level-1 chain");
    std::string dump = "path";
    bool locate = false;
    sample->add_option("--window", window, "Window a:b")->required();
    sample->add_option("--depth", depth, "Build at least this many levels")->check(CLI::NonNegativeNumber);
    sample->add_option("--dump", dump, "What to emit")->check(CLI::IsMember({"path", "hierarchy", "chain"}));
    sample->add_flag("--locate-anchors", locate, "Extend left until every anchor has a position");

    auto* exact = app.add_subcommand("exact", "Exact rational checks");
    std::string which = "all";
    exact->add_option("suite", which, "transition-matrix | measures | gap-identity | pattern-probability | all")
        ->check(CLI::IsMember({"transition-matrix", "measures", "gap-identity", "pattern-probability", "all"}));

    auto* verify = app.add_subcommand("verify", "Run a verification campaign");
    std::string campaign;
    fw::CampaignOptions options;
    std::string plot;
    verify->add_option("campaign", campaign, "Campaign name")->required()->check(CLI::IsMember(fw::campaign_catalog()));
    verify->add_option("--replicates", options.replicates, "Replicates (campaign default if omitted)")
        ->check(CLI::PositiveNumber);
    verify->add_option("--positions", options.positions, "Positions (campaign default if omitted)")
        ->check(CLI::PositiveNumber);
    verify->add_option("--nmax", options.nmax, "Largest tail level")->check(CLI::Range(0, 12));
    verify->add_option("--significance", options.significance, "Family-wise test level")->check(CLI::Range(1e-12, 0.5));
    verify->add_option("--plot", plot, "Write an SVG of estimates vs targets");

    auto* blocks = app.add_subcommand("blocks", "Block decomposition audit of one window");
    blocks->add_option("--window", window, "Window a:b")->required();
    blocks->add_option("--depth", depth, "Build at least this many levels")->check(CLI::NonNegativeNumber);

    auto* report = app.add_subcommand("report", "Summarize campaign reports");
    std::vector<std::string> files;
    report->add_option("files", files, "CampaignReport JSON files")->required()->check(CLI::ExistingFile);
    report->add_option("--plot", plot, "Write an SVG of estimates vs targets");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sample)
            return run_sample_path(g, app, window, depth, dump, locate);
        if (*exact)
            return run_exact(g, which);
        if (*verify)
            return run_verify(g, app, campaign, options, plot);
        if (*blocks)
            return run_blocks(g, app, window, depth);
        if (*report)
            return run_report(g, files, plot);
    }
    catch (fw::BudgetExceeded const& e)
    {
        std::cerr << "budget exceeded at level " << e.level() << ": " << e.what()
                  << " (a guard at level L trips with probability about (3/8)^L = "
                  << std::pow(3.0 / 8.0, e.level()) << ")\n";
        return 2;
    }
    catch (CLI::Error const& e)
    {
        return app.exit(e);
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
