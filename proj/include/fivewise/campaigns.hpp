#pragma once

#include "fivewise/hierarchy.hpp"
#include "fivewise/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fivewise {

struct Estimate
{
    std::string group; // families of checks that are reported together
    std::string name;
    double value = 0;
    double stderr_ = 0;
    double target = 0;
    bool pass = true;
    std::string note;
};

struct CampaignReport
{
    std::string campaign;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::vector<Estimate> estimates;
    bool pass = true;

    void add(Estimate e)
    {
        pass = pass && e.pass;
        estimates.push_back(std::move(e));
    }
    bool group_pass(std::string const& group) const;
    bool has_group(std::string const& group) const;
};

// Sizes default to the acceptance scale; a negative value selects the default.
struct CampaignOptions
{
    std::uint64_t seed = 1;
    std::int64_t replicates = -1;
    std::int64_t positions = -1;
    int nmax = 6;
    double significance = 1e-3;
    unsigned threads = 0; // 0: hardware concurrency
    SamplerConfig sampler;
};

std::vector<std::string> const& campaign_catalog();

// Rational checks only (groups transition-law, measure-suite, gap-identity,
// pattern-probability); the first part of the measures campaign.
CampaignReport exact_suite();

// Throws std::invalid_argument for unknown names and lets BudgetExceeded through.
CampaignReport run_campaign(std::string const& name, CampaignOptions const& options);

nlohmann::json to_json(CampaignReport const& report);
CampaignReport report_from_json(nlohmann::json const& j);

// Runs body(i) for i in [0, count) on up to `threads` workers, contiguous chunks.
void parallel_for(std::int64_t count, unsigned threads, std::function<void(std::int64_t)> const& body);

// Window source for statistics: replicate r is the process on [0, length) under
// a seed derived from (seed, r). Batches are generated in parallel.
PathSource process_source(std::uint64_t seed, SamplerConfig const& sampler, unsigned threads);
// I.i.d. fair signs, the reference input of the harness self-check.
PathSource rademacher_source(std::uint64_t seed);

} // namespace fivewise
