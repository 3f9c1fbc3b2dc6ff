// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the package wrapper.

#include "fivewise/campaigns.hpp"
#include "fivewise/chain.hpp"
#include "fivewise/errors.hpp"
#include "fivewise/parity_measures.hpp"
#include "fivewise/process.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace fw = fivewise;

namespace {

fw::SamplerConfig make_config(std::uint64_t seed, int min_depth)
{
    fw::SamplerConfig c;
    c.seed = seed;
    c.min_depth = min_depth;
    return c;
}

template <class T, class U>
py::array_t<T> to_array(std::vector<U> const& v)
{
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    auto buf = out.template mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i)
        buf(static_cast<py::ssize_t>(i)) = static_cast<T>(v[i]);
    return out;
}

} // namespace

PYBIND11_MODULE(_fivewise, m)
{
    m.doc() = "Five-wise independent sign process: sampler and verification harness";

    py::register_exception<fw::BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

    m.def(
        "sample_path",
        [](std::int64_t a, std::int64_t b, std::uint64_t seed, int min_depth) {
            fw::PathSample p;
            {
                py::gil_scoped_release release;
                p = fw::sample_path(a, b, make_config(seed, min_depth));
            }
            std::vector<std::int64_t> k(p.size());
            for (std::size_t i = 0; i < k.size(); ++i)
                k[i] = a + static_cast<std::int64_t>(i);
            py::dict d;
            d["k"] = to_array<std::int64_t>(k);
            d["x"] = to_array<std::int8_t>(p.x);
            d["n"] = to_array<std::uint8_t>(p.n);
            d["anchor"] = to_array<std::int64_t>(p.anchor);
            d["j"] = to_array<std::int64_t>(p.j);
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("seed"), py::arg("min_depth") = 0);

    m.def("unknown_position", [] { return fw::kUnknownPosition; });

    m.def("transition_matrix_json", [] {
        nlohmann::json rows = nlohmann::json::array();
        for (auto const& row : fw::derive_transition_matrix())
        {
            nlohmann::json r = nlohmann::json::array();
            for (auto const& x : row)
                r.push_back(fw::fraction_string(x));
            rows.push_back(r);
        }
        return rows.dump();
    });

    m.def("identity_pattern_probability", [] { return fw::fraction_string(fw::identity_pattern_probability()); });

    m.def(
        "exact_distribution_json",
        [](int n, std::string const& kind) {
            return fw::to_json(fw::exact_distribution(n, fw::measure_kind_from_string(kind))).dump();
        },
        py::arg("n"), py::arg("kind"));

    m.def(
        "sum_distribution_json",
        [](int n, std::string const& kind) {
            return fw::to_json(fw::sum_distribution(n, fw::measure_kind_from_string(kind))).dump();
        },
        py::arg("n"), py::arg("kind"));

    m.def(
        "sample_level",
        [](int n, std::string const& kind, std::uint64_t seed) {
            auto const v = fw::sample_level(n, fw::measure_kind_from_string(kind), fw::StreamKey::root(seed));
            std::vector<int> out(static_cast<std::size_t>(v.size()));
            for (std::int64_t i = 0; i < v.size(); ++i)
                out[static_cast<std::size_t>(i)] = v[i];
            return to_array<std::int8_t>(out);
        },
        py::arg("n"), py::arg("kind"), py::arg("seed"));

    m.def(
        "block_audit_json",
        [](std::int64_t a, std::int64_t b, std::uint64_t seed, int min_depth) {
            py::gil_scoped_release release;
            auto const h = fw::build(a, b, make_config(seed, min_depth));
            auto const blocks = fw::decompose_blocks(h);
            auto const audit = fw::audit_block_contents(fw::sample_path(h), h, blocks);
            auto const issues = fw::audit_structure(h, blocks);
            return nlohmann::json{{"blocks", fw::to_json(audit)},
                                  {"structure_violations", issues},
                                  {"pass", audit.pass && issues.empty()}}
                .dump();
        },
        py::arg("a"), py::arg("b"), py::arg("seed"), py::arg("min_depth") = 0);

    m.def("campaign_catalog", [] { return fw::campaign_catalog(); });

    m.def(
        "run_campaign_json",
        [](std::string const& name, std::uint64_t seed, std::int64_t replicates, std::int64_t positions, int nmax,
           double significance, unsigned threads) {
            fw::CampaignOptions o;
            o.seed = seed;
            o.replicates = replicates;
            o.positions = positions;
            o.nmax = nmax;
            o.significance = significance;
            o.threads = threads;
            o.sampler.seed = seed;
            py::gil_scoped_release release;
            return fw::to_json(fw::run_campaign(name, o)).dump();
        },
        py::arg("name"), py::arg("seed") = 1, py::arg("replicates") = -1, py::arg("positions") = -1,
        py::arg("nmax") = 6, py::arg("significance") = 1e-3, py::arg("threads") = 0);
}
