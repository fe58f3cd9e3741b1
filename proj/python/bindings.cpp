#include <celltree/analysis.hpp>
#include <celltree/bounds.hpp>
#include <celltree/branching.hpp>
#include <celltree/density.hpp>
#include <celltree/estimator.hpp>
#include <celltree/experiments.hpp>
#include <celltree/partition_tree.hpp>
#include <celltree/rng.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace py = pybind11;
namespace ct = celltree;

namespace {

py::dict stats_dict(const ct::TreeStats& s) {
    py::dict d;
    d["node_count"] = s.node_count;
    d["leaf_count"] = s.leaf_count;
    d["height"] = s.height;
    d["decision_ops"] = s.decision_ops;
    d["truncated"] = s.truncated;
    return d;
}

py::list leaf_list(const std::vector<ct::Leaf>& leaves) {
    py::list out;
    for (const auto& leaf : leaves) out.append(py::make_tuple(leaf.cell.left(), leaf.cell.right(), leaf.count));
    return out;
}

// Sorts a copy when needed so callers can pass raw samples.
std::vector<double> sorted_copy(std::vector<double> values) {
    if (!std::is_sorted(values.begin(), values.end())) std::sort(values.begin(), values.end());
    return values;
}

py::list records_list(const ct::ExperimentReport& report) {
    py::list out;
    for (const auto& r : report.records) {
        py::dict d;
        d["n"] = r.n;
        d["trials"] = r.trials;
        d["mean_l1"] = r.mean_l1;
        d["stderr_l1"] = r.stderr_l1;
        d["mean_leaves"] = r.mean_leaves;
        d["mean_decision_ops"] = r.mean_decision_ops;
        d["mean_size"] = r.mean_size;
        d["baseline_mean_l1"] = r.baseline_mean_l1 ? py::cast(*r.baseline_mean_l1) : py::none();
        d["max_ops_ratio"] = r.max_ops_ratio;
        out.append(d);
    }
    return out;
}

py::dict report_dict(const ct::ExperimentReport& report) {
    py::dict d;
    d["experiment"] = report.experiment;
    d["density"] = report.density;
    d["gamma"] = report.gamma;
    d["records"] = records_list(report);
    d["l1_slope"] = report.l1_slope;
    d["leaf_slope"] = report.leaf_slope;
    d["size_slope"] = report.size_slope;
    return d;
}

ct::ExperimentConfig make_config(const std::string& density, double gamma, std::vector<std::size_t> n_grid,
                                 std::size_t trials, std::uint64_t seed, unsigned jobs) {
    ct::ExperimentConfig config;
    config.density = ct::Density::parse(density);
    config.gamma = gamma;
    config.n_grid = std::move(n_grid);
    config.trials = trials;
    config.base_seed = seed;
    config.jobs = jobs;
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cellular binary-tree histograms for monotone densities on [0, 1]";

    py::class_<ct::Density>(m, "Density")
        .def(py::init([](const std::string& spec) { return ct::Density::parse(spec); }), py::arg("spec"))
        .def_property_readonly("name", &ct::Density::name)
        .def_property_readonly("mode_bound", &ct::Density::mode_bound)
        .def_property_readonly("bounded", &ct::Density::bounded)
        .def("pdf", &ct::Density::pdf, py::arg("x"))
        .def("cdf", &ct::Density::cdf, py::arg("x"))
        .def("quantile", &ct::Density::quantile, py::arg("u"))
        .def("measure", &ct::Density::measure, py::arg("a"), py::arg("b"))
        .def(
            "sample",
            [](const ct::Density& d, std::size_t n, std::uint64_t seed) {
                ct::RngStream rng(seed);
                return d.sample_sorted(n, rng);
            },
            py::arg("n"), py::arg("seed") = 1, "Sorted sample of size n")
        .def("__repr__", [](const ct::Density& d) { return "Density('" + d.name() + "')"; });

    m.def(
        "build_tree",
        [](std::vector<double> sample, double gamma, std::uint32_t max_depth) {
            const auto sorted = sorted_copy(std::move(sample));
            const auto tree = ct::PartitionTree::build(sorted, gamma, max_depth);
            return py::make_tuple(leaf_list(tree.leaves()), stats_dict(tree.stats()));
        },
        py::arg("sample"), py::arg("gamma") = ct::default_gamma, py::arg("max_depth") = ct::default_max_depth,
        "Returns ([(left, right, count), ...], stats)");

    m.def(
        "estimate",
        [](std::vector<double> sample, double gamma, std::uint32_t max_depth) {
            const auto sorted = sorted_copy(std::move(sample));
            const auto tree = ct::PartitionTree::build(sorted, gamma, max_depth);
            const auto f = ct::histogram_estimate(tree.leaves(), sorted.size());
            const auto bp = f.breakpoints();
            const auto h = f.heights();
            return py::make_tuple(std::vector<double>(bp.begin(), bp.end()), std::vector<double>(h.begin(), h.end()));
        },
        py::arg("sample"), py::arg("gamma") = ct::default_gamma, py::arg("max_depth") = ct::default_max_depth,
        "Returns (breakpoints, heights) of the histogram estimate");

    m.def(
        "l1_error",
        [](std::vector<double> breakpoints, std::vector<double> heights, const ct::Density& d) {
            return ct::l1_error(ct::PiecewiseConstant(std::move(breakpoints), std::move(heights)), d);
        },
        py::arg("breakpoints"), py::arg("heights"), py::arg("density"));

    m.def("choose_bin_count", &ct::choose_bin_count, py::arg("mode_bound"), py::arg("n"));
    m.def("normal_upper_tail", &ct::normal_upper_tail, py::arg("gamma"));
    m.def("split_probability_exact", &ct::split_probability_exact, py::arg("count"), py::arg("gamma"));
    m.def(
        "gw_expected_size", [](double p2) { return ct::gw_expected_size(ct::OffspringLaw{p2}); }, py::arg("p2"));
    m.def("phi_gamma_bound", &ct::phi_gamma_bound, py::arg("gamma"));
    m.def("ell_star", &ct::ell_star, py::arg("mode_bound"), py::arg("n"), py::arg("gamma"));
    m.def("proposition3_bound", &ct::proposition3_bound, py::arg("mode_bound"), py::arg("n"), py::arg("gamma"));
    m.def(
        "constants",
        [](double gamma) {
            const auto c = ct::constants(gamma);
            py::dict d;
            d["c1"] = c.c1;
            d["c2"] = c.c2;
            d["c3"] = c.c3;
            return d;
        },
        py::arg("gamma"));

    m.def(
        "run_convergence",
        [](const std::string& density, double gamma, std::vector<std::size_t> n_grid, std::size_t trials,
           std::uint64_t seed, unsigned jobs) {
            const auto config = make_config(density, gamma, std::move(n_grid), trials, seed, jobs);
            ct::ExperimentReport report;
            {
                py::gil_scoped_release release;
                report = ct::run_convergence(config);
            }
            return report_dict(report);
        },
        py::arg("density"), py::arg("gamma") = ct::default_gamma, py::arg("n_grid"), py::arg("trials") = 100,
        py::arg("seed") = 1, py::arg("jobs") = 1);

    m.def(
        "run_runtime",
        [](const std::string& density, double gamma, std::vector<std::size_t> n_grid, std::size_t trials,
           std::uint64_t seed, unsigned jobs) {
            const auto config = make_config(density, gamma, std::move(n_grid), trials, seed, jobs);
            ct::ExperimentReport report;
            {
                py::gil_scoped_release release;
                report = ct::run_runtime(config);
            }
            return report_dict(report);
        },
        py::arg("density"), py::arg("gamma") = ct::default_gamma, py::arg("n_grid"), py::arg("trials") = 20,
        py::arg("seed") = 1, py::arg("jobs") = 1);

    m.def(
        "verify_lemmas",
        [](std::uint32_t max_level) {
            ct::LemmaSuiteConfig config;
            config.max_level = max_level;
            std::size_t failures = 0;
            const auto rows = ct::run_lemma_suite(config);
            for (const auto& r : rows) failures += (r.enforced && !r.pass) ? 1 : 0;
            return py::make_tuple(rows.size(), failures);
        },
        py::arg("max_level") = 12, "Returns (rows checked, enforced failures)");

    m.attr("__version__") = CELLTREE_VERSION;
}
