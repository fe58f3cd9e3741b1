#include "svg.hpp"

#include <celltree/analysis.hpp>
#include <celltree/bounds.hpp>
#include <celltree/branching.hpp>
#include <celltree/csv.hpp>
#include <celltree/density.hpp>
#include <celltree/estimator.hpp>
#include <celltree/experiments.hpp>
#include <celltree/partition_tree.hpp>
#include <celltree/report.hpp>
#include <celltree/rng.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ct = celltree;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::uint64_t seed = 1;
    unsigned jobs = 0;
};

// Writes to the named file, or to stdout when the path is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw UsageError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::vector<std::size_t> grid_or(const std::vector<std::size_t>& given, std::size_t lo, std::size_t hi,
                                 std::size_t points) {
    if (given.empty()) return ct::log_grid(lo, hi, points);
    if (!std::is_sorted(given.begin(), given.end())) throw UsageError("--n-grid must be ascending");
    return given;
}

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// estimate ---------------------------------------------------------------

struct EstimateOptions {
    std::string input;
    std::string partition_path;
    std::string estimate_path;
    double gamma = ct::default_gamma;
    std::vector<double> support{0.0, 1.0};
    std::uint32_t max_depth = ct::default_max_depth;
};

int cmd_estimate(const EstimateOptions& opt) {
    if (opt.support.size() != 2 || !(opt.support[0] < opt.support[1])) {
        throw UsageError("--support needs two values a < b");
    }
    const double a = opt.support[0];
    const double b = opt.support[1];

    std::ifstream in(opt.input);
    if (!in) throw UsageError("cannot read '" + opt.input + "'");
    std::vector<std::size_t> lines;
    std::vector<double> values;
    try {
        values = ct::read_sample_csv(in, &lines);
    } catch (const std::runtime_error& e) {
        throw UsageError(opt.input + ": " + e.what());
    }
    if (values.empty()) throw UsageError(opt.input + ": no data rows");

    std::ostringstream bad;
    std::size_t bad_count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= a && values[i] <= b)) {
            if (bad_count++ < 20) {
                bad << opt.input << ": line " << lines[i] << ": value " << ct::format_real(values[i])
                    << " outside support [" << ct::format_real(a) << ", " << ct::format_real(b) << "]\n";
            }
        }
    }
    if (bad_count > 0) {
        if (bad_count > 20) bad << "... " << bad_count - 20 << " more\n";
        throw UsageError(bad.str() + std::to_string(bad_count) + " value(s) outside support");
    }

    if (!std::is_sorted(values.begin(), values.end())) {
        std::sort(values.begin(), values.end());
        std::cerr << "note: input was not sorted; sorted " << values.size() << " values\n";
    }
    const double width = b - a;
    std::vector<double> unit(values.size());
    std::transform(values.begin(), values.end(), unit.begin(),
                   [&](double x) { return std::clamp((x - a) / width, 0.0, 1.0); });

    const auto tree = ct::PartitionTree::build(unit, opt.gamma, opt.max_depth);
    const auto leaves = tree.leaves();
    const auto n = static_cast<double>(values.size());

    {
        Output out(opt.partition_path);
        out.stream() << "left,right,count,height_estimate\n";
        for (const auto& leaf : leaves) {
            const double h = static_cast<double>(leaf.count) / (n * leaf.cell.length() * width);
            out.stream() << ct::format_real(a + width * leaf.cell.left()) << ','
                         << ct::format_real(a + width * leaf.cell.right()) << ',' << leaf.count << ','
                         << ct::format_real(h) << '\n';
        }
    }
    if (!opt.estimate_path.empty()) {
        Output out(opt.estimate_path);
        out.stream() << "left,right,height\n";
        for (const auto& leaf : leaves) {
            const double h = static_cast<double>(leaf.count) / (n * leaf.cell.length() * width);
            out.stream() << ct::format_real(a + width * leaf.cell.left()) << ','
                         << ct::format_real(a + width * leaf.cell.right()) << ',' << ct::format_real(h) << '\n';
        }
    }

    const auto& s = tree.stats();
    std::cerr << "n=" << values.size() << " gamma=" << ct::format_real(opt.gamma) << " nodes=" << s.node_count
              << " leaves=" << s.leaf_count << " height=" << s.height << " decision_ops=" << s.decision_ops
              << " truncated=" << (s.truncated ? "true" : "false") << '\n';
    return exit_ok;
}

// synthesize -------------------------------------------------------------

struct SynthesizeOptions {
    std::string density = "triangular";
    std::size_t n = 1000;
    std::string output;
};

int cmd_synthesize(const SynthesizeOptions& opt, const Common& common) {
    const auto density = ct::Density::parse(opt.density);
    ct::RngStream rng(common.seed);
    const auto sample = density.sample_sorted(opt.n, rng);
    Output out(opt.output);
    ct::write_sample_csv(out.stream(), sample);
    return exit_ok;
}

// convergence / runtime / consistency ------------------------------------

struct StudyOptions {
    std::string density;
    std::vector<double> gammas;
    std::vector<std::size_t> n_grid;
    std::size_t trials = 100;
    std::uint32_t max_depth = ct::default_max_depth;
    std::string output;
    std::string summary;
    std::string svg;
};

enum class Study { convergence, runtime, consistency };

int cmd_study(Study study, const StudyOptions& opt, const Common& common) {
    ct::ExperimentConfig config;
    config.density = ct::Density::parse(opt.density);
    config.trials = opt.trials;
    config.base_seed = common.seed;
    config.max_depth = opt.max_depth;
    config.jobs = common.jobs;

    std::vector<double> gammas = opt.gammas;
    switch (study) {
        case Study::convergence:
            config.n_grid = grid_or(opt.n_grid, 1000, 100000, 5);
            if (gammas.empty()) gammas = {ct::default_gamma, 2.5, 8.0};
            break;
        case Study::runtime:
            config.n_grid = grid_or(opt.n_grid, 1000, 1000000, 7);
            if (gammas.empty()) gammas = {ct::default_gamma};
            break;
        case Study::consistency:
            config.n_grid = grid_or(opt.n_grid, 100, 1000000, 8);
            if (gammas.empty()) gammas = {ct::default_gamma};
            break;
    }

    Stopwatch clock;
    std::vector<ct::ExperimentReport> reports;
    for (const double gamma : gammas) {
        config.gamma = gamma;
        switch (study) {
            case Study::convergence: reports.push_back(ct::run_convergence(config)); break;
            case Study::runtime: reports.push_back(ct::run_runtime(config)); break;
            case Study::consistency: reports.push_back(ct::run_consistency_unbounded(config)); break;
        }
    }

    {
        Output out(opt.output);
        ct::write_experiment_csv(out.stream(), reports);
    }
    if (!opt.summary.empty()) {
        Output out(opt.summary);
        ct::write_experiment_summary(out.stream(), reports);
    }
    if (!opt.svg.empty()) {
        Output out(opt.svg);
        write_convergence_svg(out.stream(), reports);
    }
    for (const auto& r : reports) {
        std::cerr << r.experiment << ' ' << r.density << " gamma=" << ct::format_real(r.gamma)
                  << " l1_slope=" << ct::format_real(r.l1_slope) << " leaf_slope=" << ct::format_real(r.leaf_slope)
                  << '\n';
    }
    std::cerr << "wall_seconds=" << clock.seconds() << '\n';
    return exit_ok;
}

// gw ---------------------------------------------------------------------

struct GwOptions {
    double gamma = 1.0;
    std::size_t n = 10000;
    std::size_t trials = 200;
    std::string output;
};

int cmd_gw(const GwOptions& opt, const Common& common) {
    const auto sample = ct::simulate_uniform_tree_sizes(opt.n, opt.gamma, opt.trials, common.seed, common.jobs);
    Output out(opt.output);
    ct::write_tree_size_csv(out.stream(), sample);
    std::cerr << "mean_size=" << ct::format_real(sample.mean_size())
              << " stderr=" << ct::format_real(sample.stderr_size())
              << " phi_bound=" << ct::format_real(ct::phi_gamma_bound(opt.gamma)) << '\n';
    return exit_ok;
}

// verify -----------------------------------------------------------------

struct VerifyOptions {
    std::string suite = "all";
    std::optional<double> gamma;
    std::uint32_t max_level = 12;
    std::string output;
};

int cmd_verify(const VerifyOptions& opt, const Common& common) {
    const bool lemmas = opt.suite == "lemmas" || opt.suite == "all";
    const bool probabilistic = opt.suite == "probabilistic" || opt.suite == "all";
    const bool gw = opt.suite == "gw" || opt.suite == "all";

    Output out(opt.output);
    std::size_t failures = 0;

    if (lemmas) {
        ct::LemmaSuiteConfig config;
        config.max_level = opt.max_level;
        config.seed = common.seed;
        if (opt.gamma) config.gammas = {*opt.gamma};
        const auto rows = ct::run_lemma_suite(config);
        ct::write_lemma_csv(out.stream(), rows);
        for (const auto& r : rows) {
            if (r.enforced && !r.pass) {
                ++failures;
                std::cerr << "FAILED " << r.lemma << ' ' << r.density << " n=" << r.n
                          << " gamma=" << ct::format_real(r.gamma) << " level=" << r.level
                          << " lhs=" << ct::format_real(r.lhs) << " rhs=" << ct::format_real(r.rhs) << '\n';
            }
        }
    }

    std::vector<ct::CheckRow> checks;
    if (probabilistic) {
        ct::ProbabilisticSuiteConfig config;
        config.gamma_override = opt.gamma;
        config.seed = common.seed;
        config.jobs = common.jobs;
        const auto rows = ct::run_probabilistic_suite(config);
        checks.insert(checks.end(), rows.begin(), rows.end());
    }
    if (gw) {
        ct::GwSuiteConfig config;
        config.seed = common.seed;
        config.jobs = common.jobs;
        const auto rows = ct::run_gw_suite(config);
        checks.insert(checks.end(), rows.begin(), rows.end());
    }
    if (probabilistic || gw) {
        if (lemmas) out.stream() << '\n';
        ct::write_check_csv(out.stream(), checks);
        for (const auto& r : checks) {
            if (r.failed()) {
                ++failures;
                std::cerr << "FAILED " << r.check << ' ' << r.density << " n=" << r.n
                          << " gamma=" << ct::format_real(r.gamma) << " node=" << r.node
                          << " empirical=" << ct::format_real(r.empirical) << " bound=" << ct::format_real(r.bound)
                          << '\n';
            }
        }
    }
    if (failures > 0) {
        std::cerr << failures << " check(s) failed\n";
        return exit_failed;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cellular binary-tree histograms for monotone densities on [0, 1]"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "celltree 0.1.0");

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "Base seed")->capture_default_str();
        sub->add_option("--jobs", common.jobs, "Worker threads (0: all cores)")->capture_default_str();
    };
    const auto density_check = CLI::Validator(
        [](std::string& spec) {
            try {
                ct::Density::parse(spec);
            } catch (const std::exception& e) {
                return std::string(e.what());
            }
            return std::string();
        },
        "DENSITY", "density spec");

    std::function<int()> run;

    EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "Build the partition tree for a sample file");
    estimate->add_option("input", est.input, "Sample CSV with header x")->required();
    estimate->add_option("--partition", est.partition_path, "Partition CSV (default stdout)");
    estimate->add_option("--estimate", est.estimate_path, "Piecewise-constant estimate CSV");
    estimate->add_option("--gamma", est.gamma, "Split threshold")->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--support", est.support, "Support interval a,b")->delimiter(',')->expected(2);
    estimate->add_option("--max-depth", est.max_depth, "Depth cap")->capture_default_str()->check(CLI::Range(1, 62));
    add_common(estimate);
    estimate->callback([&] { run = [&] { return cmd_estimate(est); }; });

    SynthesizeOptions syn;
    auto* synthesize = app.add_subcommand("synthesize", "Draw a sorted sample from a model density");
    synthesize->add_option("--density", syn.density, "uniform|triangular|texp:r|step:K|sqrt")
        ->capture_default_str()
        ->check(density_check);
    synthesize->add_option("--n", syn.n, "Sample size")->capture_default_str()->check(CLI::PositiveNumber);
    synthesize->add_option("-o,--output", syn.output, "Output CSV (default stdout)");
    add_common(synthesize);
    synthesize->callback([&] { run = [&] { return cmd_synthesize(syn, common); }; });

    StudyOptions study;
    auto add_study = [&](const char* name, const char* help, Study kind, std::string density, std::size_t trials) {
        auto* sub = app.add_subcommand(name, help);
        study.density = density;
        sub->add_option("--density", study.density, "Model density")->capture_default_str()->check(density_check);
        sub->add_option("--gamma", study.gammas, "Split thresholds, comma separated")
            ->delimiter(',')
            ->check(CLI::PositiveNumber);
        sub->add_option("--n-grid", study.n_grid, "Ascending sample sizes, comma separated")
            ->delimiter(',')
            ->check(CLI::PositiveNumber);
        sub->add_option("--trials", study.trials, "Trials per n (default " + std::to_string(trials) + ")")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-depth", study.max_depth, "Depth cap")->capture_default_str()->check(CLI::Range(1, 62));
        sub->add_option("-o,--output", study.output, "Output CSV (default stdout)");
        sub->add_option("--summary", study.summary, "JSON-lines summary with fitted slopes");
        add_common(sub);
        sub->callback([&, sub, kind, density, trials] {
            // The three studies share one options struct; restore per-study defaults.
            if (sub->count("--density") == 0) study.density = density;
            if (sub->count("--trials") == 0) study.trials = trials;
            run = [&, kind] { return cmd_study(kind, study, common); };
        });
        return sub;
    };
    auto* convergence = add_study("convergence", "L1 error against n, with the fixed-k baseline", Study::convergence,
                                  "triangular", 100);
    convergence->add_option("--svg", study.svg, "Log-log chart of mean L1");
    add_study("runtime", "Leaf counts and decision operations against n", Study::runtime, "triangular", 20);
    add_study("consistency", "L1 error against n for the unbounded density", Study::consistency, "sqrt", 100);

    GwOptions gwo;
    auto* gw = app.add_subcommand("gw", "Tree sizes for uniform samples");
    gw->add_option("--gamma", gwo.gamma, "Split threshold")->capture_default_str()->check(CLI::PositiveNumber);
    gw->add_option("--n", gwo.n, "Sample size")->capture_default_str()->check(CLI::PositiveNumber);
    gw->add_option("--trials", gwo.trials, "Trees to grow")->capture_default_str()->check(CLI::PositiveNumber);
    gw->add_option("-o,--output", gwo.output, "Output CSV (default stdout)");
    add_common(gw);
    gw->callback([&] { run = [&] { return cmd_gw(gwo, common); }; });

    VerifyOptions ver;
    double verify_gamma = 0.0;
    auto* verify = app.add_subcommand("verify", "Run the lemma, probabilistic and branching verifiers");
    verify->add_option("--suite", ver.suite, "lemmas|probabilistic|gw|all")
        ->capture_default_str()
        ->check(CLI::IsMember({"lemmas", "probabilistic", "gw", "all"}));
    verify->add_option("--gamma", verify_gamma, "Override the split threshold")->check(CLI::PositiveNumber);
    verify->add_option("--max-level", ver.max_level, "Deepest level scanned by the lemma suite")
        ->capture_default_str()
        ->check(CLI::Range(1, 30));
    verify->add_option("-o,--output", ver.output, "Report CSV (default stdout)");
    add_common(verify);
    verify->callback([&] {
        if (verify->count("--gamma") > 0) ver.gamma = verify_gamma;
        run = [&] { return cmd_verify(ver, common); };
    });
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        return run();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
}
