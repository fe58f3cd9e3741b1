#include <celltree/experiments.hpp>

#include <celltree/csv.hpp>
#include <celltree/estimator.hpp>
#include <celltree/parallel.hpp>
#include <celltree/rng.hpp>
#include <celltree/stats.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace celltree {
namespace {

struct TrialResult {
    double l1 = 0.0;
    double baseline_l1 = 0.0;
    double leaves = 0.0;
    double ops = 0.0;
    double size = 0.0;
    double height = 0.0;
    double ops_ratio = 0.0;
    bool truncated = false;
};

void validate(const ExperimentConfig& config) {
    if (config.n_grid.empty()) throw std::invalid_argument("n grid is empty");
    if (!std::is_sorted(config.n_grid.begin(), config.n_grid.end())) {
        throw std::invalid_argument("n grid must be ascending");
    }
    if (config.n_grid.front() == 0) throw std::invalid_argument("n grid values must be positive");
    if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");
    if (!(config.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
}

ResultRecord run_point(const ExperimentConfig& config, std::size_t n, bool with_baseline) {
    std::vector<TrialResult> trials(config.trials);
    const RngStream base = RngStream(config.base_seed).derive(n);
    const Density& density = config.density;
    const std::size_t bins = with_baseline ? choose_bin_count(density.mode_bound(), n) : 0;
    const double log_factor = std::ceil(std::log2(static_cast<double>(n) + 1.0));

    parallel_for(config.trials, config.jobs, [&](std::size_t t) {
        RngStream rng = base.derive(t);
        const auto sample = density.sample_sorted(n, rng);
        const auto tree = PartitionTree::build(sample, config.gamma, config.max_depth);
        const auto& stats = tree.stats();
        TrialResult& r = trials[t];
        r.l1 = l1_error(histogram_estimate(tree.leaves(), n), density);
        if (with_baseline) r.baseline_l1 = l1_error(fixed_k_histogram(sample, bins), density);
        r.leaves = static_cast<double>(stats.leaf_count);
        r.ops = static_cast<double>(stats.decision_ops);
        r.size = static_cast<double>(stats.node_count);
        r.height = static_cast<double>(stats.height);
        r.ops_ratio = r.ops / (r.size * log_factor);
        r.truncated = stats.truncated;
    });

    auto collect = [&](double TrialResult::*field) {
        std::vector<double> v(trials.size());
        std::transform(trials.begin(), trials.end(), v.begin(), [field](const TrialResult& r) { return r.*field; });
        return v;
    };
    ResultRecord rec;
    rec.n = n;
    rec.trials = config.trials;
    const auto l1 = mean_stderr(collect(&TrialResult::l1));
    rec.mean_l1 = l1.mean;
    rec.stderr_l1 = l1.standard_error;
    rec.mean_leaves = mean_stderr(collect(&TrialResult::leaves)).mean;
    rec.mean_decision_ops = mean_stderr(collect(&TrialResult::ops)).mean;
    const auto size = mean_stderr(collect(&TrialResult::size));
    rec.mean_size = size.mean;
    rec.stderr_size = size.standard_error;
    rec.mean_height = mean_stderr(collect(&TrialResult::height)).mean;
    if (with_baseline) rec.baseline_mean_l1 = mean_stderr(collect(&TrialResult::baseline_l1)).mean;
    for (const auto& r : trials) {
        rec.max_ops_ratio = std::max(rec.max_ops_ratio, r.ops_ratio);
        if (r.truncated) ++rec.truncated_trials;
    }
    return rec;
}

double loglog_slope(const std::vector<ResultRecord>& records, double ResultRecord::*field) {
    std::vector<double> x;
    std::vector<double> y;
    // A zero mean (the uniform density at large gamma never splits) has no logarithm.
    for (const auto& r : records) {
        if (!(r.*field > 0.0)) continue;
        x.push_back(std::log(static_cast<double>(r.n)));
        y.push_back(std::log(r.*field));
    }
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return fit_slope(x, y);
}

ExperimentReport run_grid(const ExperimentConfig& config, std::string name, bool with_baseline) {
    validate(config);
    ExperimentReport report;
    report.experiment = std::move(name);
    report.density = config.density.name();
    report.gamma = config.gamma;
    for (const std::size_t n : config.n_grid) report.records.push_back(run_point(config, n, with_baseline));
    if (report.records.size() >= 2) {
        report.l1_slope = loglog_slope(report.records, &ResultRecord::mean_l1);
        report.leaf_slope = loglog_slope(report.records, &ResultRecord::mean_leaves);
        std::vector<double> x;
        std::vector<double> y;
        std::vector<double> b;
        for (const auto& r : report.records) {
            x.push_back(std::log(static_cast<double>(r.n)));
            y.push_back(r.mean_size);
            if (r.baseline_mean_l1) b.push_back(std::log(*r.baseline_mean_l1));
        }
        report.size_slope = fit_slope(x, y);
        if (b.size() == x.size()) report.baseline_slope = fit_slope(x, b);
    }
    return report;
}

}  // namespace

std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, std::size_t points) {
    if (lo == 0 || hi < lo || points == 0) throw std::invalid_argument("bad log grid");
    if (points == 1) return {lo};
    std::vector<std::size_t> grid;
    const double a = std::log10(static_cast<double>(lo));
    const double b = std::log10(static_cast<double>(hi));
    for (std::size_t i = 0; i < points; ++i) {
        const double e = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
        const auto n = static_cast<std::size_t>(std::llround(std::pow(10.0, e)));
        if (grid.empty() || n > grid.back()) grid.push_back(n);
    }
    return grid;
}

ExperimentReport run_convergence(const ExperimentConfig& config) {
    if (!config.density.bounded()) throw std::invalid_argument("convergence study needs a finite-B density");
    auto report = run_grid(config, "convergence", true);
    report.slope_hint = report.l1_slope;
    return report;
}

ExperimentReport run_runtime(const ExperimentConfig& config) {
    auto report = run_grid(config, "runtime", config.density.bounded());
    report.slope_hint = report.leaf_slope;
    return report;
}

ExperimentReport run_consistency_unbounded(const ExperimentConfig& config) {
    if (config.density.bounded()) throw std::invalid_argument("consistency study is for the unbounded density");
    auto report = run_grid(config, "consistency", false);
    report.slope_hint = report.l1_slope;
    return report;
}

void write_experiment_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
    out << "density,gamma,n,trials,mean_l1,stderr_l1,mean_leaves,mean_ops,baseline_l1,slope_hint\n";
    for (const auto& report : reports) {
        for (const auto& r : report.records) {
            out << report.density << ',' << format_real(report.gamma) << ',' << r.n << ',' << r.trials << ','
                << format_real(r.mean_l1) << ',' << format_real(r.stderr_l1) << ',' << format_real(r.mean_leaves)
                << ',' << format_real(r.mean_decision_ops) << ',';
            if (r.baseline_mean_l1) out << format_real(*r.baseline_mean_l1);
            out << ',' << format_real(report.slope_hint) << '\n';
        }
    }
}

void write_experiment_summary(std::ostream& out, std::span<const ExperimentReport> reports) {
    for (const auto& report : reports) {
        nlohmann::ordered_json j;
        j["experiment"] = report.experiment;
        j["density"] = report.density;
        j["gamma"] = report.gamma;
        j["n_grid"] = nlohmann::json::array();
        for (const auto& r : report.records) j["n_grid"].push_back(r.n);
        j["l1_slope"] = report.l1_slope;
        j["baseline_slope"] = report.baseline_slope ? nlohmann::json(*report.baseline_slope) : nlohmann::json();
        j["leaf_slope"] = report.leaf_slope;
        j["size_slope"] = report.size_slope;
        double max_ratio = 0.0;
        std::size_t truncated = 0;
        for (const auto& r : report.records) {
            max_ratio = std::max(max_ratio, r.max_ops_ratio);
            truncated += r.truncated_trials;
        }
        j["max_ops_ratio"] = max_ratio;
        j["truncated_trials"] = truncated;
        out << j.dump() << '\n';
    }
}

}  // namespace celltree
