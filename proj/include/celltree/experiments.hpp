#pragma once

#include <celltree/density.hpp>
#include <celltree/partition_tree.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace celltree {

struct ExperimentConfig {
    Density density = Density::triangular();
    double gamma = default_gamma;
    std::vector<std::size_t> n_grid;  // ascending
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    std::uint32_t max_depth = default_max_depth;
    unsigned jobs = 1;
};

struct ResultRecord {
    std::size_t n = 0;
    std::size_t trials = 0;
    double mean_l1 = 0.0;
    double stderr_l1 = 0.0;
    double mean_leaves = 0.0;
    double mean_decision_ops = 0.0;
    double mean_size = 0.0;
    double stderr_size = 0.0;
    double mean_height = 0.0;
    std::optional<double> baseline_mean_l1;  // fixed-k histogram, finite B only
    double max_ops_ratio = 0.0;  // max over trials of decision_ops / (node_count ceil(log2(n+1)))
    std::size_t truncated_trials = 0;
};

struct ExperimentReport {
    std::string experiment;
    std::string density;
    double gamma = 0.0;
    std::vector<ResultRecord> records;
    double l1_slope = 0.0;        // d log(mean_l1) / d log(n) over positive means; NaN below two
    std::optional<double> baseline_slope;
    double leaf_slope = 0.0;      // d log(mean_leaves) / d log(n)
    double size_slope = 0.0;      // d mean_size / d log(n)
    double slope_hint = 0.0;      // the slope the experiment is about
};

/// n values log-spaced from lo to hi inclusive, rounded to integers.
std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, std::size_t points);

/// Per n: L1 error of the tree histogram and of the fixed-k baseline.
ExperimentReport run_convergence(const ExperimentConfig& config);

/// Per n: leaf counts and decision operations; slope_hint is the leaf slope.
ExperimentReport run_runtime(const ExperimentConfig& config);

/// L1 error for the unbounded density (no baseline).
ExperimentReport run_consistency_unbounded(const ExperimentConfig& config);

/// CSV `density,gamma,n,trials,mean_l1,stderr_l1,mean_leaves,mean_ops,baseline_l1,slope_hint`.
void write_experiment_csv(std::ostream& out, std::span<const ExperimentReport> reports);

/// One JSON object per report with the fitted slopes.
void write_experiment_summary(std::ostream& out, std::span<const ExperimentReport> reports);

}  // namespace celltree
