#pragma once

#include <celltree/report.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace celltree {

/// Two children with probability p2, none otherwise.
struct OffspringLaw {
    double p2 = 0.0;

    [[nodiscard]] double mean() const noexcept { return 2.0 * p2; }
    [[nodiscard]] bool subcritical() const noexcept { return mean() < 1.0; }
};

/// P{Z > gamma} for a standard normal Z.
double normal_upper_tail(double gamma);

/// P{2 Bin(N, 1/2) - N > gamma sqrt(N)}, summed term by term in log space.
double split_probability_exact(std::uint64_t count, double gamma);

/// 1 / (1 - m); throws std::domain_error unless m < 1.
double gw_expected_size(OffspringLaw law);

struct PhiBound {
    double value = 0.0;          // inf over eps of 2/(1-2(1+eps)Q) (1/(eps Q)^2 + 1)^2
    double epsilon = 0.0;        // minimiser
    double ceiling_value = 0.0;  // same infimum with 2 N_eps^2, N_eps = ceil(1/(eps Q)^2)
};

/// Throws std::domain_error when no eps > 0 makes the first factor positive.
PhiBound phi_gamma_details(double gamma);
double phi_gamma_bound(double gamma);

class DepthCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal nodes of the dyadic splitting of [0, 1] that stops once every cell
/// holds at most one point. Throws DepthCapError when coincident points keep a
/// cell occupied past `max_depth`.
std::size_t dyadic_internal_nodes(std::span<const double> points, std::uint32_t max_depth = 60);

struct TreeSizeSample {
    std::size_t n = 0;
    double gamma = 0.0;
    std::vector<std::size_t> sizes;    // node counts
    std::vector<std::uint32_t> heights;
    std::vector<char> root_split;

    [[nodiscard]] double mean_size() const;
    [[nodiscard]] double stderr_size() const;
    [[nodiscard]] double root_split_rate() const;
};

/// Builds the partition tree on `trials` fresh uniform samples of size n.
TreeSizeSample simulate_uniform_tree_sizes(std::size_t n, double gamma, std::size_t trials, std::uint64_t seed,
                                           unsigned jobs = 1);

/// Total progeny of `trials` independent Galton-Watson trees.
std::vector<std::size_t> simulate_gw_sizes(OffspringLaw law, std::size_t trials, std::uint64_t seed,
                                           unsigned jobs = 1);

/// Rows `trial,size,height` followed by `mean,<size>,<height>`.
void write_tree_size_csv(std::ostream& out, const TreeSizeSample& sample);

struct GwSuiteConfig {
    std::vector<double> band_gammas{0.5, 1.0, 2.0};
    std::uint64_t band_max_count = 10000;
    std::vector<double> offspring_p2{0.05, 0.15, 0.3};
    std::size_t gw_trials = 100000;
    std::uint32_t dyadic_max_points = 10;
    std::size_t dyadic_trials = 10000;
    double uniform_gamma = 1.0;
    std::vector<std::size_t> uniform_n{1000, 10000, 100000};
    std::size_t uniform_trials = 200;
    std::size_t root_n = 10000;
    std::size_t root_trials = 1000;
    std::uint64_t seed = 20240603;
    unsigned jobs = 1;
};

/// Berry-Esseen band, Galton-Watson size law, dyadic splitting bound and the
/// uniform-sample tree checks.
std::vector<CheckRow> run_gw_suite(const GwSuiteConfig& config);

}  // namespace celltree
