#pragma once

#include <celltree/analysis.hpp>
#include <celltree/density.hpp>
#include <celltree/dyadic.hpp>
#include <celltree/report.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace celltree {

struct BoundConstants {
    double gamma = 0.0;
    double c1 = 0.0;  // 4 gamma^(2/3) + 6 (gamma + sqrt(gamma^2 + 1)) / gamma^(1/3)
    double c2 = 0.0;  // 1 / (1 + gamma^2 / 4)
    double c3 = 0.0;  // gamma^(-1/3) (4 + 5 / (1 - sqrt(2 c2)))

    /// c2 and c3 are only meaningful for gamma > 2.
    [[nodiscard]] bool c2_c3_valid() const noexcept { return gamma > 2.0; }
};

BoundConstants constants(double gamma);

/// 2p / (2p + n xi^2) + 4 / (n p), clipped to [0, 1].
/// Throws std::invalid_argument unless xi > 0 and p > 0.
double leaf_probability_bound(const NodeAnalysis& node, std::size_t n);

/// Leading-order bounds (c1 B^(2/3) / n^(1/3), c3 B^(1/6) / n^(1/3)).
/// The second entry is NaN when gamma <= 2.
std::pair<double, double> term_bounds(double mode_bound, std::size_t n, double gamma);

/// 2 (c1 + c3 / sqrt(B)): the constant in front of B^(2/3) / n^(1/3) implied
/// by the two term bounds.
double implied_rate_constant(double mode_bound, double gamma);

struct MonteCarloCheck {
    double empirical = 0.0;
    double bound = 0.0;
    double standard_error = 0.0;
    bool pass = false;  // empirical <= bound + slack * standard_error
};

inline constexpr double stderr_slack = 3.0;
inline constexpr double term_margin = 1.1;

/// Frequency with which `cell` is a leaf of the tree built on fresh samples,
/// against leaf_probability_bound. Throws std::invalid_argument when the cell
/// is inside the sqrt(2)-balanced set (xi <= 0).
MonteCarloCheck verify_lemma10(const Density& density, DyadicInterval cell, std::size_t n, double gamma,
                               std::size_t trials, std::uint64_t seed, unsigned jobs = 1);

/// Mean of (p(C) - N(C)/n)_+ 1{C is a leaf} against c2^(j/2) sqrt(p(C)/n).
/// Throws std::invalid_argument when gamma <= 2 or the cell is outside the
/// 1/2-balanced set. Without `j`, the number of balanced ancestors is used.
MonteCarloCheck verify_lemma12(const Density& density, DyadicInterval cell, std::size_t n, double gamma,
                               std::size_t trials, std::uint64_t seed, unsigned jobs = 1,
                               std::optional<std::uint32_t> j = std::nullopt);

/// Monte-Carlo means of the two error terms and of the L1 error itself:
///   term1 = sum over leaves of int_C (f - f(C))_+
///   term2 = sum over leaves of (p(C) - N(C)/n)_+
struct TermEstimate {
    double term1 = 0.0, term1_stderr = 0.0;
    double term2 = 0.0, term2_stderr = 0.0;
    double l1 = 0.0, l1_stderr = 0.0;
};

TermEstimate estimate_terms(const Density& density, std::size_t n, double gamma, std::size_t trials,
                            std::uint64_t seed, unsigned jobs = 1);

// Probabilistic verification suite.

struct RosterCase {
    std::string check;  // "lemma10" or "lemma12"
    std::string density;
    DyadicInterval cell;
    std::size_t n = 0;
    double gamma = 0.0;
};

/// The fixed six-case roster for the two lemma verifiers.
std::vector<RosterCase> probabilistic_roster();

struct ProbabilisticSuiteConfig {
    std::size_t roster_trials = 10000;
    std::vector<Density> densities = bounded_suite();
    std::vector<std::size_t> term_n{1000, 10000};
    double term_gamma = 4.0;
    std::size_t term_trials = 200;
    std::optional<double> gamma_override;  // replaces every gamma of the suite
    std::uint64_t seed = 20240602;
    unsigned jobs = 1;
};

std::vector<CheckRow> run_probabilistic_suite(const ProbabilisticSuiteConfig& config);

}  // namespace celltree
