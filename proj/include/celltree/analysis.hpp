#pragma once

#include <celltree/density.hpp>
#include <celltree/dyadic.hpp>
#include <celltree/estimator.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace celltree {

// Deterministic counterpart of the random tree: every dyadic cell C carries
// its exact mass p(C), and is balanced at level alpha when
//   p(C') - p(C'') <= alpha * gamma * sqrt(p(C) / n).

struct NodeAnalysis {
    DyadicInterval cell;
    double p = 0.0;
    double p_left = 0.0;
    double p_right = 0.0;
    double f_avg = 0.0;  // p(C) / length(C)
    double xi = 0.0;     // p(C') - p(C'') - gamma * sqrt(2 p(C) / n); meaningful when > 0
};

NodeAnalysis analyze_node(const Density& density, DyadicInterval cell, std::size_t n, double gamma);

bool is_balanced(const Density& density, DyadicInterval cell, std::size_t n, double gamma, double alpha = 1.0);

/// Number of strict ancestors of `cell` that are balanced (alpha = 1).
std::uint32_t balanced_ancestor_count(const Density& density, DyadicInterval cell, std::size_t n, double gamma);

/// Smallest l >= 1 with B / 2^(l+1) <= gamma * 2^(l/2) * sqrt(B / n).
std::uint32_t ell_star(double mode_bound, std::size_t n, double gamma);

/// log2((B n / 4)^(1/3) gamma^(-2/3)), which ell_star tracks to within one.
double ell_star_estimate(double mode_bound, std::size_t n, double gamma);

/// The partition obtained by descending from the root and stopping at the
/// first balanced cell on every path, with height f(C) on each such cell.
struct IdealPartition {
    std::vector<DyadicInterval> cells;
    PiecewiseConstant estimate;
    bool truncated = false;
};

IdealPartition ideal_partition(const Density& density, std::size_t n, double gamma,
                               std::uint32_t max_depth = 60);

/// 2^(7/6) / (sqrt(2) - 1) + 2^(5/3)
double proposition3_constant();

/// gamma^(2/3) B^(2/3) n^(-1/3) times proposition3_constant().
double proposition3_bound(double mode_bound, std::size_t n, double gamma);

struct Lemma4Gap {
    double gap = 0.0;        // p(C') - p(C'')
    double deviation = 0.0;  // int_C |f - f(C)|
};

Lemma4Gap lemma4_gap(const Density& density, DyadicInterval cell);

struct LevelSums {
    double gap_sum = 0.0;             // sum of p(C') - p(C'')
    double sqrt_mass_sum = 0.0;       // sum of sqrt(p(C) / n)
    std::size_t unbalanced = 0;       // cells outside the alpha = 1 set
    std::size_t unbalanced_half = 0;  // cells outside the alpha = 1/2 set
};

inline constexpr std::uint32_t max_scan_level = 30;

/// Exact sums over all 2^level cells of one level. Throws std::length_error
/// beyond max_scan_level.
LevelSums level_sums(const Density& density, std::size_t n, double gamma, std::uint32_t level);

/// Number of cells at depth <= max_level outside the alpha-balanced set.
std::size_t unbalanced_count(const Density& density, std::size_t n, double gamma, double alpha,
                             std::uint32_t max_level);

struct AncestryCounts {
    std::size_t nodes = 0;     // cells with exactly j balanced ancestors
    std::size_t balanced = 0;  // of which balanced themselves
};

/// Entry j counts cells at depth <= max_level having exactly j balanced strict
/// ancestors. Throws std::length_error beyond max_scan_level.
std::vector<AncestryCounts> pj_counts(const Density& density, std::size_t n, double gamma,
                                      std::uint32_t max_level);

/// Sum of int (f - f(C*))_+ over the pieces of a refinement of `cell`.
double refined_positive_error(const Density& density, std::span<const DyadicInterval> refinement);

/// True iff the refinement's summed positive-part error does not exceed the
/// cell's own. Throws std::invalid_argument if `refinement` does not tile `cell`.
bool lemma9_check(const Density& density, DyadicInterval cell, std::span<const DyadicInterval> refinement);

// Deterministic verification suite over a grid of densities, n and gamma.

struct LemmaRow {
    std::string lemma;
    std::string density;
    std::size_t n = 0;  // 0 when the check does not depend on n
    double gamma = 0.0;  // 0 when the check does not depend on gamma
    std::uint32_t level = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
    bool enforced = true;  // false for rows reported for information only
};

struct LemmaSuiteConfig {
    std::vector<Density> densities = bounded_suite();
    std::vector<std::size_t> n_grid{100, 1000, 10000};
    std::vector<double> gammas{1.0, 4.0};
    std::uint32_t max_level = 12;
    std::size_t refinements = 1000;  // random refinements per density
    std::uint64_t seed = 20240601;
};

std::vector<LemmaRow> run_lemma_suite(const LemmaSuiteConfig& config);

/// CSV `lemma,density,n,gamma,level,lhs,rhs,pass`.
void write_lemma_csv(std::ostream& out, std::span<const LemmaRow> rows);

/// lhs <= rhs up to rounding in the last few bits.
bool holds_le(double lhs, double rhs);

}  // namespace celltree
