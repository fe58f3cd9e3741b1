#pragma once

#include <celltree/density.hpp>
#include <celltree/partition_tree.hpp>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace celltree {

/// A step function on [0, 1]: heights[j] on [breakpoints[j], breakpoints[j+1]).
class PiecewiseConstant {
public:
    /// Throws std::invalid_argument unless breakpoints run strictly upward
    /// from 0 to 1 and there is one finite nonnegative height per piece.
    PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> heights);

    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] std::span<const double> heights() const noexcept { return heights_; }
    [[nodiscard]] std::size_t pieces() const noexcept { return heights_.size(); }

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double mass() const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> heights_;
};

/// Height N(C) / (n * length(C)) on every leaf. Requires n >= 1, counts
/// summing to n, and leaves tiling [0, 1] left to right.
PiecewiseConstant histogram_estimate(std::span<const Leaf> leaves, std::size_t n);

/// Split of the error of a constant `height` against f on [a, b]:
/// above = int (f - h)_+ and below = int (h - f)_+.
struct PieceError {
    double above = 0.0;
    double below = 0.0;
};

/// Exact, using the single crossing of a nonincreasing f with a constant.
PieceError piece_error(const Density& density, double a, double b, double height);

/// int_a^b (f - height)_+
double positive_part_error(const Density& density, double a, double b, double height);

/// int_a^b |f - height|
double abs_deviation(const Density& density, double a, double b, double height);

/// Exact int_0^1 |estimate - f|.
double l1_error(const PiecewiseConstant& estimate, const Density& density);

/// int_0^1 (f - estimate)_+; half the L1 error when both integrate to one.
double positive_part_l1(const PiecewiseConstant& estimate, const Density& density);

/// int_0^1 |g - h| for two step functions.
double l1_distance(const PiecewiseConstant& g, const PiecewiseConstant& h);

/// Bin count ceil((2B)^(2/3) n^(1/3)) for the equal-width baseline.
std::size_t choose_bin_count(double mode_bound, std::size_t n);

/// Equal-width k-bin histogram on [0, 1] (the last bin is closed).
PiecewiseConstant fixed_k_histogram(std::span<const double> sorted, std::size_t k);

/// The step density itself as a PiecewiseConstant; throws for other models.
PiecewiseConstant step_density_as_function(const Density& density);

/// CSV `left,right,height`.
void write_estimate_csv(std::ostream& out, const PiecewiseConstant& estimate);
PiecewiseConstant read_estimate_csv(std::istream& in);

}  // namespace celltree
