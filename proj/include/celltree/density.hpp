#pragma once

#include <celltree/rng.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace celltree {

// Analytic nonincreasing densities on [0, 1].

struct UniformModel {};

/// f(x) = 2 - 2x
struct TriangularModel {};

/// f(x) = rate * exp(-rate x) / (1 - exp(-rate))
struct TruncatedExponentialModel {
    double rate = 1.0;
};

/// Piecewise-constant density. The pdf is left-continuous: it takes the value
/// heights[j] on (breakpoints[j], breakpoints[j+1]], and heights[0] at 0.
struct StepModel {
    std::vector<double> breakpoints;  // 0 = b_0 < ... < b_K = 1
    std::vector<double> heights;      // K nonincreasing values
    std::vector<double> cumulative;   // cdf at each breakpoint
    std::string label;
};

/// f(x) = 1 / (2 sqrt(x)), unbounded at the origin.
struct SqrtSingularModel {};

enum class DensityKind { uniform, triangular, truncated_exponential, step, sqrt_singular };

class Density {
public:
    static Density uniform();
    static Density triangular();
    static Density truncated_exponential(double rate);
    /// General step density; heights must be nonincreasing and nonnegative.
    /// The total mass is renormalised to exactly one after validation.
    static Density step(std::vector<double> breakpoints, std::vector<double> heights);
    /// K steps of mass 1/K each, widths proportional to 1, 2, ..., K.
    static Density equal_mass_steps(int steps);
    static Density sqrt_singular();

    /// Parses `uniform`, `triangular`, `texp:<rate>`, `step:<K>` or `sqrt`.
    static Density parse(std::string_view spec);

    [[nodiscard]] DensityKind kind() const noexcept;
    [[nodiscard]] std::string name() const;

    /// B = f(0); +infinity for the unbounded model.
    [[nodiscard]] double mode_bound() const;
    [[nodiscard]] bool bounded() const noexcept;

    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double cdf(double x) const;
    [[nodiscard]] double quantile(double u) const;
    /// cdf(b) - cdf(a) for 0 <= a <= b <= 1.
    [[nodiscard]] double measure(double a, double b) const;
    /// sup{x in [0,1] : f(x) >= y}, or 0 when f(0) < y.
    [[nodiscard]] double pdf_inverse(double y) const;

    /// Interior points where the pdf jumps (step model only; empty otherwise).
    [[nodiscard]] std::span<const double> discontinuities() const noexcept;
    [[nodiscard]] const StepModel* as_step() const noexcept;

    /// n inverse-transform draws, sorted ascending.
    [[nodiscard]] std::vector<double> sample_sorted(std::size_t n, RngStream& rng) const;

private:
    using Model = std::variant<UniformModel, TriangularModel, TruncatedExponentialModel,
                               StepModel, SqrtSingularModel>;
    explicit Density(Model model) : model_(std::move(model)) {}

    Model model_;
};

/// The finite-B densities used by the verification suites.
std::vector<Density> bounded_suite();

}  // namespace celltree
