#pragma once

// Reference computations written independently of the library: closed forms
// typed from scratch, brute-force enumeration and composite quadrature. The
// tests compare library results against these.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

struct Model {
    std::string name;
    std::function<double(double)> pdf;
    std::function<double(double)> cdf;
    std::vector<double> kinks;  // discontinuities of pdf inside (0, 1)
    bool singular_at_zero = false;
};

Model model(const std::string& spec);  // uniform | triangular | texp:r | step:K | sqrt

/// Composite Simpson with `panels` panels, refined once by Richardson.
double simpson(const std::function<double(double)>& g, double a, double b, std::size_t panels = 10000);

/// Integral of g over [a, b] split at the model's kinks and at `extra` cuts;
/// a square-root substitution is applied near zero for singular models.
double integrate(const Model& m, const std::function<double(double)>& g, double a, double b,
                 std::vector<double> extra = {});

/// Point where a nonincreasing pdf drops below y, by bisection on the model pdf.
double crossing(const Model& m, double y, double a, double b);

/// Integral over [a, b] of |f - h|, split at the crossing.
double abs_deviation(const Model& m, double a, double b, double h);
double positive_part(const Model& m, double a, double b, double h);

/// Integral over [0, 1] of |f - g| for piecewise-constant g.
double l1(const Model& m, const std::vector<double>& breakpoints, const std::vector<double>& heights);

/// P{2 Bin(N, 1/2) - N > gamma sqrt(N)} from a Pascal row in long double.
double split_probability(std::uint32_t count, double gamma);

/// P{Bin(N, p) <= k} by direct summation of the pmf.
double binomial_cdf(std::uint32_t count, double p, std::uint32_t k);

/// P{Z > gamma} by quadrature of the normal density.
double normal_tail(double gamma);

/// Minimum of the phi objective on a uniform eps grid of the given step.
double phi_grid(double gamma, double step = 1e-4);

/// Leaves (left, right, count) of the split rule, recursing on copied sublists.
std::vector<std::tuple<double, double, std::size_t>> reference_leaves(const std::vector<double>& points, double gamma,
                                                                      std::uint32_t max_depth = 60);

/// Smallest positive l with B / 2^(l+1) <= gamma 2^(l/2) sqrt(B / n).
std::uint32_t ell_star_scan(double mode_bound, double n, double gamma);

}  // namespace oracle
