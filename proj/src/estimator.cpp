#include <celltree/estimator.hpp>

#include <celltree/csv.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace celltree {

PiecewiseConstant::PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> heights)
    : breakpoints_(std::move(breakpoints)), heights_(std::move(heights)) {
    if (heights_.empty() || breakpoints_.size() != heights_.size() + 1) {
        throw std::invalid_argument("piecewise constant needs K heights and K+1 breakpoints");
    }
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
        throw std::invalid_argument("breakpoints must start at 0 and end at 1");
    }
    for (std::size_t j = 0; j < heights_.size(); ++j) {
        if (!(breakpoints_[j] < breakpoints_[j + 1])) {
            throw std::invalid_argument("breakpoints must be strictly increasing");
        }
        if (!(heights_[j] >= 0.0) || !std::isfinite(heights_[j])) {
            throw std::invalid_argument("heights must be finite and nonnegative");
        }
    }
}

double PiecewiseConstant::operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("x outside [0, 1]");
    const auto it = std::upper_bound(breakpoints_.begin() + 1, breakpoints_.end() - 1, x);
    return heights_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double PiecewiseConstant::mass() const {
    double total = 0.0;
    for (std::size_t j = 0; j < heights_.size(); ++j) total += heights_[j] * (breakpoints_[j + 1] - breakpoints_[j]);
    return total;
}

PiecewiseConstant histogram_estimate(std::span<const Leaf> leaves, std::size_t n) {
    if (n == 0) throw std::invalid_argument("histogram needs n >= 1");
    if (leaves.empty()) throw std::invalid_argument("histogram needs at least one leaf");
    std::vector<double> breakpoints{0.0};
    std::vector<double> heights;
    breakpoints.reserve(leaves.size() + 1);
    heights.reserve(leaves.size());
    std::size_t total = 0;
    for (const auto& leaf : leaves) {
        if (leaf.cell.left() != breakpoints.back()) throw std::invalid_argument("leaves do not tile [0, 1]");
        const double length = leaf.cell.length();
        if (!(length > 0.0)) throw std::logic_error("zero-length leaf");
        heights.push_back(static_cast<double>(leaf.count) / (static_cast<double>(n) * length));
        breakpoints.push_back(leaf.cell.right());
        total += leaf.count;
    }
    if (total != n) throw std::invalid_argument("leaf counts do not sum to n");
    return PiecewiseConstant(std::move(breakpoints), std::move(heights));
}

PieceError piece_error(const Density& density, double a, double b, double height) {
    if (!(height >= 0.0)) throw std::invalid_argument("height must be nonnegative");
    // f >= h on [a, x*] and f <= h on [x*, b].
    const double cross = height > 0.0 ? std::clamp(density.pdf_inverse(height), a, b) : b;
    const double fa = density.cdf(a);
    const double fx = density.cdf(cross);
    const double fb = density.cdf(b);
    return {std::max(0.0, (fx - fa) - height * (cross - a)),
            std::max(0.0, height * (b - cross) - (fb - fx))};
}

double positive_part_error(const Density& density, double a, double b, double height) {
    return piece_error(density, a, b, height).above;
}

double abs_deviation(const Density& density, double a, double b, double height) {
    const auto e = piece_error(density, a, b, height);
    return e.above + e.below;
}

double l1_error(const PiecewiseConstant& estimate, const Density& density) {
    const auto bp = estimate.breakpoints();
    const auto h = estimate.heights();
    double total = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) total += abs_deviation(density, bp[j], bp[j + 1], h[j]);
    return total;
}

double positive_part_l1(const PiecewiseConstant& estimate, const Density& density) {
    const auto bp = estimate.breakpoints();
    const auto h = estimate.heights();
    double total = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) total += positive_part_error(density, bp[j], bp[j + 1], h[j]);
    return total;
}

double l1_distance(const PiecewiseConstant& g, const PiecewiseConstant& h) {
    const auto gb = g.breakpoints();
    const auto hb = h.breakpoints();
    const auto gh = g.heights();
    const auto hh = h.heights();
    std::size_t i = 0;
    std::size_t j = 0;
    double x = 0.0;
    double total = 0.0;
    while (i < gh.size() && j < hh.size()) {
        const double next = std::min(gb[i + 1], hb[j + 1]);
        total += std::abs(gh[i] - hh[j]) * (next - x);
        x = next;
        if (gb[i + 1] == next) ++i;
        if (hb[j + 1] == next) ++j;
    }
    return total;
}

std::size_t choose_bin_count(double mode_bound, std::size_t n) {
    if (!(mode_bound > 0.0) || !std::isfinite(mode_bound)) throw std::invalid_argument("mode bound must be finite");
    return static_cast<std::size_t>(
        std::ceil(std::cbrt(4.0 * mode_bound * mode_bound) * std::cbrt(static_cast<double>(n))));
}

PiecewiseConstant fixed_k_histogram(std::span<const double> sorted, std::size_t k) {
    if (k == 0) throw std::invalid_argument("bin count must be at least 1");
    if (sorted.empty()) throw std::invalid_argument("histogram needs n >= 1");
    std::vector<std::size_t> counts(k, 0);
    const double scale = static_cast<double>(k);
    for (double x : sorted) {
        const auto bin = static_cast<std::size_t>(std::max(0.0, std::floor(x * scale)));
        ++counts[std::min(bin, k - 1)];
    }
    std::vector<double> breakpoints(k + 1);
    std::vector<double> heights(k);
    for (std::size_t j = 0; j <= k; ++j) breakpoints[j] = static_cast<double>(j) / scale;
    breakpoints.back() = 1.0;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t j = 0; j < k; ++j) heights[j] = static_cast<double>(counts[j]) * scale / n;
    return PiecewiseConstant(std::move(breakpoints), std::move(heights));
}

PiecewiseConstant step_density_as_function(const Density& density) {
    const auto* step = density.as_step();
    if (step == nullptr) throw std::invalid_argument(density.name() + " is not a step density");
    return PiecewiseConstant(step->breakpoints, step->heights);
}

void write_estimate_csv(std::ostream& out, const PiecewiseConstant& estimate) {
    const auto bp = estimate.breakpoints();
    const auto h = estimate.heights();
    out << "left,right,height\n";
    for (std::size_t j = 0; j < h.size(); ++j) {
        out << format_real(bp[j]) << ',' << format_real(bp[j + 1]) << ',' << format_real(h[j]) << '\n';
    }
}

PiecewiseConstant read_estimate_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> breakpoints;
    std::vector<double> heights;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "left,right,height") throw std::runtime_error("line 1: expected header 'left,right,height'");
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 3) throw std::runtime_error("line " + std::to_string(line_no) + ": expected 3 fields");
        try {
            const double left = parse_real(fields[0]);
            const double right = parse_real(fields[1]);
            if (breakpoints.empty()) {
                breakpoints.push_back(left);
            } else if (left != breakpoints.back()) {
                throw std::invalid_argument("pieces are not contiguous");
            }
            breakpoints.push_back(right);
            heights.push_back(parse_real(fields[2]));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (heights.empty()) throw std::runtime_error("estimate file has no pieces");
    return PiecewiseConstant(std::move(breakpoints), std::move(heights));
}

}  // namespace celltree
