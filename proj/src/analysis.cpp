#include <celltree/analysis.hpp>

#include <celltree/csv.hpp>
#include <celltree/rng.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace celltree {
namespace {

void require_params(std::size_t n, double gamma) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
}

// cdf at the 2^(level+1) + 1 half-cell endpoints of one level.
std::vector<double> half_cell_cdf(const Density& density, std::uint32_t level) {
    if (level > max_scan_level) throw std::length_error("level scan deeper than " + std::to_string(max_scan_level));
    const std::size_t points = (std::size_t{1} << (level + 1)) + 1;
    std::vector<double> cdf(points);
    for (std::size_t k = 0; k < points; ++k) {
        cdf[k] = density.cdf(std::ldexp(static_cast<double>(k), -static_cast<int>(level + 1)));
    }
    return cdf;
}

struct CellMass {
    double p;
    double gap;
};

CellMass cell_mass(const std::vector<double>& cdf, std::size_t i) {
    const double left = cdf[2 * i + 1] - cdf[2 * i];
    const double right = cdf[2 * i + 2] - cdf[2 * i + 1];
    return {cdf[2 * i + 2] - cdf[2 * i], left - right};
}

bool balanced(double gap, double p, std::size_t n, double gamma, double alpha) {
    return gap <= alpha * gamma * std::sqrt(p / static_cast<double>(n));
}

std::vector<bool> balanced_flags(const std::vector<double>& cdf, std::size_t cells, std::size_t n, double gamma,
                                 double alpha) {
    std::vector<bool> flags(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const auto m = cell_mass(cdf, i);
        flags[i] = balanced(m.gap, m.p, n, gamma, alpha);
    }
    return flags;
}

}  // namespace

NodeAnalysis analyze_node(const Density& density, DyadicInterval cell, std::size_t n, double gamma) {
    require_params(n, gamma);
    const double a = cell.left();
    const double m = cell.midpoint();
    const double b = cell.right();
    NodeAnalysis out;
    out.cell = cell;
    out.p_left = density.measure(a, m);
    out.p_right = density.measure(m, b);
    out.p = density.measure(a, b);
    out.f_avg = out.p / cell.length();
    out.xi = out.p_left - out.p_right - gamma * std::sqrt(2.0 * out.p / static_cast<double>(n));
    return out;
}

bool is_balanced(const Density& density, DyadicInterval cell, std::size_t n, double gamma, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const auto node = analyze_node(density, cell, n, gamma);
    return balanced(node.p_left - node.p_right, node.p, n, gamma, alpha);
}

std::uint32_t balanced_ancestor_count(const Density& density, DyadicInterval cell, std::size_t n, double gamma) {
    std::uint32_t count = 0;
    for (std::uint32_t level = 0; level < cell.level; ++level) {
        const DyadicInterval ancestor{level, cell.index >> (cell.level - level)};
        if (is_balanced(density, ancestor, n, gamma)) ++count;
    }
    return count;
}

std::uint32_t ell_star(double mode_bound, std::size_t n, double gamma) {
    require_params(n, gamma);
    if (!(mode_bound > 0.0) || !std::isfinite(mode_bound)) throw std::invalid_argument("B must be finite and positive");
    const double scale = gamma * std::sqrt(mode_bound / static_cast<double>(n));
    for (std::uint32_t l = 1; l < 4096; ++l) {
        if (mode_bound * std::ldexp(1.0, -static_cast<int>(l + 1)) <= scale * std::exp2(0.5 * l)) return l;
    }
    throw std::logic_error("ell_star scan did not terminate");
}

double ell_star_estimate(double mode_bound, std::size_t n, double gamma) {
    return std::log2(std::cbrt(mode_bound * static_cast<double>(n) / 4.0) / std::cbrt(gamma * gamma));
}

IdealPartition ideal_partition(const Density& density, std::size_t n, double gamma, std::uint32_t max_depth) {
    require_params(n, gamma);
    if (max_depth > DyadicInterval::max_level) throw std::invalid_argument("max_depth must be at most 62");
    std::vector<DyadicInterval> cells;
    std::vector<double> breakpoints{0.0};
    std::vector<double> heights;
    bool truncated = false;

    std::function<void(DyadicInterval)> descend = [&](DyadicInterval cell) {
        const auto node = analyze_node(density, cell, n, gamma);
        const bool stop = balanced(node.p_left - node.p_right, node.p, n, gamma, 1.0);
        if (!stop && cell.level < max_depth) {
            descend(cell.left_child());
            descend(cell.right_child());
            return;
        }
        truncated = truncated || !stop;
        cells.push_back(cell);
        heights.push_back(node.f_avg);
        breakpoints.push_back(cell.right());
    };
    descend(DyadicInterval{});
    return {std::move(cells), PiecewiseConstant(std::move(breakpoints), std::move(heights)), truncated};
}

double proposition3_constant() {
    return std::exp2(7.0 / 6.0) / (std::numbers::sqrt2 - 1.0) + std::exp2(5.0 / 3.0);
}

double proposition3_bound(double mode_bound, std::size_t n, double gamma) {
    require_params(n, gamma);
    if (!std::isfinite(mode_bound)) throw std::invalid_argument("proposition 3 bound needs finite B");
    return std::cbrt(gamma * gamma * mode_bound * mode_bound / static_cast<double>(n)) * proposition3_constant();
}

Lemma4Gap lemma4_gap(const Density& density, DyadicInterval cell) {
    const double a = cell.left();
    const double m = cell.midpoint();
    const double b = cell.right();
    const double p = density.measure(a, b);
    return {density.measure(a, m) - density.measure(m, b), abs_deviation(density, a, b, p / cell.length())};
}

LevelSums level_sums(const Density& density, std::size_t n, double gamma, std::uint32_t level) {
    require_params(n, gamma);
    const auto cdf = half_cell_cdf(density, level);
    const std::size_t cells = std::size_t{1} << level;
    LevelSums out;
    for (std::size_t i = 0; i < cells; ++i) {
        const auto m = cell_mass(cdf, i);
        out.gap_sum += m.gap;
        out.sqrt_mass_sum += std::sqrt(m.p / static_cast<double>(n));
        if (!balanced(m.gap, m.p, n, gamma, 1.0)) ++out.unbalanced;
        if (!balanced(m.gap, m.p, n, gamma, 0.5)) ++out.unbalanced_half;
    }
    return out;
}

std::size_t unbalanced_count(const Density& density, std::size_t n, double gamma, double alpha,
                             std::uint32_t max_level) {
    require_params(n, gamma);
    std::size_t total = 0;
    for (std::uint32_t level = 0; level <= max_level; ++level) {
        const auto cdf = half_cell_cdf(density, level);
        const auto flags = balanced_flags(cdf, std::size_t{1} << level, n, gamma, alpha);
        total += static_cast<std::size_t>(std::count(flags.begin(), flags.end(), false));
    }
    return total;
}

std::vector<AncestryCounts> pj_counts(const Density& density, std::size_t n, double gamma, std::uint32_t max_level) {
    require_params(n, gamma);
    std::vector<AncestryCounts> counts(max_level + 1);
    std::vector<std::uint32_t> ancestors{0};  // per cell of the current level
    std::vector<bool> flags;
    for (std::uint32_t level = 0; level <= max_level; ++level) {
        const std::size_t cells = std::size_t{1} << level;
        if (level > 0) {
            std::vector<std::uint32_t> next(cells);
            for (std::size_t i = 0; i < cells; ++i) next[i] = ancestors[i / 2] + (flags[i / 2] ? 1 : 0);
            ancestors = std::move(next);
        }
        flags = balanced_flags(half_cell_cdf(density, level), cells, n, gamma, 1.0);
        for (std::size_t i = 0; i < cells; ++i) {
            ++counts[ancestors[i]].nodes;
            if (flags[i]) ++counts[ancestors[i]].balanced;
        }
    }
    return counts;
}

double refined_positive_error(const Density& density, std::span<const DyadicInterval> refinement) {
    double total = 0.0;
    for (const auto& piece : refinement) {
        const double a = piece.left();
        const double b = piece.right();
        total += positive_part_error(density, a, b, density.measure(a, b) / piece.length());
    }
    return total;
}

bool lemma9_check(const Density& density, DyadicInterval cell, std::span<const DyadicInterval> refinement) {
    if (!tiles(cell, refinement)) throw std::invalid_argument("refinement does not tile the cell");
    const double a = cell.left();
    const double b = cell.right();
    const double parent = positive_part_error(density, a, b, density.measure(a, b) / cell.length());
    return holds_le(refined_positive_error(density, refinement), parent);
}

bool holds_le(double lhs, double rhs) {
    return lhs <= rhs + 1e-12 * std::max(std::abs(lhs), std::abs(rhs)) + 1e-14;
}

namespace {

// Keeps the row with the largest lhs - rhs; `pass` accumulates over all offers.
struct WorstRow {
    LemmaRow row;
    double margin = -std::numeric_limits<double>::infinity();
    bool all_pass = true;
    bool any = false;

    void offer(std::uint32_t level, double lhs, double rhs) {
        all_pass = all_pass && holds_le(lhs, rhs);
        if (!any || lhs - rhs > margin) {
            margin = lhs - rhs;
            row.level = level;
            row.lhs = lhs;
            row.rhs = rhs;
            any = true;
        }
    }
    LemmaRow finish() {
        row.pass = all_pass;
        return row;
    }
};

void add_row(std::vector<LemmaRow>& rows, std::string lemma, const Density& d, std::size_t n, double gamma,
             std::uint32_t level, double lhs, double rhs, bool enforced = true) {
    rows.push_back({std::move(lemma), d.name(), n, gamma, level, lhs, rhs, holds_le(lhs, rhs), enforced});
}

void random_refinement(DyadicInterval cell, std::uint32_t stop_level, RngStream& rng,
                       std::vector<DyadicInterval>& out) {
    if (cell.level < stop_level && rng.bernoulli(0.6)) {
        random_refinement(cell.left_child(), stop_level, rng, out);
        random_refinement(cell.right_child(), stop_level, rng, out);
        return;
    }
    out.push_back(cell);
}

}  // namespace

std::vector<LemmaRow> run_lemma_suite(const LemmaSuiteConfig& config) {
    std::vector<LemmaRow> rows;
    const RngStream base(config.seed);
    for (std::size_t di = 0; di < config.densities.size(); ++di) {
        const Density& d = config.densities[di];
        if (!d.bounded()) throw std::invalid_argument("lemma suite needs finite-B densities");
        const double B = d.mode_bound();

        // Statements that depend on the density only.
        for (std::uint32_t level = 0; level <= config.max_level; ++level) {
            WorstRow lower{{"lemma4_lower", d.name()}};
            WorstRow upper{{"lemma4_upper", d.name()}};
            const std::size_t cells = std::size_t{1} << level;
            for (std::size_t i = 0; i < cells; ++i) {
                const auto g = lemma4_gap(d, DyadicInterval{level, i});
                lower.offer(level, g.gap, g.deviation);
                upper.offer(level, g.deviation, 2.0 * g.gap);
            }
            rows.push_back(lower.finish());
            rows.push_back(upper.finish());
            const auto sums = level_sums(d, 1, 1.0, level);
            add_row(rows, "lemma5", d, 0, 0.0, level, sums.gap_sum, B * std::ldexp(1.0, -static_cast<int>(level + 1)));
        }

        RngStream rng = base.derive(di);
        WorstRow lemma9{{"lemma9", d.name()}};
        std::vector<DyadicInterval> pieces;
        for (std::size_t t = 0; t < config.refinements; ++t) {
            const auto level = static_cast<std::uint32_t>(rng.engine()() % 7);
            const DyadicInterval cell{level, rng.engine()() % (std::uint64_t{1} << level)};
            pieces.clear();
            random_refinement(cell, level + 8, rng, pieces);
            const double parent = positive_part_error(d, cell.left(), cell.right(), d.measure(cell.left(), cell.right()) / cell.length());
            lemma9.offer(level, refined_positive_error(d, pieces), parent);
        }
        if (config.refinements > 0) rows.push_back(lemma9.finish());

        for (const std::size_t n : config.n_grid) {
            const double nd = static_cast<double>(n);
            for (std::uint32_t level = 0; level <= config.max_level; ++level) {
                const auto sums = level_sums(d, n, 1.0, level);
                add_row(rows, "lemma6", d, n, 0.0, level, sums.sqrt_mass_sum, std::exp2(0.5 * level) * std::sqrt(B / nd));
            }
            for (const double gamma : config.gammas) {
                const std::uint32_t lstar = ell_star(B, n, gamma);
                for (std::uint32_t level = lstar; level <= config.max_level; ++level) {
                    const auto sums = level_sums(d, n, gamma, level);
                    add_row(rows, "lemma7_level", d, n, gamma, level, static_cast<double>(sums.unbalanced),
                            2.0 * std::numbers::sqrt2 / gamma * std::sqrt(B * nd) / std::exp2(0.5 * level));
                }
                const double scale = std::cbrt(B * nd) / std::cbrt(gamma * gamma);
                const std::size_t unbalanced = unbalanced_count(d, n, gamma, 1.0, config.max_level);
                add_row(rows, "lemma7_total", d, n, gamma, config.max_level, static_cast<double>(unbalanced), 14.0 * scale);
                for (const double alpha : {0.5, std::numbers::sqrt2}) {
                    const std::size_t count = unbalanced_count(d, n, gamma, alpha, config.max_level);
                    add_row(rows, alpha == 0.5 ? "lemma7_alpha_0.5" : "lemma7_alpha_sqrt2", d, n, gamma,
                            config.max_level, static_cast<double>(count), (2.0 + 13.0 / alpha) * scale);
                }

                const auto pj = pj_counts(d, n, gamma, config.max_level);
                const double bc = static_cast<double>(unbalanced);
                for (std::uint32_t j = 0; j < pj.size(); ++j) {
                    const double pow2 = std::ldexp(1.0, static_cast<int>(j));
                    add_row(rows, "lemma8_balanced", d, n, gamma, j, static_cast<double>(pj[j].balanced), (bc + 1.0) * pow2);
                    add_row(rows, "lemma8_relaxed", d, n, gamma, j, static_cast<double>(pj[j].nodes), (2.0 * bc + 1.0) * pow2);
                    add_row(rows, "lemma8_literal", d, n, gamma, j, static_cast<double>(pj[j].nodes), (bc + 1.0) * pow2,
                            false);
                }

                const auto ideal = ideal_partition(d, n, gamma);
                std::uint32_t depth = 0;
                for (const auto& c : ideal.cells) depth = std::max(depth, c.level);
                add_row(rows, "proposition3", d, n, gamma, depth, l1_error(ideal.estimate, d),
                        proposition3_bound(B, n, gamma));
            }
        }
    }
    return rows;
}

void write_lemma_csv(std::ostream& out, std::span<const LemmaRow> rows) {
    out << "lemma,density,n,gamma,level,lhs,rhs,pass\n";
    for (const auto& r : rows) {
        out << r.lemma << ',' << r.density << ',';
        if (r.n > 0) out << r.n;
        out << ',';
        if (r.gamma > 0.0) out << format_real(r.gamma);
        out << ',' << r.level << ',' << format_real(r.lhs) << ',' << format_real(r.rhs) << ',';
        if (!r.enforced) out << "info:";
        out << (r.pass ? "true" : "false") << '\n';
    }
}

}  // namespace celltree
