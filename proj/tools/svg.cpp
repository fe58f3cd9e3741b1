#include "svg.hpp"

#include <celltree/csv.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr double width = 640.0;
constexpr double height = 420.0;
constexpr double margin = 56.0;
constexpr std::array<const char*, 6> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

using Series = std::vector<std::pair<double, double>>;

}  // namespace

void write_convergence_svg(std::ostream& out, std::span<const celltree::ExperimentReport> reports) {
    using celltree::format_real;
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    auto widen = [&](double x, double y) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    };
    std::vector<std::pair<Series, Series>> lines;
    for (const auto& report : reports) {
        Series cell;
        Series base;
        for (const auto& r : report.records) {
            const double x = std::log10(static_cast<double>(r.n));
            if (r.mean_l1 > 0.0) {
                cell.emplace_back(x, std::log10(r.mean_l1));
                widen(x, cell.back().second);
            }
            if (r.baseline_mean_l1 && *r.baseline_mean_l1 > 0.0) {
                base.emplace_back(x, std::log10(*r.baseline_mean_l1));
                widen(x, base.back().second);
            }
        }
        lines.emplace_back(std::move(cell), std::move(base));
    }
    if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
    if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;

    auto px = [&](double x) { return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">log10 n ("
        << format_real(x_lo) << " to " << format_real(x_hi) << ")</text>\n";
    out << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
        << ")\" text-anchor=\"middle\">log10 mean L1</text>\n";

    auto polyline = [&](const Series& s, const char* colour, bool dashed) {
        if (s.empty()) return;
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"";
        if (dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (const auto& [x, y] : s) out << format_real(px(x)) << ',' << format_real(py(y)) << ' ';
        out << "\"/>\n";
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const char* colour = palette[i % palette.size()];
        polyline(lines[i].first, colour, false);
        polyline(lines[i].second, colour, true);
        out << "<text x=\"" << width - margin - 150 << "\" y=\"" << margin + 16.0 * static_cast<double>(i)
            << "\" fill=\"" << colour << "\">" << reports[i].density << " gamma=" << format_real(reports[i].gamma)
            << "</text>\n";
    }
    out << "</svg>\n";
}
