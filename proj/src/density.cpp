#include <celltree/density.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace celltree {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
    }
}

double exp_norm(const TruncatedExponentialModel& m) { return -std::expm1(-m.rate); }

// Segment j (0-based) such that x lies in (b_j, b_{j+1}]; x = 0 maps to segment 0.
std::size_t step_segment(const StepModel& m, double x) {
    const auto it = std::lower_bound(m.breakpoints.begin() + 1, m.breakpoints.end(), x);
    const auto j = static_cast<std::size_t>(it - m.breakpoints.begin()) - 1;
    return std::min(j, m.heights.size() - 1);
}

double parse_number(std::string_view text, std::string_view spec) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw std::invalid_argument("bad density parameter in '" + std::string(spec) + "'");
    }
    return value;
}

}  // namespace

Density Density::uniform() { return Density(UniformModel{}); }

Density Density::triangular() { return Density(TriangularModel{}); }

Density Density::truncated_exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("truncated exponential rate must be positive");
    }
    return Density(TruncatedExponentialModel{rate});
}

Density Density::step(std::vector<double> breakpoints, std::vector<double> heights) {
    if (heights.empty() || breakpoints.size() != heights.size() + 1) {
        throw std::invalid_argument("step density needs K heights and K+1 breakpoints");
    }
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0) {
        throw std::invalid_argument("step density breakpoints must start at 0 and end at 1");
    }
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) {
        if (!(breakpoints[j] < breakpoints[j + 1])) {
            throw std::invalid_argument("step density breakpoints must be strictly increasing");
        }
    }
    for (std::size_t j = 0; j < heights.size(); ++j) {
        if (!(heights[j] >= 0.0) || !std::isfinite(heights[j]) || (j > 0 && heights[j] > heights[j - 1])) {
            throw std::invalid_argument("step density heights must be finite, nonnegative and nonincreasing");
        }
    }
    double mass = 0.0;
    for (std::size_t j = 0; j < heights.size(); ++j) mass += heights[j] * (breakpoints[j + 1] - breakpoints[j]);
    if (std::abs(mass - 1.0) > 1e-9) {
        throw std::invalid_argument("step density must integrate to 1, got " + std::to_string(mass));
    }
    for (auto& h : heights) h /= mass;

    StepModel m;
    m.cumulative.resize(breakpoints.size());
    m.cumulative[0] = 0.0;
    for (std::size_t j = 0; j < heights.size(); ++j) {
        m.cumulative[j + 1] = m.cumulative[j] + heights[j] * (breakpoints[j + 1] - breakpoints[j]);
    }
    m.cumulative.back() = 1.0;
    m.breakpoints = std::move(breakpoints);
    m.heights = std::move(heights);
    m.label = "step";
    return Density(std::move(m));
}

Density Density::equal_mass_steps(int steps) {
    if (steps < 1) throw std::invalid_argument("step count must be at least 1");
    const double k = steps;
    std::vector<double> breakpoints(static_cast<std::size_t>(steps) + 1);
    std::vector<double> heights(static_cast<std::size_t>(steps));
    for (int j = 0; j <= steps; ++j) breakpoints[j] = (j * (j + 1.0)) / (k * (k + 1.0));
    for (int j = 1; j <= steps; ++j) heights[j - 1] = (k + 1.0) / (2.0 * j);
    breakpoints.back() = 1.0;
    Density d = step(std::move(breakpoints), std::move(heights));
    std::get<StepModel>(d.model_).label = "step:" + std::to_string(steps);
    return d;
}

Density Density::sqrt_singular() { return Density(SqrtSingularModel{}); }

Density Density::parse(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    const bool has_param = colon != std::string_view::npos;
    const std::string_view param = has_param ? spec.substr(colon + 1) : std::string_view{};

    auto no_param = [&] {
        if (has_param) throw std::invalid_argument("density '" + std::string(head) + "' takes no parameter");
    };
    if (head == "uniform") { no_param(); return uniform(); }
    if (head == "triangular") { no_param(); return triangular(); }
    if (head == "sqrt") { no_param(); return sqrt_singular(); }
    if (head == "texp") {
        return truncated_exponential(has_param ? parse_number(param, spec) : 1.0);
    }
    if (head == "step") {
        const double k = has_param ? parse_number(param, spec) : 8.0;
        if (k != std::floor(k) || k < 1 || k > 1e6) throw std::invalid_argument("step count must be a positive integer");
        return equal_mass_steps(static_cast<int>(k));
    }
    throw std::invalid_argument("unknown density '" + std::string(spec) + "'");
}

DensityKind Density::kind() const noexcept { return static_cast<DensityKind>(model_.index()); }

std::string Density::name() const {
    return std::visit(overloaded{
        [](const UniformModel&) -> std::string { return "uniform"; },
        [](const TriangularModel&) -> std::string { return "triangular"; },
        [](const TruncatedExponentialModel& m) -> std::string {
            char buf[32];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m.rate);
            return "texp:" + std::string(buf, ptr);
        },
        [](const StepModel& m) -> std::string { return m.label; },
        [](const SqrtSingularModel&) -> std::string { return "sqrt"; },
    }, model_);
}

double Density::mode_bound() const {
    if (kind() == DensityKind::sqrt_singular) return std::numeric_limits<double>::infinity();
    return pdf(0.0);
}

bool Density::bounded() const noexcept { return kind() != DensityKind::sqrt_singular; }

double Density::pdf(double x) const {
    require_unit(x, "x");
    return std::visit(overloaded{
        [](const UniformModel&) { return 1.0; },
        [x](const TriangularModel&) { return 2.0 - 2.0 * x; },
        [x](const TruncatedExponentialModel& m) { return m.rate * std::exp(-m.rate * x) / exp_norm(m); },
        [x](const StepModel& m) { return m.heights[step_segment(m, x)]; },
        [x](const SqrtSingularModel&) {
            return x == 0.0 ? std::numeric_limits<double>::infinity() : 0.5 / std::sqrt(x);
        },
    }, model_);
}

double Density::cdf(double x) const {
    require_unit(x, "x");
    return std::visit(overloaded{
        [x](const UniformModel&) { return x; },
        [x](const TriangularModel&) { return x * (2.0 - x); },
        [x](const TruncatedExponentialModel& m) { return -std::expm1(-m.rate * x) / exp_norm(m); },
        [x](const StepModel& m) {
            if (x == 1.0) return 1.0;
            const std::size_t j = step_segment(m, x);
            return m.cumulative[j] + m.heights[j] * (x - m.breakpoints[j]);
        },
        [x](const SqrtSingularModel&) { return std::sqrt(x); },
    }, model_);
}

double Density::quantile(double u) const {
    require_unit(u, "u");
    return std::visit(overloaded{
        [u](const UniformModel&) { return u; },
        [u](const TriangularModel&) { return u / (1.0 + std::sqrt(1.0 - u)); },
        [u](const TruncatedExponentialModel& m) {
            return std::min(1.0, -std::log1p(-u * exp_norm(m)) / m.rate);
        },
        [u](const StepModel& m) {
            // inf{x : F(x) >= u}
            const auto it = std::lower_bound(m.cumulative.begin(), m.cumulative.end(), u);
            if (it == m.cumulative.begin()) return 0.0;
            const auto j = static_cast<std::size_t>(it - m.cumulative.begin()) - 1;
            const double x = m.breakpoints[j] + (u - m.cumulative[j]) / m.heights[j];
            return std::min(x, m.breakpoints[j + 1]);
        },
        [u](const SqrtSingularModel&) { return u * u; },
    }, model_);
}

double Density::measure(double a, double b) const {
    require_unit(a, "a");
    require_unit(b, "b");
    if (a > b) throw std::domain_error("measure bounds are inverted");
    if (a == b) return 0.0;
    return cdf(b) - cdf(a);
}

double Density::pdf_inverse(double y) const {
    if (!(y > 0.0)) throw std::domain_error("pdf_inverse needs y > 0");
    return std::visit(overloaded{
        [y](const UniformModel&) { return y <= 1.0 ? 1.0 : 0.0; },
        [y](const TriangularModel&) { return std::clamp(1.0 - 0.5 * y, 0.0, 1.0); },
        [y](const TruncatedExponentialModel& m) {
            const double x = -std::log(y * exp_norm(m) / m.rate) / m.rate;
            return std::clamp(x, 0.0, 1.0);
        },
        [y](const StepModel& m) {
            // Heights are nonincreasing: {f >= y} = [0, b_j] with j the number of steps at or above y.
            const auto above = std::partition_point(m.heights.begin(), m.heights.end(),
                                                    [y](double h) { return h >= y; });
            return m.breakpoints[static_cast<std::size_t>(above - m.heights.begin())];
        },
        [y](const SqrtSingularModel&) { return std::min(1.0, 0.25 / (y * y)); },
    }, model_);
}

std::span<const double> Density::discontinuities() const noexcept {
    if (const auto* m = as_step()) {
        return std::span<const double>(m->breakpoints).subspan(1, m->breakpoints.size() - 2);
    }
    return {};
}

const StepModel* Density::as_step() const noexcept { return std::get_if<StepModel>(&model_); }

std::vector<double> Density::sample_sorted(std::size_t n, RngStream& rng) const {
    std::vector<double> values(n);
    for (auto& v : values) v = quantile(rng.uniform());
    std::sort(values.begin(), values.end());
    return values;
}

std::vector<Density> bounded_suite() {
    return {Density::uniform(), Density::triangular(), Density::truncated_exponential(1.0),
            Density::truncated_exponential(4.0), Density::equal_mass_steps(8)};
}

}  // namespace celltree
