#include <celltree/csv.hpp>

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace celltree {

std::string format_real(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (ec != std::errc()) throw std::runtime_error("failed to format number");
    return std::string(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

double parse_real(std::string_view field) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw std::invalid_argument("not a finite number: '" + std::string(field) + "'");
    }
    return value;
}

std::vector<double> read_sample_csv(std::istream& in, std::vector<std::size_t>* line_numbers) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> values;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line == "x") continue;
            throw std::runtime_error("line 1: expected header 'x', got '" + line + "'");
        }
        try {
            values.push_back(parse_real(line));
            if (line_numbers) line_numbers->push_back(line_no);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw std::runtime_error("empty input: expected header 'x'");
    return values;
}

void write_sample_csv(std::ostream& out, const std::vector<double>& values) {
    out << "x\n";
    for (double v : values) out << format_real(v) << '\n';
}

}  // namespace celltree
