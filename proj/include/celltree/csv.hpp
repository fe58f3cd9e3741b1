#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace celltree {

/// 17 significant digits with a '.' separator, independent of locale.
std::string format_real(double value);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

/// Parses a whole field as a double; throws std::invalid_argument otherwise.
double parse_real(std::string_view field);

/// Reads a one-column CSV with header `x`. Throws std::runtime_error with the
/// offending line number on malformed input.
std::vector<double> read_sample_csv(std::istream& in, std::vector<std::size_t>* line_numbers = nullptr);

void write_sample_csv(std::ostream& out, const std::vector<double>& values);

}  // namespace celltree
