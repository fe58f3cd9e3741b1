#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

namespace celltree {

/// One line of a statistical verification report.
struct CheckRow {
    std::string check;
    std::string density;
    std::size_t n = 0;
    double gamma = 0.0;
    std::string node;  // "level:index", or "-"
    double empirical = 0.0;
    double bound = 0.0;
    double standard_error = 0.0;
    std::string status;  // "true", "false" or "skipped:<reason>"

    [[nodiscard]] bool failed() const { return status == "false"; }
};

/// CSV `check,density,n,gamma,node,empirical,bound,stderr,pass`.
void write_check_csv(std::ostream& out, std::span<const CheckRow> rows);

}  // namespace celltree
