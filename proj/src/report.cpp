#include <celltree/report.hpp>

#include <celltree/csv.hpp>

#include <ostream>

namespace celltree {

void write_check_csv(std::ostream& out, std::span<const CheckRow> rows) {
    out << "check,density,n,gamma,node,empirical,bound,stderr,pass\n";
    for (const auto& r : rows) {
        out << r.check << ',' << r.density << ',' << r.n << ',' << format_real(r.gamma) << ',' << r.node << ','
            << format_real(r.empirical) << ',' << format_real(r.bound) << ',' << format_real(r.standard_error) << ','
            << r.status << '\n';
    }
}

}  // namespace celltree
