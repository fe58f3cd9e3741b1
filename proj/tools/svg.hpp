#pragma once

#include <celltree/experiments.hpp>

#include <iosfwd>
#include <span>

// Log-log chart of mean L1 against n, one polyline per report; baselines dashed.
void write_convergence_svg(std::ostream& out, std::span<const celltree::ExperimentReport> reports);
