#include <celltree/dyadic.hpp>

#include <algorithm>
#include <utility>
#include <vector>

namespace celltree {

bool tiles(DyadicInterval cell, std::span<const DyadicInterval> pieces) {
    if (pieces.empty()) return false;
    std::uint32_t depth = cell.level;
    for (const auto& p : pieces) {
        if (p.level > DyadicInterval::max_level || !cell.contains(p)) return false;
        depth = std::max(depth, p.level);
    }
    // Endpoints as integers at the finest level present.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    spans.reserve(pieces.size());
    for (const auto& p : pieces) {
        const std::uint32_t shift = depth - p.level;
        spans.emplace_back(p.index << shift, (p.index + 1) << shift);
    }
    std::sort(spans.begin(), spans.end());
    const std::uint32_t shift = depth - cell.level;
    std::uint64_t cursor = cell.index << shift;
    for (const auto& [lo, hi] : spans) {
        if (lo != cursor) return false;
        cursor = hi;
    }
    return cursor == (cell.index + 1) << shift;
}

}  // namespace celltree
