#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <span>

namespace celltree {

/// The cell [index / 2^level, (index + 1) / 2^level] of the infinite dyadic tree.
struct DyadicInterval {
    static constexpr std::uint32_t max_level = 62;

    std::uint32_t level = 0;
    std::uint64_t index = 0;

    [[nodiscard]] double left() const { return std::ldexp(static_cast<double>(index), -static_cast<int>(level)); }
    [[nodiscard]] double right() const {
        return std::ldexp(static_cast<double>(index + 1), -static_cast<int>(level));
    }
    [[nodiscard]] double midpoint() const {
        return std::ldexp(static_cast<double>(2 * index + 1), -static_cast<int>(level + 1));
    }
    [[nodiscard]] double length() const { return std::ldexp(1.0, -static_cast<int>(level)); }

    [[nodiscard]] DyadicInterval left_child() const { return {level + 1, 2 * index}; }
    [[nodiscard]] DyadicInterval right_child() const { return {level + 1, 2 * index + 1}; }
    [[nodiscard]] DyadicInterval parent() const { return {level - 1, index / 2}; }

    /// True if `other` is this cell or one of its descendants.
    [[nodiscard]] bool contains(DyadicInterval other) const {
        return other.level >= level && (other.index >> (other.level - level)) == index;
    }

    friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

/// True iff `pieces` are pairwise disjoint and their union is exactly `cell`.
/// Checked in integer arithmetic; order of `pieces` does not matter.
bool tiles(DyadicInterval cell, std::span<const DyadicInterval> pieces);

}  // namespace celltree
