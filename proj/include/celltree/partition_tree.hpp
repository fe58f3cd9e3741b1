#pragma once

#include <celltree/dyadic.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace celltree {

inline constexpr double default_gamma = 4.0;
inline constexpr std::uint32_t default_max_depth = 60;

/// Number of values in `sorted` strictly below x. Every comparison made by the
/// binary search is added to `comparisons`.
std::size_t rank_below(std::span<const double> sorted, double x, std::uint64_t& comparisons);

struct TreeNode {
    DyadicInterval cell;
    std::size_t first = 0;  // offset of the cell's points in the sorted sample
    std::size_t n_points = 0;
    std::size_t n_left = 0;
    std::size_t n_right = 0;
    std::int32_t left = -1;  // child node indices, -1 for a leaf
    std::int32_t right = -1;

    [[nodiscard]] bool is_leaf() const noexcept { return left < 0; }
};

struct TreeStats {
    std::size_t node_count = 0;
    std::size_t leaf_count = 0;
    std::uint32_t height = 0;
    std::uint64_t decision_ops = 0;  // binary-search comparisons
    bool truncated = false;          // a split was refused at the depth cap
};

struct Leaf {
    DyadicInterval cell;
    std::size_t count = 0;
};

/// The random partition tree grown by the local split rule
///   split C  iff  N(C') - N(C'') > gamma * sqrt(N(C)),
/// where C' and C'' are the halves of C. Points equal to a midpoint belong to
/// the right half. Nodes are stored in preorder, so leaves appear left to right.
class PartitionTree {
public:
    /// Throws std::invalid_argument if `sorted` is not ascending or leaves [0, 1],
    /// if gamma <= 0, or if max_depth is outside [1, 62].
    static PartitionTree build(std::span<const double> sorted, double gamma,
                               std::uint32_t max_depth = default_max_depth);

    [[nodiscard]] std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    [[nodiscard]] const TreeNode& root() const { return nodes_.front(); }
    [[nodiscard]] const TreeStats& stats() const noexcept { return stats_; }
    [[nodiscard]] std::size_t sample_size() const noexcept { return root().n_points; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }

    [[nodiscard]] std::vector<Leaf> leaves() const;

    /// Index of the node whose cell is `cell`, if the tree contains it.
    [[nodiscard]] std::optional<std::size_t> find(DyadicInterval cell) const;

private:
    PartitionTree() = default;
    std::size_t grow(std::span<const double> sorted, DyadicInterval cell, std::size_t first,
                     std::size_t count, std::uint32_t max_depth);

    std::vector<TreeNode> nodes_;
    TreeStats stats_;
    double gamma_ = default_gamma;
};

/// CSV with header `left,right,count,height_estimate`, one row per leaf.
void write_partition_csv(std::ostream& out, std::span<const Leaf> leaves, std::size_t n);

}  // namespace celltree
