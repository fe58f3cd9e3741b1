#include <celltree/partition_tree.hpp>

#include <celltree/csv.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace celltree {

std::size_t rank_below(std::span<const double> sorted, double x, std::uint64_t& comparisons) {
    const auto it = std::partition_point(sorted.begin(), sorted.end(), [&](double v) {
        ++comparisons;
        return v < x;
    });
    return static_cast<std::size_t>(it - sorted.begin());
}

PartitionTree PartitionTree::build(std::span<const double> sorted, double gamma, std::uint32_t max_depth) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
    if (max_depth < 1 || max_depth > DyadicInterval::max_level) {
        throw std::invalid_argument("max_depth must be in [1, 62]");
    }
    if (!std::is_sorted(sorted.begin(), sorted.end())) {
        throw std::invalid_argument("sample must be sorted ascending");
    }
    if (!sorted.empty() && !(sorted.front() >= 0.0 && sorted.back() <= 1.0)) {
        throw std::invalid_argument("sample values must lie in [0, 1]");
    }

    PartitionTree tree;
    tree.gamma_ = gamma;
    tree.grow(sorted, DyadicInterval{}, 0, sorted.size(), max_depth);
    tree.stats_.node_count = tree.nodes_.size();
    return tree;
}

std::size_t PartitionTree::grow(std::span<const double> sorted, DyadicInterval cell, std::size_t first,
                                std::size_t count, std::uint32_t max_depth) {
    const std::size_t self = nodes_.size();
    nodes_.push_back(TreeNode{cell, first, count});
    stats_.height = std::max(stats_.height, cell.level);

    // Empty cells never split, and with gamma >= 1 neither do singletons.
    bool split = false;
    if (count > 1 || (count == 1 && gamma_ < 1.0)) {
        const auto local = sorted.subspan(first, count);
        const std::size_t n_left = rank_below(local, cell.midpoint(), stats_.decision_ops);
        nodes_[self].n_left = n_left;
        nodes_[self].n_right = count - n_left;
        const double diff = static_cast<double>(n_left) - static_cast<double>(count - n_left);
        split = diff > gamma_ * std::sqrt(static_cast<double>(count));
    } else {
        nodes_[self].n_left = count == 1 && sorted[first] < cell.midpoint() ? 1 : 0;
        nodes_[self].n_right = count - nodes_[self].n_left;
    }

    if (split && cell.level >= max_depth) {
        stats_.truncated = true;
        split = false;
    }
    if (!split) {
        ++stats_.leaf_count;
        return self;
    }

    const std::size_t n_left = nodes_[self].n_left;
    const auto l = grow(sorted, cell.left_child(), first, n_left, max_depth);
    const auto r = grow(sorted, cell.right_child(), first + n_left, count - n_left, max_depth);
    nodes_[self].left = static_cast<std::int32_t>(l);
    nodes_[self].right = static_cast<std::int32_t>(r);
    return self;
}

std::vector<Leaf> PartitionTree::leaves() const {
    std::vector<Leaf> out;
    out.reserve(stats_.leaf_count);
    for (const auto& node : nodes_) {
        if (node.is_leaf()) out.push_back({node.cell, node.n_points});
    }
    return out;
}

std::optional<std::size_t> PartitionTree::find(DyadicInterval cell) const {
    if (!root().cell.contains(cell)) return std::nullopt;
    std::size_t at = 0;
    while (nodes_[at].cell != cell) {
        const TreeNode& node = nodes_[at];
        if (node.is_leaf()) return std::nullopt;
        const bool right = (cell.index >> (cell.level - node.cell.level - 1)) & 1U;
        at = static_cast<std::size_t>(right ? node.right : node.left);
    }
    return at;
}

void write_partition_csv(std::ostream& out, std::span<const Leaf> leaves, std::size_t n) {
    out << "left,right,count,height_estimate\n";
    for (const auto& leaf : leaves) {
        const double height = n == 0 ? 0.0
                                     : static_cast<double>(leaf.count) /
                                           (static_cast<double>(n) * leaf.cell.length());
        out << format_real(leaf.cell.left()) << ',' << format_real(leaf.cell.right()) << ',' << leaf.count << ','
            << format_real(height) << '\n';
    }
}

}  // namespace celltree
