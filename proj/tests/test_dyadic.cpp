#include <celltree/dyadic.hpp>

#include <doctest.h>

#include <vector>

using celltree::DyadicInterval;

TEST_CASE("dyadic interval geometry") {
    const DyadicInterval c{3, 5};
    CHECK(c.left() == 5.0 / 8);
    CHECK(c.right() == 6.0 / 8);
    CHECK(c.midpoint() == 11.0 / 16);
    CHECK(c.length() == 1.0 / 8);
    CHECK(c.left_child() == DyadicInterval{4, 10});
    CHECK(c.right_child() == DyadicInterval{4, 11});
    CHECK(c.left_child().parent() == c);
    CHECK(c.right_child().parent() == c);
    CHECK(c.left_child().right() == c.midpoint());
    CHECK(DyadicInterval{0, 0}.contains(c));
    CHECK(c.contains(c));
    CHECK(c.contains(DyadicInterval{6, 40}));
    CHECK_FALSE(c.contains(DyadicInterval{6, 48}));
    CHECK_FALSE(c.contains(DyadicInterval{2, 2}));
    const DyadicInterval deep{60, (1ULL << 60) - 1};
    CHECK(deep.right() == 1.0);
}

TEST_CASE("tiling checks") {
    const DyadicInterval root{0, 0};
    const std::vector<DyadicInterval> halves{{1, 1}, {1, 0}};
    CHECK(celltree::tiles(root, halves));
    const std::vector<DyadicInterval> mixed{{1, 0}, {2, 2}, {3, 6}, {3, 7}};
    CHECK(celltree::tiles(root, mixed));
    const std::vector<DyadicInterval> gap{{1, 0}, {2, 3}};
    CHECK_FALSE(celltree::tiles(root, gap));
    const std::vector<DyadicInterval> overlap{{1, 0}, {2, 1}, {1, 1}};
    CHECK_FALSE(celltree::tiles(root, overlap));
    const std::vector<DyadicInterval> outside{{1, 0}};
    CHECK_FALSE(celltree::tiles(DyadicInterval{1, 1}, outside));
    const std::vector<DyadicInterval> self{{2, 1}};
    CHECK(celltree::tiles(DyadicInterval{2, 1}, self));
    CHECK_FALSE(celltree::tiles(root, std::vector<DyadicInterval>{}));
}
