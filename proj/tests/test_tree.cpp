#include "twufp/tree.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace twufp;

namespace {

Task task(EdgeIndex length, EdgeIndex lo, EdgeIndex hi, bool artificial = false) {
    return Task{"t", Int(1), Ratio(1), length, lo, hi, artificial};
}

}  // namespace

TEST_CASE("padding to the least power of two") {
    IntervalTree tree(5);
    REQUIRE(tree.padded_edge_count() == 8);
    REQUIRE(tree.levels() == 4);
    REQUIRE(tree.root() == Interval{1, 8});
    IntervalTree single(1);
    REQUIRE(single.padded_edge_count() == 1);
    REQUIRE(single.levels() == 1);
}

TEST_CASE("children split at the middle vertex") {
    Interval I{1, 8};
    REQUIRE(IntervalTree::left_child(I) == Interval{1, 4});
    REQUIRE(IntervalTree::right_child(I) == Interval{5, 8});
    REQUIRE(IntervalTree::mid_left_edge(I) == 4);
    REQUIRE(IntervalTree::mid_right_edge(I) == 5);
}

TEST_CASE("task levels") {
    IntervalTree tree(8);
    REQUIRE(tree.task_level(task(2, 1, 8)) == 0);  // whole path
    REQUIRE(tree.task_level(task(1, 3, 3)) == 3);  // leaf
    REQUIRE(tree.task_level(task(2, 4, 5)) == 0);  // straddles the root middle
    REQUIRE(tree.task_level(task(2, 5, 8)) == 1);
    REQUIRE(tree.task_level(task(1, 3, 4)) == 2);
}

TEST_CASE("level_of matches interval sizes") {
    IntervalTree tree(8);
    REQUIRE(tree.level_of({1, 8}) == 0);
    REQUIRE(tree.level_of({5, 8}) == 1);
    REQUIRE(tree.level_of({3, 4}) == 2);
    REQUIRE(tree.level_of({7, 7}) == 3);
}

TEST_CASE("left-constrained placements") {
    IntervalTree tree(8);

    // Level-0 task placed in the left half or across the middle.
    Task wide = task(2, 1, 8);
    REQUIRE(placement_left_constrained(tree, wide, 1));
    REQUIRE(placement_left_constrained(tree, wide, 4));  // straddles mid, interior case
    REQUIRE_FALSE(placement_left_constrained(tree, wide, 5));
    REQUIRE_FALSE(placement_left_constrained(tree, wide, 7));

    // Artificial tasks are exempt.
    Task ghost = task(2, 1, 8, true);
    REQUIRE(placement_left_constrained(tree, ghost, 7));

    // A leaf-level task is trivially left constrained.
    Task leaf = task(1, 6, 6);
    REQUIRE(placement_left_constrained(tree, leaf, 6));

    REQUIRE(is_left_constrained(tree, {{wide, 4}, {leaf, 6}}));
    REQUIRE_FALSE(is_left_constrained(tree, {{wide, 5}, {leaf, 6}}));
}

TEST_CASE("windows outside the root are rejected") {
    IntervalTree tree(4);
    REQUIRE_THROWS_AS(tree.task_level(task(1, 1, 5)), std::invalid_argument);
}
