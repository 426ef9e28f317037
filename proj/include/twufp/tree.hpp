#pragma once

#include "twufp/core.hpp"

namespace twufp {

struct Interval {
    EdgeIndex lo = 1;
    EdgeIndex hi = 1;

    EdgeIndex size() const { return hi - lo + 1; }
    bool contains(EdgeIndex e) const { return lo <= e && e <= hi; }
    bool contains(EdgeIndex a, EdgeIndex b) const { return lo <= a && b <= hi; }
    bool operator==(const Interval&) const = default;
};

// Laminar binary decomposition of the edge path. The path is padded on the
// right to the least power of two with zero-capacity edges (windows are not
// extended by this padding). Level 0 is the root; leaves are single edges.
class IntervalTree {
public:
    explicit IntervalTree(EdgeIndex m) : m_(m) {
        if (m < 1) throw std::invalid_argument("interval tree needs at least one edge");
        m_padded_ = 1;
        height_ = 0;
        while (m_padded_ < m) {
            m_padded_ *= 2;
            ++height_;
        }
    }

    EdgeIndex edge_count() const { return m_; }
    EdgeIndex padded_edge_count() const { return m_padded_; }
    int levels() const { return height_ + 1; }  // 1 + log2(m')

    Interval root() const { return {1, m_padded_}; }

    static bool is_leaf(const Interval& I) { return I.lo == I.hi; }

    // Middle vertex of I sits between edges mid_left_edge and mid_right_edge.
    static EdgeIndex mid_left_edge(const Interval& I) { return I.lo + I.size() / 2 - 1; }
    static EdgeIndex mid_right_edge(const Interval& I) { return I.lo + I.size() / 2; }

    static Interval left_child(const Interval& I) { return {I.lo, mid_left_edge(I)}; }
    static Interval right_child(const Interval& I) { return {mid_right_edge(I), I.hi}; }

    int level_of(const Interval& I) const {
        int level = height_;
        for (EdgeIndex len = 1; len < I.size(); len *= 2) --level;
        return level;
    }

    // Deepest tree interval containing the window [lo, hi].
    Interval enclosing_interval(EdgeIndex lo, EdgeIndex hi) const {
        if (lo < 1 || hi > m_padded_ || lo > hi)
            throw std::invalid_argument("window outside the tree's root interval");
        Interval I = root();
        while (!is_leaf(I)) {
            if (left_child(I).contains(lo, hi))
                I = left_child(I);
            else if (right_child(I).contains(lo, hi))
                I = right_child(I);
            else
                break;
        }
        return I;
    }

    // Largest level whose interval contains the task's window.
    int task_level(const Task& t) const {
        return level_of(enclosing_interval(t.window_lo, t.window_hi));
    }

    Interval task_level_interval(const Task& t) const {
        return enclosing_interval(t.window_lo, t.window_hi);
    }

private:
    EdgeIndex m_;
    EdgeIndex m_padded_;
    int height_;
};

// A placement of a real task violates the left-constrained condition iff its
// path lies entirely in the right child of the task's level interval.
// Artificial tasks are exempt by definition.
inline bool placement_left_constrained(const IntervalTree& tree, const Task& t, EdgeIndex start) {
    if (t.artificial) return true;
    Interval I = tree.task_level_interval(t);
    if (IntervalTree::is_leaf(I)) return true;
    Interval R = IntervalTree::right_child(I);
    return !R.contains(start, start + t.length - 1);
}

inline bool is_left_constrained(const IntervalTree& tree, const std::vector<Placement>& placed) {
    for (const auto& pl : placed)
        if (!placement_left_constrained(tree, pl.task, pl.start)) return false;
    return true;
}

}  // namespace twufp
