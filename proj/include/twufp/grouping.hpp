#pragma once

#include "twufp/core.hpp"
#include "twufp/profile.hpp"
#include "twufp/tree.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace twufp {

// Individual compatibility of a task with a box: matching weight and demand
// and a window overlap with the box path long enough to schedule the task.
inline bool task_compatible_with_box(const Task& t, const Box& b) {
    if (t.weight != b.weight || t.demand != b.demand) return false;
    const EdgeIndex lo = std::max(t.window_lo, b.path_lo);
    const EdgeIndex hi = std::min(t.window_hi, b.path_hi);
    return hi - lo + 1 >= t.length;
}

// A set of tasks fits inside a box iff the total demand is at most h(b) and
// every member is individually compatible.
inline bool fits_in_box(const std::vector<Task>& tasks, const Box& b) {
    Int total = 0;
    for (const auto& t : tasks) {
        if (!task_compatible_with_box(t, b)) return false;
        total += t.demand;
    }
    return total <= b.height;
}

namespace detail {

// Splits n items into k groups, sizes descending with remainders in the
// earliest groups; every size is floor(n/k) or ceil(n/k).
inline std::vector<long> descending_group_sizes(long n, long k) {
    std::vector<long> sizes(static_cast<std::size_t>(k));
    const long base = n / k, rem = n % k;
    for (long r = 0; r < k; ++r) sizes[static_cast<std::size_t>(r)] = base + (r < rem ? 1 : 0);
    return sizes;
}

inline void require_uniform_type(const std::vector<Placement>& placed) {
    for (const auto& pl : placed)
        if (pl.task.weight != placed.front().task.weight ||
            pl.task.demand != placed.front().task.demand)
            throw std::invalid_argument("tasks must share one (weight, demand) type");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear grouping of same-type placed tasks that share a common edge into at
// most (1/eps)^2 boxes whose stacked heights never exceed the tasks' own
// demand profile.
// ---------------------------------------------------------------------------

struct LinearGrouping {
    std::vector<std::size_t> kept;                 // S, indices into the input
    std::vector<BoxedGuess> boxes;                 // |boxes| <= (1/eps)^2
    std::vector<std::vector<std::size_t>> parts;   // partition of S, parallel to boxes
};

inline LinearGrouping linear_grouping_boxes(const std::vector<Placement>& placed, const Ratio& eps) {
    const long k = inv_eps(eps);
    if (placed.empty()) return {};
    detail::require_uniform_type(placed);

    EdgeIndex common_lo = placed.front().start, common_hi = placed.front().end();
    for (const auto& pl : placed) {
        common_lo = std::max(common_lo, pl.start);
        common_hi = std::min(common_hi, pl.end());
    }
    if (common_lo > common_hi)
        throw std::invalid_argument("placed tasks must share a common edge");

    const Int& d = placed.front().task.demand;
    const Ratio& w = placed.front().task.weight;
    const long n = static_cast<long>(placed.size());

    LinearGrouping out;
    if (n <= k * k) {
        // Small case: boxes coincide with the placed tasks themselves.
        for (std::size_t i = 0; i < placed.size(); ++i) {
            out.kept.push_back(i);
            out.boxes.push_back({{placed[i].start, placed[i].end(), d, d, w}, 1});
            out.parts.push_back({i});
        }
        return out;
    }

    std::vector<std::size_t> order(placed.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (placed[a].start != placed[b].start) return placed[a].start < placed[b].start;
        return placed[a].task.id < placed[b].task.id;
    });

    const auto outer_sizes = detail::descending_group_sizes(n, k);
    std::vector<std::vector<std::size_t>> groups;
    std::size_t at = 0;
    for (long r = 0; r < k; ++r) {
        groups.emplace_back(order.begin() + at, order.begin() + at + outer_sizes[static_cast<std::size_t>(r)]);
        at += static_cast<std::size_t>(outer_sizes[static_cast<std::size_t>(r)]);
    }

    for (long r = 1; r < k; ++r) {
        auto& group = groups[static_cast<std::size_t>(r)];
        const EdgeIndex mu = placed[group.front()].start;  // leftmost start in the group
        std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
            if (placed[a].end() != placed[b].end()) return placed[a].end() > placed[b].end();
            return placed[a].task.id < placed[b].task.id;
        });
        const auto inner_sizes = detail::descending_group_sizes(static_cast<long>(group.size()), k);
        std::size_t pos = static_cast<std::size_t>(inner_sizes[0]);  // q = 1 is dropped
        for (long q = 1; q < k; ++q) {
            std::vector<std::size_t> part(group.begin() + pos,
                                          group.begin() + pos + inner_sizes[static_cast<std::size_t>(q)]);
            pos += static_cast<std::size_t>(inner_sizes[static_cast<std::size_t>(q)]);
            if (part.empty()) continue;
            const EdgeIndex nu = placed[part.front()].end();  // rightmost end in the part
            Box box{mu, nu, d * static_cast<long>(part.size()), d, w};
            for (std::size_t i : part) out.kept.push_back(i);
            out.boxes.push_back({box, static_cast<long>(part.size())});
            out.parts.push_back(std::move(part));
        }
    }
    std::sort(out.kept.begin(), out.kept.end());

    // Internal consistency: stacked box heights never exceed the tasks'
    // demand profile, and each part fits its box.
    EdgeIndex span_lo = placed.front().start, span_hi = placed.front().end();
    for (const auto& pl : placed) {
        span_lo = std::min(span_lo, pl.start);
        span_hi = std::max(span_hi, pl.end());
    }
    std::vector<Box> plain;
    for (const auto& bg : out.boxes) plain.push_back(bg.box);
    if (!dominates(reservation_profile(plain, span_lo, span_hi),
                   demand_profile(placed, span_lo, span_hi)))
        throw std::logic_error("linear grouping produced a non-dominated reservation");
    for (std::size_t b = 0; b < out.boxes.size(); ++b) {
        std::vector<Task> members;
        for (std::size_t i : out.parts[b]) members.push_back(placed[i].task);
        if (static_cast<long>(members.size()) != out.boxes[b].count ||
            !fits_in_box(members, out.boxes[b].box))
            throw std::logic_error("linear grouping produced a non-fitting part");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Harmonic grouping: replaces same-type tasks scheduled inside an interval I
// contained in all their windows by artificial tasks with at most 1/eps
// distinct (rounded-up) lengths, plus boxes on the rightmost subpaths of I
// whose contents can later stand in for the artificial tasks.
// ---------------------------------------------------------------------------

struct ArtificialBatch {
    std::vector<Task> tasks;        // artificial = true, window = I
    std::vector<BoxedGuess> boxes;  // rightmost subpaths of I
    Ratio weight;
    Int demand;
};

struct HarmonicGrouping {
    ArtificialBatch batch;
    std::vector<EdgeIndex> starts;                   // schedule of batch.tasks
    std::vector<std::vector<std::size_t>> witnesses; // fits per box, parallel to batch.boxes
};

inline Task make_artificial_task(const Ratio& weight, const Int& demand, EdgeIndex length,
                                 const Interval& window, long seq) {
    Task t;
    t.id = "~art(w=" + to_string(weight) + ",d=" + to_string(demand) + ",p=" +
           std::to_string(length) + ",I=" + std::to_string(window.lo) + "-" +
           std::to_string(window.hi) + ")#" + std::to_string(seq);
    t.weight = weight;
    t.demand = demand;
    t.length = length;
    t.window_lo = window.lo;
    t.window_hi = window.hi;
    t.artificial = true;
    return t;
}

inline Box rightmost_subpath_box(const Interval& I, EdgeIndex length, const Int& demand,
                                 const Ratio& weight, long count) {
    return Box{I.hi - length + 1, I.hi, demand * count, demand, weight};
}

inline HarmonicGrouping harmonic_grouping(const std::vector<Placement>& placed, const Interval& I,
                                          const Ratio& eps) {
    const long k = inv_eps(eps);
    HarmonicGrouping out;
    if (placed.empty()) return out;
    detail::require_uniform_type(placed);
    for (const auto& pl : placed) {
        if (!I.contains(pl.start, pl.end()))
            throw std::invalid_argument("placement outside the grouping interval");
        if (!(pl.task.window_lo <= I.lo && I.hi <= pl.task.window_hi))
            throw std::invalid_argument("grouping interval not inside a task window");
    }

    const Int& d = placed.front().task.demand;
    const Ratio& w = placed.front().task.weight;
    out.batch.weight = w;
    out.batch.demand = d;
    const long n = static_cast<long>(placed.size());

    if (n <= k) {
        // Copy case: one artificial task and one unit box per input task.
        for (std::size_t i = 0; i < placed.size(); ++i) {
            out.batch.tasks.push_back(
                make_artificial_task(w, d, placed[i].task.length, I, static_cast<long>(i)));
            out.starts.push_back(placed[i].start);
            out.batch.boxes.push_back({rightmost_subpath_box(I, placed[i].task.length, d, w, 1), 1});
            out.witnesses.push_back({i});
        }
        return out;
    }

    std::vector<std::size_t> order(placed.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (placed[a].task.length != placed[b].task.length)
            return placed[a].task.length > placed[b].task.length;
        return placed[a].task.id < placed[b].task.id;
    });

    // The dropped group (no artificial mirror) takes floor(eps*n) tasks so
    // that |T~| = n - floor(eps*n); the rest split descending. Every group
    // then exceeds the dropped one by at most 1, which keeps the positional
    // replacement below on tasks of no smaller length.
    std::vector<long> sizes;
    sizes.push_back(n / k);
    {
        auto rest = detail::descending_group_sizes(n - n / k, k - 1);
        sizes.insert(sizes.end(), rest.begin(), rest.end());
    }
    std::vector<std::vector<std::size_t>> groups;
    std::size_t at = 0;
    for (long r = 0; r < k; ++r) {
        groups.emplace_back(order.begin() + at, order.begin() + at + sizes[static_cast<std::size_t>(r)]);
        at += static_cast<std::size_t>(sizes[static_cast<std::size_t>(r)]);
    }

    // Artificial tasks mirror groups 2..k with the group's maximum length;
    // scheduled flush against the right end of the positionally matched
    // original placement, which is at least as long.
    long seq = 0;
    std::size_t position = 0;  // walks the globally sorted order
    for (long r = 1; r < k; ++r) {
        const auto& group = groups[static_cast<std::size_t>(r)];
        if (group.empty()) continue;
        const EdgeIndex p_r = placed[group.front()].task.length;
        std::vector<std::size_t> witness = group;
        out.batch.boxes.push_back(
            {rightmost_subpath_box(I, p_r, d, w, static_cast<long>(group.size())),
             static_cast<long>(group.size())});
        out.witnesses.push_back(std::move(witness));
        for (std::size_t j = 0; j < group.size(); ++j, ++position) {
            const Placement& host = placed[order[position]];
            if (host.task.length < p_r)
                throw std::logic_error("harmonic grouping host shorter than artificial task");
            out.batch.tasks.push_back(make_artificial_task(w, d, p_r, I, seq++));
            out.starts.push_back(host.end() - p_r + 1);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Degree-constrained bipartite matching by augmenting paths: each box b must
// receive exactly n_b tasks, each task is used at most once. Integral by
// construction, no LP.
// ---------------------------------------------------------------------------

// Generic form over an explicit compatibility predicate. Returns, for each
// task, the box index it is assigned to (-1 if unassigned), or nullopt if no
// assignment meets every box's quota.
inline std::optional<std::vector<long>> b_matching_assign_adj(
    std::size_t n_tasks, const std::vector<long>& box_counts,
    const std::function<bool(std::size_t, std::size_t)>& compatible) {
    std::vector<long> task_box(n_tasks, -1);
    std::vector<char> visited(n_tasks);

    // Finds an augmenting path that frees one more slot of box `want`.
    std::function<bool(std::size_t)> augment = [&](std::size_t want) -> bool {
        for (std::size_t t = 0; t < n_tasks; ++t) {
            if (visited[t] || !compatible(t, want)) continue;
            visited[t] = 1;
            if (task_box[t] < 0 || augment(static_cast<std::size_t>(task_box[t]))) {
                task_box[t] = static_cast<long>(want);
                return true;
            }
        }
        return false;
    };

    for (std::size_t b = 0; b < box_counts.size(); ++b) {
        for (long slot = 0; slot < box_counts[b]; ++slot) {
            std::fill(visited.begin(), visited.end(), 0);
            if (!augment(b)) return std::nullopt;
        }
    }
    return task_box;
}

// Standard-compatibility wrapper: weight and demand must match the box and
// the window overlap with the box path must cover the task length.
inline std::optional<std::vector<long>> b_matching_assign(const std::vector<Task>& tasks,
                                                          const std::vector<BoxedGuess>& boxes) {
    std::vector<long> counts;
    counts.reserve(boxes.size());
    for (const auto& bg : boxes) counts.push_back(bg.count);
    return b_matching_assign_adj(tasks.size(), counts, [&](std::size_t t, std::size_t b) {
        return task_compatible_with_box(tasks[t], boxes[b].box);
    });
}

// ---------------------------------------------------------------------------
// Replacement map: an injective assignment of scheduled artificial tasks to
// box-filling real tasks of the same type that can be rescheduled inside the
// artificial placements. Existence is guaranteed whenever the inputs satisfy
// the harmonic-grouping contract, so a failed matching signals a violated
// precondition and the caller discards the enclosing guess.
// ---------------------------------------------------------------------------

inline std::optional<std::vector<Task>> replacement_map(
    const std::vector<Placement>& scheduled_artificial,
    const std::vector<std::pair<BoxedGuess, std::vector<Task>>>& box_fills,
    EdgeIndex leftmost_edge_of_interval) {
    std::vector<Task> pool;
    for (const auto& [bg, fills] : box_fills) {
        if (static_cast<long>(fills.size()) != bg.count) return std::nullopt;
        if (!fits_in_box(fills, bg.box)) return std::nullopt;
        for (const auto& t : fills) {
            if (!(t.window_lo <= leftmost_edge_of_interval && leftmost_edge_of_interval <= t.window_hi))
                return std::nullopt;
            pool.push_back(t);
        }
    }

    auto compatible = [&](std::size_t a, std::size_t p) {
        const Placement& art = scheduled_artificial[a];
        const Task& real = pool[p];
        if (real.weight != art.task.weight || real.demand != art.task.demand) return false;
        const EdgeIndex lo = std::max(art.start, real.window_lo);
        const EdgeIndex hi = std::min(art.end(), real.window_hi);
        return hi - lo + 1 >= real.length;
    };

    // Kuhn matching saturating the artificial side.
    std::vector<long> owner(pool.size(), -1);
    std::vector<char> visited(pool.size());
    std::function<bool(std::size_t)> augment = [&](std::size_t a) -> bool {
        for (std::size_t p = 0; p < pool.size(); ++p) {
            if (visited[p] || !compatible(a, p)) continue;
            visited[p] = 1;
            if (owner[p] < 0 || augment(static_cast<std::size_t>(owner[p]))) {
                owner[p] = static_cast<long>(a);
                return true;
            }
        }
        return false;
    };
    std::vector<long> chosen(scheduled_artificial.size(), -1);
    for (std::size_t a = 0; a < scheduled_artificial.size(); ++a) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!augment(a)) return std::nullopt;
    }
    for (std::size_t p = 0; p < pool.size(); ++p)
        if (owner[p] >= 0) chosen[static_cast<std::size_t>(owner[p])] = static_cast<long>(p);
    std::vector<Task> result;
    result.reserve(scheduled_artificial.size());
    for (std::size_t a = 0; a < scheduled_artificial.size(); ++a) {
        if (chosen[a] < 0) return std::nullopt;
        result.push_back(pool[static_cast<std::size_t>(chosen[a])]);
    }
    return result;
}

}  // namespace twufp
