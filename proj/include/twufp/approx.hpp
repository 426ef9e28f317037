#pragma once

#include "twufp/grouping.hpp"
#include "twufp/instance.hpp"
#include "twufp/reductions.hpp"
#include "twufp/tree.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>

namespace twufp {

// Caps on enumeration breadth per guess site. In exhaustive mode the caps
// equal the full structured ranges (every box shape the grouping lemmas can
// produce, at most m^2 * n per type); bounded mode keeps deterministic
// prefixes of the same candidate orders, so enlarging a budget never loses a
// candidate.
struct GuessBudget {
    bool exhaustive = true;
    long max_path_endpoints_per_class = 6;
    long max_box_sets_per_class = 40;
    long max_length_profiles_per_class = 20;
    long max_splits_per_guess = 256;

    static GuessBudget full() { return {}; }
    static GuessBudget bounded(long endpoints, long sets, long profiles, long splits) {
        return {false, endpoints, sets, profiles, splits};
    }
};

// One node of the recursion: an interval with residual capacities, the task
// pool (windows inside the interval or containing its rightmost edge) and
// inherited boxes with their exact quotas.
struct Subproblem {
    Interval interval;
    CapacityProfile residual;
    std::vector<Task> pool;
    std::vector<BoxedGuess> boxes;
};

// Roles of scheduled tasks: placed by the recursion itself, placed as a
// middle-box fill, or placed as the replacement of an artificial task. Only
// the first kind is left constrained by construction.
enum class ScheduledRole : char { recursed = 'r', middle_fill = 'm', replacement = 'f' };

struct SubSolution {
    std::vector<Placement> scheduled;          // Q_I
    std::vector<ScheduledRole> roles;          // parallel to scheduled
    std::vector<std::vector<Task>> box_fills;  // parallel to Subproblem::boxes
    Ratio objective = Ratio(0);                // w(scheduled); placeholders count until replaced
};

struct SolverStats {
    std::uint64_t subproblems = 0;
    std::uint64_t memo_hits = 0;
    std::uint64_t candidates = 0;
    std::uint64_t discarded = 0;
    std::uint64_t max_class_box_candidates = 0;  // distinct box paths per type, <= m^2 * n
};

namespace detail {

// Box-assignment compatibility used throughout the recursion. On top of the
// fits-in-box clauses, an artificial task may only enter a box whose path
// lies inside its window (= its creation interval): boxes created at higher
// levels stick out of that window, and a placeholder parked there would
// outlive the combine step that is supposed to replace it.
inline bool assignable_to_box(const Task& t, const Box& b) {
    if (!task_compatible_with_box(t, b)) return false;
    if (t.artificial && !(t.window_lo <= b.path_lo && b.path_hi <= t.window_hi)) return false;
    return true;
}

inline std::string box_key(const BoxedGuess& bg) {
    return std::to_string(bg.box.path_lo) + "," + std::to_string(bg.box.path_hi) + "," +
           to_string(bg.box.height) + "," + to_string(bg.box.demand) + "," +
           to_string(bg.box.weight) + "*" + std::to_string(bg.count);
}

inline std::string subproblem_key(const Subproblem& sub) {
    std::string key = "I" + std::to_string(sub.interval.lo) + "-" + std::to_string(sub.interval.hi) + "|R";
    for (const auto& seg : sub.residual.segments())
        key += std::to_string(seg.lo) + "," + std::to_string(seg.hi) + "=" + to_string(seg.value) + ";";
    std::vector<std::string> ids;
    for (const auto& t : sub.pool) ids.push_back(t.id);
    std::sort(ids.begin(), ids.end());
    key += "|P";
    for (const auto& id : ids) key += id + ";";
    // Box order is significant: box_fills of a solution are positional.
    key += "|B";
    for (const auto& bg : sub.boxes) key += box_key(bg) + ";";
    return key;
}

// Start positions s with [s, s+p-1] inside window∩path and covering both
// edges adjacent to the split point; empty range if the task cannot cross.
inline std::optional<std::pair<EdgeIndex, EdgeIndex>> crossing_start_range(
    const Task& t, EdgeIndex path_lo, EdgeIndex path_hi, EdgeIndex mid_left, EdgeIndex mid_right) {
    const EdgeIndex lo = std::max({path_lo, t.window_lo, mid_right - t.length + 1});
    const EdgeIndex hi = std::min({std::min(path_hi, t.window_hi) - t.length + 1, mid_left});
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

struct TypeClass {
    Ratio weight;
    Int demand;
    std::vector<std::size_t> members;  // indices into the pool
};

inline std::vector<TypeClass> type_classes(const std::vector<Task>& pool,
                                           const std::vector<std::size_t>& subset) {
    std::map<std::pair<Ratio, Int>, std::vector<std::size_t>> by_type;
    for (std::size_t i : subset) by_type[{pool[i].weight, pool[i].demand}].push_back(i);
    std::vector<TypeClass> classes;
    for (auto& [key, members] : by_type) classes.push_back({key.first, key.second, std::move(members)});
    return classes;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The recursive guess-and-recurse solver. One instance per (oriented,
// padded) input; results are memoized on a canonical subproblem encoding so
// sibling guesses share children.
// ---------------------------------------------------------------------------

class RecursiveSolver {
public:
    RecursiveSolver(Ratio eps, GuessBudget budget, std::ostream* trace = nullptr)
        : eps_(std::move(eps)), k_(inv_eps(eps_)), budget_(budget), trace_(trace) {}

    const SolverStats& stats() const { return stats_; }

    std::optional<SubSolution> solve(const Subproblem& sub) {
        const std::string key = detail::subproblem_key(sub);
        auto it = memo_.find(key);
        if (it != memo_.end()) {
            ++stats_.memo_hits;
            return it->second;
        }
        ++stats_.subproblems;
        auto result = compute(sub);
        memo_.emplace(std::move(key), result);
        return result;
    }

    void set_root_size(EdgeIndex padded) { root_size_ = padded; }

private:
    int level_of(const Interval& I) const {
        int level = 0;
        for (EdgeIndex len = I.size(); len < root_size_; len *= 2) ++level;
        return level;
    }

    std::optional<SubSolution> compute(const Subproblem& sub) {
        if (sub.pool.empty()) {
            for (const auto& bg : sub.boxes)
                if (bg.count > 0) return std::nullopt;  // quotas cannot be met
            SubSolution empty;
            empty.box_fills.resize(sub.boxes.size());
            return empty;
        }
        if (sub.interval.lo == sub.interval.hi) return solve_base(sub);
        return solve_split(sub);
    }

    // ----- base case: a single edge -------------------------------------

    std::optional<SubSolution> solve_base(const Subproblem& sub) {
        const EdgeIndex e = sub.interval.lo;
        const Int& capacity = sub.residual.value_at(e);

        std::vector<std::size_t> unit;  // tasks schedulable on the edge
        for (std::size_t i = 0; i < sub.pool.size(); ++i)
            if (sub.pool[i].length == 1) unit.push_back(i);
        const auto classes = detail::type_classes(sub.pool, unit);

        std::optional<SubSolution> best;
        std::vector<long> counts(classes.size(), 0);

        auto evaluate = [&]() {
            ++stats_.candidates;
            std::vector<BoxedGuess> all_boxes = sub.boxes;
            Ratio objective(0);
            for (std::size_t c = 0; c < classes.size(); ++c) {
                if (counts[c] == 0) continue;
                all_boxes.push_back({Box{e, e, classes[c].demand * counts[c], classes[c].demand,
                                         classes[c].weight},
                                     counts[c]});
                objective += classes[c].weight * Ratio(Int(counts[c]));
            }
            if (best && objective <= best->objective) return;  // cannot improve on best
            std::vector<long> quotas;
            for (const auto& bg : all_boxes) quotas.push_back(bg.count);
            auto assignment = b_matching_assign_adj(
                sub.pool.size(), quotas, [&](std::size_t t, std::size_t b) {
                    return detail::assignable_to_box(sub.pool[t], all_boxes[b].box);
                });
            if (!assignment) {
                ++stats_.discarded;
                return;
            }
            SubSolution sol;
            sol.box_fills.resize(sub.boxes.size());
            for (std::size_t t = 0; t < sub.pool.size(); ++t) {
                const long b = (*assignment)[t];
                if (b < 0) continue;
                if (static_cast<std::size_t>(b) < sub.boxes.size()) {
                    sol.box_fills[static_cast<std::size_t>(b)].push_back(sub.pool[t]);
                } else {
                    sol.scheduled.push_back({sub.pool[t], e});
                    sol.roles.push_back(ScheduledRole::recursed);
                }
            }
            sol.objective = objective;
            if (!best || sol.objective > best->objective) best = std::move(sol);
        };

        // Enumerate how many unit tasks of each type are scheduled on the
        // edge, respecting the residual capacity.
        auto enumerate = [&](auto&& self, std::size_t c, Int used) -> void {
            if (c == classes.size()) {
                evaluate();
                return;
            }
            const long limit = static_cast<long>(classes[c].members.size());
            for (long n = 0; n <= limit; ++n) {
                if (used + classes[c].demand * n > capacity) break;
                counts[c] = n;
                self(self, c + 1, used + classes[c].demand * n);
            }
            counts[c] = 0;
        };
        enumerate(enumerate, 0, Int(0));
        return best;
    }

    // ----- interior node: guess boxes, artificial tasks and splits ------

    struct MiddleBoxSet {
        std::vector<BoxedGuess> boxes;  // one type class
    };

    struct ArtificialGuess {
        std::vector<std::pair<EdgeIndex, long>> profile;  // (length, count), one class
        Ratio weight;
        Int demand;
    };

    std::optional<SubSolution> solve_split(const Subproblem& sub) {
        const Interval I = sub.interval;
        const Interval IL = IntervalTree::left_child(I);
        const Interval IR = IntervalTree::right_child(I);
        const EdgeIndex e_ml = IntervalTree::mid_left_edge(I);
        const EdgeIndex e_mr = IntervalTree::mid_right_edge(I);

        std::vector<std::size_t> left_pool_idx, right_pool_idx;
        for (std::size_t i = 0; i < sub.pool.size(); ++i) {
            if (sub.pool[i].window_lo <= IL.hi)
                left_pool_idx.push_back(i);
            else
                right_pool_idx.push_back(i);
        }
        std::vector<Task> left_pool, right_pool_base;
        for (std::size_t i : left_pool_idx) left_pool.push_back(sub.pool[i]);
        for (std::size_t i : right_pool_idx) right_pool_base.push_back(sub.pool[i]);

        // Per-type alternatives for the middle boxes (always including the
        // empty choice) and for the artificial-task length profiles.
        const auto middle_alternatives = enumerate_middle_box_sets(sub, e_ml, e_mr);
        const auto artificial_alternatives = enumerate_artificial_profiles(sub, IL, IR, left_pool);

        std::optional<SubSolution> best;

        Int total_area = 0;
        for (const auto& seg : sub.residual.segments())
            total_area += seg.value * Int(seg.hi - seg.lo + 1);
        const Int mid_limit = std::min(sub.residual.value_at(e_ml), sub.residual.value_at(e_mr));

        std::vector<std::size_t> mid_choice(middle_alternatives.size(), 0);
        auto loop_middle = [&](auto&& self, std::size_t c, const Int& stacked,
                               const Int& area) -> void {
            if (c == middle_alternatives.size()) {
                try_middle_guess(sub, IL, IR, left_pool, right_pool_base, middle_alternatives,
                                 mid_choice, artificial_alternatives, best);
                return;
            }
            for (std::size_t choice = 0; choice < middle_alternatives[c].size(); ++choice) {
                Int add = 0, add_area = 0;
                for (const auto& bg : middle_alternatives[c][choice].boxes) {
                    add += bg.box.height;
                    add_area += bg.box.height * Int(bg.box.path_hi - bg.box.path_lo + 1);
                }
                // every middle box covers both edges adjacent to the split,
                // and reservations never exceed the residual demand-area
                if (stacked + add > mid_limit || area + add_area > total_area) continue;
                mid_choice[c] = choice;
                self(self, c + 1, stacked + add, area + add_area);
            }
            mid_choice[c] = 0;
        };
        loop_middle(loop_middle, 0, Int(0), Int(0));
        return best;
    }

    // Alternatives for the middle boxes of one type class: exactly the box
    // sets the linear-grouping construction can produce for some crossing
    // subset of the class.
    //  * Small case (subset size <= (1/eps)^2): boxes coincide with exact
    //    crossing placements, so candidates are multisets of placement
    //    paths (same-path boxes merge into one box with a larger count).
    //  * Grouped case (subset size s > (1/eps)^2, only reachable when the
    //    class itself is that large): (1/eps - 1)^2 boxes whose counts are
    //    the construction's partition sizes of s and whose endpoints are
    //    achievable placement endpoints, ordered as in the construction.
    // Everything is pruned by per-box compatibility counts, the class size
    // and joint fillability; none of the prunes can remove a set the lemma
    // produces on a left-constrained optimum.
    std::vector<std::vector<MiddleBoxSet>> enumerate_middle_box_sets(const Subproblem& sub,
                                                                     EdgeIndex e_ml, EdgeIndex e_mr) {
        std::vector<std::size_t> all(sub.pool.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::vector<std::vector<MiddleBoxSet>> per_class;

        for (const auto& cls : detail::type_classes(sub.pool, all)) {
            std::vector<std::size_t> crossing;
            std::set<EdgeIndex> lefts, rights;
            std::set<std::pair<EdgeIndex, EdgeIndex>> placement_paths;
            for (std::size_t i : cls.members) {
                const auto range = detail::crossing_start_range(sub.pool[i], sub.interval.lo,
                                                                sub.interval.hi, e_ml, e_mr);
                if (!range) continue;
                crossing.push_back(i);
                for (EdgeIndex s = range->first; s <= range->second; ++s) {
                    lefts.insert(s);
                    rights.insert(s + sub.pool[i].length - 1);
                    placement_paths.insert({s, s + sub.pool[i].length - 1});
                }
            }
            if (crossing.empty()) continue;

            struct PathCandidate {
                EdgeIndex lo, hi;
                std::vector<std::size_t> compatible;  // pool indices, sorted
                long fit_limit = 0;                   // capacity along the path / demand
            };
            auto make_candidate = [&](EdgeIndex a, EdgeIndex b) {
                PathCandidate pc{a, b, {}, 0};
                for (std::size_t i : crossing)
                    if (detail::crossing_start_range(sub.pool[i], a, b, e_ml, e_mr))
                        pc.compatible.push_back(i);
                const Int room = sub.residual.min_over(a, b) / cls.demand;
                pc.fit_limit = room > Int(static_cast<long>(crossing.size()))
                                   ? static_cast<long>(crossing.size())
                                   : room.convert_to<long>();
                return pc;
            };

            std::vector<PathCandidate> small_paths;
            for (const auto& [a, b] : placement_paths) {
                auto pc = make_candidate(a, b);
                if (!pc.compatible.empty() && pc.fit_limit > 0) small_paths.push_back(std::move(pc));
            }
            if (!budget_.exhaustive &&
                static_cast<long>(small_paths.size()) > budget_.max_path_endpoints_per_class)
                small_paths.resize(static_cast<std::size_t>(budget_.max_path_endpoints_per_class));
            stats_.max_class_box_candidates =
                std::max<std::uint64_t>(stats_.max_class_box_candidates, small_paths.size());

            std::vector<MiddleBoxSet> alternatives;
            alternatives.push_back({});  // the empty guess

            const long c = static_cast<long>(crossing.size());
            const long small_limit = std::min<long>(k_ * k_, c);

            // Joint fillability: the chosen quotas can be met by distinct
            // crossing class members placed inside their boxes.
            auto feasible_quotas = [&](const std::vector<std::pair<std::size_t, long>>& chosen,
                                       const std::vector<PathCandidate>& paths) -> bool {
                std::vector<long> quotas;
                for (const auto& [p, n] : chosen) quotas.push_back(n);
                auto ok = b_matching_assign_adj(
                    crossing.size(), quotas, [&](std::size_t t, std::size_t b) {
                        const auto& pc = paths[chosen[b].first];
                        return std::binary_search(pc.compatible.begin(), pc.compatible.end(),
                                                  crossing[t]);
                    });
                return ok.has_value();
            };
            auto emit = [&](const std::vector<std::pair<std::size_t, long>>& chosen,
                            const std::vector<PathCandidate>& paths) {
                if (!feasible_quotas(chosen, paths)) return;
                MiddleBoxSet set;
                for (const auto& [p, n] : chosen)
                    set.boxes.push_back(
                        {Box{paths[p].lo, paths[p].hi, cls.demand * n, cls.demand, cls.weight}, n});
                alternatives.push_back(std::move(set));
            };

            // Small case: multisets of exact placement paths.
            std::vector<std::pair<std::size_t, long>> chosen;
            auto dfs_small = [&](auto&& self, std::size_t next, long used_boxes, long used) -> void {
                if (!budget_.exhaustive &&
                    static_cast<long>(alternatives.size()) > budget_.max_box_sets_per_class)
                    return;
                if (!chosen.empty()) emit(chosen, small_paths);
                if (used_boxes == small_limit) return;
                for (std::size_t p = next; p < small_paths.size(); ++p) {
                    const long cap = std::min<long>(
                        {static_cast<long>(small_paths[p].compatible.size()),
                         small_paths[p].fit_limit, small_limit - used});
                    for (long n = 1; n <= cap; ++n) {
                        chosen.push_back({p, n});
                        self(self, p + 1, used_boxes + 1, used + n);
                        chosen.pop_back();
                    }
                }
            };
            dfs_small(dfs_small, 0, 0, 0);

            // Grouped case: only subsets larger than (1/eps)^2 use it. The
            // counts are the partition sizes; the paths range over achievable
            // endpoints with the construction's monotone ordering.
            if (c > k_ * k_) {
                std::vector<EdgeIndex> left_list(lefts.begin(), lefts.end());
                std::vector<EdgeIndex> right_list(rights.begin(), rights.end());
                std::vector<PathCandidate> grouped_paths;
                std::map<std::pair<EdgeIndex, EdgeIndex>, std::size_t> path_index;
                auto path_id = [&](EdgeIndex a, EdgeIndex b) -> long {
                    auto it = path_index.find({a, b});
                    if (it != path_index.end()) return static_cast<long>(it->second);
                    auto pc = make_candidate(a, b);
                    if (pc.compatible.empty() || pc.fit_limit <= 0) return -1;
                    path_index[{a, b}] = grouped_paths.size();
                    grouped_paths.push_back(std::move(pc));
                    return static_cast<long>(grouped_paths.size() - 1);
                };

                for (long s = k_ * k_ + 1; s <= c; ++s) {
                    const auto outer = detail::descending_group_sizes(s, k_);
                    // Boxes (r, q) for outer groups 1..k-1 and inner parts
                    // 1..k-1 (0-based), each with inner partition counts.
                    struct Slot {
                        long r, q, count;
                    };
                    std::vector<Slot> slots;
                    for (long r = 1; r < k_; ++r) {
                        const auto inner =
                            detail::descending_group_sizes(outer[static_cast<std::size_t>(r)], k_);
                        for (long q = 1; q < k_; ++q)
                            if (inner[static_cast<std::size_t>(q)] > 0)
                                slots.push_back({r, q, inner[static_cast<std::size_t>(q)]});
                    }
                    // Assign mu_r (nondecreasing over the groups) and nu_{r,q}
                    // (nonincreasing within one group), as in the construction.
                    std::vector<std::pair<std::size_t, long>> grouped_chosen;
                    auto assign = [&](auto&& self, std::size_t slot, std::size_t prev_mu,
                                      std::size_t nu_bound) -> void {
                        if (!budget_.exhaustive &&
                            static_cast<long>(alternatives.size()) > budget_.max_box_sets_per_class)
                            return;
                        if (slot == slots.size()) {
                            emit(grouped_chosen, grouped_paths);
                            return;
                        }
                        const bool same_r = slot > 0 && slots[slot - 1].r == slots[slot].r;
                        const std::size_t mu_hi = same_r ? prev_mu + 1 : left_list.size();
                        for (std::size_t mi = prev_mu; mi < mu_hi; ++mi) {
                            const std::size_t nu_hi = same_r ? nu_bound : right_list.size();
                            for (std::size_t ni = 0; ni < nu_hi; ++ni) {
                                const long pid = path_id(left_list[mi], right_list[ni]);
                                if (pid < 0) continue;
                                if (grouped_paths[static_cast<std::size_t>(pid)].fit_limit <
                                    slots[slot].count)
                                    continue;
                                grouped_chosen.push_back(
                                    {static_cast<std::size_t>(pid), slots[slot].count});
                                self(self, slot + 1, mi, ni + 1);
                                grouped_chosen.pop_back();
                            }
                        }
                    };
                    assign(assign, 0, 0, right_list.size());
                }
            }
            if (alternatives.size() > 1) per_class.push_back(std::move(alternatives));
        }
        return per_class;
    }

    // Alternatives for the artificial-task profiles of one type class:
    // (length, count) vectors with at most 1/eps distinct lengths drawn from
    // the eligible tasks (window containing the right child strictly and
    // intersecting the left child), bounded by the count of eligible tasks
    // of at least each length, with fillable rightmost-subpath boxes.
    std::vector<std::vector<ArtificialGuess>> enumerate_artificial_profiles(
        const Subproblem& sub, const Interval& IL, const Interval& IR,
        const std::vector<Task>& left_pool) {
        // Windows containing the right child strictly (they extend past this
        // interval; a left-constrained optimum never schedules a crossing
        // task with window inside I entirely right) and intersecting the
        // left child.
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < sub.pool.size(); ++i) {
            const Task& t = sub.pool[i];
            if (t.window_lo <= IL.hi && t.window_hi > sub.interval.hi) eligible.push_back(i);
        }
        std::vector<std::vector<ArtificialGuess>> per_class;
        if (eligible.empty()) return per_class;

        // Any profile the grouping lemma produces mirrors tasks feasibly
        // scheduled inside the right child, so its total demand-area fits
        // under the residual there and each length fits on some run of
        // edges with enough residual capacity.
        Int right_area = 0;
        for (const auto& seg : sub.residual.segments()) {
            const EdgeIndex lo = std::max(seg.lo, IR.lo);
            const EdgeIndex hi = std::min(seg.hi, IR.hi);
            if (lo <= hi) right_area += seg.value * Int(hi - lo + 1);
        }
        auto max_run_at_least = [&](const Int& demand) {
            EdgeIndex best = 0, run = 0;
            for (const auto& seg : sub.residual.segments()) {
                const EdgeIndex lo = std::max(seg.lo, IR.lo);
                const EdgeIndex hi = std::min(seg.hi, IR.hi);
                if (lo > hi) continue;
                if (seg.value >= demand)
                    run += hi - lo + 1;
                else
                    run = 0;
                best = std::max(best, run);
            }
            return best;
        };

        for (const auto& cls : detail::type_classes(sub.pool, eligible)) {
            const EdgeIndex longest = std::min(IR.size(), max_run_at_least(cls.demand));
            std::set<EdgeIndex, std::greater<EdgeIndex>> length_set;
            for (std::size_t i : cls.members)
                if (sub.pool[i].length <= longest) length_set.insert(sub.pool[i].length);
            std::vector<EdgeIndex> lengths(length_set.begin(), length_set.end());  // descending
            if (lengths.empty()) continue;

            auto at_least = [&](EdgeIndex len) {
                long c = 0;
                for (std::size_t i : cls.members)
                    if (sub.pool[i].length >= len) ++c;
                return c;
            };
            std::vector<std::size_t> fillers;  // left-pool candidates for the boxes
            for (std::size_t i = 0; i < left_pool.size(); ++i)
                if (left_pool[i].weight == cls.weight && left_pool[i].demand == cls.demand)
                    fillers.push_back(i);

            std::vector<ArtificialGuess> alternatives;
            alternatives.push_back({{}, cls.weight, cls.demand});  // empty guess

            std::vector<std::pair<EdgeIndex, long>> profile;
            auto fillable = [&]() -> bool {
                std::vector<long> quotas;
                std::vector<Box> boxes;
                for (const auto& [len, n] : profile) {
                    quotas.push_back(n);
                    boxes.push_back(rightmost_subpath_box(IR, len, cls.demand, cls.weight, n));
                }
                auto ok = b_matching_assign_adj(fillers.size(), quotas,
                                                [&](std::size_t t, std::size_t b) {
                                                    return detail::assignable_to_box(
                                                        left_pool[fillers[t]], boxes[b]);
                                                });
                return ok.has_value();
            };
            auto dfs = [&](auto&& self, std::size_t next_len, long used_lengths, long used_count,
                           const Int& used_area) -> void {
                if (!budget_.exhaustive &&
                    static_cast<long>(alternatives.size()) > budget_.max_length_profiles_per_class)
                    return;
                if (!profile.empty() && fillable())
                    alternatives.push_back({profile, cls.weight, cls.demand});
                if (used_lengths == k_) return;
                for (std::size_t l = next_len; l < lengths.size(); ++l) {
                    // prefix bound: artificial tasks of length >= len never
                    // outnumber eligible tasks of length >= len
                    const long cap = at_least(lengths[l]) - used_count;
                    const Int piece = cls.demand * lengths[l];
                    for (long n = 1; n <= cap; ++n) {
                        if (used_area + piece * n > right_area) break;  // demand-area bound
                        profile.push_back({lengths[l], n});
                        self(self, l + 1, used_lengths + 1, used_count + n, used_area + piece * n);
                        profile.pop_back();
                    }
                }
            };
            dfs(dfs, 0, 0, 0, Int(0));
            if (alternatives.size() > 1) per_class.push_back(std::move(alternatives));
        }
        return per_class;
    }

    void try_middle_guess(const Subproblem& sub, const Interval& IL, const Interval& IR,
                          const std::vector<Task>& left_pool,
                          const std::vector<Task>& right_pool_base,
                          const std::vector<std::vector<MiddleBoxSet>>& middle_alternatives,
                          const std::vector<std::size_t>& mid_choice,
                          const std::vector<std::vector<ArtificialGuess>>& artificial_alternatives,
                          std::optional<SubSolution>& best) {
        std::vector<BoxedGuess> middle;
        for (std::size_t c = 0; c < middle_alternatives.size(); ++c)
            for (const auto& bg : middle_alternatives[c][mid_choice[c]].boxes) middle.push_back(bg);

        std::vector<Box> middle_plain;
        for (const auto& bg : middle) middle_plain.push_back(bg.box);
        auto reduced = try_subtract_boxes(sub.residual, middle_plain);
        if (!reduced) {
            ++stats_.discarded;
            return;
        }
        const CapacityProfile res_left = reduced->restricted(IL.lo, IL.hi);
        const CapacityProfile res_right = reduced->restricted(IR.lo, IR.hi);

        std::vector<std::size_t> art_choice(artificial_alternatives.size(), 0);
        auto loop_artificial = [&](auto&& self, std::size_t c) -> void {
            if (c == artificial_alternatives.size()) {
                try_artificial_guess(sub, IL, IR, left_pool, right_pool_base, middle, res_left,
                                     res_right, artificial_alternatives, art_choice, best);
                return;
            }
            for (std::size_t choice = 0; choice < artificial_alternatives[c].size(); ++choice) {
                art_choice[c] = choice;
                self(self, c + 1);
            }
            art_choice[c] = 0;
        };
        loop_artificial(loop_artificial, 0);
    }

    void try_artificial_guess(const Subproblem& sub, const Interval& IL, const Interval& IR,
                              const std::vector<Task>& left_pool,
                              const std::vector<Task>& right_pool_base,
                              const std::vector<BoxedGuess>& middle,
                              const CapacityProfile& res_left, const CapacityProfile& res_right,
                              const std::vector<std::vector<ArtificialGuess>>& artificial_alternatives,
                              const std::vector<std::size_t>& art_choice,
                              std::optional<SubSolution>& best) {
        std::vector<Task> artificial;
        std::vector<BoxedGuess> placeholder_boxes;
        for (std::size_t c = 0; c < artificial_alternatives.size(); ++c) {
            const auto& guess = artificial_alternatives[c][art_choice[c]];
            for (const auto& [len, n] : guess.profile) {
                placeholder_boxes.push_back(
                    {rightmost_subpath_box(IR, len, guess.demand, guess.weight, n), n});
                for (long copy = 0; copy < n; ++copy)
                    artificial.push_back(
                        make_artificial_task(guess.weight, guess.demand, len, IR, copy));
            }
        }

        // Split the inherited quotas between the children, pruned by each
        // side's assignable pool.
        std::vector<std::pair<long, long>> split_range;
        for (const auto& bg : sub.boxes) {
            long left_cap = 0, right_cap = 0;
            for (const auto& t : left_pool)
                if (detail::assignable_to_box(t, bg.box)) ++left_cap;
            for (const auto& t : right_pool_base)
                if (detail::assignable_to_box(t, bg.box)) ++right_cap;
            for (const auto& t : artificial)
                if (detail::assignable_to_box(t, bg.box)) ++right_cap;
            const long lo = std::max<long>(0, bg.count - right_cap);
            const long hi = std::min<long>(bg.count, left_cap);
            if (lo > hi) {
                ++stats_.discarded;
                return;
            }
            split_range.push_back({lo, hi});
        }

        long splits_used = 0;
        std::vector<long> left_quota(sub.boxes.size(), 0);
        auto loop_split = [&](auto&& self, std::size_t b) -> void {
            if (!budget_.exhaustive && splits_used >= budget_.max_splits_per_guess) return;
            if (b == sub.boxes.size()) {
                ++splits_used;
                evaluate_candidate(sub, IL, IR, left_pool, right_pool_base, middle, res_left,
                                   res_right, artificial, placeholder_boxes, left_quota, best);
                return;
            }
            for (long q = split_range[b].first; q <= split_range[b].second; ++q) {
                left_quota[b] = q;
                self(self, b + 1);
            }
        };
        loop_split(loop_split, 0);
    }

    void evaluate_candidate(const Subproblem& sub, const Interval& IL, const Interval& IR,
                            const std::vector<Task>& left_pool,
                            const std::vector<Task>& right_pool_base,
                            const std::vector<BoxedGuess>& middle, const CapacityProfile& res_left,
                            const CapacityProfile& res_right, const std::vector<Task>& artificial,
                            const std::vector<BoxedGuess>& placeholder_boxes,
                            const std::vector<long>& left_quota, std::optional<SubSolution>& best) {
        ++stats_.candidates;

        Subproblem left;
        left.interval = IL;
        left.residual = res_left;
        left.pool = left_pool;
        std::vector<long> inherited_left_pos, inherited_right_pos;
        for (std::size_t b = 0; b < sub.boxes.size(); ++b)
            if (left_quota[b] > 0) {
                inherited_left_pos.push_back(static_cast<long>(left.boxes.size()));
                left.boxes.push_back({sub.boxes[b].box, left_quota[b]});
            } else {
                inherited_left_pos.push_back(-1);
            }
        const std::size_t middle_offset = left.boxes.size();
        for (const auto& bg : middle) left.boxes.push_back(bg);
        const std::size_t placeholder_offset = left.boxes.size();
        for (const auto& bg : placeholder_boxes) left.boxes.push_back(bg);

        Subproblem right;
        right.interval = IR;
        right.residual = res_right;
        right.pool = right_pool_base;
        for (const auto& t : artificial) right.pool.push_back(t);
        for (std::size_t b = 0; b < sub.boxes.size(); ++b) {
            const long q = sub.boxes[b].count - left_quota[b];
            if (q > 0) {
                inherited_right_pos.push_back(static_cast<long>(right.boxes.size()));
                right.boxes.push_back({sub.boxes[b].box, q});
            } else {
                inherited_right_pos.push_back(-1);
            }
        }

        auto left_sol = solve(left);
        if (!left_sol) {
            ++stats_.discarded;
            return;
        }
        auto right_sol = solve(right);
        if (!right_sol) {
            ++stats_.discarded;
            return;
        }

        auto candidate = combine(sub, IR, middle, placeholder_boxes, artificial, left_quota,
                                 inherited_left_pos, inherited_right_pos, middle_offset,
                                 placeholder_offset, *left_sol, *right_sol);
        if (!candidate) {
            ++stats_.discarded;
            return;
        }
        if (trace_)
            (*trace_) << "accept interval=[" << sub.interval.lo << "," << sub.interval.hi
                      << "] level=" << level_of(sub.interval) << " objective="
                      << to_string(candidate->objective) << "\n";
        if (!best || candidate->objective > best->objective) best = std::move(candidate);
    }

    // Assembles the candidate: left schedule + middle-box fills scheduled
    // inside their boxes + right schedule with this level's placeholders
    // replaced by box-filling real tasks, placed inside the placeholder
    // paths. Inherited box contents merge across the children.
    std::optional<SubSolution> combine(const Subproblem& sub, const Interval& IR,
                                       const std::vector<BoxedGuess>& middle,
                                       const std::vector<BoxedGuess>& placeholder_boxes,
                                       const std::vector<Task>& artificial,
                                       const std::vector<long>& left_quota,
                                       const std::vector<long>& inherited_left_pos,
                                       const std::vector<long>& inherited_right_pos,
                                       std::size_t middle_offset, std::size_t placeholder_offset,
                                       const SubSolution& left_sol, const SubSolution& right_sol) {
        (void)left_quota;
        std::set<std::string> artificial_ids;
        for (const auto& t : artificial) artificial_ids.insert(t.id);

        SubSolution out;
        out.scheduled = left_sol.scheduled;
        out.roles = left_sol.roles;

        // Middle-box fills: leftmost feasible start inside pb(b) ∩ tw(i).
        Ratio middle_profit(0);
        for (std::size_t b = 0; b < middle.size(); ++b) {
            const auto& fills = left_sol.box_fills[middle_offset + b];
            middle_profit += middle[b].box.weight * Ratio(Int(fills.size()));
            for (const auto& t : fills) {
                const EdgeIndex start = std::max(middle[b].box.path_lo, t.window_lo);
                if (start + t.length - 1 > std::min(middle[b].box.path_hi, t.window_hi))
                    return std::nullopt;
                out.scheduled.push_back({t, start});
                out.roles.push_back(ScheduledRole::middle_fill);
            }
        }

        // Right schedule: keep everything except this level's placeholders.
        std::vector<Placement> scheduled_placeholders;
        for (std::size_t i = 0; i < right_sol.scheduled.size(); ++i) {
            const auto& pl = right_sol.scheduled[i];
            if (artificial_ids.count(pl.task.id)) {
                scheduled_placeholders.push_back(pl);
            } else {
                out.scheduled.push_back(pl);
                out.roles.push_back(right_sol.roles[i]);
            }
        }

        // Replace scheduled placeholders by box-filling real tasks.
        std::vector<std::pair<BoxedGuess, std::vector<Task>>> fills_for_replacement;
        for (std::size_t b = 0; b < placeholder_boxes.size(); ++b)
            fills_for_replacement.push_back(
                {placeholder_boxes[b], left_sol.box_fills[placeholder_offset + b]});
        auto replacement = replacement_map(scheduled_placeholders, fills_for_replacement, IR.lo);
        if (!replacement) return std::nullopt;
        for (std::size_t a = 0; a < scheduled_placeholders.size(); ++a) {
            const Task& real = (*replacement)[a];
            const EdgeIndex start = std::max(scheduled_placeholders[a].start, real.window_lo);
            if (start + real.length - 1 >
                std::min(scheduled_placeholders[a].end(), real.window_hi))
                return std::nullopt;
            out.scheduled.push_back({real, start});
            out.roles.push_back(ScheduledRole::replacement);
        }

        // Inherited boxes: contents merge across the children.
        out.box_fills.resize(sub.boxes.size());
        for (std::size_t b = 0; b < sub.boxes.size(); ++b) {
            if (inherited_left_pos[b] >= 0)
                for (const auto& t : left_sol.box_fills[static_cast<std::size_t>(inherited_left_pos[b])])
                    out.box_fills[b].push_back(t);
            if (inherited_right_pos[b] >= 0)
                for (const auto& t :
                     right_sol.box_fills[static_cast<std::size_t>(inherited_right_pos[b])])
                    out.box_fills[b].push_back(t);
        }

        for (const auto& pl : out.scheduled) out.objective += pl.task.weight;
        // Profit identity of the combine step.
        if (out.objective != left_sol.objective + middle_profit + right_sol.objective)
            throw std::logic_error("combine profit mismatch");

        // A used task may appear only once across the schedule and all boxes.
        std::set<std::string> used;
        for (const auto& pl : out.scheduled)
            if (!used.insert(pl.task.id).second) throw std::logic_error("task used twice");
        for (const auto& fills : out.box_fills)
            for (const auto& t : fills)
                if (!used.insert(t.id).second) throw std::logic_error("task used twice");

        // Feasibility against the residual; discard on violation.
        if (!dominates(demand_profile(out.scheduled, sub.interval.lo, sub.interval.hi), sub.residual))
            return std::nullopt;
        return out;
    }

    Ratio eps_;
    long k_;
    GuessBudget budget_;
    std::ostream* trace_;
    EdgeIndex root_size_ = 1;
    SolverStats stats_;
    std::unordered_map<std::string, std::optional<SubSolution>> memo_;
};

// Convenience entry point matching the subproblem contract directly.
inline std::optional<SubSolution> solve_subproblem(const Subproblem& sub, const Ratio& eps,
                                                   const GuessBudget& budget = GuessBudget::full(),
                                                   SolverStats* stats = nullptr) {
    EdgeIndex size = 1;
    while (size < sub.interval.size()) size *= 2;
    if (size != sub.interval.size())
        throw std::invalid_argument("subproblem interval size must be a power of two");
    RecursiveSolver solver(eps, budget);
    solver.set_root_size(size);  // level numbers relative to this subproblem
    auto result = solver.solve(sub);
    if (stats) *stats = solver.stats();
    return result;
}

// The root subproblem: pads the path to a power of two with zero-capacity
// edges, solves the instance and its left-right reflection (the two
// orientations of the factor-2 guess), and returns the better schedule.
struct RootSolution {
    Schedule schedule;  // original coordinates
    Ratio objective = Ratio(0);
    int orientation = 0;                 // 0 as given, 1 reflected
    std::vector<Placement> oriented;     // oriented coordinates, padded tree
    std::vector<ScheduledRole> roles;    // parallel to oriented
};

inline RootSolution solve_root_detailed(const Instance& inst, const Ratio& eps,
                                        const GuessBudget& budget = GuessBudget::full(),
                                        std::ostream* trace = nullptr,
                                        SolverStats* stats = nullptr) {
    if (stats) *stats = SolverStats{};
    RootSolution best;
    Ratio best_weight(-1);
    for (int orientation = 0; orientation < 2; ++orientation) {
        const Instance oriented = orientation == 0 ? inst : reflected(inst);
        EdgeIndex padded = 1;
        while (padded < oriented.m) padded *= 2;
        std::vector<ProfileSegment> segs(oriented.capacities.segments());
        if (padded > oriented.m) segs.push_back({oriented.m + 1, padded, Int(0)});

        Subproblem root;
        root.interval = {1, padded};
        root.residual = CapacityProfile::from_segments(1, padded, std::move(segs));
        root.pool = oriented.tasks;

        RecursiveSolver solver(eps, budget, trace);
        solver.set_root_size(padded);
        auto sol = solver.solve(root);
        if (stats) {
            stats->subproblems += solver.stats().subproblems;
            stats->memo_hits += solver.stats().memo_hits;
            stats->candidates += solver.stats().candidates;
            stats->discarded += solver.stats().discarded;
            stats->max_class_box_candidates = std::max(stats->max_class_box_candidates,
                                                       solver.stats().max_class_box_candidates);
        }
        if (!sol) continue;
        Schedule sched;
        Ratio weight(0);
        for (const auto& pl : sol->scheduled) {
            if (pl.task.artificial) throw std::logic_error("placeholder left in a root solution");
            EdgeIndex start = pl.start;
            if (orientation == 1) start = inst.m + 1 - (pl.start + pl.task.length - 1);
            sched.placements[pl.task.id] = start;
            weight += pl.task.weight;
        }
        if (weight > best_weight) {
            best_weight = weight;
            best.schedule = std::move(sched);
            best.objective = weight;
            best.orientation = orientation;
            best.oriented = sol->scheduled;
            best.roles = sol->roles;
        }
    }
    return best;
}

inline Schedule solve_root(const Instance& inst, const Ratio& eps,
                           const GuessBudget& budget = GuessBudget::full(),
                           std::ostream* trace = nullptr, SolverStats* stats = nullptr) {
    return solve_root_detailed(inst, eps, budget, trace, stats).schedule;
}

// Full pipeline: preprocessing branches, one recursion per branch, best
// recombination per (w_star, r) guess, evaluated in original weights.
struct ApproxResult {
    Schedule schedule;   // on the original instance
    Ratio objective = Ratio(0);
    Ratio w_star = Ratio(0);
    long r = 0;
    Ratio augmentation_bound = Ratio(1);  // 1 + 4*eps
    SolverStats stats;
};

inline ApproxResult approx_solve(const Instance& inst, const Ratio& eps,
                                 const GuessBudget& budget = GuessBudget::full(),
                                 std::ostream* trace = nullptr) {
    ApproxResult result;
    result.augmentation_bound = Ratio(1) + Ratio(4) * eps;
    const auto branches = preprocess(inst, eps);
    std::vector<Schedule> schedules;
    schedules.reserve(branches.size());
    for (const auto& branch : branches) {
        SolverStats stats;
        schedules.push_back(solve_root(branch.normalized.inst, eps, budget, trace, &stats));
        result.stats.subproblems += stats.subproblems;
        result.stats.memo_hits += stats.memo_hits;
        result.stats.candidates += stats.candidates;
        result.stats.discarded += stats.discarded;
        result.stats.max_class_box_candidates =
            std::max(result.stats.max_class_box_candidates, stats.max_class_box_candidates);
    }
    auto recombined = recombine_best(inst, branches, schedules);
    result.schedule = std::move(recombined.schedule);
    result.objective = recombined.weight;
    result.w_star = recombined.w_star;
    result.r = recombined.r;
    return result;
}

}  // namespace twufp
