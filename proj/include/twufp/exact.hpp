#pragma once

#include "twufp/instance.hpp"
#include "twufp/threedm.hpp"
#include "twufp/tree.hpp"

#include <algorithm>
#include <cstdint>

namespace twufp {

// The oracles refuse instances beyond these limits instead of running
// unbounded; max_steps caps search-tree nodes.
struct OracleLimits {
    long max_tasks = 10;
    EdgeIndex max_edges = 64;
    std::uint64_t max_steps = 200'000'000;
};

namespace detail {

struct OracleCandidate {
    Ratio value = Ratio(0);
    std::vector<std::pair<std::string, EdgeIndex>> placements;  // sorted by id

    // Deterministic tie-break: lexicographic on (task-id set, starts).
    bool better_than(const OracleCandidate& other) const {
        if (value != other.value) return value > other.value;
        std::vector<std::string> ids_a, ids_b;
        std::vector<EdgeIndex> starts_a, starts_b;
        for (const auto& [id, s] : placements) {
            ids_a.push_back(id);
            starts_a.push_back(s);
        }
        for (const auto& [id, s] : other.placements) {
            ids_b.push_back(id);
            starts_b.push_back(s);
        }
        if (ids_a != ids_b) return ids_a < ids_b;
        return starts_a < starts_b;
    }
};

class BruteForceSearch {
public:
    BruteForceSearch(const Instance& inst, const OracleLimits& limits,
                     const IntervalTree* lc_tree)
        : inst_(inst), limits_(limits), lc_tree_(lc_tree) {
        if (static_cast<long>(inst.tasks.size()) > limits.max_tasks)
            throw LimitsExceeded("oracle limit exceeded: too many tasks");
        if (inst.m > limits.max_edges)
            throw LimitsExceeded("oracle limit exceeded: too many edges");
        order_.resize(inst.tasks.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            const Task& ta = inst.tasks[a];
            const Task& tb = inst.tasks[b];
            if (ta.weight != tb.weight) return ta.weight > tb.weight;
            return ta.id < tb.id;
        });
        suffix_weight_.assign(order_.size() + 1, Ratio(0));
        for (std::size_t i = order_.size(); i-- > 0;)
            suffix_weight_[i] = suffix_weight_[i + 1] + effective_weight(inst.tasks[order_[i]]);
        residual_.assign(static_cast<std::size_t>(inst.m) + 1, Int(0));
        for (const auto& seg : inst.capacities.segments())
            for (EdgeIndex e = seg.lo; e <= seg.hi; ++e)
                residual_[static_cast<std::size_t>(e)] = seg.value;
    }

    OracleCandidate run() {
        current_.placements.clear();
        current_.value = Ratio(0);
        best_ = OracleCandidate{};
        dfs(0);
        return best_;
    }

private:
    // Artificial tasks carry no profit; the oracle may still place them.
    static Ratio effective_weight(const Task& t) { return t.artificial ? Ratio(0) : t.weight; }

    void tick() {
        if (++steps_ > limits_.max_steps)
            throw LimitsExceeded("oracle limit exceeded: search step budget");
    }

    bool fits(const Task& t, EdgeIndex start) const {
        for (EdgeIndex e = start; e <= start + t.length - 1; ++e)
            if (residual_[static_cast<std::size_t>(e)] < t.demand) return false;
        return true;
    }

    void apply(const Task& t, EdgeIndex start, int sign) {
        for (EdgeIndex e = start; e <= start + t.length - 1; ++e)
            residual_[static_cast<std::size_t>(e)] += sign > 0 ? -t.demand : t.demand;
    }

    void dfs(std::size_t idx) {
        tick();
        if (current_.value + suffix_weight_[idx] < best_.value) return;
        if (idx == order_.size()) {
            OracleCandidate cand = current_;
            std::sort(cand.placements.begin(), cand.placements.end());
            if (!have_best_ || cand.better_than(best_)) {
                best_ = std::move(cand);
                have_best_ = true;
            }
            return;
        }
        const Task& t = inst_.tasks[order_[idx]];
        const EdgeIndex last_start = t.window_hi - t.length + 1;
        for (EdgeIndex s = t.window_lo; s <= last_start; ++s) {
            if (lc_tree_ && !placement_left_constrained(*lc_tree_, t, s)) continue;
            if (!fits(t, s)) continue;
            apply(t, s, +1);
            current_.placements.push_back({t.id, s});
            current_.value += effective_weight(t);
            dfs(idx + 1);
            current_.value -= effective_weight(t);
            current_.placements.pop_back();
            apply(t, s, -1);
        }
        dfs(idx + 1);  // skip t
    }

    const Instance& inst_;
    const OracleLimits& limits_;
    const IntervalTree* lc_tree_;
    std::vector<std::size_t> order_;
    std::vector<Ratio> suffix_weight_;
    std::vector<Int> residual_;
    OracleCandidate current_;
    OracleCandidate best_;
    bool have_best_ = false;
    std::uint64_t steps_ = 0;
};

}  // namespace detail

// Exact maximum over all task subsets and all start positions; feasibility
// via the exact checker at augmentation 1.
inline std::pair<Ratio, Schedule> brute_force_opt(const Instance& inst,
                                                  const OracleLimits& limits = {}) {
    detail::BruteForceSearch search(inst, limits, nullptr);
    auto best = search.run();
    Schedule sched;
    for (auto& [id, s] : best.placements) sched.placements[id] = s;
    return {best.value, sched};
}

// Exact maximum restricted to left-constrained schedules.
inline std::pair<Ratio, Schedule> brute_force_left_constrained_opt(const Instance& inst,
                                                                   const IntervalTree& tree,
                                                                   const OracleLimits& limits = {}) {
    detail::BruteForceSearch search(inst, limits, &tree);
    auto best = search.run();
    Schedule sched;
    for (auto& [id, s] : best.placements) sched.placements[id] = s;
    return {best.value, sched};
}

// Exact maximum 3-dimensional matching by exhaustive search with pruning on
// shared nodes and on the remaining-edge count.
inline std::pair<long, std::vector<std::size_t>> exact_3dm(const ThreeDM& K,
                                                           const OracleLimits& limits = {}) {
    if (static_cast<long>(K.hyperedges.size()) > std::max<long>(limits.max_tasks, 24))
        throw LimitsExceeded("oracle limit exceeded: too many hyperedges");
    std::vector<bool> ux(static_cast<std::size_t>(K.q) + 1, false);
    auto uy = ux, uz = ux;
    std::vector<std::size_t> current, best;
    std::uint64_t steps = 0;

    auto dfs = [&](auto&& self, std::size_t idx) -> void {
        if (++steps > limits.max_steps)
            throw LimitsExceeded("oracle limit exceeded: search step budget");
        if (current.size() + (K.hyperedges.size() - idx) <= best.size()) return;
        if (idx == K.hyperedges.size()) {
            if (current.size() > best.size()) best = current;
            return;
        }
        const auto& h = K.hyperedges[idx];
        if (!ux[h.x] && !uy[h.y] && !uz[h.z]) {
            ux[h.x] = uy[h.y] = uz[h.z] = true;
            current.push_back(idx);
            self(self, idx + 1);
            current.pop_back();
            ux[h.x] = uy[h.y] = uz[h.z] = false;
        }
        self(self, idx + 1);
    };
    dfs(dfs, 0);
    return {static_cast<long>(best.size()), best};
}

}  // namespace twufp
