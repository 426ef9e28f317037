#pragma once

#include "twufp/core.hpp"
#include "twufp/profile.hpp"

#include <limits>
#include <unordered_map>

namespace twufp {

// A twUFP instance: a path of m capacitated edges and a set of tasks.
// Immutable by convention after construction; every operation is pure.
struct Instance {
    EdgeIndex m = 0;
    CapacityProfile capacities;  // span [1, m]
    std::vector<Task> tasks;

    const Task& task_by_id(const std::string& id) const {
        for (const auto& t : tasks)
            if (t.id == id) return t;
        throw std::invalid_argument("unknown task id: " + id);
    }

    bool is_span_ufp() const {
        for (const auto& t : tasks)
            if (t.window_lo != 1 || t.window_hi != m) return false;
        return true;
    }

    Int max_capacity() const { return capacities.max_value(); }
};

inline Instance make_instance(EdgeIndex m, CapacityProfile capacities, std::vector<Task> tasks) {
    Instance inst;
    inst.m = m;
    inst.capacities = std::move(capacities);
    inst.tasks = std::move(tasks);
    if (inst.capacities.span_lo() != 1 || inst.capacities.span_hi() != m)
        throw std::invalid_argument("capacity profile must cover edges 1..m");
    return inst;
}

// Violations are data, not exceptions: an empty list means every instance
// and task invariant holds; each entry names the offending task or edge.
inline std::vector<std::string> validate_instance(const Instance& inst) {
    std::vector<std::string> violations;
    if (inst.m < 1) violations.push_back("edge count must be at least 1");
    if (inst.capacities.span_lo() != 1 || inst.capacities.span_hi() != inst.m)
        violations.push_back("capacity profile does not cover edges 1..m");
    for (const auto& seg : inst.capacities.segments())
        if (seg.value < 0)
            violations.push_back("negative capacity on edges " + std::to_string(seg.lo) + ".." +
                                 std::to_string(seg.hi));
    std::unordered_map<std::string, int> seen;
    for (const auto& t : inst.tasks) {
        if (++seen[t.id] == 2) violations.push_back("duplicate task id " + t.id);
        if (t.demand < 1) violations.push_back("task " + t.id + ": nonpositive demand");
        if (t.weight <= Ratio(0)) violations.push_back("task " + t.id + ": nonpositive weight");
        if (t.length < 1) violations.push_back("task " + t.id + ": nonpositive length");
        if (t.length > inst.m) violations.push_back("task " + t.id + ": length exceeds edge count");
        if (t.window_lo < 1 || t.window_hi > inst.m || t.window_lo > t.window_hi)
            violations.push_back("task " + t.id + ": window outside 1..m or empty");
        else if (t.window_size() < t.length)
            violations.push_back("task " + t.id + ": window shorter than length");
    }
    return violations;
}

// Feasibility verdict of a schedule against an augmentation factor.
// max_overload_ratio = max over edges of load(e)/u(e) with 0/0 = 0 and
// positive/0 = infinity (flagged); feasible iff the ratio is at most the
// declared augmentation factor.
struct FeasibilityReport {
    bool feasible = true;
    Ratio max_overload_ratio = Ratio(0);
    bool ratio_infinite = false;
    EdgeIndex worst_edge = 0;
};

// Resolves a schedule against the instance, validating ids and windows.
inline std::vector<Placement> placements_of(const Instance& inst, const Schedule& sched) {
    std::vector<Placement> placed;
    placed.reserve(sched.placements.size());
    for (const auto& [id, start] : sched.placements) {
        const Task& t = inst.task_by_id(id);
        if (start < t.window_lo || start + t.length - 1 > t.window_hi)
            throw std::invalid_argument("task " + id + ": placement outside its window");
        if (start + t.length - 1 > inst.m)
            throw std::invalid_argument("task " + id + ": placement runs past the last edge");
        placed.push_back({t, start});
    }
    return placed;
}

// Exact feasibility check by breakpoint sweep (never per-edge iteration):
// load(e) <= augmentation * u(e) for every edge e.
inline FeasibilityReport check_placements(const std::vector<Placement>& placed,
                                          const CapacityProfile& capacities,
                                          const Ratio& augmentation = Ratio(1)) {
    if (augmentation < Ratio(1)) throw std::invalid_argument("augmentation factor must be >= 1");
    const auto load = demand_profile(placed, capacities.span_lo(), capacities.span_hi());
    FeasibilityReport report;
    load.merge_walk(capacities, [&](EdgeIndex lo, EdgeIndex, const Int& l, const Int& u) {
        if (l == 0) return;  // 0/0 = 0 and 0/u = 0 never dominate
        if (u == 0) {
            if (!report.ratio_infinite) {
                report.ratio_infinite = true;
                report.worst_edge = lo;
            }
            return;
        }
        if (report.ratio_infinite) return;
        Ratio ratio(l, u);
        if (ratio > report.max_overload_ratio) {
            report.max_overload_ratio = ratio;
            report.worst_edge = lo;
        }
    });
    report.feasible = !report.ratio_infinite && report.max_overload_ratio <= augmentation;
    if (report.ratio_infinite) report.max_overload_ratio = Ratio(0);  // the flag carries infinity
    return report;
}

inline FeasibilityReport check_schedule(const Instance& inst, const Schedule& sched,
                                        const Ratio& augmentation = Ratio(1)) {
    return check_placements(placements_of(inst, sched), inst.capacities, augmentation);
}

// Left-right reflection of the instance: edge e maps to m + 1 - e.
inline Instance reflected(const Instance& inst) {
    Instance out;
    out.m = inst.m;
    std::vector<ProfileSegment> segs;
    for (const auto& seg : inst.capacities.segments())
        segs.push_back({inst.m + 1 - seg.hi, inst.m + 1 - seg.lo, seg.value});
    out.capacities = CapacityProfile::from_segments(1, inst.m, std::move(segs));
    out.tasks = inst.tasks;
    for (auto& t : out.tasks) {
        const EdgeIndex lo = inst.m + 1 - t.window_hi;
        const EdgeIndex hi = inst.m + 1 - t.window_lo;
        t.window_lo = lo;
        t.window_hi = hi;
    }
    return out;
}

// Sum of the weights of placed, non-artificial tasks; placeholders count 0.
inline Ratio solution_weight(const Instance& inst, const Schedule& sched) {
    Ratio total(0);
    for (const auto& [id, start] : sched.placements) {
        (void)start;
        const Task& t = inst.task_by_id(id);
        if (!t.artificial) total += t.weight;
    }
    return total;
}

}  // namespace twufp
