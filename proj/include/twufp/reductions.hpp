#pragma once

#include "twufp/instance.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace twufp {

// A preprocessed subinstance: weights are powers of 1+eps in [1, n/eps],
// demands are powers of 1+eps in [1, (n/eps)^(1/eps)) expressed in units of
// demand_unit (the instance itself stores exact integers), capacities are in
// [1, (n/eps)^(1/eps)) in the same units or 0. Task ids, lengths and windows
// survive unchanged, so schedules map back to the original instance by id.
struct NormalizedInstance {
    Instance inst;
    Ratio eps;
    long distinct_weights = 0;   // W
    long distinct_demands = 0;   // D
    Ratio demand_unit = Ratio(1);  // stored demand / demand_unit = conceptual power of 1+eps
    std::vector<std::string> back_map;  // surviving original task ids
};

// Identifies which guess a subinstance belongs to; solutions of branches
// sharing (w_star, r) are recombined by disjoint union.
struct PreprocessToken {
    Ratio w_star;
    long r = 0;
    long group = 0;
};

struct PreprocessBranch {
    NormalizedInstance normalized;
    PreprocessToken token;
};

// ---------------------------------------------------------------------------
// Profit rounding: discard profits outside [eps*w_star/n, w_star], rescale by
// the smallest kept profit and round down to powers of 1+eps.
// ---------------------------------------------------------------------------

inline Instance round_profits(const Instance& inst, const Ratio& eps, const Ratio& w_star) {
    if (eps <= Ratio(0) || eps > Ratio(1, 2))
        throw std::invalid_argument("round_profits requires 0 < eps <= 1/2");
    bool occurs = false;
    for (const auto& t : inst.tasks) occurs = occurs || t.weight == w_star;
    if (!occurs) throw std::invalid_argument("w_star must be a weight occurring in the instance");

    const Ratio n(static_cast<long>(inst.tasks.size()));
    const Ratio low = eps * w_star / n;
    std::vector<Task> kept;
    for (const auto& t : inst.tasks)
        if (t.weight <= w_star && t.weight >= low) kept.push_back(t);

    Ratio w_min = kept.front().weight;
    for (const auto& t : kept) w_min = std::min(w_min, t.weight);
    const Ratio base = Ratio(1) + eps;
    for (auto& t : kept) {
        const long q = floor_log_power(base, t.weight / w_min);
        t.weight = ratio_pow(base, q);
    }
    return make_instance(inst.m, inst.capacities, std::move(kept));
}

// ---------------------------------------------------------------------------
// Demand-range decomposition for one offset guess r: group tasks by demand
// range, zero the capacities no group task can use and cap the ones no group
// can exhaust. Gaps between ranges are dropped tasks.
// ---------------------------------------------------------------------------

namespace detail {

inline Instance gcd_canonical(Instance inst) {
    Int g = 0;
    for (const auto& t : inst.tasks) g = boost::multiprecision::gcd(g, t.demand);
    for (const auto& seg : inst.capacities.segments()) g = boost::multiprecision::gcd(g, seg.value);
    if (g > 1) {
        std::vector<ProfileSegment> segs;
        for (const auto& seg : inst.capacities.segments()) segs.push_back({seg.lo, seg.hi, seg.value / g});
        inst.capacities = CapacityProfile::from_segments(1, inst.m, std::move(segs));
        for (auto& t : inst.tasks) t.demand /= g;
    }
    return inst;
}

inline CapacityProfile clamp_capacities(const CapacityProfile& caps, const Int& zero_below,
                                        const Int& cap_at) {
    std::vector<ProfileSegment> segs;
    for (const auto& seg : caps.segments()) {
        Int v = seg.value;
        if (v < zero_below) v = 0;
        if (v > cap_at) v = cap_at;
        segs.push_back({seg.lo, seg.hi, v});
    }
    return CapacityProfile::from_segments(caps.span_lo(), caps.span_hi(), std::move(segs));
}

}  // namespace detail

inline std::vector<Instance> demand_range_split(const Instance& inst, const Ratio& eps, long r) {
    const long k = inv_eps(eps);
    if (r < 0 || r >= k) throw std::invalid_argument("range offset r must lie in [0, 1/eps - 1]");
    if (inst.tasks.empty()) return {};

    const Int n_over_eps = Int(static_cast<long>(inst.tasks.size())) * k;
    Int max_demand = 0;
    for (const auto& t : inst.tasks) max_demand = std::max(max_demand, t.demand);

    // Group j >= 1 covers [ (n/eps)^(r+1+(j-1)k), (n/eps)^(r+jk) ); group 0
    // covers [1, (n/eps)^r).
    std::vector<std::pair<Int, Int>> ranges;
    ranges.push_back({Int(1), int_pow(n_over_eps, r)});
    for (long j = 1;; ++j) {
        Int a = int_pow(n_over_eps, r + 1 + (j - 1) * k);
        Int b = int_pow(n_over_eps, r + j * k);
        ranges.push_back({a, b});
        if (a > max_demand) break;
    }

    std::vector<Instance> groups;
    const Int n(static_cast<long>(inst.tasks.size()));
    for (const auto& [a, b] : ranges) {
        std::vector<Task> members;
        for (const auto& t : inst.tasks)
            if (t.demand >= a && t.demand < b) members.push_back(t);
        if (members.empty()) {
            groups.push_back(make_instance(inst.m, detail::clamp_capacities(inst.capacities, a, n * b),
                                           {}));
            continue;
        }
        Int d_min = members.front().demand;
        for (const auto& t : members) d_min = std::min(d_min, t.demand);
        // Capacities below the smallest group demand host nothing; zeroing
        // them keeps the scaled capacity range at {0} union [1, ...).
        auto caps = detail::clamp_capacities(inst.capacities, std::max(a, d_min), n * b);
        groups.push_back(detail::gcd_canonical(make_instance(inst.m, std::move(caps), std::move(members))));
    }
    return groups;
}

// ---------------------------------------------------------------------------
// Demand rounding: replace each demand by the least power of 1+eps at least
// as large, capacities unchanged. Powers of 1+eps are irrational in integer
// units, so the result is expressed in a uniformly rescaled unit (all demands
// and capacities multiplied by one common factor, then gcd-reduced); this
// preserves every feasibility ratio exactly.
// ---------------------------------------------------------------------------

inline Instance round_demands(const Instance& inst, const Ratio& eps) {
    const long k = inv_eps(eps);
    for (const auto& t : inst.tasks)
        if (t.demand < 1) throw std::invalid_argument("round_demands requires demands >= 1");
    if (inst.tasks.empty()) return inst;

    const Ratio base = Ratio(1) + eps;
    std::vector<long> exponent;
    long q_max = 0;
    for (const auto& t : inst.tasks) {
        const long q = ceil_log_power(base, Ratio(t.demand));
        exponent.push_back(q);
        q_max = std::max(q_max, q);
    }
    const Int scale = int_pow(Int(k), q_max);
    Instance out = inst;
    for (std::size_t i = 0; i < out.tasks.size(); ++i)
        out.tasks[i].demand =
            int_pow(Int(k), q_max - exponent[i]) * int_pow(Int(k + 1), exponent[i]);
    std::vector<ProfileSegment> segs;
    for (const auto& seg : inst.capacities.segments()) segs.push_back({seg.lo, seg.hi, seg.value * scale});
    out.capacities = CapacityProfile::from_segments(1, inst.m, std::move(segs));
    return detail::gcd_canonical(std::move(out));
}

// ---------------------------------------------------------------------------
// Padding for identical time windows: double the path with zero-capacity
// edges on the right and extend every window over the new edges. Zero
// capacity hosts no demand, so the optimum is unchanged, while every
// solution of the padded instance is left constrained.
// ---------------------------------------------------------------------------

inline Instance pad_for_span(const Instance& inst) {
    if (!inst.is_span_ufp())
        throw std::invalid_argument("pad_for_span requires every window to be [1, m]");
    const EdgeIndex m2 = 2 * inst.m;
    std::vector<ProfileSegment> segs(inst.capacities.segments());
    segs.push_back({inst.m + 1, m2, Int(0)});
    Instance out;
    out.m = m2;
    out.capacities = CapacityProfile::from_segments(1, m2, std::move(segs));
    out.tasks = inst.tasks;
    for (auto& t : out.tasks) {
        t.window_lo = 1;
        t.window_hi = m2;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full preprocessing chain: enumerate every profit guess w_star and every
// range offset r, split into demand groups, and round demands up to powers
// of 1+eps. Each branch gets one extra (1+eps) factor on its capacities so
// the group's unrounded optimum stays feasible after the round-up; the
// recombined union then overloads the original capacities by at most
// (1+eps)(1+3eps) <= 1+4eps.
// ---------------------------------------------------------------------------

inline std::vector<PreprocessBranch> preprocess(const Instance& inst, const Ratio& eps) {
    // The (1+5eps)-approximation arithmetic of the chain needs eps <= 1/5;
    // the construction itself and its 1+4eps augmentation bound are sound
    // for every unit fraction eps <= 1/2, which callers do use.
    if (eps <= Ratio(0) || eps > Ratio(1, 2))
        throw std::invalid_argument("preprocess requires 0 < eps <= 1/2");
    const long k = inv_eps(eps);
    std::vector<PreprocessBranch> branches;
    if (inst.tasks.empty()) return branches;

    std::set<Ratio> weights;
    for (const auto& t : inst.tasks) weights.insert(t.weight);

    const Ratio base = Ratio(1) + eps;
    for (const Ratio& w_star : weights) {
        const Instance rounded = round_profits(inst, eps, w_star);
        for (long r = 0; r < k; ++r) {
            const auto groups = demand_range_split(rounded, eps, r);
            for (long j = 0; j < static_cast<long>(groups.size()); ++j) {
                const Instance& g = groups[static_cast<std::size_t>(j)];
                if (g.tasks.empty()) continue;

                Int d_min = g.tasks.front().demand;
                for (const auto& t : g.tasks) d_min = std::min(d_min, t.demand);
                std::vector<long> exponent;
                long q_max = 0;
                for (const auto& t : g.tasks) {
                    const long q = ceil_log_power(base, Ratio(t.demand, d_min));
                    exponent.push_back(q);
                    q_max = std::max(q_max, q);
                }

                // demand_i := d_min * k^(Q+1-q_i) * (k+1)^(q_i), capacity :=
                // u * k^Q * (k+1); in units of d_min * k^(Q+1) the demands are
                // exactly (1+eps)^(q_i) and capacities (1+eps) * u / d_min.
                Instance scaled = g;
                for (std::size_t i = 0; i < scaled.tasks.size(); ++i)
                    scaled.tasks[i].demand = d_min * int_pow(Int(k), q_max + 1 - exponent[i]) *
                                             int_pow(Int(k + 1), exponent[i]);
                const Int cap_scale = int_pow(Int(k), q_max) * (k + 1);
                std::vector<ProfileSegment> segs;
                for (const auto& seg : g.capacities.segments())
                    segs.push_back({seg.lo, seg.hi, seg.value * cap_scale});
                scaled.capacities = CapacityProfile::from_segments(1, g.m, std::move(segs));

                Int unit_den = d_min * int_pow(Int(k), q_max + 1);
                Int common = 0;
                for (const auto& t : scaled.tasks) common = boost::multiprecision::gcd(common, t.demand);
                for (const auto& seg : scaled.capacities.segments())
                    common = boost::multiprecision::gcd(common, seg.value);
                if (common > 1) {
                    scaled = detail::gcd_canonical(std::move(scaled));
                    // demand_unit shrinks by the same factor
                }

                NormalizedInstance norm;
                norm.inst = std::move(scaled);
                norm.eps = eps;
                norm.demand_unit = common > 1 ? Ratio(unit_den, common) : Ratio(unit_den);
                std::set<Ratio> ws;
                std::set<Int> ds;
                for (const auto& t : norm.inst.tasks) {
                    ws.insert(t.weight);
                    ds.insert(t.demand);
                    norm.back_map.push_back(t.id);
                }
                norm.distinct_weights = static_cast<long>(ws.size());
                norm.distinct_demands = static_cast<long>(ds.size());
                branches.push_back({std::move(norm), {w_star, r, j}});
            }
        }
    }
    return branches;
}

// Takes the best disjoint union of per-branch schedules over guesses sharing
// one (w_star, r) pair, evaluated in original weights.
struct Recombined {
    Schedule schedule;
    Ratio weight = Ratio(0);
    Ratio w_star = Ratio(0);
    long r = 0;
};

inline Recombined recombine_best(const Instance& original,
                                 const std::vector<PreprocessBranch>& branches,
                                 const std::vector<Schedule>& per_branch) {
    if (branches.size() != per_branch.size())
        throw std::invalid_argument("one schedule per branch required");
    std::map<std::pair<Ratio, long>, Schedule> unions;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        auto& u = unions[{branches[i].token.w_star, branches[i].token.r}];
        for (const auto& [id, start] : per_branch[i].placements) {
            if (u.placements.count(id))
                throw std::logic_error("task scheduled by two groups of one guess");
            u.placements[id] = start;
        }
    }
    Recombined best;
    bool first = true;
    for (const auto& [key, sched] : unions) {
        const Ratio w = solution_weight(original, sched);
        if (first || w > best.weight) {
            first = false;
            best.schedule = sched;
            best.weight = w;
            best.w_star = key.first;
            best.r = key.second;
        }
    }
    return best;
}

}  // namespace twufp
