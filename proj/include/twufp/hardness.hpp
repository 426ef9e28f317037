#pragma once

#include "twufp/instance.hpp"
#include "twufp/threedm.hpp"

#include <algorithm>

namespace twufp {

// The gadget number system: each node and hyperedge of a 3DM instance gets
// one integer built from powers of rho = max(29, 3q); the only four-element
// zero sums are the quadruples {x'_i, y'_j, z'_k, h'_l} of actual
// hyperedges. mu and A derive the task sizes of the reduction.
struct GadgetNumbers {
    Int rho;
    std::vector<Int> x;  // x'_i = i*rho + 1
    std::vector<Int> y;  // y'_j = j*rho^2 + 2
    std::vector<Int> z;  // z'_k = k*rho^3 + 4
    std::vector<Int> h;  // h'_l = -i*rho - j*rho^2 - k*rho^3 - 7
    Int mu;              // 1 + max 10|u'|
    Int A;               // 5*mu + 4
};

inline GadgetNumbers numbers_QK(const ThreeDM& K) {
    GadgetNumbers g;
    g.rho = std::max<Int>(Int(29), Int(3) * K.q);
    const Int rho2 = g.rho * g.rho;
    const Int rho3 = rho2 * g.rho;
    for (long i = 1; i <= K.q; ++i) {
        g.x.push_back(Int(i) * g.rho + 1);
        g.y.push_back(Int(i) * rho2 + 2);
        g.z.push_back(Int(i) * rho3 + 4);
    }
    Int max_abs = 0;
    for (const auto& e : K.hyperedges)
        g.h.push_back(-Int(e.x) * g.rho - Int(e.y) * rho2 - Int(e.z) * rho3 - 7);
    for (const auto& v : g.x) max_abs = std::max(max_abs, abs(v));
    for (const auto& v : g.y) max_abs = std::max(max_abs, abs(v));
    for (const auto& v : g.z) max_abs = std::max(max_abs, abs(v));
    for (const auto& v : g.h) max_abs = std::max(max_abs, abs(v));
    g.mu = 1 + 10 * max_abs;
    g.A = 5 * g.mu + 4;
    return g;
}

// Exhaustive verification that the only zero-sum quadruples are hyperedge
// quadruples; returns the first offending quadruple otherwise.
struct UniqueSumCheck {
    bool ok = true;
    std::vector<Int> counterexample;  // four numbers, empty when ok
};

inline UniqueSumCheck check_unique_sum(const ThreeDM& K, const GadgetNumbers& g,
                                       std::size_t max_elements = 40) {
    enum Kind { X, Y, Z, H };
    struct Entry {
        Int value;
        Kind kind;
        long index;  // 1-based node index or hyperedge position
    };
    std::vector<Entry> entries;
    for (long i = 0; i < K.q; ++i) {
        entries.push_back({g.x[static_cast<std::size_t>(i)], X, i + 1});
        entries.push_back({g.y[static_cast<std::size_t>(i)], Y, i + 1});
        entries.push_back({g.z[static_cast<std::size_t>(i)], Z, i + 1});
    }
    for (std::size_t l = 0; l < K.hyperedges.size(); ++l)
        entries.push_back({g.h[l], H, static_cast<long>(l)});
    if (entries.size() > max_elements)
        throw LimitsExceeded("unique-sum check limit exceeded");

    const std::size_t n = entries.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    const Entry* q[4] = {&entries[a], &entries[b], &entries[c], &entries[d]};
                    const Int sum = q[0]->value + q[1]->value + q[2]->value + q[3]->value;
                    bool is_edge_quadruple = false;
                    long xi = 0, yj = 0, zk = 0;
                    const Entry* he = nullptr;
                    int kinds_seen[4] = {0, 0, 0, 0};
                    for (const Entry* e : q) ++kinds_seen[e->kind];
                    if (kinds_seen[X] == 1 && kinds_seen[Y] == 1 && kinds_seen[Z] == 1 &&
                        kinds_seen[H] == 1) {
                        for (const Entry* e : q) {
                            if (e->kind == X) xi = e->index;
                            if (e->kind == Y) yj = e->index;
                            if (e->kind == Z) zk = e->index;
                            if (e->kind == H) he = e;
                        }
                        const auto& edge = K.hyperedges[static_cast<std::size_t>(he->index)];
                        is_edge_quadruple = edge.x == xi && edge.y == yj && edge.z == zk;
                    }
                    if ((sum == 0) != is_edge_quadruple)
                        return {false, {q[0]->value, q[1]->value, q[2]->value, q[3]->value}};
                }
    return {};
}

namespace detail {

inline EdgeIndex to_edge_index(const Int& v, const char* what) {
    if (v > Int(std::numeric_limits<EdgeIndex>::max() / 4))
        throw std::invalid_argument(std::string(what) + " too large for 64-bit edge indices");
    return static_cast<EdgeIndex>(v.convert_to<long long>());
}

}  // namespace detail

// Names of the reduction's tasks; every element u contributes t_L(u) and
// t_R(u).
inline std::string reduction_task_id(bool left, char side, long index) {
    return std::string(left ? "L:" : "R:") + side + std::to_string(index);
}

// The reduction: a path of (2A+1)q - 1 edges forming q intervals of 2A
// positive-capacity edges (4A+4 on the left half, 4A on the right half)
// separated by zero-capacity edges, and two unit-weight tasks per element of
// X, Y, Z and E. Every window spans the whole path.
inline Instance reduce_3dm_to_spanufp(const ThreeDM& K) {
    {
        auto violations = validate_threedm(K);
        if (!violations.empty()) throw std::invalid_argument("invalid 3DM: " + violations.front());
    }
    const GadgetNumbers g = numbers_QK(K);
    const EdgeIndex A = detail::to_edge_index(g.A, "A");
    const EdgeIndex m = (2 * A + 1) * K.q - 1;

    std::vector<ProfileSegment> segs;
    for (long k = 0; k < K.q; ++k) {
        const EdgeIndex base = k * (2 * A + 1);
        segs.push_back({base + 1, base + A, Int(4) * A + 4});
        segs.push_back({base + A + 1, base + 2 * A, Int(4) * A});
        if (k + 1 < K.q) segs.push_back({base + 2 * A + 1, base + 2 * A + 1, Int(0)});
    }

    std::vector<Task> tasks;
    auto add_pair = [&](char side, long index, const Int& number) {
        const EdgeIndex offset = detail::to_edge_index(abs(10 * number), "gadget number");
        const EdgeIndex ten_u = number < 0 ? -offset : offset;
        Task left;
        left.id = reduction_task_id(true, side, index);
        left.weight = Ratio(1);
        left.length = A - ten_u;
        left.demand = Int(A) + ten_u + 1;  // the +1 appears only on t_L
        left.window_lo = 1;
        left.window_hi = m;
        Task right;
        right.id = reduction_task_id(false, side, index);
        right.weight = Ratio(1);
        right.length = A + ten_u;
        right.demand = Int(A) - ten_u;
        right.window_lo = 1;
        right.window_hi = m;
        tasks.push_back(std::move(left));
        tasks.push_back(std::move(right));
    };
    for (long i = 1; i <= K.q; ++i) {
        add_pair('x', i, g.x[static_cast<std::size_t>(i - 1)]);
        add_pair('y', i, g.y[static_cast<std::size_t>(i - 1)]);
        add_pair('z', i, g.z[static_cast<std::size_t>(i - 1)]);
    }
    for (std::size_t l = 0; l < K.hyperedges.size(); ++l)
        add_pair('h', static_cast<long>(l), g.h[l]);

    return make_instance(m, CapacityProfile::from_segments(1, m, std::move(segs)), std::move(tasks));
}

// ---------------------------------------------------------------------------
// Constructive direction: a hypermatching of size p becomes a feasible
// schedule of exactly p + 7q tasks. Matched hyperedges fill one interval
// with all 8 tasks of their quadruple; every remaining interval takes a
// leftover quadruple and drops t_L(h) or t_R(h) by the sign of
// tau = x' + y' + z' + h'.
// ---------------------------------------------------------------------------

inline Schedule matching_to_schedule(const ThreeDM& K, const std::vector<std::size_t>& matching) {
    if (!is_hypermatching(K, matching))
        throw std::invalid_argument("not a hypermatching of the given instance");
    const GadgetNumbers g = numbers_QK(K);
    const EdgeIndex A = detail::to_edge_index(g.A, "A");

    Schedule sched;
    auto anchor_left = [&](long interval, char side, long index, const Int& number) {
        const EdgeIndex base = interval * (2 * A + 1);
        (void)number;
        sched.placements[reduction_task_id(true, side, index)] = base + 1;
    };
    auto anchor_right = [&](long interval, char side, long index, const Int& number) {
        const EdgeIndex base = interval * (2 * A + 1);
        const EdgeIndex ten_u = detail::to_edge_index(abs(10 * number), "gadget number");
        const EdgeIndex length = A + (number < 0 ? -ten_u : ten_u);
        sched.placements[reduction_task_id(false, side, index)] = base + 2 * A - length + 1;
    };

    std::vector<bool> used_x(static_cast<std::size_t>(K.q) + 1, false);
    auto used_y = used_x, used_z = used_x;
    std::vector<bool> used_edge(K.hyperedges.size(), false);

    std::vector<std::size_t> ordered(matching);
    std::sort(ordered.begin(), ordered.end());
    long interval = 0;
    for (std::size_t l : ordered) {
        const auto& e = K.hyperedges[l];
        anchor_left(interval, 'x', e.x, g.x[static_cast<std::size_t>(e.x - 1)]);
        anchor_left(interval, 'y', e.y, g.y[static_cast<std::size_t>(e.y - 1)]);
        anchor_left(interval, 'z', e.z, g.z[static_cast<std::size_t>(e.z - 1)]);
        anchor_left(interval, 'h', static_cast<long>(l), g.h[l]);
        anchor_right(interval, 'x', e.x, g.x[static_cast<std::size_t>(e.x - 1)]);
        anchor_right(interval, 'y', e.y, g.y[static_cast<std::size_t>(e.y - 1)]);
        anchor_right(interval, 'z', e.z, g.z[static_cast<std::size_t>(e.z - 1)]);
        anchor_right(interval, 'h', static_cast<long>(l), g.h[l]);
        used_x[static_cast<std::size_t>(e.x)] = true;
        used_y[static_cast<std::size_t>(e.y)] = true;
        used_z[static_cast<std::size_t>(e.z)] = true;
        used_edge[l] = true;
        ++interval;
    }

    std::vector<long> free_x, free_y, free_z;
    for (long i = 1; i <= K.q; ++i) {
        if (!used_x[static_cast<std::size_t>(i)]) free_x.push_back(i);
        if (!used_y[static_cast<std::size_t>(i)]) free_y.push_back(i);
        if (!used_z[static_cast<std::size_t>(i)]) free_z.push_back(i);
    }
    std::vector<std::size_t> free_edges;
    for (std::size_t l = 0; l < K.hyperedges.size(); ++l)
        if (!used_edge[l]) free_edges.push_back(l);

    for (std::size_t slot = 0; interval < K.q; ++interval, ++slot) {
        if (slot >= free_edges.size())
            throw std::invalid_argument("instance has fewer hyperedges than intervals to fill");
        const long xi = free_x[slot], yj = free_y[slot], zk = free_z[slot];
        const std::size_t l = free_edges[slot];
        const Int tau = g.x[static_cast<std::size_t>(xi - 1)] + g.y[static_cast<std::size_t>(yj - 1)] +
                        g.z[static_cast<std::size_t>(zk - 1)] + g.h[l];
        anchor_left(interval, 'x', xi, g.x[static_cast<std::size_t>(xi - 1)]);
        anchor_left(interval, 'y', yj, g.y[static_cast<std::size_t>(yj - 1)]);
        anchor_left(interval, 'z', zk, g.z[static_cast<std::size_t>(zk - 1)]);
        anchor_right(interval, 'x', xi, g.x[static_cast<std::size_t>(xi - 1)]);
        anchor_right(interval, 'y', yj, g.y[static_cast<std::size_t>(yj - 1)]);
        anchor_right(interval, 'z', zk, g.z[static_cast<std::size_t>(zk - 1)]);
        if (tau <= 0)
            anchor_left(interval, 'h', static_cast<long>(l), g.h[l]);  // drop t_R(h)
        else
            anchor_right(interval, 'h', static_cast<long>(l), g.h[l]);  // drop t_L(h)
    }
    return sched;
}

// ---------------------------------------------------------------------------
// Extraction direction: a feasible schedule yields a hypermatching of size
// at least |schedule| - 7q. Saturated intervals (8 tasks) carry exactly one
// hyperedge quadruple; anything contradicting that structure is reported as
// a structural violation (impossible for genuinely feasible schedules).
// ---------------------------------------------------------------------------

struct StructuralViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<std::size_t> schedule_to_matching(const ThreeDM& K, const Schedule& sched) {
    const Instance sigma = reduce_3dm_to_spanufp(K);
    const auto report = check_schedule(sigma, sched, Ratio(1));
    if (!report.feasible)
        throw std::invalid_argument("schedule is infeasible on the reduction instance");
    const GadgetNumbers g = numbers_QK(K);
    const EdgeIndex A = detail::to_edge_index(g.A, "A");

    std::vector<long> tasks_in(static_cast<std::size_t>(K.q), 0);
    std::vector<std::vector<std::string>> ids_in(static_cast<std::size_t>(K.q));
    for (const auto& [id, start] : sched.placements) {
        const Task& t = sigma.task_by_id(id);
        const long interval = static_cast<long>((start - 1) / (2 * A + 1));
        const EdgeIndex base = interval * (2 * A + 1);
        if (start <= base || start + t.length - 1 > base + 2 * A)
            throw StructuralViolation("task " + id + " crosses a zero-capacity separator");
        ++tasks_in[static_cast<std::size_t>(interval)];
        ids_in[static_cast<std::size_t>(interval)].push_back(id);
    }

    std::vector<std::size_t> matching;
    for (long k = 0; k < K.q; ++k) {
        if (tasks_in[static_cast<std::size_t>(k)] > 8)
            throw StructuralViolation("more than 8 tasks in one interval");
        if (tasks_in[static_cast<std::size_t>(k)] < 8) continue;
        long found = -1;
        for (const auto& id : ids_in[static_cast<std::size_t>(k)]) {
            if (id[0] != 'L' || id[2] != 'h') continue;
            const long l = std::stol(id.substr(3));
            bool has_right = false;
            for (const auto& other : ids_in[static_cast<std::size_t>(k)])
                has_right = has_right || other == reduction_task_id(false, 'h', l);
            if (!has_right)
                throw StructuralViolation("saturated interval lacks a full hyperedge pair");
            if (found >= 0) throw StructuralViolation("two hyperedges in one saturated interval");
            found = l;
        }
        if (found < 0) throw StructuralViolation("saturated interval without a hyperedge task");
        matching.push_back(static_cast<std::size_t>(found));
    }
    if (!is_hypermatching(K, matching))
        throw StructuralViolation("extracted hyperedges are not node-disjoint");
    return matching;
}

// Greedy maximal hypermatching; for 3DM-k instances its size is at least
// q / (3k - 2).
inline std::vector<std::size_t> greedy_matching_lower_bound(const ThreeDM& K) {
    if (!K.k_bound) throw std::invalid_argument("greedy lower bound needs a 3DM-k instance");
    {
        auto violations = validate_threedm(K);
        if (!violations.empty()) throw std::invalid_argument("invalid 3DM-k: " + violations.front());
    }
    std::vector<bool> ux(static_cast<std::size_t>(K.q) + 1, false);
    auto uy = ux, uz = ux;
    std::vector<std::size_t> matching;
    for (std::size_t l = 0; l < K.hyperedges.size(); ++l) {
        const auto& e = K.hyperedges[l];
        if (ux[static_cast<std::size_t>(e.x)] || uy[static_cast<std::size_t>(e.y)] ||
            uz[static_cast<std::size_t>(e.z)])
            continue;
        ux[static_cast<std::size_t>(e.x)] = uy[static_cast<std::size_t>(e.y)] =
            uz[static_cast<std::size_t>(e.z)] = true;
        matching.push_back(l);
    }
    return matching;
}

// ---------------------------------------------------------------------------
// Structured optimum of the reduction instance: intervals are independent
// across zero-capacity separators and hold 8 tasks exactly for hyperedge
// quadruples, 7 otherwise, so the optimum is 7q plus the maximum number of
// node-disjoint hyperedges. The search below enumerates hyperedge subsets
// directly (independent of the 3DM oracle) and certifies each improving
// candidate by building the schedule and checking feasibility exactly.
// ---------------------------------------------------------------------------

struct StructuredOpt {
    long value = 0;  // p + 7q
    std::vector<std::size_t> chosen;
    Schedule schedule;
};

inline StructuredOpt structured_span_opt(const ThreeDM& K, std::uint64_t max_subsets = 1u << 22) {
    if (K.hyperedges.size() >= 63 || (1ull << K.hyperedges.size()) > max_subsets)
        throw LimitsExceeded("too many hyperedges for the structured search");
    const Instance sigma = reduce_3dm_to_spanufp(K);

    StructuredOpt best;
    best.value = -1;
    std::vector<std::size_t> chosen;
    std::vector<bool> ux(static_cast<std::size_t>(K.q) + 1, false);
    auto uy = ux, uz = ux;

    auto consider = [&]() {
        const long p = static_cast<long>(chosen.size());
        if (7 * K.q + p <= best.value) return;
        Schedule sched = matching_to_schedule(K, chosen);
        if (static_cast<long>(sched.placements.size()) != p + 7 * K.q)
            throw std::logic_error("structured schedule has unexpected size");
        if (!check_schedule(sigma, sched, Ratio(1)).feasible)
            throw std::logic_error("structured schedule is infeasible");
        best.value = p + 7 * K.q;
        best.chosen = chosen;
        best.schedule = std::move(sched);
    };
    auto dfs = [&](auto&& self, std::size_t idx) -> void {
        if (chosen.size() + (K.hyperedges.size() - idx) <= static_cast<std::size_t>(
                std::max<long>(best.value - 7 * K.q, 0)) &&
            best.value >= 0)
            return;
        if (idx == K.hyperedges.size()) {
            consider();
            return;
        }
        const auto& e = K.hyperedges[idx];
        if (!ux[static_cast<std::size_t>(e.x)] && !uy[static_cast<std::size_t>(e.y)] &&
            !uz[static_cast<std::size_t>(e.z)]) {
            ux[static_cast<std::size_t>(e.x)] = uy[static_cast<std::size_t>(e.y)] =
                uz[static_cast<std::size_t>(e.z)] = true;
            chosen.push_back(idx);
            self(self, idx + 1);
            chosen.pop_back();
            ux[static_cast<std::size_t>(e.x)] = uy[static_cast<std::size_t>(e.y)] =
                uz[static_cast<std::size_t>(e.z)] = false;
        }
        self(self, idx + 1);
    };
    dfs(dfs, 0);
    return best;
}

}  // namespace twufp
