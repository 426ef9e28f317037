#pragma once

#include "twufp/instance.hpp"
#include "twufp/threedm.hpp"

#include <cstdint>
#include <set>

namespace twufp {

// SplitMix64: deterministic across platforms, unlike the standard library's
// distributions. Generation quality is irrelevant here; reproducibility is.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform-ish in [0, n); modulo bias is acceptable for test generation.
    std::int64_t below(std::int64_t n) {
        if (n <= 0) throw std::invalid_argument("below() needs a positive bound");
        return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n));
    }

    std::int64_t in(std::int64_t lo, std::int64_t hi) { return lo + below(hi - lo + 1); }

private:
    std::uint64_t state_;
};

enum class InstanceKind { general, span, ufp_degenerate };

struct RandomInstanceParams {
    long n = 5;
    EdgeIndex m = 8;
    long max_capacity = 8;
    long max_demand = 4;
    long max_weight = 9;
    long max_length = 0;  // 0: up to m
};

// Pure function of (kind, params, seed).
inline Instance generate_instance(InstanceKind kind, const RandomInstanceParams& params,
                                  std::uint64_t seed) {
    if (params.n < 0 || params.m < 1 || params.max_capacity < 0 || params.max_demand < 1 ||
        params.max_weight < 1)
        throw std::invalid_argument("invalid generator parameters");
    DeterministicRng rng(seed);

    // Piecewise-constant capacities with a handful of random breakpoints.
    const long segments = static_cast<long>(1 + rng.below(std::min<EdgeIndex>(params.m, 6)));
    std::set<EdgeIndex> cuts;
    while (static_cast<long>(cuts.size()) < segments - 1) cuts.insert(rng.in(2, params.m));
    std::vector<ProfileSegment> segs;
    EdgeIndex lo = 1;
    auto emit = [&](EdgeIndex hi) {
        segs.push_back({lo, hi, Int(rng.below(params.max_capacity + 1))});
        lo = hi + 1;
    };
    for (EdgeIndex cut : cuts) emit(cut - 1);
    emit(params.m);

    std::vector<Task> tasks;
    const EdgeIndex max_len = params.max_length > 0
                                  ? std::min<EdgeIndex>(params.max_length, params.m)
                                  : params.m;
    for (long i = 1; i <= params.n; ++i) {
        Task t;
        t.id = "t" + std::to_string(i);
        t.demand = Int(1 + rng.below(params.max_demand));
        t.weight = Ratio(Int(1 + rng.below(params.max_weight)));
        t.length = 1 + rng.below(max_len);
        if (kind == InstanceKind::span) {
            t.window_lo = 1;
            t.window_hi = params.m;
        } else {
            t.window_lo = rng.in(1, params.m - t.length + 1);
            if (kind == InstanceKind::ufp_degenerate)
                t.window_hi = t.window_lo + t.length - 1;
            else
                t.window_hi = rng.in(t.window_lo + t.length - 1, params.m);
        }
        tasks.push_back(std::move(t));
    }
    return make_instance(params.m, CapacityProfile::from_segments(1, params.m, std::move(segs)),
                         std::move(tasks));
}

// Random 3DM-k instance: every node covered at least once, occurrences
// capped at k, no duplicate hyperedges, |E| >= q.
inline ThreeDM generate_threedm(long q, long k, long extra_edges, std::uint64_t seed) {
    if (q < 1 || k < 1 || extra_edges < 0)
        throw std::invalid_argument("invalid 3DM generator parameters");
    DeterministicRng rng(seed);
    ThreeDM K;
    K.q = q;
    K.k_bound = k;
    std::vector<long> occ_x(static_cast<std::size_t>(q) + 1, 0);
    auto occ_y = occ_x, occ_z = occ_x;
    std::set<std::tuple<long, long, long>> seen;

    auto pick = [&](std::vector<long>& occ, bool prefer_uncovered) -> long {
        std::vector<long> pool;
        for (long i = 1; i <= q; ++i)
            if (prefer_uncovered ? occ[static_cast<std::size_t>(i)] == 0
                                 : occ[static_cast<std::size_t>(i)] < k)
                pool.push_back(i);
        if (pool.empty()) return 0;
        return pool[static_cast<std::size_t>(rng.below(static_cast<long>(pool.size())))];
    };
    auto add = [&](long x, long y, long z) -> bool {
        if (x == 0 || y == 0 || z == 0) return false;
        if (!seen.insert({x, y, z}).second) return false;
        K.hyperedges.push_back({x, y, z});
        ++occ_x[static_cast<std::size_t>(x)];
        ++occ_y[static_cast<std::size_t>(y)];
        ++occ_z[static_cast<std::size_t>(z)];
        return true;
    };

    // Cover every node at least once, preferring uncovered partners.
    long guard = 0;
    while (guard++ < 64 * q) {
        long x = pick(occ_x, true), y = pick(occ_y, true), z = pick(occ_z, true);
        if (x == 0 && y == 0 && z == 0) break;
        if (x == 0) x = pick(occ_x, false);
        if (y == 0) y = pick(occ_y, false);
        if (z == 0) z = pick(occ_z, false);
        add(x, y, z);
    }
    for (long e = 0; e < extra_edges; ++e) {
        for (int attempt = 0; attempt < 32; ++attempt)
            if (add(pick(occ_x, false), pick(occ_y, false), pick(occ_z, false))) break;
    }
    auto violations = validate_threedm(K);
    if (!violations.empty())
        throw std::logic_error("3DM generator produced an invalid instance: " + violations.front());
    return K;
}

}  // namespace twufp
