#include "twufp/grouping.hpp"
#include "twufp/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace twufp;

namespace {

Task typed_task(std::string id, long demand, long weight, EdgeIndex length, EdgeIndex lo,
                EdgeIndex hi) {
    return Task{std::move(id), Int(demand), Ratio(Int(weight)), length, lo, hi, false};
}

// Same-type tasks placed so that every path contains the edge f.
std::vector<Placement> random_crossing_set(DeterministicRng& rng, long count, EdgeIndex span,
                                           EdgeIndex f, long demand, long weight) {
    std::vector<Placement> placed;
    for (long i = 0; i < count; ++i) {
        const EdgeIndex start_lo = std::max<EdgeIndex>(1, f - rng.below(4));
        const EdgeIndex start = rng.in(start_lo, f);
        const EdgeIndex end = rng.in(f, std::min<EdgeIndex>(span, f + rng.below(4)));
        const EdgeIndex length = end - start + 1;
        Task t = typed_task("c" + std::to_string(i), demand, weight, length, 1, span);
        placed.push_back({std::move(t), start});
    }
    return placed;
}

// Same-type tasks scheduled inside I with windows containing I.
std::vector<Placement> random_interval_set(DeterministicRng& rng, long count, const Interval& I,
                                           long demand, long weight) {
    std::vector<Placement> placed;
    for (long i = 0; i < count; ++i) {
        const EdgeIndex length = 1 + rng.below(I.size());
        const EdgeIndex start = rng.in(I.lo, I.hi - length + 1);
        Task t = typed_task("h" + std::to_string(i), demand, weight, length, I.lo, I.hi);
        placed.push_back({std::move(t), start});
    }
    return placed;
}

}  // namespace

TEST_CASE("fits_in_box: examples") {
    Box box{2, 4, Int(2), Int(2), Ratio(1)};
    REQUIRE(fits_in_box({}, box));

    Task good = typed_task("a", 2, 1, 3, 1, 6);
    REQUIRE(fits_in_box({good}, box));

    Task narrow = typed_task("b", 2, 1, 3, 1, 3);  // window cuts the path to 2 edges
    REQUIRE_FALSE(fits_in_box({narrow}, box));

    Task wrong_weight = typed_task("c", 2, 9, 3, 1, 6);
    REQUIRE_FALSE(fits_in_box({wrong_weight}, box));

    // Demand sum above the height fails even when each member is compatible.
    REQUIRE_FALSE(fits_in_box({good, good}, box));
}

TEST_CASE("fits_in_box is monotone under task removal") {
    DeterministicRng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto placed = random_crossing_set(rng, 1 + rng.below(5), 10, 5, 2, 3);
        std::vector<Task> tasks;
        for (auto& pl : placed) tasks.push_back(pl.task);
        Box box{rng.in(1, 5), rng.in(5, 10), Int(2) * rng.in(1, 5), Int(2), Ratio(3)};
        if (!fits_in_box(tasks, box)) continue;
        for (std::size_t drop = 0; drop < tasks.size(); ++drop) {
            auto smaller = tasks;
            smaller.erase(smaller.begin() + static_cast<long>(drop));
            REQUIRE(fits_in_box(smaller, box));
        }
    }
}

TEST_CASE("linear grouping: small sets become their own boxes") {
    DeterministicRng rng(32);
    auto placed = random_crossing_set(rng, 2, 10, 5, 3, 2);
    auto result = linear_grouping_boxes(placed, Ratio(1, 2));
    REQUIRE(result.boxes.size() == 2);
    REQUIRE(result.kept.size() == 2);
    for (std::size_t b = 0; b < result.boxes.size(); ++b) {
        REQUIRE(result.boxes[b].count == 1);
        const auto& box = result.boxes[b].box;
        const auto& pl = placed[result.parts[b][0]];
        REQUIRE(box.path_lo == pl.start);
        REQUIRE(box.path_hi == pl.end());
        REQUIRE(box.height == pl.task.demand);
    }
}

TEST_CASE("linear grouping: mixed types or no common edge are rejected") {
    auto a = Placement{typed_task("a", 2, 1, 2, 1, 6), 1};
    auto b = Placement{typed_task("b", 3, 1, 2, 1, 6), 1};
    REQUIRE_THROWS_AS(linear_grouping_boxes({a, b}, Ratio(1, 2)), std::invalid_argument);
    auto c = Placement{typed_task("c", 2, 1, 2, 1, 6), 1};
    auto d = Placement{typed_task("d", 2, 1, 2, 1, 6), 4};  // [4,5] vs [1,2]
    REQUIRE_THROWS_AS(linear_grouping_boxes({c, d}, Ratio(1, 2)), std::invalid_argument);
}

TEST_CASE("linear grouping: lemma properties on random inputs") {
    DeterministicRng rng(33);
    for (int trial = 0; trial < 300; ++trial) {
        const long inv = 2 + rng.below(3);  // eps in {1/2, 1/3, 1/4}
        const Ratio eps(1, inv);
        const long count = 1 + rng.below(40);
        auto placed = random_crossing_set(rng, count, 12, 6, 1 + rng.below(3), 1 + rng.below(4));
        auto result = linear_grouping_boxes(placed, eps);

        REQUIRE(static_cast<long>(result.boxes.size()) <= inv * inv);

        // Reservation dominated by the tasks' own demand profile.
        std::vector<Box> boxes;
        for (const auto& bg : result.boxes) boxes.push_back(bg.box);
        REQUIRE(dominates(reservation_profile(boxes, 1, 12), demand_profile(placed, 1, 12)));

        // Each part fits its box and the partition covers exactly the kept set.
        std::set<std::size_t> seen;
        for (std::size_t b = 0; b < result.boxes.size(); ++b) {
            std::vector<Task> members;
            for (std::size_t i : result.parts[b]) {
                members.push_back(placed[i].task);
                REQUIRE(seen.insert(i).second);
            }
            REQUIRE(static_cast<long>(members.size()) == result.boxes[b].count);
            REQUIRE(fits_in_box(members, result.boxes[b].box));
        }
        REQUIRE(seen == std::set<std::size_t>(result.kept.begin(), result.kept.end()));

        // Kept-fraction bound from the construction, with constant 6.
        if (count > inv * inv) {
            const long dropped = count - static_cast<long>(result.kept.size());
            REQUIRE(dropped * inv <= 6 * count);
        } else {
            REQUIRE(static_cast<long>(result.kept.size()) == count);
        }
    }
}

TEST_CASE("linear grouping: dropped count matches the proof's partition sizes") {
    DeterministicRng rng(34);
    const long inv = 3;
    auto placed = random_crossing_set(rng, 30, 12, 6, 2, 5);
    auto result = linear_grouping_boxes(placed, Ratio(1, inv));

    // Recompute the construction's group sizes independently: outer sizes
    // descending with remainders first; the first outer group and the first
    // inner part of every other group are dropped.
    auto sizes = [](long n, long k) {
        std::vector<long> out(static_cast<std::size_t>(k), n / k);
        for (long r = 0; r < n % k; ++r) ++out[static_cast<std::size_t>(r)];
        return out;
    };
    const auto outer = sizes(30, inv);
    long expected_dropped = outer[0];
    for (long r = 1; r < inv; ++r)
        expected_dropped += sizes(outer[static_cast<std::size_t>(r)], inv)[0];
    REQUIRE(static_cast<long>(placed.size() - result.kept.size()) == expected_dropped);
}

TEST_CASE("harmonic grouping: copy case") {
    DeterministicRng rng(35);
    const Interval I{3, 6};
    auto placed = random_interval_set(rng, 3, I, 2, 4);
    auto result = harmonic_grouping(placed, I, Ratio(1, 3));
    REQUIRE(result.batch.tasks.size() == 3);
    for (std::size_t i = 0; i < placed.size(); ++i) {
        REQUIRE(result.batch.tasks[i].length == placed[i].task.length);
        REQUIRE(result.batch.tasks[i].window_lo == I.lo);
        REQUIRE(result.batch.tasks[i].window_hi == I.hi);
        REQUIRE(result.batch.tasks[i].artificial);
        REQUIRE(result.starts[i] == placed[i].start);
        REQUIRE(result.batch.boxes[i].count == 1);
        REQUIRE(result.witnesses[i] == std::vector<std::size_t>{i});
    }
}

TEST_CASE("harmonic grouping: 9 tasks at eps=1/3 give two lengths in groups of three") {
    const Interval I{1, 8};
    std::vector<Placement> placed;
    for (long i = 0; i < 9; ++i) {
        const EdgeIndex length = 8 - i % 4;  // lengths 8,7,6,5 repeating
        Task t = typed_task("g" + std::to_string(i), 1, 1, length, 1, 8);
        placed.push_back({std::move(t), 1});
    }
    auto result = harmonic_grouping(placed, I, Ratio(1, 3));
    REQUIRE(result.batch.tasks.size() == 6);
    std::set<EdgeIndex> lengths;
    for (const auto& t : result.batch.tasks) lengths.insert(t.length);
    REQUIRE(lengths.size() == 2);
    REQUIRE(result.batch.boxes.size() == 2);
    REQUIRE(result.batch.boxes[0].count == 3);
    REQUIRE(result.batch.boxes[1].count == 3);
}

TEST_CASE("harmonic grouping: lemma properties on random inputs") {
    DeterministicRng rng(36);
    for (int trial = 0; trial < 300; ++trial) {
        const long inv = 2 + rng.below(3);
        const Ratio eps(1, inv);
        const Interval I{1 + rng.below(3), 6 + rng.below(5)};
        const long count = 1 + rng.below(25);
        const long demand = 1 + rng.below(3);
        const long weight = 1 + rng.below(4);
        auto placed = random_interval_set(rng, count, I, demand, weight);
        auto result = harmonic_grouping(placed, I, eps);
        const long produced = static_cast<long>(result.batch.tasks.size());

        // (1) cardinality bounds and at most 1/eps distinct lengths
        REQUIRE(produced <= count);
        REQUIRE(produced * inv >= (inv - 1) * count);
        std::set<EdgeIndex> lengths;
        for (const auto& t : result.batch.tasks) lengths.insert(t.length);
        REQUIRE(static_cast<long>(lengths.size()) <= inv);

        // (2) window = I and matching type
        for (const auto& t : result.batch.tasks) {
            REQUIRE(t.window_lo == I.lo);
            REQUIRE(t.window_hi == I.hi);
            REQUIRE(t.demand == Int(demand));
            REQUIRE(t.weight == Ratio(Int(weight)));
            REQUIRE(t.artificial);
        }

        // (3) scheduled placeholders demand-dominated by the originals
        std::vector<Placement> artificial_placed;
        for (std::size_t i = 0; i < result.batch.tasks.size(); ++i)
            artificial_placed.push_back({result.batch.tasks[i], result.starts[i]});
        REQUIRE(dominates(demand_profile(artificial_placed, I.lo, I.hi),
                          demand_profile(placed, I.lo, I.hi)));

        // (4) witness sets: pairwise disjoint, fit their boxes, exact sizes
        std::set<std::size_t> used;
        Int total_quota = 0;
        for (std::size_t b = 0; b < result.batch.boxes.size(); ++b) {
            std::vector<Task> members;
            for (std::size_t i : result.witnesses[b]) {
                REQUIRE(used.insert(i).second);
                members.push_back(placed[i].task);
            }
            REQUIRE(static_cast<long>(members.size()) == result.batch.boxes[b].count);
            REQUIRE(fits_in_box(members, result.batch.boxes[b].box));
            total_quota += result.batch.boxes[b].count;
        }
        REQUIRE(total_quota == Int(produced));

        // (5) replacement map on a random scheduled subset
        std::vector<Placement> scheduled;
        for (const auto& pl : artificial_placed)
            if (rng.below(3) > 0) scheduled.push_back(pl);
        std::vector<std::pair<BoxedGuess, std::vector<Task>>> fills;
        for (std::size_t b = 0; b < result.batch.boxes.size(); ++b) {
            std::vector<Task> members;
            for (std::size_t i : result.witnesses[b]) members.push_back(placed[i].task);
            fills.push_back({result.batch.boxes[b], std::move(members)});
        }
        auto replacement = replacement_map(scheduled, fills, I.lo);
        REQUIRE(replacement.has_value());
        std::set<std::string> targets;
        for (std::size_t a = 0; a < scheduled.size(); ++a) {
            const Task& real = (*replacement)[a];
            REQUIRE(targets.insert(real.id).second);  // injective
            REQUIRE(real.demand == scheduled[a].task.demand);
            REQUIRE(real.weight == scheduled[a].task.weight);
            const EdgeIndex lo = std::max(scheduled[a].start, real.window_lo);
            const EdgeIndex hi = std::min(scheduled[a].end(), real.window_hi);
            REQUIRE(hi - lo + 1 >= real.length);
        }
    }
}

TEST_CASE("b-matching: examples") {
    REQUIRE(b_matching_assign({}, {}).has_value());

    Task a = typed_task("a", 2, 1, 2, 1, 6);
    BoxedGuess box{{1, 4, Int(2), Int(2), Ratio(1)}, 1};
    auto ok = b_matching_assign({a}, {box});
    REQUIRE(ok.has_value());
    REQUIRE((*ok)[0] == 0);

    Task incompatible = typed_task("b", 3, 1, 2, 1, 6);
    REQUIRE_FALSE(b_matching_assign({incompatible}, {box}).has_value());
}

TEST_CASE("b-matching agrees with exhaustive assignment search") {
    DeterministicRng rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        const long n_tasks = rng.below(7);
        const long n_boxes = rng.below(4);
        std::vector<std::vector<char>> adj(static_cast<std::size_t>(n_tasks),
                                           std::vector<char>(static_cast<std::size_t>(n_boxes)));
        for (auto& row : adj)
            for (auto& cell : row) cell = rng.below(2) == 0;
        std::vector<long> quotas;
        for (long b = 0; b < n_boxes; ++b) quotas.push_back(rng.below(3));

        auto fast = b_matching_assign_adj(static_cast<std::size_t>(n_tasks), quotas,
                                          [&](std::size_t t, std::size_t b) { return adj[t][b] != 0; });

        // Exhaustive: assign each task to a box or to none; feasible iff some
        // assignment meets every quota exactly.
        bool feasible = false;
        std::vector<long> pick(static_cast<std::size_t>(n_tasks), -1);
        auto dfs = [&](auto&& self, long t) -> void {
            if (feasible) return;
            if (t == n_tasks) {
                std::vector<long> fill(static_cast<std::size_t>(n_boxes), 0);
                for (long i = 0; i < n_tasks; ++i)
                    if (pick[static_cast<std::size_t>(i)] >= 0)
                        ++fill[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
                feasible = fill == quotas;
                return;
            }
            for (long b = -1; b < n_boxes; ++b) {
                if (b >= 0 && !adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)]) continue;
                pick[static_cast<std::size_t>(t)] = b;
                self(self, t + 1);
                if (feasible) return;
            }
            pick[static_cast<std::size_t>(t)] = -1;
        };
        dfs(dfs, 0);

        REQUIRE(fast.has_value() == feasible);
        if (fast) {
            std::vector<long> fill(static_cast<std::size_t>(n_boxes), 0);
            for (long t = 0; t < n_tasks; ++t) {
                const long b = (*fast)[static_cast<std::size_t>(t)];
                if (b >= 0) {
                    REQUIRE(adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)] != 0);
                    ++fill[static_cast<std::size_t>(b)];
                }
            }
            REQUIRE(fill == quotas);
        }
    }
}

TEST_CASE("replacement_map: empty artificial set") {
    REQUIRE(replacement_map({}, {}, 1).has_value());
    REQUIRE(replacement_map({}, {}, 1)->empty());
}

TEST_CASE("replacement_map: violated preconditions are infeasible, not errors") {
    Task ghost = make_artificial_task(Ratio(1), Int(1), 2, {3, 6}, 0);
    BoxedGuess box{{5, 6, Int(1), Int(1), Ratio(1)}, 1};
    // Fill whose window misses the leftmost edge of the interval.
    Task bad = typed_task("bad", 1, 1, 2, 5, 6);
    REQUIRE_FALSE(replacement_map({{ghost, 3}}, {{box, {bad}}}, 3).has_value());
}
