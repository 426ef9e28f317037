#include "twufp/instance.hpp"
#include "twufp/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace twufp;

namespace {

Task task(std::string id, long demand, long weight, EdgeIndex length, EdgeIndex lo, EdgeIndex hi,
          bool artificial = false) {
    return Task{std::move(id), Int(demand), Ratio(Int(weight)), length, lo, hi, artificial};
}

}  // namespace

TEST_CASE("validate_instance: all invariants hold") {
    auto inst = make_instance(4, CapacityProfile::uniform(1, 4, 3), {task("a", 1, 1, 2, 1, 4)});
    REQUIRE(validate_instance(inst).empty());
}

TEST_CASE("validate_instance: window shorter than length") {
    auto inst = make_instance(4, CapacityProfile::uniform(1, 4, 3), {task("a", 1, 1, 2, 3, 3)});
    auto violations = validate_instance(inst);
    REQUIRE(violations.size() == 1);
    REQUIRE(violations.front().find("window shorter than length") != std::string::npos);
}

TEST_CASE("validate_instance: nonpositive demand") {
    auto inst = make_instance(4, CapacityProfile::uniform(1, 4, 3), {task("a", 0, 1, 1, 1, 4)});
    auto violations = validate_instance(inst);
    REQUIRE(violations.size() == 1);
    REQUIRE(violations.front().find("nonpositive demand") != std::string::npos);
}

TEST_CASE("check_schedule: empty schedule is feasible with ratio 0") {
    auto inst = make_instance(3, CapacityProfile::uniform(1, 3, 0), {});
    auto report = check_schedule(inst, {});
    REQUIRE(report.feasible);
    REQUIRE(report.max_overload_ratio == Ratio(0));
    REQUIRE_FALSE(report.ratio_infinite);
}

TEST_CASE("check_schedule: overload ratio and augmentation threshold") {
    auto inst = make_instance(2, CapacityProfile::uniform(1, 2, 2), {task("a", 3, 1, 1, 1, 2)});
    Schedule sched;
    sched.placements["a"] = 1;

    auto at_one = check_schedule(inst, sched, Ratio(1));
    REQUIRE_FALSE(at_one.feasible);
    REQUIRE(at_one.max_overload_ratio == Ratio(3, 2));
    REQUIRE(at_one.worst_edge == 1);

    auto augmented = check_schedule(inst, sched, Ratio(3, 2));
    REQUIRE(augmented.feasible);
}

TEST_CASE("check_schedule: load on a zero-capacity edge reports infinity") {
    auto inst = make_instance(2, CapacityProfile::from_segments(1, 2, {{1, 1, 2}, {2, 2, 0}}),
                              {task("a", 1, 1, 2, 1, 2)});
    Schedule sched;
    sched.placements["a"] = 1;
    auto report = check_schedule(inst, sched, Ratio(100));
    REQUIRE_FALSE(report.feasible);
    REQUIRE(report.ratio_infinite);
    REQUIRE(report.worst_edge == 2);
}

TEST_CASE("check_schedule: errors on bad placements") {
    auto inst = make_instance(4, CapacityProfile::uniform(1, 4, 5), {task("a", 1, 1, 2, 2, 3)});
    Schedule unknown;
    unknown.placements["zz"] = 1;
    REQUIRE_THROWS_AS(check_schedule(inst, unknown), std::invalid_argument);
    Schedule outside;
    outside.placements["a"] = 3;  // [3,4] leaves the window [2,3]
    REQUIRE_THROWS_AS(check_schedule(inst, outside), std::invalid_argument);
}

TEST_CASE("solution_weight: artificial tasks contribute nothing") {
    auto inst = make_instance(4, CapacityProfile::uniform(1, 4, 9),
                              {task("a", 1, 3, 1, 1, 4), task("b", 1, 5, 1, 1, 4),
                               task("ghost", 1, 4, 1, 1, 4, true)});
    REQUIRE(solution_weight(inst, {}) == Ratio(0));
    Schedule both;
    both.placements["a"] = 1;
    both.placements["b"] = 2;
    REQUIRE(solution_weight(inst, both) == Ratio(8));
    Schedule with_ghost;
    with_ghost.placements["a"] = 1;
    with_ghost.placements["ghost"] = 2;
    REQUIRE(solution_weight(inst, with_ghost) == Ratio(3));
}

TEST_CASE("feasibility is monotone in the augmentation factor") {
    DeterministicRng rng(11);
    for (int trial = 0; trial < 120; ++trial) {
        RandomInstanceParams params;
        params.n = 1 + rng.below(6);
        params.m = 2 + rng.below(12);
        auto inst = generate_instance(InstanceKind::general, params, rng.next());
        Schedule sched;
        for (const auto& t : inst.tasks)
            if (rng.below(2) == 0)
                sched.placements[t.id] = rng.in(t.window_lo, t.window_hi - t.length + 1);
        const Ratio a(Int(1 + rng.below(4)), Int(1 + rng.below(2)));
        const Ratio b = a + Ratio(Int(rng.below(3)), Int(2));
        auto at_a = check_schedule(inst, sched, std::max(a, Ratio(1)));
        auto at_b = check_schedule(inst, sched, std::max(b, Ratio(1)));
        if (at_a.feasible) REQUIRE(at_b.feasible);
    }
}

TEST_CASE("breakpoint sweep equals naive per-edge summation") {
    DeterministicRng rng(12);
    for (int trial = 0; trial < 150; ++trial) {
        RandomInstanceParams params;
        params.n = 1 + rng.below(7);
        params.m = 2 + rng.below(63);
        auto inst = generate_instance(InstanceKind::general, params, rng.next());
        std::vector<Placement> placed;
        for (const auto& t : inst.tasks)
            if (rng.below(3) > 0) placed.push_back({t, rng.in(t.window_lo, t.window_hi - t.length + 1)});
        auto profile = demand_profile(placed, 1, inst.m);
        for (EdgeIndex e = 1; e <= inst.m; ++e) {
            Int naive = 0;
            for (const auto& pl : placed)
                if (pl.start <= e && e <= pl.end()) naive += pl.task.demand;
            REQUIRE(profile.value_at(e) == naive);
        }
    }
}

TEST_CASE("removing any task from a feasible schedule preserves feasibility") {
    DeterministicRng rng(13);
    int feasible_seen = 0;
    for (int trial = 0; trial < 200 && feasible_seen < 60; ++trial) {
        RandomInstanceParams params;
        params.n = 1 + rng.below(5);
        params.m = 2 + rng.below(8);
        auto inst = generate_instance(InstanceKind::general, params, rng.next());
        Schedule sched;
        for (const auto& t : inst.tasks)
            if (rng.below(2) == 0)
                sched.placements[t.id] = rng.in(t.window_lo, t.window_hi - t.length + 1);
        if (!check_schedule(inst, sched).feasible) continue;
        ++feasible_seen;
        for (const auto& [id, start] : sched.placements) {
            (void)start;
            Schedule smaller = sched;
            smaller.placements.erase(id);
            REQUIRE(check_schedule(inst, smaller).feasible);
        }
    }
    REQUIRE(feasible_seen > 0);
}
