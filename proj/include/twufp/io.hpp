#pragma once

#include "twufp/instance.hpp"
#include "twufp/threedm.hpp"

#include <json.hpp>

#include <fstream>

namespace twufp {

// Canonical text formats. Instances: one object with `m`, `capacities` as
// [start_edge, end_edge, capacity] triples covering 1..m, and `tasks`.
// Schedules: a list of {id, start}. 3DM: {q, k_bound?, hyperedges}.
// Matchings: {matching: [hyperedge positions]}. All integers are decimal
// 64-bit values; no floats anywhere.

using json = nlohmann::json;

namespace detail {

inline std::int64_t as_int64(const json& j, const char* what) {
    if (!j.is_number_integer())
        throw std::invalid_argument(std::string("expected a decimal integer for ") + what);
    return j.get<std::int64_t>();
}

}  // namespace detail

inline json instance_to_json(const Instance& inst) {
    json caps = json::array();
    for (const auto& seg : inst.capacities.segments()) {
        if (seg.value > Int(std::numeric_limits<std::int64_t>::max()))
            throw std::invalid_argument("capacity too large for the 64-bit file format");
        caps.push_back({seg.lo, seg.hi, seg.value.convert_to<std::int64_t>()});
    }
    json tasks = json::array();
    for (const auto& t : inst.tasks) {
        if (t.demand > Int(std::numeric_limits<std::int64_t>::max()) ||
            t.weight.numerator() > Int(std::numeric_limits<std::int64_t>::max()) ||
            t.weight.denominator() > Int(std::numeric_limits<std::int64_t>::max()))
            throw std::invalid_argument("task numbers too large for the 64-bit file format");
        json jt{{"id", t.id},
                {"demand", t.demand.convert_to<std::int64_t>()},
                {"weight_num", t.weight.numerator().convert_to<std::int64_t>()},
                {"weight_den", t.weight.denominator().convert_to<std::int64_t>()},
                {"length", t.length},
                {"window_lo", t.window_lo},
                {"window_hi", t.window_hi}};
        if (t.artificial) jt["artificial"] = true;
        tasks.push_back(std::move(jt));
    }
    return json{{"m", inst.m}, {"capacities", std::move(caps)}, {"tasks", std::move(tasks)}};
}

inline Instance instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("m") || !j.contains("capacities") || !j.contains("tasks"))
        throw std::invalid_argument("instance file needs m, capacities and tasks");
    const EdgeIndex m = detail::as_int64(j.at("m"), "m");
    std::vector<ProfileSegment> segs;
    for (const auto& triple : j.at("capacities")) {
        if (!triple.is_array() || triple.size() != 3)
            throw std::invalid_argument("each capacity entry must be [start_edge, end_edge, capacity]");
        segs.push_back({detail::as_int64(triple[0], "capacity start"),
                        detail::as_int64(triple[1], "capacity end"),
                        Int(detail::as_int64(triple[2], "capacity value"))});
    }
    std::vector<Task> tasks;
    for (const auto& jt : j.at("tasks")) {
        Task t;
        t.id = jt.at("id").get<std::string>();
        t.demand = Int(detail::as_int64(jt.at("demand"), "demand"));
        t.weight = Ratio(Int(detail::as_int64(jt.at("weight_num"), "weight_num")),
                         Int(detail::as_int64(jt.at("weight_den"), "weight_den")));
        t.length = detail::as_int64(jt.at("length"), "length");
        t.window_lo = detail::as_int64(jt.at("window_lo"), "window_lo");
        t.window_hi = detail::as_int64(jt.at("window_hi"), "window_hi");
        if (jt.contains("artificial")) t.artificial = jt.at("artificial").get<bool>();
        tasks.push_back(std::move(t));
    }
    Instance inst = make_instance(m, CapacityProfile::from_segments(1, m, std::move(segs)),
                                  std::move(tasks));
    const auto violations = validate_instance(inst);
    if (!violations.empty())
        throw std::invalid_argument("invalid instance: " + violations.front());
    return inst;
}

inline json schedule_to_json(const Schedule& sched) {
    json out = json::array();
    for (const auto& [id, start] : sched.placements) out.push_back({{"id", id}, {"start", start}});
    return out;
}

inline Schedule schedule_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("schedule file must be a list of {id, start}");
    Schedule sched;
    for (const auto& entry : j) {
        const std::string id = entry.at("id").get<std::string>();
        if (sched.placements.count(id))
            throw std::invalid_argument("schedule places task " + id + " twice");
        sched.placements[id] = detail::as_int64(entry.at("start"), "start");
    }
    return sched;
}

inline json threedm_to_json(const ThreeDM& K) {
    json edges = json::array();
    for (const auto& h : K.hyperedges) edges.push_back({h.x, h.y, h.z});
    json out{{"q", K.q}, {"hyperedges", std::move(edges)}};
    if (K.k_bound) out["k_bound"] = *K.k_bound;
    return out;
}

inline ThreeDM threedm_from_json(const json& j) {
    ThreeDM K;
    K.q = detail::as_int64(j.at("q"), "q");
    for (const auto& triple : j.at("hyperedges")) {
        if (!triple.is_array() || triple.size() != 3)
            throw std::invalid_argument("each hyperedge must be [i, j, k]");
        K.hyperedges.push_back({detail::as_int64(triple[0], "i"), detail::as_int64(triple[1], "j"),
                                detail::as_int64(triple[2], "k")});
    }
    if (j.contains("k_bound")) K.k_bound = detail::as_int64(j.at("k_bound"), "k_bound");
    const auto violations = validate_threedm(K);
    if (!violations.empty())
        throw std::invalid_argument("invalid 3DM instance: " + violations.front());
    return K;
}

inline json matching_to_json(const std::vector<std::size_t>& matching) {
    return json{{"matching", matching}};
}

inline std::vector<std::size_t> matching_from_json(const json& j) {
    std::vector<std::size_t> matching;
    for (const auto& v : j.at("matching")) {
        const std::int64_t idx = detail::as_int64(v, "matching entry");
        if (idx < 0) throw std::invalid_argument("matching entries are hyperedge positions >= 0");
        matching.push_back(static_cast<std::size_t>(idx));
    }
    return matching;
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace twufp
