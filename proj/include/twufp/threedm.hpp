#pragma once

#include <optional>
#include <string>
#include <vector>

namespace twufp {

// Tripartite 3-uniform hypergraph: node sides X, Y, Z each of size q and a
// list of hyperedges (x_i, y_j, z_k) given by 1-based indices. k_bound, when
// set, declares a 3DM-k instance: every node occurs in at least one and at
// most k hyperedges.
struct Hyperedge {
    long x = 0;
    long y = 0;
    long z = 0;

    bool operator==(const Hyperedge&) const = default;
};

struct ThreeDM {
    long q = 0;
    std::vector<Hyperedge> hyperedges;
    std::optional<long> k_bound;
};

inline std::vector<std::string> validate_threedm(const ThreeDM& K) {
    std::vector<std::string> violations;
    if (K.q < 1) violations.push_back("q must be at least 1");
    std::vector<long> occ_x(static_cast<std::size_t>(std::max<long>(K.q, 0)), 0);
    auto occ_y = occ_x, occ_z = occ_x;
    for (std::size_t i = 0; i < K.hyperedges.size(); ++i) {
        const auto& h = K.hyperedges[i];
        if (h.x < 1 || h.x > K.q || h.y < 1 || h.y > K.q || h.z < 1 || h.z > K.q) {
            violations.push_back("hyperedge " + std::to_string(i) + " has an index outside 1..q");
            continue;
        }
        ++occ_x[h.x - 1];
        ++occ_y[h.y - 1];
        ++occ_z[h.z - 1];
    }
    if (K.k_bound) {
        const long k = *K.k_bound;
        if (k < 1) violations.push_back("k_bound must be at least 1");
        auto check_side = [&](const std::vector<long>& occ, const char* side) {
            for (long i = 0; i < K.q; ++i) {
                if (occ[i] < 1)
                    violations.push_back(std::string(side) + std::to_string(i + 1) +
                                         " occurs in no hyperedge");
                else if (occ[i] > k)
                    violations.push_back(std::string(side) + std::to_string(i + 1) +
                                         " occurs in more than k_bound hyperedges");
            }
        };
        check_side(occ_x, "x");
        check_side(occ_y, "y");
        check_side(occ_z, "z");
    }
    return violations;
}

inline bool is_hypermatching(const ThreeDM& K, const std::vector<std::size_t>& edge_indices) {
    std::vector<bool> ux(static_cast<std::size_t>(K.q) + 1, false);
    auto uy = ux, uz = ux;
    for (std::size_t idx : edge_indices) {
        if (idx >= K.hyperedges.size()) return false;
        const auto& h = K.hyperedges[idx];
        if (ux[h.x] || uy[h.y] || uz[h.z]) return false;
        ux[h.x] = uy[h.y] = uz[h.z] = true;
    }
    return true;
}

}  // namespace twufp
