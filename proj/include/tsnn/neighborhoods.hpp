#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tsnn/distances.hpp"
#include "tsnn/rng.hpp"

namespace tsnn {

/// Radius neighborhoods per index, after optional subsample capping.
/// members[a] is sorted ascending; capped[a] records whether subsampling
/// truncated the set.
struct NeighborhoodSet {
    Axis axis = Axis::row;
    double radius_sq = 0.0;
    std::vector<std::vector<int>> members;
    std::vector<std::uint8_t> capped;

    bool contains_self(int a) const {
        return std::binary_search(members[a].begin(), members[a].end(), a);
    }
};

/// Threshold rule: b is a neighbor of a when d²(a,b) <= radius_sq (ties
/// included). Self enters at its conventional distance 0 when allowed. If a
/// cap is given and the set exceeds it, a uniform subset of size cap is kept,
/// drawn from the per-index stream (seed, axis, a); self, when present, is
/// always retained.
inline NeighborhoodSet build_neighborhoods(const DistanceTable& table, double radius_sq,
                                           std::optional<int> cap, bool allow_self,
                                           std::uint64_t seed) {
    if (cap && *cap < 1) throw compute_error("build_neighborhoods: cap must be >= 1");
    const int k = table.size();
    NeighborhoodSet set;
    set.axis = table.axis;
    set.radius_sq = radius_sq;
    set.members.resize(k);
    set.capped.assign(k, 0);

    const std::uint64_t axis_tag =
        table.axis == Axis::row ? streams::kSubsampleRow : streams::kSubsampleCol;

    for (int a = 0; a < k; ++a) {
        std::vector<int> candidates;
        for (int b = 0; b < k; ++b) {
            if (b == a) continue;
            if (table.d_sq(a, b) <= radius_sq) candidates.push_back(b);
        }
        const bool self_in = allow_self && radius_sq >= 0.0;
        int budget = cap ? *cap - (self_in ? 1 : 0) : static_cast<int>(candidates.size());
        if (cap && budget < 0) budget = 0;

        std::vector<int>& members = set.members[a];
        if (cap && static_cast<int>(candidates.size()) > budget) {
            Rng rng = stream_rng(seed, {axis_tag, static_cast<std::uint64_t>(a)});
            rng.choose(candidates, static_cast<std::size_t>(budget));
            candidates.resize(static_cast<std::size_t>(budget));
            set.capped[a] = 1;
        }
        members = std::move(candidates);
        if (self_in) members.push_back(a);
        std::sort(members.begin(), members.end());
    }
    return set;
}

/// The joint observed neighbor set N_row,col(i,j): all (i',j') with i' a row
/// neighbor of i, j' a column neighbor of j, and (i',j') observed. When
/// exclude_target is set the pair (i,j) itself is removed.
struct JointNeighborhood {
    std::vector<std::pair<int, int>> pairs;
    int count() const { return static_cast<int>(pairs.size()); }
};

inline JointNeighborhood joint_neighborhood(const NeighborhoodSet& row_set,
                                            const NeighborhoodSet& col_set,
                                            const ObservedMatrix& matrix, int i, int j,
                                            bool exclude_target) {
    JointNeighborhood joint;
    for (int ip : row_set.members[i]) {
        for (int jp : col_set.members[j]) {
            if (!matrix.observed(ip, jp)) continue;
            if (exclude_target && ip == i && jp == j) continue;
            joint.pairs.emplace_back(ip, jp);
        }
    }
    return joint;
}

}  // namespace tsnn
