#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "tomo/bench.hpp"

namespace testutil {

struct OracleCounts {
    int64_t rr = 0, tp = 0, fp = 0, fn = 0, mh = 0;
    double ad = 0;
};

/// Exhaustive assignment: builds explicit per-instance voxel sets from the
/// occupancy mask and scans every prediction against every instance.
inline OracleCounts match_oracle(const tomo::PredictionSet& preds,
                                 const tomo::BenchGroundTruth& gt) {
    const auto& occ = gt.occupancy;
    std::map<int, std::set<std::array<int, 3>>> regions;
    for (int k = 0; k < occ.nz(); ++k)
        for (int j = 0; j < occ.ny(); ++j)
            for (int i = 0; i < occ.nx(); ++i)
                if (occ.at(i, j, k) != 0) regions[occ.at(i, j, k)].insert({i, j, k});

    OracleCounts c;
    std::map<int, int> hits;
    double dist_sum = 0;
    for (const auto& e : preds.entries) {
        ++c.rr;
        const std::array<int, 3> v{static_cast<int>(std::lround(e.position[0])),
                                   static_cast<int>(std::lround(e.position[1])),
                                   static_cast<int>(std::lround(e.position[2]))};
        int found = 0;
        for (const auto& [id, region] : regions)
            if (region.count(v)) {
                found = id;
                break;
            }
        if (found == 0) {
            ++c.fp;
            continue;
        }
        if (++hits[found] == 1) {
            ++c.tp;
            const auto& g = gt.entries[found - 1].position;
            dist_sum += std::sqrt(std::pow(e.position[0] - g[0], 2) +
                                  std::pow(e.position[1] - g[1], 2) +
                                  std::pow(e.position[2] - g[2], 2));
        }
    }
    for (size_t i = 1; i <= gt.entries.size(); ++i) {
        if (!hits.count(static_cast<int>(i))) ++c.fn;
        else if (hits[static_cast<int>(i)] > 1) ++c.mh;
    }
    c.ad = c.tp ? dist_sum / c.tp : 0.0;
    return c;
}

}  // namespace testutil
