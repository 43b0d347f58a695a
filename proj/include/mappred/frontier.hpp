#ifndef MAPPRED_FRONTIER_HPP
#define MAPPRED_FRONTIER_HPP

#include "mappred/grid.hpp"

#include <vector>

namespace mappred {

struct FrontierSet {
    std::vector<int> cells;                 // frontier cell indices, ascending
    std::vector<std::vector<int>> clusters; // 8-connected components of `cells`
    std::vector<Vec2> centroids;            // one per cluster, mean of member centers

    bool empty() const { return cells.empty(); }
};

/// A frontier cell is a Free belief cell 4-adjacent to at least one Unknown
/// cell. Cells are clustered by 8-connectivity.
inline FrontierSet extract_frontiers(const OccupancyGrid &belief) {
    FrontierSet out;
    std::vector<bool> is_frontier(belief.size(), false);
    for (int cy = 0; cy < belief.height; ++cy) {
        for (int cx = 0; cx < belief.width; ++cx) {
            if (belief.at(cx, cy) != Occ::Free)
                continue;
            bool adjacent_unknown =
                (cx > 0 && belief.at(cx - 1, cy) == Occ::Unknown) ||
                (cx + 1 < belief.width && belief.at(cx + 1, cy) == Occ::Unknown) ||
                (cy > 0 && belief.at(cx, cy - 1) == Occ::Unknown) ||
                (cy + 1 < belief.height && belief.at(cx, cy + 1) == Occ::Unknown);
            if (adjacent_unknown) {
                int idx = belief.index(cx, cy);
                is_frontier[static_cast<std::size_t>(idx)] = true;
                out.cells.push_back(idx);
            }
        }
    }

    std::vector<bool> seen(belief.size(), false);
    for (int seed : out.cells) {
        if (seen[static_cast<std::size_t>(seed)])
            continue;
        std::vector<int> cluster, stack{seed};
        seen[static_cast<std::size_t>(seed)] = true;
        while (!stack.empty()) {
            int idx = stack.back();
            stack.pop_back();
            cluster.push_back(idx);
            int cx = belief.cell_x(idx), cy = belief.cell_y(idx);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0)
                        continue;
                    int nx = cx + dx, ny = cy + dy;
                    if (!belief.in_bounds(nx, ny))
                        continue;
                    int nidx = belief.index(nx, ny);
                    if (is_frontier[static_cast<std::size_t>(nidx)] &&
                        !seen[static_cast<std::size_t>(nidx)]) {
                        seen[static_cast<std::size_t>(nidx)] = true;
                        stack.push_back(nidx);
                    }
                }
        }
        Vec2 centroid = Vec2::Zero();
        for (int idx : cluster)
            centroid += belief.cell_center(idx);
        centroid /= static_cast<double>(cluster.size());
        out.clusters.push_back(std::move(cluster));
        out.centroids.push_back(centroid);
    }
    return out;
}

} // namespace mappred

#endif
