#ifndef MAPPRED_PENALTY_HPP
#define MAPPRED_PENALTY_HPP

#include "mappred/astar.hpp"
#include "mappred/grid.hpp"

#include <vector>

namespace mappred {

/// Discretized line integral of alpha / (1 - phi + eps) along a path segment
/// through unknown space: per polyline segment, the occupancy probability at
/// the midpoint (looked up in the belief grid's cost field; out-of-grid
/// midpoints use phi = 0) times the segment length.
inline double evaluate_penalty(const std::vector<Vec2> &unknown_waypoints,
                               const OccupancyGrid &grid, const CostField &field) {
    double total = 0.0;
    for (std::size_t i = 1; i < unknown_waypoints.size(); ++i) {
        Vec2 mid = 0.5 * (unknown_waypoints[i - 1] + unknown_waypoints[i]);
        Eigen::Vector2i c = grid.world_to_cell(mid);
        double phi = grid.in_bounds(c.x(), c.y())
                         ? field.phi_at(grid.index(c.x(), c.y()))
                         : 0.0;
        total += field.alpha / (1.0 - phi + field.eps) *
                 (unknown_waypoints[i] - unknown_waypoints[i - 1]).norm();
    }
    return total;
}

} // namespace mappred

#endif
