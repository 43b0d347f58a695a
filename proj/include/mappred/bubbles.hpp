#ifndef MAPPRED_BUBBLES_HPP
#define MAPPRED_BUBBLES_HPP

#include "mappred/astar.hpp"
#include "mappred/distance_field.hpp"
#include "mappred/grid.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace mappred {

/// A corridor of overlapping free-space balls around a reference path. Each
/// ball i constrains the smoothed waypoint i: ||q_i - centers[i]|| <= radii[i].
struct BubbleTube {
    std::vector<Vec2> centers;
    std::vector<double> radii;
    std::optional<std::size_t> frontier_index; // first center in unknown space
};

/// Resample a polyline at (approximately) uniform arclength spacing. The
/// first and last points are kept exactly; interior samples sit every
/// `spacing` meters along the original polyline.
inline std::vector<Vec2> resample_polyline(const std::vector<Vec2> &pts, double spacing) {
    if (pts.size() < 2 || spacing <= 0.0)
        return pts;
    std::vector<double> s(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
    double total = s.back();
    if (total <= spacing)
        return {pts.front(), pts.back()};
    int n = static_cast<int>(std::ceil(total / spacing));
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    std::size_t seg = 1;
    for (int i = 0; i <= n; ++i) {
        double si = total * i / n;
        while (seg + 1 < pts.size() && s[seg] < si)
            ++seg;
        double den = s[seg] - s[seg - 1];
        double t = den > 0.0 ? (si - s[seg - 1]) / den : 0.0;
        out.push_back(pts[seg - 1] + t * (pts[seg] - pts[seg - 1]));
    }
    return out;
}

struct BubbleOptions {
    double clearance = 0.1;   // margin subtracted from the obstacle distance
    double min_radius = 0.15; // tube is infeasible below this in known space
    double max_radius = 1.0;
    double unknown_radius = 0.5; // fixed radius past the frontier
};

/// Build the ball corridor for a resampled reference path. Known-space radii
/// come from the Euclidean distance field (distance to the nearest non-free
/// cell minus a clearance margin, clamped); waypoints at or past the frontier
/// get a fixed radius since the distance field is meaningless there.
inline BubbleTube build_bubbles(const OccupancyGrid &belief,
                                const std::vector<Vec2> &waypoints,
                                std::optional<std::size_t> frontier_index,
                                const std::vector<double> &dist_field,
                                const BubbleOptions &opt = {}) {
    if (waypoints.size() < 2)
        throw InfeasiblePlanError("build_bubbles: need at least two waypoints");
    BubbleTube tube;
    tube.centers = waypoints;
    tube.radii.resize(waypoints.size());
    tube.frontier_index = frontier_index;
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        if (frontier_index && i >= *frontier_index) {
            tube.radii[i] = opt.unknown_radius;
            continue;
        }
        Eigen::Vector2i c = belief.world_to_cell(waypoints[i]);
        if (!belief.in_bounds(c.x(), c.y()))
            throw InfeasiblePlanError("build_bubbles: waypoint outside the grid");
        double d = dist_field[static_cast<std::size_t>(belief.index(c.x(), c.y()))];
        if (d <= opt.clearance)
            throw InfeasiblePlanError("build_bubbles: degenerate tube, path too close "
                                      "to obstacles");
        tube.radii[i] = std::clamp(d - opt.clearance, opt.min_radius, opt.max_radius);
    }
    return tube;
}

} // namespace mappred

#endif
