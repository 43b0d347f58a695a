#ifndef MAPPRED_QUERY_HPP
#define MAPPRED_QUERY_HPP

#include "mappred/frontier.hpp"
#include "mappred/grid.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace mappred {

/// Context/target sets for occupancy prediction, in robot-relative coordinates
/// (translation only; axes stay grid-aligned).
struct QuerySet {
    std::vector<Vec2> context_xy;   // cell center - frame_origin
    std::vector<float> context_occ; // 0 = free, 1 = occupied
    std::vector<Vec2> target_xy;
    std::vector<int> target_cells;  // grid index per target, same order
    Vec2 frame_origin = Vec2::Zero();
};

/// Context: all observed cells within sensor_range of the robot. Targets: all
/// Unknown cells within prediction_radius of any frontier centroid.
inline QuerySet build_query(const OccupancyGrid &belief, const Vec2 &robot_pose,
                            const FrontierSet &frontiers, double sensor_range,
                            double prediction_radius) {
    if (belief.occupancy_at(robot_pose) != Occ::Free)
        throw InvalidPoseError("build_query: robot pose not in a free belief cell");
    QuerySet q;
    q.frame_origin = robot_pose;

    Eigen::Vector2i rc = belief.world_to_cell(robot_pose);
    int reach = static_cast<int>(std::ceil(sensor_range / belief.resolution)) + 1;
    for (int cy = std::max(0, rc.y() - reach); cy <= std::min(belief.height - 1, rc.y() + reach); ++cy)
        for (int cx = std::max(0, rc.x() - reach); cx <= std::min(belief.width - 1, rc.x() + reach); ++cx) {
            Occ o = belief.at(cx, cy);
            if (o == Occ::Unknown)
                continue;
            Vec2 center = belief.cell_center(cx, cy);
            if ((center - robot_pose).norm() <= sensor_range) {
                q.context_xy.push_back(center - robot_pose);
                q.context_occ.push_back(o == Occ::Occupied ? 1.0f : 0.0f);
            }
        }

    std::vector<bool> taken(belief.size(), false);
    int preach = static_cast<int>(std::ceil(prediction_radius / belief.resolution)) + 1;
    for (const Vec2 &centroid : frontiers.centroids) {
        Eigen::Vector2i cc = belief.world_to_cell(centroid);
        for (int cy = std::max(0, cc.y() - preach); cy <= std::min(belief.height - 1, cc.y() + preach); ++cy)
            for (int cx = std::max(0, cc.x() - preach); cx <= std::min(belief.width - 1, cc.x() + preach);
                 ++cx) {
                if (belief.at(cx, cy) != Occ::Unknown)
                    continue;
                int idx = belief.index(cx, cy);
                if (taken[static_cast<std::size_t>(idx)])
                    continue;
                Vec2 center = belief.cell_center(cx, cy);
                if ((center - centroid).norm() <= prediction_radius) {
                    taken[static_cast<std::size_t>(idx)] = true;
                    q.target_xy.push_back(center - robot_pose);
                    q.target_cells.push_back(idx);
                }
            }
    }
    return q;
}

} // namespace mappred

#endif
