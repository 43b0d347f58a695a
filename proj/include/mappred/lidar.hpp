#ifndef MAPPRED_LIDAR_HPP
#define MAPPRED_LIDAR_HPP

#include "mappred/grid.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace mappred {

namespace detail {

/// True when the segment from `pose` to the center of cell `(tx, ty)` crosses
/// no Occupied truth cell strictly before reaching the target cell.
/// Amanatides-Woo traversal.
inline bool center_visible(const OccupancyGrid &truth, const Vec2 &pose, int tx, int ty) {
    Eigen::Vector2i c0 = truth.world_to_cell(pose);
    int cx = c0.x(), cy = c0.y();
    if (cx == tx && cy == ty)
        return true;
    Vec2 target = truth.cell_center(tx, ty);
    Vec2 d = target - pose;
    double len = d.norm();
    Vec2 dir = d / len;
    int step_x = dir.x() > 0 ? 1 : -1;
    int step_y = dir.y() > 0 ? 1 : -1;
    auto boundary = [&](int cell, int step, double org) {
        return org + (cell + (step > 0 ? 1 : 0)) * truth.resolution;
    };
    double t_max_x = (std::abs(dir.x()) < 1e-15)
                         ? std::numeric_limits<double>::infinity()
                         : (boundary(cx, step_x, truth.origin.x()) - pose.x()) / dir.x();
    double t_max_y = (std::abs(dir.y()) < 1e-15)
                         ? std::numeric_limits<double>::infinity()
                         : (boundary(cy, step_y, truth.origin.y()) - pose.y()) / dir.y();
    double t_delta_x = std::abs(dir.x()) < 1e-15 ? std::numeric_limits<double>::infinity()
                                                 : truth.resolution / std::abs(dir.x());
    double t_delta_y = std::abs(dir.y()) < 1e-15 ? std::numeric_limits<double>::infinity()
                                                 : truth.resolution / std::abs(dir.y());
    while (true) {
        if (t_max_x < t_max_y) {
            cx += step_x;
            t_max_x += t_delta_x;
        } else {
            cy += step_y;
            t_max_y += t_delta_y;
        }
        if (!truth.in_bounds(cx, cy))
            return false;
        if (cx == tx && cy == ty)
            return true;
        if (truth.at(cx, cy) == Occ::Occupied)
            return false;
    }
}

} // namespace detail

/// Cast n_beams equally spaced rays from `pose`, marching at half-cell steps.
/// Every traversed cell up to the first Occupied truth cell (or up to `range`)
/// is labeled with its truth occupancy in `belief`; a cell is only labeled if
/// its center is actually visible from the pose.
inline void simulate_lidar(const OccupancyGrid &truth, OccupancyGrid &belief, const Vec2 &pose,
                           double range, int n_beams = 720) {
    if (truth.width != belief.width || truth.height != belief.height ||
        truth.resolution != belief.resolution || truth.origin != belief.origin)
        throw ConfigError("simulate_lidar: belief and truth must share geometry");
    if (truth.occupancy_at(pose) != Occ::Free)
        throw InvalidPoseError("simulate_lidar: pose inside an occupied truth cell");

    // 0 = untouched this scan, 1 = checked not visible, 2 = labeled.
    std::vector<std::uint8_t> stamp(truth.size(), 0);
    auto observe = [&](int cx, int cy) -> Occ {
        std::uint8_t &s = stamp[static_cast<std::size_t>(truth.index(cx, cy))];
        if (s == 0) {
            if ((truth.cell_center(cx, cy) - pose).norm() <= range &&
                detail::center_visible(truth, pose, cx, cy)) {
                belief.at(cx, cy) = truth.at(cx, cy);
                s = 2;
            } else {
                s = 1;
            }
        }
        return truth.at(cx, cy);
    };

    const double step = 0.5 * truth.resolution;
    const int n_steps = static_cast<int>(std::floor(range / step));
    for (int beam = 0; beam < n_beams; ++beam) {
        double angle = 2.0 * M_PI * beam / n_beams;
        Vec2 dir(std::cos(angle), std::sin(angle));
        int prev_idx = -1;
        for (int k = 1; k <= n_steps; ++k) {
            Vec2 p = pose + (k * step) * dir;
            Eigen::Vector2i c = truth.world_to_cell(p);
            if (!truth.in_bounds(c.x(), c.y()))
                break;
            int idx = truth.index(c.x(), c.y());
            if (idx == prev_idx)
                continue;
            prev_idx = idx;
            if (observe(c.x(), c.y()) == Occ::Occupied)
                break; // hit; the cell itself was labeled if visible
        }
    }
    // The pose cell itself is always observed.
    Eigen::Vector2i c0 = truth.world_to_cell(pose);
    belief.at(c0.x(), c0.y()) = truth.at(c0.x(), c0.y());
}

} // namespace mappred

#endif
