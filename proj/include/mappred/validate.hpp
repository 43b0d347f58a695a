#ifndef MAPPRED_VALIDATE_HPP
#define MAPPRED_VALIDATE_HPP

#include "mappred/grid.hpp"
#include "mappred/speed_profile.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace mappred {

struct Violation {
    std::size_t sample = 0;
    std::string what;
};

/// Per-sample feasibility audit of a trajectory: friction circle, turning
/// constraint, speed cap, known-segment samples inside FREE belief cells, and
/// zero speed at the frontier stop. Violations are returned as data; an empty
/// list means the trajectory passes.
inline std::vector<Violation> validate_trajectory(const Trajectory &traj,
                                                  const OccupancyGrid &belief,
                                                  const VehicleParams &vp) {
    std::vector<Violation> out;
    const double f_max = vp.friction_force() * (1.0 + 1e-6);
    const double v_cap = vp.v_max * (1.0 + 1e-6);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const TrajectorySample &s = traj.samples[i];
        double u_norm = std::hypot(s.u_long, s.u_lat);
        if (u_norm > f_max) {
            std::ostringstream os;
            os << "friction circle: |u| = " << u_norm << " > " << f_max;
            out.push_back({i, os.str()});
        }
        double v2 = s.vel.squaredNorm();
        if (std::abs(s.u_lat) > vp.mass * v2 / vp.r_min + 1e-6) {
            std::ostringstream os;
            os << "turning: |u_lat| = " << std::abs(s.u_lat) << " > m v^2 / r_min = "
               << vp.mass * v2 / vp.r_min;
            out.push_back({i, os.str()});
        }
        if (std::sqrt(v2) > v_cap) {
            std::ostringstream os;
            os << "speed cap: |v| = " << std::sqrt(v2) << " > " << vp.v_max;
            out.push_back({i, os.str()});
        }
        if (!s.unknown) {
            Eigen::Vector2i c = belief.world_to_cell(s.pos);
            if (!belief.in_bounds(c.x(), c.y()) ||
                belief.at(c.x(), c.y()) != Occ::Free)
                out.push_back({i, "collision: known-segment sample not in a FREE cell"});
        }
        if (traj.frontier_time && std::abs(s.t - *traj.frontier_time) < 1e-12 &&
            std::sqrt(v2) > 1e-6)
            out.push_back({i, "frontier stop: nonzero speed at frontier_time"});
    }
    return out;
}

} // namespace mappred

#endif
