#ifndef MAPPRED_ASTAR_HPP
#define MAPPRED_ASTAR_HPP

#include "mappred/grid.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <vector>

namespace mappred {

/// Predicted occupancy per cell (only meaningful for Unknown cells; cells
/// without a prediction default to 0) plus the penalty parameters.
struct CostField {
    std::vector<float> phi;
    double alpha = 0.25;
    double eps = 1e-3;

    static CostField zeros(const OccupancyGrid &g, double alpha = 0.25, double eps = 1e-3) {
        CostField f;
        f.phi.assign(g.size(), 0.0f);
        f.alpha = alpha;
        f.eps = eps;
        return f;
    }

    double phi_at(int idx) const {
        return phi.empty() ? 0.0 : static_cast<double>(phi[static_cast<std::size_t>(idx)]);
    }
};

/// alpha / (1 - phi + eps): inflates the heuristic through likely-occupied
/// space, deflates it (alpha < 1) through likely-free space.
inline double heuristic_multiplier(double phi, double alpha, double eps) {
    return alpha / (1.0 - phi + eps);
}

struct ReferencePath {
    std::vector<Vec2> waypoints;               // cell centers, start to goal
    std::vector<int> cells;                    // grid index per waypoint
    std::optional<std::size_t> frontier_index; // first waypoint in unknown space
    double cost = 0.0;                         // geometric path length, meters
};

struct AstarOptions {
    bool unknown_passable = true;   // false: plan within the known map only
    bool inflate_obstacles = true;  // grow known occupied cells by one cell
    bool penalize_edges = false;    // also scale unknown-cell edge costs by the
                                    // occupancy multiplier (off: heuristic only)
};

/// 8-connected A* over the belief grid. Occupied cells (inflated by one cell)
/// are impassable; unknown cells are passable with the occupancy-scaled
/// heuristic. Edge costs are resolution (axis) and sqrt(2)*resolution
/// (diagonal); diagonal moves may not cut corners. Tie-breaking is by
/// (f, h, cell index), so the result is deterministic.
inline ReferencePath astar_plan(const OccupancyGrid &belief, const CostField &field,
                                const Vec2 &start, const Vec2 &goal,
                                const AstarOptions &opt = {}) {
    Eigen::Vector2i sc = belief.world_to_cell(start);
    Eigen::Vector2i gc = belief.world_to_cell(goal);
    if (!belief.in_bounds(sc.x(), sc.y()) || belief.at(sc.x(), sc.y()) != Occ::Free)
        throw InvalidPoseError("astar_plan: start not in a free cell");
    if (!belief.in_bounds(gc.x(), gc.y()))
        throw InvalidPoseError("astar_plan: goal outside the grid");

    const int w = belief.width, h = belief.height;
    const int n = w * h;
    const int start_idx = belief.index(sc.x(), sc.y());
    const int goal_idx = belief.index(gc.x(), gc.y());
    const double res = belief.resolution;
    const double diag = std::sqrt(2.0) * res;

    // Inflation mask: a cell is blocked when occupied or 8-adjacent to an
    // occupied cell. Cells near the start or goal are exempt so that a robot
    // skirting a wall can still plan.
    std::vector<bool> blocked(static_cast<std::size_t>(n), false);
    for (int cy = 0; cy < h; ++cy)
        for (int cx = 0; cx < w; ++cx) {
            if (belief.at(cx, cy) != Occ::Occupied)
                continue;
            blocked[static_cast<std::size_t>(belief.index(cx, cy))] = true;
            if (!opt.inflate_obstacles)
                continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (belief.in_bounds(cx + dx, cy + dy))
                        blocked[static_cast<std::size_t>(belief.index(cx + dx, cy + dy))] = true;
        }
    auto exempt = [&](int idx, const Eigen::Vector2i &anchor) {
        if (belief.at(belief.cell_x(idx), belief.cell_y(idx)) == Occ::Occupied)
            return false;
        return std::abs(belief.cell_x(idx) - anchor.x()) <= 1 &&
               std::abs(belief.cell_y(idx) - anchor.y()) <= 1;
    };
    auto passable = [&](int idx) {
        Occ o = belief.cells[static_cast<std::size_t>(idx)];
        if (o == Occ::Occupied)
            return false;
        if (o == Occ::Unknown && !opt.unknown_passable)
            return false;
        if (blocked[static_cast<std::size_t>(idx)] && !exempt(idx, sc) && !exempt(idx, gc))
            return false;
        return true;
    };
    if (!passable(goal_idx) &&
        belief.cells[static_cast<std::size_t>(goal_idx)] == Occ::Occupied)
        throw InfeasiblePlanError("astar_plan: goal cell is occupied");

    auto heuristic = [&](int idx) {
        double d = (belief.cell_center(idx) - belief.cell_center(goal_idx)).norm();
        Occ o = belief.cells[static_cast<std::size_t>(idx)];
        if (o == Occ::Unknown)
            d *= heuristic_multiplier(field.phi_at(idx), field.alpha, field.eps);
        return d;
    };

    // g kept as integer step counts so identical costs compare bit-exactly.
    struct NodeCost {
        int axis = 0, diag = 0;
        double scale = 1.0; // accumulated edge multiplier is folded in g_val
        double g_val = 0.0;
    };
    std::vector<double> g_val(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
    std::vector<int> g_axis(static_cast<std::size_t>(n), 0), g_diag(static_cast<std::size_t>(n), 0);
    std::vector<int> parent(static_cast<std::size_t>(n), -1);

    struct QEntry {
        double f, h;
        int idx;
        double g;
        bool operator>(const QEntry &o) const {
            if (f != o.f)
                return f > o.f;
            if (h != o.h)
                return h > o.h;
            return idx > o.idx;
        }
    };
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> open;
    g_val[static_cast<std::size_t>(start_idx)] = 0.0;
    open.push({heuristic(start_idx), heuristic(start_idx), start_idx, 0.0});

    const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    bool found = false;
    while (!open.empty()) {
        QEntry top = open.top();
        open.pop();
        int cur = top.idx;
        // stale-entry skip; improved nodes are re-expanded, which keeps the
        // search optimal under the inconsistent (mixed-multiplier) heuristic
        if (top.g != g_val[static_cast<std::size_t>(cur)])
            continue;
        if (cur == goal_idx) {
            found = true;
            break;
        }
        int cx = belief.cell_x(cur), cy = belief.cell_y(cur);
        for (int k = 0; k < 8; ++k) {
            int nx = cx + dxs[k], ny = cy + dys[k];
            if (!belief.in_bounds(nx, ny))
                continue;
            int nidx = belief.index(nx, ny);
            if (!passable(nidx))
                continue;
            bool diagonal = k >= 4;
            if (diagonal) {
                // No corner cutting past two blocked orthogonal neighbors.
                if (!passable(belief.index(cx + dxs[k], cy)) ||
                    !passable(belief.index(cx, cy + dys[k])))
                    continue;
            }
            double edge = diagonal ? diag : res;
            if (opt.penalize_edges &&
                belief.cells[static_cast<std::size_t>(nidx)] == Occ::Unknown)
                edge *= heuristic_multiplier(field.phi_at(nidx), field.alpha, field.eps);
            int na = g_axis[static_cast<std::size_t>(cur)] + (diagonal ? 0 : 1);
            int nd = g_diag[static_cast<std::size_t>(cur)] + (diagonal ? 1 : 0);
            double ng = opt.penalize_edges
                            ? g_val[static_cast<std::size_t>(cur)] + edge
                            : na * res + nd * diag; // exact integer-pair form
            if (ng < g_val[static_cast<std::size_t>(nidx)]) {
                g_val[static_cast<std::size_t>(nidx)] = ng;
                g_axis[static_cast<std::size_t>(nidx)] = na;
                g_diag[static_cast<std::size_t>(nidx)] = nd;
                parent[static_cast<std::size_t>(nidx)] = cur;
                double hh = heuristic(nidx);
                open.push({ng + hh, hh, nidx, ng});
            }
        }
    }
    if (!found)
        throw InfeasiblePlanError("astar_plan: no path to goal");

    ReferencePath path;
    for (int idx = goal_idx; idx != -1; idx = parent[static_cast<std::size_t>(idx)])
        path.cells.push_back(idx);
    std::reverse(path.cells.begin(), path.cells.end());
    for (std::size_t i = 0; i < path.cells.size(); ++i) {
        path.waypoints.push_back(belief.cell_center(path.cells[i]));
        if (!path.frontier_index &&
            belief.cells[static_cast<std::size_t>(path.cells[i])] == Occ::Unknown)
            path.frontier_index = i;
    }
    path.cost = g_val[static_cast<std::size_t>(goal_idx)];
    return path;
}

} // namespace mappred

#endif
