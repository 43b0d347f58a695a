#ifndef MAPPRED_MAZE_HPP
#define MAPPRED_MAZE_HPP

#include "mappred/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <vector>

namespace mappred {

struct MazeSpec {
    std::uint64_t seed = 0;
    double extent = 15.0;        // side length of the corridor lattice, meters
    double hallway_width = 2.5;  // meters
    Vec2 start = Vec2::Zero();
    Vec2 goal = Vec2::Zero();
};

namespace detail {
inline bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }
}

/// Perfect maze via randomized depth-first search over a lattice of
/// hallway-sized cells. Walls are one grid cell thick, corridors are
/// hallway_width/resolution cells wide, and the free space forms a spanning
/// tree of the lattice (connected, acyclic at corridor granularity).
inline OccupancyGrid generate_maze(const MazeSpec &spec, double resolution = 0.25) {
    if (spec.extent <= spec.hallway_width || spec.hallway_width <= 0.0)
        throw ConfigError("maze: extent > hallway_width > 0 required");
    if (!detail::near_integer(spec.extent / spec.hallway_width))
        throw ConfigError("maze: extent must be an integer multiple of hallway_width");
    if (!detail::near_integer(spec.hallway_width / resolution))
        throw ConfigError("maze: hallway_width must be an integer multiple of resolution");

    const int n = static_cast<int>(std::round(spec.extent / spec.hallway_width));
    const int w = static_cast<int>(std::round(spec.hallway_width / resolution));
    const int side = n * w + (n + 1); // corridors plus one-cell walls and boundary
    OccupancyGrid grid(side, side, resolution, Occ::Occupied);

    // Carve corridor interiors.
    auto cell_lo = [&](int i) { return 1 + i * (w + 1); };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int dy = 0; dy < w; ++dy)
                for (int dx = 0; dx < w; ++dx)
                    grid.at(cell_lo(i) + dx, cell_lo(j) + dy) = Occ::Free;

    // Randomized DFS spanning tree over the lattice; carve the wall segment
    // of every tree edge.
    std::mt19937_64 rng(spec.seed);
    std::vector<bool> visited(static_cast<std::size_t>(n) * n, false);
    std::vector<int> stack;
    stack.push_back(0);
    visited[0] = true;
    const std::array<std::array<int, 2>, 4> dirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    while (!stack.empty()) {
        int cur = stack.back();
        int ci = cur % n, cj = cur / n;
        std::array<int, 4> order = {0, 1, 2, 3};
        std::shuffle(order.begin(), order.end(), rng);
        bool advanced = false;
        for (int k : order) {
            int ni = ci + dirs[static_cast<std::size_t>(k)][0];
            int nj = cj + dirs[static_cast<std::size_t>(k)][1];
            if (ni < 0 || ni >= n || nj < 0 || nj >= n)
                continue;
            int nxt = nj * n + ni;
            if (visited[static_cast<std::size_t>(nxt)])
                continue;
            // Open the wall between (ci,cj) and (ni,nj) over the full corridor width.
            if (ni != ci) {
                int wx = (ni > ci) ? cell_lo(ci) + w : cell_lo(ci) - 1;
                for (int dy = 0; dy < w; ++dy)
                    grid.at(wx, cell_lo(cj) + dy) = Occ::Free;
            } else {
                int wy = (nj > cj) ? cell_lo(cj) + w : cell_lo(cj) - 1;
                for (int dx = 0; dx < w; ++dx)
                    grid.at(cell_lo(ci) + dx, wy) = Occ::Free;
            }
            visited[static_cast<std::size_t>(nxt)] = true;
            stack.push_back(nxt);
            advanced = true;
            break;
        }
        if (!advanced)
            stack.pop_back();
    }

    if (spec.start != spec.goal) {
        if (grid.occupancy_at(spec.start) != Occ::Free)
            throw ConfigError("maze: start does not lie in free space");
        if (grid.occupancy_at(spec.goal) != Occ::Free)
            throw ConfigError("maze: goal does not lie in free space");
    }
    return grid;
}

/// Center of lattice cell (i, j) in a maze generated with the given spec.
inline Vec2 maze_lattice_center(const MazeSpec &spec, int i, int j, double resolution = 0.25) {
    const int w = static_cast<int>(std::round(spec.hallway_width / resolution));
    double lo_i = (1 + i * (w + 1)) * resolution;
    double lo_j = (1 + j * (w + 1)) * resolution;
    return Vec2(lo_i + 0.5 * w * resolution, lo_j + 0.5 * w * resolution);
}

/// Spec with start at the lower-left lattice cell and goal at the upper-right.
inline MazeSpec default_maze_spec(std::uint64_t seed, double extent = 15.0,
                                  double hallway_width = 2.5, double resolution = 0.25) {
    MazeSpec spec;
    spec.seed = seed;
    spec.extent = extent;
    spec.hallway_width = hallway_width;
    const int n = static_cast<int>(std::round(extent / hallway_width));
    spec.start = maze_lattice_center(spec, 0, 0, resolution);
    spec.goal = maze_lattice_center(spec, n - 1, n - 1, resolution);
    return spec;
}

inline void save_maze_spec(const MazeSpec &spec, std::ostream &out) {
    out.precision(17);
    out << "seed = " << spec.seed << '\n'
        << "extent = " << spec.extent << '\n'
        << "hallway_width = " << spec.hallway_width << '\n'
        << "start = " << spec.start.x() << ' ' << spec.start.y() << '\n'
        << "goal = " << spec.goal.x() << ' ' << spec.goal.y() << '\n';
}

inline MazeSpec load_maze_spec(std::istream &in) {
    MazeSpec spec;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key, eq;
        if (!(ls >> key >> eq) || eq != "=")
            continue;
        if (key == "seed")
            ls >> spec.seed;
        else if (key == "extent")
            ls >> spec.extent;
        else if (key == "hallway_width")
            ls >> spec.hallway_width;
        else if (key == "start")
            ls >> spec.start.x() >> spec.start.y();
        else if (key == "goal")
            ls >> spec.goal.x() >> spec.goal.y();
    }
    return spec;
}

} // namespace mappred

#endif
