#ifndef MAPPRED_GRID_HPP
#define MAPPRED_GRID_HPP

#include "mappred/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace mappred {

using Vec2 = Eigen::Vector2d;

enum class Occ : std::uint8_t { Free = 0, Occupied = 1, Unknown = 2 };

/// Axis-aligned 2D occupancy grid. Ground-truth grids hold only Free/Occupied;
/// belief grids start entirely Unknown and are filled in by sensing.
struct OccupancyGrid {
    double resolution = 0.25;
    Vec2 origin = Vec2::Zero(); // world coordinates of the corner of cell (0,0)
    int width = 0;
    int height = 0;
    std::vector<Occ> cells;

    OccupancyGrid() = default;
    OccupancyGrid(int w, int h, double res, Occ fill, Vec2 org = Vec2::Zero())
        : resolution(res), origin(org), width(w), height(h),
          cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
        if (res <= 0.0 || w < 1 || h < 1)
            throw ConfigError("OccupancyGrid: resolution > 0 and width, height >= 1 required");
    }

    static OccupancyGrid unknown_like(const OccupancyGrid &g) {
        return OccupancyGrid(g.width, g.height, g.resolution, Occ::Unknown, g.origin);
    }

    std::size_t size() const { return cells.size(); }
    int index(int cx, int cy) const { return cy * width + cx; }
    int cell_x(int idx) const { return idx % width; }
    int cell_y(int idx) const { return idx / width; }

    bool in_bounds(int cx, int cy) const {
        return cx >= 0 && cx < width && cy >= 0 && cy < height;
    }

    Occ at(int cx, int cy) const { return cells[static_cast<std::size_t>(index(cx, cy))]; }
    Occ &at(int cx, int cy) { return cells[static_cast<std::size_t>(index(cx, cy))]; }

    Vec2 cell_center(int cx, int cy) const {
        return origin + Vec2((cx + 0.5) * resolution, (cy + 0.5) * resolution);
    }
    Vec2 cell_center(int idx) const { return cell_center(cell_x(idx), cell_y(idx)); }

    /// Cell containing a world point. Points exactly on an edge belong to the
    /// cell with the larger index.
    Eigen::Vector2i world_to_cell(const Vec2 &p) const {
        return Eigen::Vector2i(static_cast<int>(std::floor((p.x() - origin.x()) / resolution)),
                               static_cast<int>(std::floor((p.y() - origin.y()) / resolution)));
    }

    bool contains(const Vec2 &p) const {
        Eigen::Vector2i c = world_to_cell(p);
        return in_bounds(c.x(), c.y());
    }

    Occ occupancy_at(const Vec2 &p) const {
        Eigen::Vector2i c = world_to_cell(p);
        if (!in_bounds(c.x(), c.y()))
            throw InvalidPoseError("occupancy_at: point outside grid");
        return at(c.x(), c.y());
    }

    bool operator==(const OccupancyGrid &o) const {
        return resolution == o.resolution && origin == o.origin && width == o.width &&
               height == o.height && cells == o.cells;
    }
};

inline char occ_to_char(Occ o) {
    switch (o) {
    case Occ::Free: return '.';
    case Occ::Occupied: return '#';
    default: return '?';
    }
}

inline Occ occ_from_char(char c) {
    switch (c) {
    case '.': return Occ::Free;
    case '#': return Occ::Occupied;
    case '?': return Occ::Unknown;
    default: throw IoError(std::string("gridmap: bad cell character '") + c + "'");
    }
}

/// Text format: `gridmap v1 <width> <height> <resolution> <origin_x> <origin_y>`
/// followed by height rows (row 0 = cy 0) of width characters from {., #, ?}.
inline void save_gridmap(const OccupancyGrid &g, std::ostream &out) {
    out << "gridmap v1 " << g.width << ' ' << g.height << ' ' << g.resolution << ' '
        << g.origin.x() << ' ' << g.origin.y() << '\n';
    for (int cy = 0; cy < g.height; ++cy) {
        for (int cx = 0; cx < g.width; ++cx)
            out << occ_to_char(g.at(cx, cy));
        out << '\n';
    }
}

inline void save_gridmap(const OccupancyGrid &g, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    save_gridmap(g, f);
}

inline OccupancyGrid load_gridmap(std::istream &in) {
    std::string tag, version;
    int w = 0, h = 0;
    double res = 0.0, ox = 0.0, oy = 0.0;
    in >> tag >> version >> w >> h >> res >> ox >> oy;
    if (!in || tag != "gridmap" || version != "v1")
        throw IoError("gridmap: bad header");
    in.ignore(1, '\n');
    OccupancyGrid g(w, h, res, Occ::Unknown, Vec2(ox, oy));
    std::string line;
    for (int cy = 0; cy < h; ++cy) {
        if (!std::getline(in, line) || static_cast<int>(line.size()) < w)
            throw IoError("gridmap: short row");
        for (int cx = 0; cx < w; ++cx)
            g.at(cx, cy) = occ_from_char(line[static_cast<std::size_t>(cx)]);
    }
    return g;
}

inline OccupancyGrid load_gridmap(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open: " + path);
    return load_gridmap(f);
}

} // namespace mappred

#endif
