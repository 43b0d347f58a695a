#ifndef MAPPRED_DATASET_HPP
#define MAPPRED_DATASET_HPP

#include "mappred/frontier.hpp"
#include "mappred/lidar.hpp"
#include "mappred/query.hpp"

#include <cstdint>
#include <fstream>
#include <random>
#include <vector>

namespace mappred {

struct TrainingExample {
    std::vector<Vec2> context_xy;
    std::vector<float> context_occ;
    std::vector<Vec2> target_xy;
    std::vector<float> target_y;
    Vec2 frame_origin = Vec2::Zero(); // pose the coordinates are relative to
};

/// One single-scan example per sampled pose: the context is the fresh scan,
/// the targets are the context coordinates (with their known labels) plus the
/// unknown cells near each frontier, labeled from the truth grid.
inline std::vector<TrainingExample>
make_dataset(const std::vector<OccupancyGrid> &maps, int samples_per_map, double sensor_range,
             double prediction_radius, std::uint64_t seed) {
    if (maps.empty() || samples_per_map < 1)
        throw ConfigError("make_dataset: maps non-empty and samples_per_map >= 1 required");
    std::mt19937_64 rng(seed);
    std::vector<TrainingExample> out;
    out.reserve(maps.size() * static_cast<std::size_t>(samples_per_map));
    for (const OccupancyGrid &truth : maps) {
        std::vector<int> free_cells;
        for (int i = 0; i < static_cast<int>(truth.size()); ++i)
            if (truth.cells[static_cast<std::size_t>(i)] == Occ::Free)
                free_cells.push_back(i);
        if (free_cells.empty())
            throw ConfigError("make_dataset: map with no free cells");
        std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
        for (int s = 0; s < samples_per_map; ++s) {
            Vec2 pose = truth.cell_center(free_cells[pick(rng)]);
            OccupancyGrid belief = OccupancyGrid::unknown_like(truth);
            simulate_lidar(truth, belief, pose, sensor_range);
            FrontierSet frontiers = extract_frontiers(belief);
            QuerySet q = build_query(belief, pose, frontiers, sensor_range, prediction_radius);

            TrainingExample ex;
            ex.frame_origin = pose;
            ex.context_xy = q.context_xy;
            ex.context_occ = q.context_occ;
            ex.target_xy = q.context_xy; // observed points are targets too
            ex.target_y = q.context_occ;
            for (std::size_t k = 0; k < q.target_xy.size(); ++k) {
                ex.target_xy.push_back(q.target_xy[k]);
                ex.target_y.push_back(
                    truth.cells[static_cast<std::size_t>(q.target_cells[k])] == Occ::Occupied
                        ? 1.0f
                        : 0.0f);
            }
            out.push_back(std::move(ex));
        }
    }
    return out;
}

// Binary dataset records: counts as LE u32, coordinates/labels as LE f32.
namespace detail {
inline void put_u32(std::ostream &o, std::uint32_t v) {
    o.write(reinterpret_cast<const char *>(&v), 4);
}
inline void put_f32(std::ostream &o, float v) { o.write(reinterpret_cast<const char *>(&v), 4); }
inline std::uint32_t get_u32(std::istream &i) {
    std::uint32_t v = 0;
    i.read(reinterpret_cast<char *>(&v), 4);
    return v;
}
inline float get_f32(std::istream &i) {
    float v = 0;
    i.read(reinterpret_cast<char *>(&v), 4);
    return v;
}
} // namespace detail

inline void save_dataset(const std::vector<TrainingExample> &ds, std::ostream &out) {
    detail::put_u32(out, static_cast<std::uint32_t>(ds.size()));
    for (const TrainingExample &ex : ds) {
        detail::put_u32(out, static_cast<std::uint32_t>(ex.context_xy.size()));
        for (std::size_t i = 0; i < ex.context_xy.size(); ++i) {
            detail::put_f32(out, static_cast<float>(ex.context_xy[i].x()));
            detail::put_f32(out, static_cast<float>(ex.context_xy[i].y()));
            detail::put_f32(out, ex.context_occ[i]);
        }
        detail::put_u32(out, static_cast<std::uint32_t>(ex.target_xy.size()));
        for (std::size_t i = 0; i < ex.target_xy.size(); ++i) {
            detail::put_f32(out, static_cast<float>(ex.target_xy[i].x()));
            detail::put_f32(out, static_cast<float>(ex.target_xy[i].y()));
            detail::put_f32(out, ex.target_y[i]);
        }
    }
}

inline std::vector<TrainingExample> load_dataset(std::istream &in) {
    std::uint32_t n = detail::get_u32(in);
    std::vector<TrainingExample> ds(n);
    for (auto &ex : ds) {
        std::uint32_t c = detail::get_u32(in);
        ex.context_xy.resize(c);
        ex.context_occ.resize(c);
        for (std::uint32_t i = 0; i < c; ++i) {
            float x = detail::get_f32(in), y = detail::get_f32(in);
            ex.context_xy[i] = Vec2(x, y);
            ex.context_occ[i] = detail::get_f32(in);
        }
        std::uint32_t t = detail::get_u32(in);
        ex.target_xy.resize(t);
        ex.target_y.resize(t);
        for (std::uint32_t i = 0; i < t; ++i) {
            float x = detail::get_f32(in), y = detail::get_f32(in);
            ex.target_xy[i] = Vec2(x, y);
            ex.target_y[i] = detail::get_f32(in);
        }
        if (!in)
            throw IoError("dataset: truncated file");
    }
    return ds;
}

inline void save_dataset(const std::vector<TrainingExample> &ds, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    save_dataset(ds, f);
}

inline std::vector<TrainingExample> load_dataset(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open: " + path);
    return load_dataset(f);
}

} // namespace mappred

#endif
