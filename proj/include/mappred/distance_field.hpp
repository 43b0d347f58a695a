#ifndef MAPPRED_DISTANCE_FIELD_HPP
#define MAPPRED_DISTANCE_FIELD_HPP

#include "mappred/grid.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mappred {

namespace detail {

// Felzenszwalb-Huttenlocher 1D squared distance transform (lower envelope of
// parabolas). f holds squared distances; out receives the transformed row.
inline void edt_1d(const std::vector<double> &f, std::vector<double> &out, int n) {
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == kInf)
            continue;
        if (f[static_cast<std::size_t>(v[static_cast<std::size_t>(k)])] == kInf) {
            v[static_cast<std::size_t>(k)] = q;
            continue;
        }
        double s;
        while (true) {
            int p = v[static_cast<std::size_t>(k)];
            s = ((f[static_cast<std::size_t>(q)] + q * q) -
                 (f[static_cast<std::size_t>(p)] + p * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[static_cast<std::size_t>(k)] && k > 0)
                --k;
            else
                break;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q)
            ++k;
        int p = v[static_cast<std::size_t>(k)];
        double fp = f[static_cast<std::size_t>(p)];
        out[static_cast<std::size_t>(q)] = (fp == kInf) ? kInf : (q - p) * (q - p) + fp;
    }
}

} // namespace detail

/// Exact Euclidean distance (center-to-center, meters) from every Free cell to
/// the nearest non-Free (Occupied or Unknown) cell; non-Free cells map to 0.
inline std::vector<double> distance_field(const OccupancyGrid &belief) {
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    const int w = belief.width, h = belief.height;
    std::vector<double> sq(belief.size());
    for (std::size_t i = 0; i < belief.size(); ++i)
        sq[i] = (belief.cells[i] == Occ::Free) ? kInf : 0.0;

    std::vector<double> col(static_cast<std::size_t>(h)), col_out(static_cast<std::size_t>(h));
    for (int cx = 0; cx < w; ++cx) {
        for (int cy = 0; cy < h; ++cy)
            col[static_cast<std::size_t>(cy)] = sq[static_cast<std::size_t>(belief.index(cx, cy))];
        detail::edt_1d(col, col_out, h);
        for (int cy = 0; cy < h; ++cy)
            sq[static_cast<std::size_t>(belief.index(cx, cy))] = col_out[static_cast<std::size_t>(cy)];
    }
    std::vector<double> row(static_cast<std::size_t>(w)), row_out(static_cast<std::size_t>(w));
    for (int cy = 0; cy < h; ++cy) {
        for (int cx = 0; cx < w; ++cx)
            row[static_cast<std::size_t>(cx)] = sq[static_cast<std::size_t>(belief.index(cx, cy))];
        detail::edt_1d(row, row_out, w);
        for (int cx = 0; cx < w; ++cx)
            sq[static_cast<std::size_t>(belief.index(cx, cy))] = row_out[static_cast<std::size_t>(cx)];
    }

    std::vector<double> dist(belief.size());
    for (std::size_t i = 0; i < belief.size(); ++i)
        dist[i] = (sq[i] == kInf) ? kInf : std::sqrt(sq[i]) * belief.resolution;
    return dist;
}

} // namespace mappred

#endif
