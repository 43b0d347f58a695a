#ifndef MAPPRED_SVG_HPP
#define MAPPRED_SVG_HPP

#include "mappred/experiment.hpp"
#include "mappred/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace mappred {

namespace detail {

inline std::string svg_header(double w, double h) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
       << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os.str();
}

inline std::string color_for(std::size_t i) {
    static const char *palette[] = {"#4878cf", "#e24a33", "#6acc65",
                                    "#d4a017", "#8172b2", "#64b5cd"};
    return palette[i % 6];
}

// blue (slow) -> red (fast) for speed coloring
inline std::string speed_color(double frac) {
    frac = std::clamp(frac, 0.0, 1.0);
    int r = static_cast<int>(255 * frac);
    int b = static_cast<int>(255 * (1.0 - frac));
    std::ostringstream os;
    os << "rgb(" << r << ",64," << b << ")";
    return os.str();
}

inline void write_svg(const std::string &path, const std::string &body) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << body << "</svg>\n";
}

} // namespace detail

/// Bar chart of mean relative completion time per strategy with the bootstrap
/// CI drawn as error bars. Rows should share v_max and ranges.
inline void plot_relative_bars(const std::string &path,
                               const std::vector<SummaryRow> &rows,
                               const std::string &title) {
    if (rows.empty())
        throw ConfigError("plot_relative_bars: no rows");
    const double W = 560, H = 360, x0 = 70, y0 = 300, plot_h = 240;
    double maxv = 1.0;
    for (const SummaryRow &r : rows)
        maxv = std::max(maxv, r.ci_hi);
    maxv *= 1.1;
    std::ostringstream os;
    os << detail::svg_header(W, H);
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">"
       << title << "</text>\n";
    double band = (W - x0 - 30) / static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SummaryRow &r = rows[i];
        double cx = x0 + band * (static_cast<double>(i) + 0.5);
        double h = plot_h * r.mean_relative / maxv;
        os << "<rect x=\"" << cx - band * 0.3 << "\" y=\"" << y0 - h
           << "\" width=\"" << band * 0.6 << "\" height=\"" << h << "\" fill=\""
           << detail::color_for(i) << "\"/>\n";
        double ylo = y0 - plot_h * r.ci_lo / maxv;
        double yhi = y0 - plot_h * r.ci_hi / maxv;
        os << "<line x1=\"" << cx << "\" y1=\"" << ylo << "\" x2=\"" << cx
           << "\" y2=\"" << yhi << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        for (double y : {ylo, yhi})
            os << "<line x1=\"" << cx - 6 << "\" y1=\"" << y << "\" x2=\""
               << cx + 6 << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << cx << "\" y=\"" << y0 + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"12\">"
           << r.strategy << "</text>\n";
        os << "<text x=\"" << cx << "\" y=\"" << y0 - h - 8
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"11\">"
           << std::fixed << std::setprecision(0) << 100.0 * r.mean_relative
           << "%</text>\n";
    }
    // 100% line
    double y100 = y0 - plot_h / maxv;
    os << "<line x1=\"" << x0 << "\" y1=\"" << y100 << "\" x2=\"" << W - 30
       << "\" y2=\"" << y100
       << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
    os << "<text x=\"" << x0 - 6 << "\" y=\"" << y100 + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">100%</text>\n";
    detail::write_svg(path, os.str());
}

/// Stacked bar chart of mean per-stage planning times, one bar per row.
inline void plot_timing_stack(const std::string &path,
                              const std::vector<SummaryRow> &rows,
                              const std::string &title) {
    if (rows.empty())
        throw ConfigError("plot_timing_stack: no rows");
    const double W = 560, H = 360, x0 = 70, y0 = 300, plot_h = 240;
    const char *stage_names[5] = {"sense", "predict", "search", "smooth",
                                  "profile"};
    double maxv = 1e-9;
    for (const SummaryRow &r : rows)
        maxv = std::max(maxv, r.mean_sense + r.mean_predict + r.mean_search +
                                  r.mean_smooth + r.mean_profile);
    std::ostringstream os;
    os << detail::svg_header(W, H);
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">"
       << title << "</text>\n";
    double band = (W - x0 - 120) / static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SummaryRow &r = rows[i];
        double stages[5] = {r.mean_sense, r.mean_predict, r.mean_search,
                            r.mean_smooth, r.mean_profile};
        double cx = x0 + band * (static_cast<double>(i) + 0.5);
        double y = y0;
        for (int s = 0; s < 5; ++s) {
            double h = plot_h * stages[s] / maxv;
            os << "<rect x=\"" << cx - band * 0.3 << "\" y=\"" << y - h
               << "\" width=\"" << band * 0.6 << "\" height=\"" << h
               << "\" fill=\"" << detail::color_for(static_cast<std::size_t>(s))
               << "\"/>\n";
            y -= h;
        }
        os << "<text x=\"" << cx << "\" y=\"" << y0 + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"12\">"
           << r.strategy << "</text>\n";
    }
    for (int s = 0; s < 5; ++s) {
        double ly = 60 + 20 * s;
        os << "<rect x=\"" << W - 110 << "\" y=\"" << ly - 10
           << "\" width=\"12\" height=\"12\" fill=\""
           << detail::color_for(static_cast<std::size_t>(s)) << "\"/>\n";
        os << "<text x=\"" << W - 92 << "\" y=\"" << ly
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << stage_names[s]
           << "</text>\n";
    }
    detail::write_svg(path, os.str());
}

/// Map view: occupancy grid as background, the executed path colored by speed.
inline void plot_trajectory_map(const std::string &path, const OccupancyGrid &grid,
                                const RunLog &log, double v_max) {
    const double scale = 24.0; // px per meter
    double W = grid.width * grid.resolution * scale + 20;
    double H = grid.height * grid.resolution * scale + 20;
    auto px = [&](const Vec2 &p) {
        return std::pair<double, double>(
            10 + (p.x() - grid.origin.x()) * scale,
            H - 10 - (p.y() - grid.origin.y()) * scale);
    };
    std::ostringstream os;
    os << detail::svg_header(W, H);
    double cell = grid.resolution * scale;
    for (int cy = 0; cy < grid.height; ++cy)
        for (int cx = 0; cx < grid.width; ++cx) {
            Occ o = grid.at(cx, cy);
            if (o == Occ::Free)
                continue;
            auto [x, y] = px(grid.cell_center(cx, cy));
            os << "<rect x=\"" << x - cell / 2 << "\" y=\"" << y - cell / 2
               << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
               << (o == Occ::Occupied ? "#333333" : "#cccccc") << "\"/>\n";
        }
    for (std::size_t i = 1; i < log.executed.size(); ++i) {
        auto [x1, y1] = px(log.executed[i - 1].pos);
        auto [x2, y2] = px(log.executed[i].pos);
        double v = log.executed[i].vel.norm();
        os << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
           << "\" y2=\"" << y2 << "\" stroke=\""
           << detail::speed_color(v / std::max(1e-9, v_max))
           << "\" stroke-width=\"2.5\"/>\n";
    }
    detail::write_svg(path, os.str());
}

/// Heatmap of mean relative completion over the sensor x prediction range grid
/// for a single strategy.
inline void plot_range_heatmap(const std::string &path,
                               const std::vector<SummaryRow> &rows,
                               const std::string &title) {
    if (rows.empty())
        throw ConfigError("plot_range_heatmap: no rows");
    std::vector<double> sensors, preds;
    for (const SummaryRow &r : rows) {
        sensors.push_back(r.sensor_range);
        preds.push_back(r.prediction_radius);
    }
    auto uniq = [](std::vector<double> &v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(sensors);
    uniq(preds);
    double lo = 1e300, hi = -1e300;
    for (const SummaryRow &r : rows) {
        lo = std::min(lo, r.mean_relative);
        hi = std::max(hi, r.mean_relative);
    }
    if (hi <= lo)
        hi = lo + 1e-9;
    const double cell = 70, x0 = 90, y0 = 60;
    double W = x0 + cell * static_cast<double>(sensors.size()) + 30;
    double H = y0 + cell * static_cast<double>(preds.size()) + 60;
    std::ostringstream os;
    os << detail::svg_header(W, H);
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">"
       << title << "</text>\n";
    for (const SummaryRow &r : rows) {
        std::size_t i = static_cast<std::size_t>(
            std::find(sensors.begin(), sensors.end(), r.sensor_range) -
            sensors.begin());
        std::size_t j = static_cast<std::size_t>(
            std::find(preds.begin(), preds.end(), r.prediction_radius) -
            preds.begin());
        double frac = (r.mean_relative - lo) / (hi - lo);
        double x = x0 + cell * static_cast<double>(i);
        double y = y0 + cell * static_cast<double>(preds.size() - 1 - j);
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
           << "\" height=\"" << cell << "\" fill=\"" << detail::speed_color(frac)
           << "\" stroke=\"white\"/>\n";
        os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"12\" fill=\"white\">"
           << std::fixed << std::setprecision(0) << 100.0 * r.mean_relative
           << "%</text>\n";
    }
    for (std::size_t i = 0; i < sensors.size(); ++i)
        os << "<text x=\"" << x0 + cell * (static_cast<double>(i) + 0.5)
           << "\" y=\"" << y0 + cell * static_cast<double>(preds.size()) + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"12\">"
           << sensors[i] << " m</text>\n";
    for (std::size_t j = 0; j < preds.size(); ++j)
        os << "<text x=\"" << x0 - 8 << "\" y=\""
           << y0 + cell * static_cast<double>(preds.size() - 1 - j) + cell / 2 + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
              "font-size=\"12\">"
           << preds[j] << " m</text>\n";
    os << "<text x=\"" << x0 + cell * static_cast<double>(sensors.size()) / 2
       << "\" y=\"" << H - 14
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\">sensor range</text>\n";
    detail::write_svg(path, os.str());
}

} // namespace mappred

#endif
