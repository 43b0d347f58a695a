#ifndef MAPPRED_EXPERIMENT_HPP
#define MAPPRED_EXPERIMENT_HPP

#include "mappred/maze.hpp"
#include "mappred/runlog.hpp"
#include "mappred/sim.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace mappred {

struct ExperimentConfig {
    std::vector<std::uint64_t> maze_seeds;
    double maze_extent = 15.0;
    double hallway_width = 2.5;
    double resolution = 0.25;
    std::vector<Strategy> strategies;
    std::vector<double> v_max_list = {4.0};
    // sensor/prediction range pairs to sweep; default is the standard setting
    std::vector<std::pair<double, double>> range_pairs = {{7.5, 5.0}};
    std::uint64_t seed = 0;
    std::string out_dir;
    SimConfig base; // timing/goal parameters shared by all cells

    void validate() const {
        if (maze_seeds.empty() || strategies.empty() || v_max_list.empty() ||
            range_pairs.empty())
            throw ConfigError("experiment: empty maze/strategy/speed/range set");
        for (double v : v_max_list)
            if (v <= 0.0)
                throw ConfigError("experiment: v_max must be positive");
        for (auto [s, p] : range_pairs)
            if (s <= 0.0 || p <= 0.0)
                throw ConfigError("experiment: ranges must be positive");
    }
};

struct SummaryRow {
    std::string strategy;
    double v_max = 0.0;
    double sensor_range = 0.0;
    double prediction_radius = 0.0;
    int episodes = 0;
    int failures = 0;
    double mean_relative = 0.0; // completion / T_opt over successful episodes
    double ci_lo = 0.0, ci_hi = 0.0;
    double mean_sense = 0.0, mean_predict = 0.0, mean_search = 0.0,
           mean_smooth = 0.0, mean_profile = 0.0;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
};

/// Percentile bootstrap confidence interval of the mean.
inline std::pair<double, double> bootstrap_ci(const std::vector<double> &xs,
                                              int n_boot, std::uint64_t seed,
                                              double level = 0.95) {
    if (xs.empty())
        throw ConfigError("bootstrap_ci: empty sample");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
    std::vector<double> means(static_cast<std::size_t>(n_boot));
    for (int b = 0; b < n_boot; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += xs[pick(rng)];
        means[static_cast<std::size_t>(b)] = s / static_cast<double>(xs.size());
    }
    std::sort(means.begin(), means.end());
    double tail = (1.0 - level) / 2.0;
    auto at = [&](double q) {
        double idx = q * static_cast<double>(means.size() - 1);
        std::size_t lo = static_cast<std::size_t>(idx);
        double w = idx - static_cast<double>(lo);
        return lo + 1 < means.size() ? means[lo] * (1.0 - w) + means[lo + 1] * w
                                     : means.back();
    };
    return {at(tail), at(1.0 - tail)};
}

/// Reduce a group of episode logs (one experiment-grid cell) to a summary row.
inline SummaryRow aggregate(const std::vector<RunLog> &logs, int n_boot,
                            std::uint64_t seed) {
    if (logs.empty())
        throw ConfigError("aggregate: no logs");
    SummaryRow row;
    row.strategy = logs.front().strategy;
    row.episodes = static_cast<int>(logs.size());
    std::vector<double> rel;
    double ns = 0.0, np = 0.0, nse = 0.0, nsm = 0.0, npr = 0.0;
    std::size_t n_timings = 0;
    for (const RunLog &log : logs) {
        if (log.success)
            rel.push_back(log.relative_time());
        else
            ++row.failures;
        for (const StageTimings &t : log.timings) {
            ns += t.sense;
            np += t.predict;
            nse += t.search;
            nsm += t.smooth;
            npr += t.profile;
            ++n_timings;
        }
    }
    if (!rel.empty()) {
        double sum = 0.0;
        for (double r : rel)
            sum += r;
        row.mean_relative = sum / static_cast<double>(rel.size());
        auto [lo, hi] = bootstrap_ci(rel, n_boot, seed);
        row.ci_lo = lo;
        row.ci_hi = hi;
    }
    if (n_timings > 0) {
        row.mean_sense = ns / static_cast<double>(n_timings);
        row.mean_predict = np / static_cast<double>(n_timings);
        row.mean_search = nse / static_cast<double>(n_timings);
        row.mean_smooth = nsm / static_cast<double>(n_timings);
        row.mean_profile = npr / static_cast<double>(n_timings);
    }
    return row;
}

inline void save_summary_csv(const std::string &path, const SummaryTable &table) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << "strategy,v_max,sensor_range,prediction_radius,episodes,failures,"
           "mean_relative,ci_lo,ci_hi,mean_sense,mean_predict,mean_search,"
           "mean_smooth,mean_profile\n";
    out << std::setprecision(17);
    for (const SummaryRow &r : table.rows)
        out << r.strategy << ',' << r.v_max << ',' << r.sensor_range << ','
            << r.prediction_radius << ',' << r.episodes << ',' << r.failures << ','
            << r.mean_relative << ',' << r.ci_lo << ',' << r.ci_hi << ','
            << r.mean_sense << ',' << r.mean_predict << ',' << r.mean_search << ','
            << r.mean_smooth << ',' << r.mean_profile << "\n";
}

inline SummaryTable load_summary_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line))
        throw IoError("summary csv: missing header");
    SummaryTable table;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> f;
        while (std::getline(ss, tok, ','))
            f.push_back(tok);
        if (f.size() != 14)
            throw IoError("summary csv: malformed row");
        SummaryRow r;
        r.strategy = f[0];
        r.v_max = std::stod(f[1]);
        r.sensor_range = std::stod(f[2]);
        r.prediction_radius = std::stod(f[3]);
        r.episodes = std::stoi(f[4]);
        r.failures = std::stoi(f[5]);
        r.mean_relative = std::stod(f[6]);
        r.ci_lo = std::stod(f[7]);
        r.ci_hi = std::stod(f[8]);
        r.mean_sense = std::stod(f[9]);
        r.mean_predict = std::stod(f[10]);
        r.mean_search = std::stod(f[11]);
        r.mean_smooth = std::stod(f[12]);
        r.mean_profile = std::stod(f[13]);
        table.rows.push_back(r);
    }
    return table;
}

/// Run the full experiment grid: one episode per (maze, strategy, v_max,
/// range pair). Writes runlogs/*.json and summary.csv under cfg.out_dir and
/// returns the summary.
inline SummaryTable run_experiment(const ExperimentConfig &cfg,
                                   const CnpModel *model, int n_boot = 10000) {
    cfg.validate();
    namespace fs = std::filesystem;
    bool writing = !cfg.out_dir.empty();
    if (writing)
        fs::create_directories(fs::path(cfg.out_dir) / "runlogs");

    SummaryTable table;
    for (auto [sensor, pred] : cfg.range_pairs)
        for (double v_max : cfg.v_max_list)
            for (Strategy strat : cfg.strategies) {
                std::vector<RunLog> logs;
                for (std::uint64_t ms : cfg.maze_seeds) {
                    MazeSpec spec = default_maze_spec(ms, cfg.maze_extent,
                                                      cfg.hallway_width,
                                                      cfg.resolution);
                    OccupancyGrid maze = generate_maze(spec, cfg.resolution);
                    SimConfig sim = cfg.base;
                    sim.strategy = strat;
                    sim.vehicle.v_max = v_max;
                    sim.sensor_range = sensor;
                    sim.prediction_radius = pred;
                    sim.start = spec.start;
                    sim.goal = spec.goal;
                    RunLog log = run_episode(maze, sim, model);
                    log.maze_seed = ms;
                    if (writing) {
                        std::ostringstream name;
                        name << strategy_name(strat) << "_v" << v_max << "_s"
                             << sensor << "_p" << pred << "_m" << ms << ".json";
                        save_runlog((fs::path(cfg.out_dir) / "runlogs" / name.str())
                                        .string(),
                                    log);
                    }
                    logs.push_back(std::move(log));
                }
                SummaryRow row = aggregate(logs, n_boot, cfg.seed);
                row.v_max = v_max;
                row.sensor_range = sensor;
                row.prediction_radius = pred;
                table.rows.push_back(row);
            }
    if (writing)
        save_summary_csv((fs::path(cfg.out_dir) / "summary.csv").string(), table);
    return table;
}

} // namespace mappred

#endif
