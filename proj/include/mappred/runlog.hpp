#ifndef MAPPRED_RUNLOG_HPP
#define MAPPRED_RUNLOG_HPP

#include "mappred/sim.hpp"

#include <fstream>
#include <json.hpp>
#include <string>

namespace mappred {

inline nlohmann::json runlog_to_json(const RunLog &log) {
    nlohmann::json j;
    j["schema"] = "runlog v1";
    j["strategy"] = log.strategy;
    j["maze_seed"] = log.maze_seed;
    j["success"] = log.success;
    j["failure_reason"] = log.failure_reason;
    j["completion_time"] = log.completion_time;
    j["t_opt"] = log.t_opt;
    j["iterations"] = log.iterations;
    j["fallbacks"] = log.fallbacks;
    j["planned_terminal_speeds"] = log.planned_terminal_speeds;
    // JSON has no inf literal; an empty audit keeps a large finite sentinel
    j["min_clearance"] =
        std::isfinite(log.min_clearance) ? log.min_clearance : 1e300;
    j["collision_samples"] = log.collision_samples;
    j["unknown_belief_samples"] = log.unknown_belief_samples;
    nlohmann::json timings = nlohmann::json::array();
    for (const StageTimings &t : log.timings)
        timings.push_back({{"sense", t.sense},
                           {"predict", t.predict},
                           {"search", t.search},
                           {"smooth", t.smooth},
                           {"profile", t.profile},
                           {"total", t.total}});
    j["timings"] = std::move(timings);
    nlohmann::json exec = nlohmann::json::array();
    for (const ExecutedSample &e : log.executed)
        exec.push_back({e.t, e.pos.x(), e.pos.y(), e.vel.x(), e.vel.y(), e.u_long,
                        e.u_lat});
    j["executed"] = std::move(exec);
    return j;
}

inline RunLog runlog_from_json(const nlohmann::json &j) {
    if (j.value("schema", "") != "runlog v1")
        throw IoError("runlog: unsupported schema");
    RunLog log;
    log.strategy = j.at("strategy").get<std::string>();
    log.maze_seed = j.at("maze_seed").get<std::uint64_t>();
    log.success = j.at("success").get<bool>();
    log.failure_reason = j.at("failure_reason").get<std::string>();
    log.completion_time = j.at("completion_time").get<double>();
    log.t_opt = j.at("t_opt").get<double>();
    log.iterations = j.at("iterations").get<int>();
    log.fallbacks = j.at("fallbacks").get<int>();
    log.planned_terminal_speeds =
        j.at("planned_terminal_speeds").get<std::vector<double>>();
    log.min_clearance = j.at("min_clearance").get<double>();
    log.collision_samples = j.at("collision_samples").get<int>();
    log.unknown_belief_samples = j.at("unknown_belief_samples").get<int>();
    for (const auto &t : j.at("timings"))
        log.timings.push_back({t.at("sense").get<double>(),
                               t.at("predict").get<double>(),
                               t.at("search").get<double>(),
                               t.at("smooth").get<double>(),
                               t.at("profile").get<double>(),
                               t.at("total").get<double>()});
    for (const auto &e : j.at("executed")) {
        ExecutedSample s;
        s.t = e.at(0).get<double>();
        s.pos = Vec2(e.at(1).get<double>(), e.at(2).get<double>());
        s.vel = Vec2(e.at(3).get<double>(), e.at(4).get<double>());
        s.u_long = e.at(5).get<double>();
        s.u_lat = e.at(6).get<double>();
        log.executed.push_back(s);
    }
    return log;
}

inline void save_runlog(const std::string &path, const RunLog &log) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << runlog_to_json(log).dump(2) << "\n";
}

inline RunLog load_runlog(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return runlog_from_json(j);
}

/// Flat CSV of the executed samples, one row per sample.
inline void save_executed_csv(const std::string &path, const RunLog &log) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << "t,x,y,vx,vy,u_long,u_lat\n";
    for (const ExecutedSample &e : log.executed)
        out << e.t << ',' << e.pos.x() << ',' << e.pos.y() << ',' << e.vel.x()
            << ',' << e.vel.y() << ',' << e.u_long << ',' << e.u_lat << "\n";
}

/// Trajectory CSV export: t, x, y, vx, vy, u_long, u_lat, segment.
inline void save_trajectory_csv(const std::string &path, const Trajectory &traj) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << "t,x,y,vx,vy,u_long,u_lat,segment\n";
    for (const TrajectorySample &s : traj.samples)
        out << s.t << ',' << s.pos.x() << ',' << s.pos.y() << ',' << s.vel.x()
            << ',' << s.vel.y() << ',' << s.u_long << ',' << s.u_lat << ','
            << (s.unknown ? "unknown" : "known") << "\n";
}

} // namespace mappred

#endif
