#ifndef MAPPRED_SIM_HPP
#define MAPPRED_SIM_HPP

#include "mappred/astar.hpp"
#include "mappred/bubbles.hpp"
#include "mappred/cnp.hpp"
#include "mappred/distance_field.hpp"
#include "mappred/frontier.hpp"
#include "mappred/lidar.hpp"
#include "mappred/penalty.hpp"
#include "mappred/query.hpp"
#include "mappred/smoothing.hpp"
#include "mappred/speed_profile.hpp"
#include "mappred/validate.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace mappred {

enum class Strategy { Cnp, Naive, OracleMaps, NoPrediction };

inline std::string strategy_name(Strategy s) {
    switch (s) {
    case Strategy::Cnp: return "cnp";
    case Strategy::Naive: return "naive";
    case Strategy::OracleMaps: return "oracle_maps";
    default: return "no_prediction";
    }
}

inline Strategy parse_strategy(const std::string &s) {
    if (s == "cnp") return Strategy::Cnp;
    if (s == "naive") return Strategy::Naive;
    if (s == "oracle_maps") return Strategy::OracleMaps;
    if (s == "no_prediction") return Strategy::NoPrediction;
    throw ConfigError("unknown strategy: " + s);
}

struct SimConfig {
    VehicleParams vehicle;
    double sensor_range = 7.5;     // lidar radius, meters
    double prediction_radius = 5.0; // frontier-centered query radius
    double replan_period = 0.5;    // trajectory seconds executed per plan
    double goal_radius = 0.5;
    double timeout_factor = 10.0;  // timeout = factor * T_opt
    Strategy strategy = Strategy::Cnp;
    double alpha = 0.25;
    double eps = 1e-3;
    int lidar_beams = 720;
    Vec2 start = Vec2::Zero();
    Vec2 goal = Vec2::Zero();

    void validate() const {
        if (replan_period <= 0.0 || sensor_range <= 0.0 || goal_radius <= 0.0 ||
            prediction_radius <= 0.0)
            throw ConfigError("sim config: ranges and periods must be positive");
    }
};

struct SimState {
    Vec2 pose = Vec2::Zero();
    Vec2 vel = Vec2::Zero();
    OccupancyGrid belief;
    double clock = 0.0;
};

struct StageTimings {
    double sense = 0.0, predict = 0.0, search = 0.0, smooth = 0.0, profile = 0.0;
    double total = 0.0; // wall time of the whole iteration
};

struct PlanResult {
    Trajectory traj;
    StageTimings timings;
    double planned_terminal_speed = 0.0; // speed at the sigma_k stop
};

namespace detail {

inline double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct SplitPath {
    std::vector<Vec2> points;               // resampled at ~0.1 m
    std::optional<std::size_t> stop_index;  // frontier stop waypoint
};

// Resample the reference path at ~0.1 m, keeping the last known-space waypoint
// (the frontier stop) as an exact sample so the zero-speed state stays in free
// space.
inline SplitPath split_and_resample(const ReferencePath &ref, double spacing) {
    SplitPath out;
    if (!ref.frontier_index || *ref.frontier_index == 0) {
        out.points = resample_polyline(ref.waypoints, spacing);
        if (ref.frontier_index)
            out.stop_index = 0;
        return out;
    }
    std::size_t f = *ref.frontier_index;
    std::vector<Vec2> known(ref.waypoints.begin(),
                            ref.waypoints.begin() + static_cast<long>(f));
    std::vector<Vec2> unknown(ref.waypoints.begin() + static_cast<long>(f) - 1,
                              ref.waypoints.end());
    std::vector<Vec2> a = resample_polyline(known, spacing);
    std::vector<Vec2> b = resample_polyline(unknown, spacing);
    out.points = a;
    out.stop_index = a.size() - 1;
    out.points.insert(out.points.end(), b.begin() + 1, b.end());
    return out;
}

// Discrete lateral curvature times r_min, matching the speed profile's turning
// gate (which admits only zero speed where this exceeds one).
inline double turn_ratio(const std::vector<Vec2> &q, std::size_t i,
                         double r_min) {
    Vec2 d1 = 0.5 * (q[i + 1] - q[i - 1]);
    Vec2 d2 = q[i + 1] - 2.0 * q[i] + q[i - 1];
    double sp2 = d1.squaredNorm();
    if (sp2 <= 1e-12)
        return std::numeric_limits<double>::infinity();
    Vec2 tan = d1 / std::sqrt(sp2);
    double kl = std::abs(d2.x() * tan.y() - d2.y() * tan.x());
    return kl * r_min / sp2;
}

struct FlatPath {
    std::vector<Vec2> points;
    std::optional<std::size_t> stop_index;
};

// The smoothed path can still exceed the vehicle's curvature limit near tight
// turns (a hairpin around a thin wall may simply not admit a sweeping arc).
// The point mass can stop and re-accelerate in any direction, so such regions
// stay traversable as long as the forced zero-speed samples are isolated.
// This pass replaces each over-curved run of samples with a short polyline
// (straight chord first, then corners added at the sharpest samples until the
// segments clear the known obstacles), concentrating the turn at isolated
// corner samples where the profile's gate inserts a momentary stop.
inline FlatPath flatten_sharp_turns(const std::vector<Vec2> &q,
                                    std::optional<std::size_t> stop_index,
                                    double r_min, const OccupancyGrid &belief,
                                    const std::vector<double> &dist) {
    const std::size_t n = q.size();
    FlatPath out{q, stop_index};
    if (n < 4)
        return out;
    auto clearance = [&](const Vec2 &p) {
        Eigen::Vector2i c = belief.world_to_cell(p);
        if (!belief.in_bounds(c.x(), c.y()))
            return 0.0;
        return dist[static_cast<std::size_t>(belief.index(c.x(), c.y()))];
    };
    auto seg_ok = [&](const Vec2 &a, const Vec2 &b, bool check) {
        if (!check)
            return true;
        int k = static_cast<int>((b - a).norm() / 0.05) + 1;
        for (int j = 0; j <= k; ++j)
            if (clearance(a + (b - a) * (static_cast<double>(j) / k)) < 0.13)
                return false;
        return true;
    };
    std::vector<bool> pinned(n, false);
    pinned[0] = pinned[n - 1] = true;
    if (stop_index)
        pinned[*stop_index] = true;
    std::vector<bool> bad(n, false);
    bool any = false;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (!pinned[i] && turn_ratio(q, i, r_min) > 0.98) {
            bad[i] = true;
            any = true;
        }
    if (!any)
        return out;
    // Maximal bad runs, padded so the replacement polyline meets the original
    // path a few samples away from the turn; overlapping runs merge. Run
    // bounds (lo, hi) are the good anchor samples kept on both sides.
    struct Run {
        std::size_t lo, hi;
    };
    std::vector<Run> runs;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!bad[i])
            continue;
        std::size_t a = i;
        while (i + 1 < n && bad[i + 1])
            ++i;
        std::size_t lo = a >= 4 ? a - 4 : 0;
        std::size_t hi = std::min(i + 4, n - 1);
        for (std::size_t j = a; j > lo; --j)
            if (pinned[j]) {
                lo = j;
                break;
            }
        for (std::size_t j = i; j < hi; ++j)
            if (pinned[j + 1]) {
                hi = j + 1;
                break;
            }
        // Merge overlapping runs, but never across a pinned sample: two runs
        // may share a pinned anchor (e.g. the frontier stop) and must keep it.
        if (!runs.empty() &&
            (lo < runs.back().hi || (lo == runs.back().hi && !pinned[lo])))
            runs.back().hi = std::max(hi, runs.back().hi);
        else
            runs.push_back({lo, hi});
    }
    std::vector<Vec2> np;
    np.reserve(n + 8 * runs.size());
    std::optional<std::size_t> new_stop;
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        np.push_back(q[i]);
        if (stop_index && i == *stop_index)
            new_stop = np.size() - 1;
        if (r < runs.size() && i == runs[r].lo) {
            const Run run = runs[r++];
            // the run is entirely on one side of the frontier stop
            const bool check = !stop_index || run.hi <= *stop_index;
            std::vector<std::size_t> chain = {run.lo, run.hi};
            auto chain_ok = [&]() {
                for (std::size_t j = 0; j + 1 < chain.size(); ++j)
                    if (!seg_ok(q[chain[j]], q[chain[j + 1]], check))
                        return false;
                return true;
            };
            if (!chain_ok()) {
                // concentrate the turn at the sharpest sample, then add more
                // corners until every straight segment clears the obstacles
                std::size_t kbest = run.lo + 1;
                double best = -1.0;
                for (std::size_t j = run.lo + 1; j < run.hi; ++j) {
                    double tr = turn_ratio(q, j, r_min);
                    if (tr > best) {
                        best = tr;
                        kbest = j;
                    }
                }
                chain = {run.lo, kbest, run.hi};
                for (std::size_t guard = 0; guard + run.lo < run.hi; ++guard) {
                    bool split = false;
                    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
                        if (seg_ok(q[chain[j]], q[chain[j + 1]], check))
                            continue;
                        std::size_t mid = (chain[j] + chain[j + 1]) / 2;
                        if (mid == chain[j] || mid == chain[j + 1])
                            break;
                        chain.insert(chain.begin() + static_cast<long>(j) + 1,
                                     mid);
                        split = true;
                        break;
                    }
                    if (!split)
                        break;
                }
            }
            // the anchor q[run.lo] is already emitted; emit the chain interior
            // subdivided at <= 0.1 m so corner samples stay isolated in the
            // profile, and let the outer loop emit the closing anchor q[run.hi]
            for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
                const Vec2 &a = q[chain[j]], &b = q[chain[j + 1]];
                int k = std::max(1, static_cast<int>(std::ceil((b - a).norm() / 0.1)));
                bool last_seg = j + 2 == chain.size();
                for (int m = 1; m <= (last_seg ? k - 1 : k); ++m)
                    np.push_back(a + (b - a) * (static_cast<double>(m) / k));
            }
            i = run.hi - 1; // ++i lands on the closing anchor next
        }
    }
    out.points = std::move(np);
    out.stop_index = new_stop ? new_stop : stop_index;
    // Chain vertices can land on consecutive samples, which would put two
    // forced stops next to each other (untraversable for the profile). Merge
    // such pairs by dropping the gentler corner; the surviving sample absorbs
    // the combined turn as one isolated stop.
    for (int guard = 0; guard < 200; ++guard) {
        auto &p = out.points;
        auto pinned_at = [&](std::size_t i) {
            return i == 0 || i + 1 == p.size() ||
                   (out.stop_index && i == *out.stop_index);
        };
        auto zero_at = [&](std::size_t i) {
            return pinned_at(i) || turn_ratio(p, i, r_min) > 1.0;
        };
        bool changed = false;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            if (!zero_at(i) || !zero_at(i + 1))
                continue;
            std::size_t e;
            if (pinned_at(i) && pinned_at(i + 1))
                continue; // genuinely degenerate; the profile will reject it
            if (pinned_at(i))
                e = i + 1;
            else if (pinned_at(i + 1))
                e = i;
            else
                e = turn_ratio(p, i, r_min) < turn_ratio(p, i + 1, r_min) ? i
                                                                          : i + 1;
            p.erase(p.begin() + static_cast<long>(e));
            if (out.stop_index && *out.stop_index > e)
                --*out.stop_index;
            changed = true;
            break;
        }
        if (!changed)
            break;
    }
    return out;
}

// Shared tail of every planning pipeline: bubbles around the resampled path,
// curvature-capped smoothing, minimum-time profile with the required stops.
inline PlanResult finish_plan(const OccupancyGrid &belief,
                              const std::vector<double> &dist,
                              const ReferencePath &ref, const Vec2 &vel,
                              const SimConfig &cfg, StageTimings timings,
                              double t_after_search) {
    SplitPath sp = split_and_resample(ref, 0.1);
    if (sp.points.size() < 2)
        throw InfeasiblePlanError("plan: degenerate resampled path");
    if (sp.stop_index && *sp.stop_index == 0)
        throw InfeasiblePlanError(
            "plan: path enters unknown space immediately; nothing executable");
    BubbleTube tube =
        build_bubbles(belief, sp.points, sp.stop_index ? *sp.stop_index + 1
                                                       : std::optional<std::size_t>{},
                      dist);
    std::vector<std::size_t> stops;
    if (sp.stop_index && *sp.stop_index > 0 &&
        *sp.stop_index + 1 < sp.points.size()) {
        // pin the frontier stop so the rest state is guaranteed collision-free
        tube.radii[*sp.stop_index] = 0.02;
        stops.push_back(*sp.stop_index);
    }
    stops.push_back(sp.points.size() - 1);

    SmoothOptions sopt;
    double speed = vel.norm();
    if (speed > 1e-6)
        sopt.start_direction = vel / speed;
    // Cap discrete curvature at half the vehicle's limit at the nominal
    // spacing. The optimizer can compress local spacing by up to ~sqrt(2)
    // where the caps bind, which doubles the true curvature, so the derated
    // cap is what actually keeps the turn radius at or above r_min.
    sopt.curvature_caps.assign(sp.points.size() - 2,
                               0.45 * 0.1 * 0.1 / cfg.vehicle.r_min);
    sopt.spacing_weight = 1.0;
    std::vector<Vec2> smoothed;
    try {
        smoothed = smooth_path(tube, sopt);
    } catch (const SmoothingError &) {
        sopt.curvature_caps.clear(); // retry uncapped; over-curved samples are
                                     // handled by the flattening pass below
        smoothed = smooth_path(tube, sopt);
    }
    // turns too tight to sweep become isolated stop-and-turn corners
    FlatPath flat = flatten_sharp_turns(smoothed, sp.stop_index,
                                        cfg.vehicle.r_min, belief, dist);
    if (flat.stop_index) {
        stops.clear();
        if (*flat.stop_index > 0 && *flat.stop_index + 1 < flat.points.size())
            stops.push_back(*flat.stop_index);
        stops.push_back(flat.points.size() - 1);
    } else {
        stops.assign(1, flat.points.size() - 1);
    }
    double t_after_smooth = now_seconds();
    timings.smooth = t_after_smooth - t_after_search;

    PlanResult res;
    res.traj = min_time_profile(flat.points, cfg.vehicle, speed, stops,
                                flat.stop_index &&
                                        *flat.stop_index + 1 < flat.points.size()
                                    ? flat.stop_index
                                    : std::optional<std::size_t>{});
    timings.profile = now_seconds() - t_after_smooth;
    res.timings = timings;
    std::size_t stop_at = stops.front();
    res.planned_terminal_speed = res.traj.samples[stop_at].vel.norm();
    return res;
}

} // namespace detail

/// One full planning step: frontiers -> query -> occupancy prediction ->
/// heuristic-guided search through unknown space -> bubble corridor ->
/// smoothing -> minimum-time profile with a zero-speed stop at the frontier
/// crossing. `truth` is only consulted for the oracle_maps strategy.
inline PlanResult plan_once(const SimState &state, const SimConfig &cfg,
                            const CnpModel *model,
                            const OccupancyGrid *truth = nullptr) {
    double t0 = detail::now_seconds();
    StageTimings timings;
    FrontierSet frontiers = extract_frontiers(state.belief);

    CostField field = CostField::zeros(state.belief, cfg.alpha, cfg.eps);
    double t_pred0 = detail::now_seconds();
    timings.sense = t_pred0 - t0; // frontier extraction: perception bookkeeping
    if (cfg.strategy != Strategy::NoPrediction && !frontiers.cells.empty()) {
        QuerySet qs = build_query(state.belief, state.pose, frontiers,
                                  cfg.sensor_range, cfg.prediction_radius);
        if (!qs.target_xy.empty()) {
            std::vector<double> phi;
            if (cfg.strategy == Strategy::OracleMaps) {
                if (!truth)
                    throw ConfigError("plan_once: oracle_maps needs the truth grid");
                phi.reserve(qs.target_cells.size());
                for (int cell : qs.target_cells)
                    phi.push_back(
                        truth->cells[static_cast<std::size_t>(cell)] == Occ::Occupied
                            ? 1.0
                            : 0.0);
            } else {
                if (!model)
                    throw ConfigError("plan_once: cnp strategy needs a model");
                phi = cnp_predict(*model, qs);
            }
            for (std::size_t i = 0; i < qs.target_cells.size(); ++i)
                field.phi[static_cast<std::size_t>(qs.target_cells[i])] =
                    static_cast<float>(phi[i]);
        }
    }
    double t_search0 = detail::now_seconds();
    timings.predict = t_search0 - t_pred0;

    ReferencePath ref = astar_plan(state.belief, field, state.pose, cfg.goal);
    std::vector<double> dist = distance_field(state.belief);
    double t_after_search = detail::now_seconds();
    timings.search = t_after_search - t_search0;

    PlanResult res = detail::finish_plan(state.belief, dist, ref, state.vel, cfg,
                                         timings, t_after_search);
    res.timings.total = detail::now_seconds() - t0;
    return res;
}

/// Frontier-pursuit baseline: plan within known space only, toward the
/// frontier centroid nearest the goal (or the goal itself when it is already
/// known-reachable); zero terminal velocity.
inline PlanResult naive_plan(const SimState &state, const SimConfig &cfg) {
    double t0 = detail::now_seconds();
    StageTimings timings;
    FrontierSet frontiers = extract_frontiers(state.belief);
    double t_search0 = detail::now_seconds();
    timings.sense = t_search0 - t0;

    AstarOptions opt;
    opt.unknown_passable = false;
    CostField field = CostField::zeros(state.belief, cfg.alpha, cfg.eps);
    std::optional<ReferencePath> ref;
    try {
        ref = astar_plan(state.belief, field, state.pose, cfg.goal, opt);
    } catch (const InfeasiblePlanError &) {
    } catch (const InvalidPoseError &) {
    }
    if (!ref) {
        // nearest-to-goal frontier centroid, snapped to a real frontier cell
        // of its cluster (the centroid itself may be unreachable)
        if (frontiers.clusters.empty())
            throw InfeasiblePlanError("naive_plan: no frontier and goal unreachable");
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < frontiers.centroids.size(); ++i) {
            double d = (frontiers.centroids[i] - cfg.goal).norm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        int target_cell = -1;
        double snap_d = std::numeric_limits<double>::infinity();
        for (int cell : frontiers.clusters[best]) {
            double d =
                (state.belief.cell_center(cell) - frontiers.centroids[best]).norm();
            if (d < snap_d) {
                snap_d = d;
                target_cell = cell;
            }
        }
        ref = astar_plan(state.belief, field, state.pose,
                         state.belief.cell_center(target_cell), opt);
    }
    std::vector<double> dist = distance_field(state.belief);
    double t_after_search = detail::now_seconds();
    timings.search = t_after_search - t_search0;

    PlanResult res = detail::finish_plan(state.belief, dist, *ref, state.vel, cfg,
                                         timings, t_after_search);
    res.timings.total = detail::now_seconds() - t0;
    return res;
}

/// Full-knowledge minimum-time reference for a map: the same search ->
/// bubbles -> smooth -> profile pipeline run once on the truth grid, zero
/// speed only at the goal. Returns the trajectory and the time of first entry
/// into the goal disk (the episode goal condition), so relative completion
/// times compare like with like.
inline std::pair<Trajectory, double> optimal_reference(const OccupancyGrid &truth,
                                                       const SimConfig &cfg) {
    SimState st;
    st.pose = cfg.start;
    st.vel = Vec2::Zero();
    st.belief = truth;
    PlanResult res = plan_once(st, cfg, nullptr, &truth);
    const Trajectory &t = res.traj;
    double entry = t.total_time;
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        if ((t.samples[i].pos - cfg.goal).norm() <= cfg.goal_radius) {
            if (i == 0) {
                entry = 0.0;
                break;
            }
            // linear interpolation of the crossing within the segment
            Vec2 a = t.samples[i - 1].pos, b = t.samples[i].pos;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 40; ++it) {
                double mid = 0.5 * (lo + hi);
                ((a + mid * (b - a) - cfg.goal).norm() <= cfg.goal_radius ? hi : lo) =
                    mid;
            }
            entry = t.samples[i - 1].t + hi * (t.samples[i].t - t.samples[i - 1].t);
            break;
        }
    }
    return {t, entry};
}

struct ExecutedSample {
    double t = 0.0; // episode clock
    Vec2 pos = Vec2::Zero();
    Vec2 vel = Vec2::Zero();
    double u_long = 0.0, u_lat = 0.0;
};

struct RunLog {
    std::string strategy;
    std::uint64_t maze_seed = 0;
    bool success = false;
    std::string failure_reason; // empty on success
    double completion_time = 0.0;
    double t_opt = 0.0;
    int iterations = 0;
    int fallbacks = 0;
    std::vector<StageTimings> timings;
    std::vector<ExecutedSample> executed;
    std::vector<double> planned_terminal_speeds;
    double min_clearance = std::numeric_limits<double>::infinity();
    int collision_samples = 0;     // executed samples in truth-occupied cells
    int unknown_belief_samples = 0; // executed samples outside known-free belief

    double relative_time() const {
        return t_opt > 0.0 ? completion_time / t_opt : 0.0;
    }
};

/// The receding-horizon episode loop: sense, plan to goal, execute the known
/// segment for one replan period (sensing along the way), repeat. Planning
/// failures fall back to the remainder of the previous trajectory, which ends
/// at rest; repeated failures from rest end the episode.
inline RunLog run_episode(const OccupancyGrid &truth, const SimConfig &cfg,
                          const CnpModel *model = nullptr) {
    cfg.validate();
    RunLog log;
    log.strategy = strategy_name(cfg.strategy);

    auto [opt_traj, t_opt] = optimal_reference(truth, cfg);
    (void)opt_traj;
    log.t_opt = t_opt;
    const double timeout = cfg.timeout_factor * t_opt;

    std::vector<double> truth_dist = distance_field(truth);

    SimState st;
    st.pose = cfg.start;
    st.vel = Vec2::Zero();
    st.belief = OccupancyGrid::unknown_like(truth);
    simulate_lidar(truth, st.belief, st.pose, cfg.sensor_range, cfg.lidar_beams);

    auto audit = [&](const TrajectorySample &s, double clock) {
        ExecutedSample e;
        e.t = clock;
        e.pos = s.pos;
        e.vel = s.vel;
        e.u_long = s.u_long;
        e.u_lat = s.u_lat;
        log.executed.push_back(e);
        Eigen::Vector2i c = truth.world_to_cell(s.pos);
        if (!truth.in_bounds(c.x(), c.y()) ||
            truth.at(c.x(), c.y()) == Occ::Occupied)
            ++log.collision_samples;
        if (st.belief.in_bounds(c.x(), c.y())) {
            if (st.belief.at(c.x(), c.y()) != Occ::Free)
                ++log.unknown_belief_samples;
            log.min_clearance = std::min(
                log.min_clearance,
                truth_dist[static_cast<std::size_t>(truth.index(c.x(), c.y()))]);
        } else {
            ++log.unknown_belief_samples;
        }
    };
    audit(TrajectorySample{0.0, st.pose, st.vel, 0.0, 0.0, false}, 0.0);

    Trajectory current;
    double t_exec = 0.0; // consumed trajectory time of `current`
    int consecutive_failures = 0;
    const int max_consecutive_failures = 5;

    while (true) {
        if ((st.pose - cfg.goal).norm() <= cfg.goal_radius) {
            log.success = true;
            log.completion_time = st.clock;
            break;
        }
        if (st.clock > timeout) {
            log.failure_reason = "timeout";
            break;
        }
        // plan from the current state
        bool planned = false;
        try {
            PlanResult res = cfg.strategy == Strategy::Naive
                                 ? naive_plan(st, cfg)
                                 : plan_once(st, cfg, model, &truth);
            current = res.traj;
            t_exec = 0.0;
            planned = true;
            consecutive_failures = 0;
            log.timings.push_back(res.timings);
            log.planned_terminal_speeds.push_back(res.planned_terminal_speed);
        } catch (const std::runtime_error &) {
            ++log.fallbacks;
        }
        double horizon = current.frontier_time.value_or(current.total_time);
        if (!planned && t_exec >= horizon - 1e-9) {
            // at rest with nothing left to execute
            if (++consecutive_failures >= max_consecutive_failures) {
                log.failure_reason = "stuck: repeated planning failures";
                break;
            }
            // re-sense and retry (the scan may already be complete; the
            // counter bounds this)
            simulate_lidar(truth, st.belief, st.pose, cfg.sensor_range,
                           cfg.lidar_beams);
            ++log.iterations;
            continue;
        }
        ++log.iterations;
        // execute for one replan period of trajectory time, sensing along the way
        double chunk_end = std::min(t_exec + cfg.replan_period, horizon);
        bool reached = false;
        double t = t_exec;
        double sense_time = 0.0;
        while (!reached) {
            t = std::min(t + 0.1, chunk_end);
            TrajectorySample s = current.state_at(t);
            st.pose = s.pos;
            st.vel = s.vel;
            double dt = t - t_exec;
            t_exec = t;
            st.clock += dt;
            audit(s, st.clock);
            double s0 = detail::now_seconds();
            simulate_lidar(truth, st.belief, st.pose, cfg.sensor_range,
                           cfg.lidar_beams);
            sense_time += detail::now_seconds() - s0;
            if ((st.pose - cfg.goal).norm() <= cfg.goal_radius)
                reached = true;
            if (t >= chunk_end - 1e-12)
                break;
        }
        if (planned && !log.timings.empty()) {
            log.timings.back().sense += sense_time;
            log.timings.back().total += sense_time;
        }
        if (reached) {
            log.success = true;
            log.completion_time = st.clock;
            break;
        }
    }
    return log;
}

} // namespace mappred

#endif
