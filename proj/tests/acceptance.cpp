// Acceptance gate: end-to-end checks of the planner, predictor, and harness
// against the project's quantitative requirements. Each criterion prints one
// [PASS]/[FAIL] line; the process exits nonzero if any criterion fails.
//
// The trained predictor weights are cached next to the working directory
// (acceptance_model.cnpw1) so reruns skip the training step; delete the file
// to retrain from scratch.

#include "mappred/cnp_io.hpp"
#include "mappred/dataset.hpp"
#include "mappred/experiment.hpp"
#include "mappred/train.hpp"
#include "mappred/validate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mappred;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, const std::string &name, bool pass, const std::string &detail) {
    g_results.push_back({id, name, pass, detail});
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << " ("
              << name << "): " << detail << std::endl;
}

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// ---------------------------------------------------------------------------
// Independent oracles (deliberately not sharing code with the library).
// ---------------------------------------------------------------------------

// Plain Dijkstra over the same traversability rules as the planner's search:
// 8-connected, one-cell obstacle inflation with start/goal exemption, no
// corner cutting, axis/diagonal edge costs in exact integer-pair form.
double dijkstra_cost(const OccupancyGrid &belief, const Vec2 &start,
                     const Vec2 &goal, bool unknown_passable) {
    Eigen::Vector2i sc = belief.world_to_cell(start);
    Eigen::Vector2i gc = belief.world_to_cell(goal);
    const int w = belief.width, h = belief.height, n = w * h;
    const double res = belief.resolution, diag = std::sqrt(2.0) * res;
    std::vector<bool> blocked(static_cast<std::size_t>(n), false);
    for (int cy = 0; cy < h; ++cy)
        for (int cx = 0; cx < w; ++cx) {
            if (belief.at(cx, cy) != Occ::Occupied)
                continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (belief.in_bounds(cx + dx, cy + dy))
                        blocked[static_cast<std::size_t>(
                            belief.index(cx + dx, cy + dy))] = true;
        }
    auto exempt = [&](int idx, const Eigen::Vector2i &a) {
        if (belief.cells[static_cast<std::size_t>(idx)] == Occ::Occupied)
            return false;
        return std::abs(belief.cell_x(idx) - a.x()) <= 1 &&
               std::abs(belief.cell_y(idx) - a.y()) <= 1;
    };
    auto passable = [&](int idx) {
        Occ o = belief.cells[static_cast<std::size_t>(idx)];
        if (o == Occ::Occupied)
            return false;
        if (o == Occ::Unknown && !unknown_passable)
            return false;
        if (blocked[static_cast<std::size_t>(idx)] && !exempt(idx, sc) &&
            !exempt(idx, gc))
            return false;
        return true;
    };
    std::vector<int> g_axis(static_cast<std::size_t>(n), 0),
        g_diag(static_cast<std::size_t>(n), 0);
    std::vector<double> g_val(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
    int s_idx = belief.index(sc.x(), sc.y()), g_idx = belief.index(gc.x(), gc.y());
    g_val[static_cast<std::size_t>(s_idx)] = 0.0;
    open.push({0.0, s_idx});
    const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!open.empty()) {
        auto [gc_cur, cur] = open.top();
        open.pop();
        if (gc_cur != g_val[static_cast<std::size_t>(cur)])
            continue;
        int cx = belief.cell_x(cur), cy = belief.cell_y(cur);
        for (int k = 0; k < 8; ++k) {
            int nx = cx + dxs[k], ny = cy + dys[k];
            if (!belief.in_bounds(nx, ny))
                continue;
            int nidx = belief.index(nx, ny);
            if (!passable(nidx))
                continue;
            if (k >= 4 && (!passable(belief.index(cx + dxs[k], cy)) ||
                           !passable(belief.index(cx, cy + dys[k]))))
                continue;
            int na = g_axis[static_cast<std::size_t>(cur)] + (k >= 4 ? 0 : 1);
            int nd = g_diag[static_cast<std::size_t>(cur)] + (k >= 4 ? 1 : 0);
            double ng = na * res + nd * diag;
            if (ng < g_val[static_cast<std::size_t>(nidx)]) {
                g_val[static_cast<std::size_t>(nidx)] = ng;
                g_axis[static_cast<std::size_t>(nidx)] = na;
                g_diag[static_cast<std::size_t>(nidx)] = nd;
                open.push({ng, nidx});
            }
        }
    }
    return g_val[static_cast<std::size_t>(g_idx)];
}

// Forward-backward integration profiler: velocity-squared limits from the
// centripetal friction bound, then deceleration and acceleration passes with
// the tangential share of the friction circle. Time by trapezoidal summation.
double fb_profile_time(const std::vector<Vec2> &q, const VehicleParams &vp,
                       double v_start, const std::vector<std::size_t> &stops) {
    const std::size_t n = q.size();
    std::vector<double> arc(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        arc[i] = arc[i - 1] + (q[i] - q[i - 1]).norm();
    std::vector<double> kappa(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        Vec2 d1 = (q[i + 1] - q[i - 1]) / (arc[i + 1] - arc[i - 1]);
        double h2 = (arc[i + 1] - arc[i]) * (arc[i] - arc[i - 1]);
        Vec2 d2 = (q[i + 1] - 2.0 * q[i] + q[i - 1]) / h2;
        kappa[i] =
            std::abs(d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
    }
    const double mug = vp.friction_accel();
    std::vector<double> v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lim = vp.v_max * vp.v_max;
        if (kappa[i] > 0.0)
            lim = std::min(lim, mug / kappa[i]);
        v2[i] = lim;
    }
    for (std::size_t s : stops)
        v2[s] = 0.0;
    v2[0] = std::min(v2[0], v_start * v_start);
    for (std::size_t i = n - 1; i-- > 0;) {
        double d = arc[i + 1] - arc[i];
        double cent = kappa[i + 1] * v2[i + 1];
        double at = std::sqrt(std::max(0.0, mug * mug - cent * cent));
        v2[i] = std::min(v2[i], v2[i + 1] + 2.0 * at * d);
    }
    v2[0] = v_start * v_start;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double d = arc[i + 1] - arc[i];
        double cent = kappa[i] * v2[i];
        double at = std::sqrt(std::max(0.0, mug * mug - cent * cent));
        v2[i + 1] = std::min(v2[i + 1], v2[i] + 2.0 * at * d);
    }
    double T = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        T += 2.0 * (arc[i + 1] - arc[i]) /
             (std::sqrt(v2[i]) + std::sqrt(v2[i + 1]));
    return T;
}

std::vector<Vec2> straight_path(double length, double spacing) {
    std::vector<Vec2> p;
    int n = static_cast<int>(std::round(length / spacing));
    for (int i = 0; i <= n; ++i)
        p.emplace_back(length * i / n, 0.0);
    return p;
}

std::vector<Vec2> random_smooth_path(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> turn(-0.25, 0.25);
    std::uniform_int_distribution<int> len(20, 60);
    std::vector<Vec2> raw;
    Vec2 p(0.0, 0.0);
    double heading = 0.0;
    int n = len(rng);
    for (int i = 0; i < n; ++i) {
        raw.push_back(p);
        heading += turn(rng);
        p += 0.3 * Vec2(std::cos(heading), std::sin(heading));
    }
    raw.push_back(p);
    BubbleTube tube;
    tube.centers = resample_polyline(raw, 0.1);
    tube.radii.assign(tube.centers.size(), 0.4);
    SmoothOptions opt;
    double h = (tube.centers[1] - tube.centers[0]).norm();
    opt.curvature_caps.assign(tube.centers.size() - 2, 0.9 * h * h / 0.5);
    return smooth_path(tube, opt);
}

OccupancyGrid random_known_grid(std::mt19937_64 &rng, bool with_unknown) {
    OccupancyGrid g(24, 24, 0.25, Occ::Free);
    g.origin = Vec2(0.0, 0.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto &c : g.cells)
        if (u(rng) < 0.2)
            c = Occ::Occupied;
    if (with_unknown)
        for (int cy = 0; cy < 24; ++cy)
            for (int cx = 12; cx < 24; ++cx)
                if (g.at(cx, cy) == Occ::Free && u(rng) < 0.7)
                    g.at(cx, cy) = Occ::Unknown;
    return g;
}

// ---------------------------------------------------------------------------
// Criteria 5 and 6: profile and search oracles.
// ---------------------------------------------------------------------------

void criterion_5_profile_oracles() {
    // Closed forms: bang-bang T = 2 sqrt(L/a); trapezoid T = L/v + v/a.
    const double a = 0.9 * 9.81;
    int checked = 0;
    double worst = 0.0;
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> len_bb(1.0, 1.6), len_tz(3.0, 12.0);
    for (int k = 0; k < 25; ++k) {
        double L = len_bb(rng);
        VehicleParams vp;
        vp.v_max = 1e6; // never speed-capped: pure bang-bang
        std::vector<Vec2> path = straight_path(L, 0.02);
        double T = min_time_profile(path, vp, 0.0, {path.size() - 1}).total_time;
        double ref = 2.0 * std::sqrt(L / a);
        worst = std::max(worst, std::abs(T - ref) / ref);
        ++checked;
    }
    for (int k = 0; k < 25; ++k) {
        double L = len_tz(rng);
        VehicleParams vp;
        vp.v_max = 1.0; // speed-capped: accelerate, cruise, brake
        std::vector<Vec2> path = straight_path(L, 0.02);
        double T = min_time_profile(path, vp, 0.0, {path.size() - 1}).total_time;
        double ref = L / vp.v_max + vp.v_max / a;
        worst = std::max(worst, std::abs(T - ref) / ref);
        ++checked;
    }
    bool closed_ok = worst <= 0.01;

    double worst_fb = 0.0;
    std::mt19937_64 rng2(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec2> path = random_smooth_path(rng2);
        VehicleParams vp;
        vp.v_max = trial % 2 == 0 ? 4.0 : 1.5;
        double T = min_time_profile(path, vp, 0.0, {path.size() - 1}).total_time;
        double ref = fb_profile_time(path, vp, 0.0, {path.size() - 1});
        worst_fb = std::max(worst_fb, std::abs(T - ref) / ref);
    }
    bool fb_ok = worst_fb <= 0.02;

    std::ostringstream os;
    os << checked << " closed-form points, worst rel err " << worst
       << " (limit 0.01); 50 smoothed paths vs FB integrator, worst rel err "
       << worst_fb << " (limit 0.02)";
    report(5, "speed-profile oracle", closed_ok && fb_ok, os.str());
}

void criterion_6_search_oracle() {
    std::mt19937_64 rng(99);
    int known_checked = 0, unknown_checked = 0, mismatches = 0;
    while (known_checked < 100) {
        OccupancyGrid g = random_known_grid(rng, false);
        std::uniform_int_distribution<int> pick(0, 23);
        Vec2 s = g.cell_center(pick(rng), pick(rng));
        Vec2 t = g.cell_center(pick(rng), pick(rng));
        try {
            ReferencePath p =
                astar_plan(g, CostField::zeros(g), s, t, AstarOptions{});
            double ref = dijkstra_cost(g, s, t, true);
            if (p.cost != ref)
                ++mismatches;
            ++known_checked;
        } catch (const std::runtime_error &) {
            continue; // unreachable pair; draw another grid
        }
    }
    while (unknown_checked < 100) {
        OccupancyGrid g = random_known_grid(rng, true);
        std::uniform_int_distribution<int> pick_lo(0, 11), pick_any(0, 23);
        Vec2 s = g.cell_center(pick_lo(rng), pick_any(rng));
        Vec2 t = g.cell_center(pick_any(rng), pick_any(rng));
        try {
            ReferencePath p =
                astar_plan(g, CostField::zeros(g), s, t, AstarOptions{});
            double ref = dijkstra_cost(g, s, t, true);
            if (p.cost != ref)
                ++mismatches;
            ++unknown_checked;
        } catch (const std::runtime_error &) {
            continue;
        }
    }
    std::ostringstream os;
    os << known_checked << " known grids + " << unknown_checked
       << " grids with unknown space (zero-phi heuristic), " << mismatches
       << " cost mismatches (must be 0, exact equality)";
    report(6, "search matches Dijkstra", mismatches == 0, os.str());
}

// ---------------------------------------------------------------------------
// Criterion 7: predictor correctness.
// ---------------------------------------------------------------------------

void criterion_7_predictor(const CnpModel &trained,
                           const std::vector<TrainingExample> &heldout) {
    // (a) finite-difference gradient check in double precision, embed_dim 8
    CnpModelT<double> m = CnpModelT<double>::make(5, 8, 8);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec2> cxy, txy;
    std::vector<float> cocc, ty;
    for (int i = 0; i < 6; ++i) {
        cxy.emplace_back(u(rng), u(rng));
        cocc.push_back(u(rng) > 0.0 ? 1.0f : 0.0f);
    }
    for (int i = 0; i < 5; ++i) {
        txy.emplace_back(u(rng), u(rng));
        ty.push_back(u(rng) > 0.0 ? 1.0f : 0.0f);
    }
    Mlp<double> ge = m.encoder, gd = m.decoder;
    for (auto &l : ge.layers) {
        l.W.setZero();
        l.b.setZero();
    }
    for (auto &l : gd.layers) {
        l.W.setZero();
        l.b.setZero();
    }
    cnp_loss_grad(m, cxy, cocc, txy, ty, ge, gd);
    double worst_rel = 0.0;
    const double h = 1e-6;
    auto probe = [&](Mlp<double> &weights, const Mlp<double> &grads) {
        for (std::size_t l = 0; l < weights.layers.size(); ++l)
            for (int r = 0; r < weights.layers[l].W.rows(); r += 3)
                for (int c = 0; c < weights.layers[l].W.cols(); c += 3) {
                    double save = weights.layers[l].W(r, c);
                    weights.layers[l].W(r, c) = save + h;
                    double lp = nll_loss(cnp_predict(m, cxy, cocc, txy), ty);
                    weights.layers[l].W(r, c) = save - h;
                    double lm = nll_loss(cnp_predict(m, cxy, cocc, txy), ty);
                    weights.layers[l].W(r, c) = save;
                    double fd = (lp - lm) / (2.0 * h);
                    double an = grads.layers[l].W(r, c);
                    double rel = std::abs(fd - an) /
                                 std::max(1e-8, std::abs(fd) + std::abs(an));
                    worst_rel = std::max(worst_rel, rel);
                }
    };
    probe(m.encoder, ge);
    probe(m.decoder, gd);
    bool grad_ok = worst_rel <= 1e-4;

    // (b) exact permutation and duplication invariance
    CnpModel inv = CnpModel::make(3, 16, 16);
    std::vector<Vec2> pc = {{0.1, 0.2}, {-0.4, 0.9}, {1.3, -0.7}, {0.0, 0.5}};
    std::vector<float> po = {1.0f, 0.0f, 1.0f, 0.0f};
    std::vector<Vec2> pt = {{0.2, 0.2}, {-1.0, 0.1}};
    auto base = cnp_predict(inv, pc, po, pt);
    std::vector<Vec2> perm = {pc[2], pc[0], pc[3], pc[1]};
    std::vector<float> perm_o = {po[2], po[0], po[3], po[1]};
    auto permuted = cnp_predict(inv, perm, perm_o, pt);
    std::vector<Vec2> dup = pc;
    dup.insert(dup.end(), pc.begin(), pc.end());
    std::vector<float> dup_o = po;
    dup_o.insert(dup_o.end(), po.begin(), po.end());
    auto duplicated = cnp_predict(inv, dup, dup_o, pt);
    bool inv_ok = base == permuted && base == duplicated;

    // (c) held-out NLL beats the best-constant predictor
    double model_nll = cnp_evaluate(trained, heldout);
    double pos = 0.0, cnt = 0.0;
    for (const auto &ex : heldout)
        for (float y : ex.target_y) {
            pos += static_cast<double>(y);
            cnt += 1.0;
        }
    double p = std::min(1.0 - 1e-7, std::max(1e-7, pos / cnt));
    double const_nll = -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p));
    bool nll_ok = model_nll < const_nll;

    // (d) single-example overfit: full context/target sets, no subsampling
    std::vector<TrainingExample> one(heldout.begin(), heldout.begin() + 1);
    CnpModel over = CnpModel::make(2, 64, 128);
    TrainConfig tc;
    tc.iterations = 4000;
    tc.batch_size = 1;
    tc.learning_rate = 1e-3;
    tc.context_cap = static_cast<int>(one[0].context_xy.size());
    tc.target_cap = static_cast<int>(one[0].target_xy.size());
    tc.seed = 9;
    cnp_train(over, one, tc);
    double over_nll = cnp_evaluate(over, one);
    bool over_ok = over_nll < 0.05;

    std::ostringstream os;
    os << "gradcheck worst rel err " << worst_rel
       << " (limit 1e-4); permutation/duplication invariance "
       << (inv_ok ? "exact" : "BROKEN") << "; held-out NLL " << model_nll
       << " vs best-constant " << const_nll << "; single-example overfit NLL "
       << over_nll << " (limit 0.05)";
    report(7, "predictor correctness", grad_ok && inv_ok && nll_ok && over_ok,
           os.str());
}

// ---------------------------------------------------------------------------
// Episode suites (criteria 1, 2, 3, 4, 8, 9).
// ---------------------------------------------------------------------------

struct Cell {
    Strategy strategy;
    double v_max;
    double sensor;
    double pred;
    std::vector<RunLog> logs;

    double mean_relative() const {
        double s = 0.0;
        int n = 0;
        for (const RunLog &l : logs)
            if (l.success) {
                s += l.relative_time();
                ++n;
            }
        return n > 0 ? s / n : std::numeric_limits<double>::quiet_NaN();
    }
    int failures() const {
        int f = 0;
        for (const RunLog &l : logs)
            f += l.success ? 0 : 1;
        return f;
    }
};

Cell run_cell(const std::vector<std::uint64_t> &seeds, Strategy strat,
              double v_max, double sensor, double pred, const CnpModel *model) {
    Cell cell{strat, v_max, sensor, pred, {}};
    for (std::uint64_t ms : seeds) {
        MazeSpec spec = default_maze_spec(ms, 15.0, 2.5, 0.25);
        OccupancyGrid maze = generate_maze(spec, 0.25);
        SimConfig sim;
        sim.strategy = strat;
        sim.vehicle.v_max = v_max;
        sim.sensor_range = sensor;
        sim.prediction_radius = pred;
        sim.start = spec.start;
        sim.goal = spec.goal;
        RunLog log = run_episode(maze, sim, model);
        log.maze_seed = ms;
        cell.logs.push_back(std::move(log));
    }
    return cell;
}

} // namespace

int main() {
    const double t_begin = now();
    std::cout << "acceptance gate: oracle checks, predictor training, and "
              << (20 * 6 + 20 + 60 + 20) << " maze episodes\n";

    criterion_5_profile_oracles();
    criterion_6_search_oracle();

    // ---- train (or load) the desk-scale predictor --------------------------
    const std::string cache = "acceptance_model.cnpw1";
    const std::vector<std::uint64_t> train_seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CnpModel model;
    bool loaded = false;
    if (std::filesystem::exists(cache)) {
        try {
            model = load_cnp(cache);
            loaded = true;
            std::cout << "loaded cached predictor weights from " << cache << "\n";
        } catch (const std::exception &) {
            loaded = false;
        }
    }
    if (!loaded) {
        std::cout << "training predictor: 10 mazes x 30 scans, 20000 iterations"
                  << std::endl;
        std::vector<OccupancyGrid> maps;
        for (std::uint64_t s : train_seeds)
            maps.push_back(generate_maze(default_maze_spec(s, 15.0, 2.5, 0.25), 0.25));
        std::vector<TrainingExample> train_set =
            make_dataset(maps, 30, 7.5, 5.0, 17);
        model = CnpModel::make(11, 64, 64);
        TrainConfig tc;
        tc.iterations = 20000;
        tc.batch_size = 4;
        tc.learning_rate = 3e-4;
        tc.seed = 23;
        cnp_train(model, train_set, tc);
        save_cnp(model, cache);
        std::cout << "training done in " << now() - t_begin << " s\n";
    }

    // held-out evaluation scans from mazes never used in training
    std::vector<OccupancyGrid> held_maps;
    for (std::uint64_t s : {201ull, 202ull, 203ull, 204ull, 205ull})
        held_maps.push_back(generate_maze(default_maze_spec(s, 15.0, 2.5, 0.25), 0.25));
    std::vector<TrainingExample> heldout = make_dataset(held_maps, 6, 7.5, 5.0, 19);
    criterion_7_predictor(model, heldout);

    // ---- criterion 8a: predictor inference latency --------------------------
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-7.5, 7.5);
        std::vector<Vec2> cxy(2000), txy(2000);
        std::vector<float> cocc(2000);
        for (int i = 0; i < 2000; ++i) {
            cxy[i] = Vec2(u(rng), u(rng));
            txy[i] = Vec2(u(rng), u(rng));
            cocc[i] = (i % 3 == 0) ? 1.0f : 0.0f;
        }
        cnp_predict(model, cxy, cocc, txy); // warm-up
        double best = 1e9;
        for (int rep = 0; rep < 3; ++rep) {
            double t0 = now();
            cnp_predict(model, cxy, cocc, txy);
            best = std::min(best, now() - t0);
        }
        std::ostringstream os;
        os << "inference for |C| = |T| = 2000: " << best * 1e3
           << " ms (limit 100 ms)";
        report(8, "predictor inference latency", best <= 0.1, os.str());
    }

    // ---- episode suites -----------------------------------------------------
    std::vector<std::uint64_t> heldout_mazes;
    for (std::uint64_t s = 101; s <= 120; ++s)
        heldout_mazes.push_back(s);

    std::cout << "running episode grid on 20 held-out 15 m mazes..." << std::endl;
    std::vector<Cell> cells;
    for (double v : {1.0, 4.0})
        for (Strategy s : {Strategy::Cnp, Strategy::Naive, Strategy::OracleMaps})
            cells.push_back(run_cell(heldout_mazes, s, v, 7.5, 5.0, &model));
    Cell no_pred = run_cell(heldout_mazes, Strategy::NoPrediction, 4.0, 7.5, 5.0,
                            nullptr);
    std::cout << "running short-sensor sweep (2.5 m) and extended prediction "
                 "radius (7.5 m)..."
              << std::endl;
    std::vector<Cell> short_cells;
    for (Strategy s : {Strategy::Cnp, Strategy::Naive, Strategy::OracleMaps})
        short_cells.push_back(run_cell(heldout_mazes, s, 4.0, 2.5, 5.0, &model));
    Cell wide_pred = run_cell(heldout_mazes, Strategy::Cnp, 4.0, 7.5, 7.5, &model);

    auto find_cell = [&](Strategy s, double v) -> const Cell & {
        for (const Cell &c : cells)
            if (c.strategy == s && c.v_max == v)
                return c;
        throw std::logic_error("cell not found");
    };

    // ---- criterion 1: cnp beats the naive baseline --------------------------
    {
        double cnp4 = find_cell(Strategy::Cnp, 4.0).mean_relative();
        double naive4 = find_cell(Strategy::Naive, 4.0).mean_relative();
        double cnp1 = find_cell(Strategy::Cnp, 1.0).mean_relative();
        double naive1 = find_cell(Strategy::Naive, 1.0).mean_relative();
        double gap4 = naive4 - cnp4, gap1 = naive1 - cnp1;
        std::ostringstream os;
        os << "mean relative completion at v_max=4: cnp " << cnp4 << ", naive "
           << naive4 << " (gap " << gap4 << ", needs >= 0.05); gap at v_max=1: "
           << gap1 << " (needs gap4 >= gap1)";
        report(1, "prediction beats frontier pursuit", gap4 >= 0.05 && gap4 >= gap1,
               os.str());
    }

    // ---- criterion 2: oracle parity -----------------------------------------
    {
        double cnp4 = find_cell(Strategy::Cnp, 4.0).mean_relative();
        double oracle4 = find_cell(Strategy::OracleMaps, 4.0).mean_relative();
        std::ostringstream os;
        os << "mean relative completion at v_max=4: cnp " << cnp4
           << " vs oracle_maps " << oracle4 << " (|difference| "
           << std::abs(cnp4 - oracle4) << ", limit 0.05)";
        report(2, "parity with perfect prediction", std::abs(cnp4 - oracle4) <= 0.05,
               os.str());
    }

    // ---- criteria 3 and 4: safety and dynamics audits ------------------------
    {
        std::vector<const Cell *> audited;
        for (const Cell &c : cells)
            audited.push_back(&c);
        audited.push_back(&no_pred);
        int collisions = 0, unknown_samples = 0, moving_stops = 0;
        long episodes = 0;
        int force_viol = 0, turn_viol = 0;
        long controls = 0;
        const VehicleParams vp; // constants fixed: m 2.5, mu 0.9, r_min 0.5
        const double f_limit = 22.0725 * (1.0 + 1e-6);
        for (const Cell *cp : audited)
            for (const RunLog &log : cp->logs) {
                ++episodes;
                collisions += log.collision_samples;
                unknown_samples += log.unknown_belief_samples;
                for (double v : log.planned_terminal_speeds)
                    if (v > 1e-9)
                        ++moving_stops;
                for (const ExecutedSample &e : log.executed) {
                    ++controls;
                    if (std::hypot(e.u_long, e.u_lat) > f_limit)
                        ++force_viol;
                    if (std::abs(e.u_lat) >
                        vp.mass * e.vel.squaredNorm() / vp.r_min + 1e-6)
                        ++turn_viol;
                }
            }
        std::ostringstream os3;
        os3 << episodes << " episodes: " << collisions << " collision samples, "
            << unknown_samples << " samples outside known-free belief, "
            << moving_stops << " plans ending above zero speed (all must be 0)";
        report(3, "safety suite",
               collisions == 0 && unknown_samples == 0 && moving_stops == 0,
               os3.str());
        std::ostringstream os4;
        os4 << controls << " executed control samples: " << force_viol
            << " above the 22.0725 N friction circle, " << turn_viol
            << " above the turning limit m v^2 / 0.5 (all must be 0)";
        report(4, "dynamics-constraint audit", force_viol == 0 && turn_viol == 0,
               os4.str());
    }

    // ---- criterion 8b: planning-step wall time and timing consistency -------
    {
        double worst_step = 0.0;
        int timing_mismatch = 0;
        long steps = 0;
        for (const Cell &c : cells)
            for (const RunLog &log : c.logs)
                for (const StageTimings &t : log.timings) {
                    ++steps;
                    worst_step = std::max(worst_step, t.total);
                    double parts =
                        t.sense + t.predict + t.search + t.smooth + t.profile;
                    if (t.total > 1e-4 &&
                        std::abs(parts - t.total) > 0.05 * t.total)
                        ++timing_mismatch;
                }
        std::ostringstream os;
        os << steps << " planning steps on 15 m maps, worst wall time "
           << worst_step << " s (limit 1 s); " << timing_mismatch
           << " steps with stage timings off the total by > 5%";
        report(8, "planning-step envelope", worst_step <= 1.0 && timing_mismatch == 0,
               os.str());
    }

    // ---- criterion 9: sensor range sweep -------------------------------------
    {
        bool order_ok = true;
        std::ostringstream os;
        for (const Cell &sc : short_cells) {
            const Cell &ref = find_cell(sc.strategy, 4.0);
            double short_rel = sc.mean_relative();
            double long_rel = ref.mean_relative();
            os << strategy_name(sc.strategy) << ": 2.5 m -> " << short_rel
               << " vs 7.5 m -> " << long_rel << "; ";
            if (!(short_rel > long_rel))
                order_ok = false;
        }
        bool wide_ok = wide_pred.failures() == 0;
        os << "prediction radius 7.5 m: " << wide_pred.failures()
           << " failures in " << wide_pred.logs.size() << " episodes (must be 0)";
        report(9, "sensor-range trend", order_ok && wide_ok, os.str());
    }

    bool all = true;
    for (const Criterion &c : g_results)
        all = all && c.pass;
    std::cout << (all ? "ACCEPTANCE: all criteria passed"
                      : "ACCEPTANCE: FAILURES present")
              << " (" << now() - t_begin << " s)\n";
    return all ? 0 : 1;
}
