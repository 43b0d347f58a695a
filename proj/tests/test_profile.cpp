#include <catch2/catch_amalgamated.hpp>

#include "mappred/bubbles.hpp"
#include "mappred/penalty.hpp"
#include "mappred/smoothing.hpp"
#include "mappred/speed_profile.hpp"
#include "mappred/validate.hpp"

#include <cmath>
#include <random>

using namespace mappred;

namespace {

std::vector<Vec2> straight_path(double length, double spacing) {
    std::vector<Vec2> p;
    int n = static_cast<int>(std::round(length / spacing));
    for (int i = 0; i <= n; ++i)
        p.emplace_back(length * i / n, 0.0);
    return p;
}

// Independent forward-backward numerical profiler (TOPP style): per-sample
// speed limits from curvature/speed caps, then a backward pass from the stop
// constraints under the maximum-deceleration envelope and a forward pass under
// the maximum-acceleration envelope. Works in v^2 over arclength.
double fb_profile_time(const std::vector<Vec2> &q, const VehicleParams &vp,
                       double v_start, const std::vector<std::size_t> &stops) {
    const std::size_t n = q.size();
    std::vector<double> arc(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        arc[i] = arc[i - 1] + (q[i] - q[i - 1]).norm();
    // curvature by finite differences on arclength
    std::vector<double> kappa(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        Vec2 d1 = (q[i + 1] - q[i - 1]) / (arc[i + 1] - arc[i - 1]);
        double h2 = (arc[i + 1] - arc[i]) * (arc[i] - arc[i - 1]);
        Vec2 d2 = (q[i + 1] - 2.0 * q[i] + q[i - 1]) / h2;
        kappa[i] = std::abs(d1.x() * d2.y() - d1.y() * d2.x()) /
                   std::pow(d1.norm(), 3);
    }
    const double mug = vp.friction_accel();
    std::vector<double> v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lim = vp.v_max * vp.v_max;
        if (kappa[i] > 0.0)
            lim = std::min(lim, mug / kappa[i]); // centripetal saturation
        v2[i] = lim;
    }
    for (std::size_t s : stops)
        v2[s] = 0.0;
    v2[0] = std::min(v2[0], v_start * v_start);
    // backward: decelerate with the tangential share of the friction circle
    for (std::size_t i = n - 1; i-- > 0;) {
        double d = arc[i + 1] - arc[i];
        double cent = kappa[i + 1] * v2[i + 1];
        double at = std::sqrt(std::max(0.0, mug * mug - cent * cent));
        v2[i] = std::min(v2[i], v2[i + 1] + 2.0 * at * d);
    }
    // forward
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

} // namespace

TEST_CASE("straight-line bang-bang time matches the closed form", "[profile]") {
    VehicleParams vp;
    vp.v_max = 1e6;
    std::vector<Vec2> path = straight_path(4.0, 0.1);
    Trajectory t = min_time_profile(path, vp, 0.0, {path.size() - 1});
    double expected = 2.0 * std::sqrt(4.0 / (0.9 * 9.81)); // 1.3457 s
    REQUIRE(t.total_time == Catch::Approx(expected).epsilon(1e-3));
    REQUIRE(t.samples.front().vel.norm() == 0.0);
    REQUIRE(t.samples.back().vel.norm() == 0.0);
}

TEST_CASE("speed-capped straight line matches the trapezoid form", "[profile]") {
    VehicleParams vp;
    vp.v_max = 1.0;
    // fine discretization: the acceleration ramp is only ~0.06 m long, so the
    // sample spacing must resolve it for the closed form to apply
    std::vector<Vec2> path = straight_path(4.0, 0.02);
    Trajectory t = min_time_profile(path, vp, 0.0, {path.size() - 1});
    double mug = 0.9 * 9.81;
    double expected = vp.v_max / mug + 4.0 / vp.v_max; // 4.113 s
    REQUIRE(t.total_time == Catch::Approx(expected).epsilon(1e-2));
    double peak = 0.0;
    for (const auto &s : t.samples)
        peak = std::max(peak, s.vel.norm());
    REQUIRE(peak <= vp.v_max * (1.0 + 1e-6));
}

TEST_CASE("all returned controls stay inside the friction circle", "[profile]") {
    VehicleParams vp;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec2> path = random_smooth_path(rng);
        Trajectory t = min_time_profile(path, vp, 0.0, {path.size() - 1});
        for (const auto &s : t.samples)
            REQUIRE(std::hypot(s.u_long, s.u_lat) <= 22.0725); // mu m g (1+1e-6)
    }
}

TEST_CASE("profile agrees with a forward-backward integrator", "[profile]") {
    VehicleParams vp;
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec2> path = random_smooth_path(rng);
        vp.v_max = trial % 2 == 0 ? 4.0 : 1.5;
        Trajectory t = min_time_profile(path, vp, 0.0, {path.size() - 1});
        double ref = fb_profile_time(path, vp, 0.0, {path.size() - 1});
        REQUIRE(t.total_time == Catch::Approx(ref).epsilon(0.02));
    }
}

TEST_CASE("tightening v_max or adding a stop never speeds things up", "[profile]") {
    std::mt19937_64 rng(77);
    std::vector<Vec2> path = random_smooth_path(rng);
    VehicleParams vp;
    vp.v_max = 4.0;
    double t4 = min_time_profile(path, vp, 0.0, {path.size() - 1}).total_time;
    vp.v_max = 1.0;
    double t1 = min_time_profile(path, vp, 0.0, {path.size() - 1}).total_time;
    REQUIRE(t1 >= t4 * (1.0 - 1e-9));
    vp.v_max = 4.0;
    double t_stop =
        min_time_profile(path, vp, 0.0, {path.size() / 2, path.size() - 1}).total_time;
    REQUIRE(t_stop >= t4 * (1.0 - 1e-9));
}

TEST_CASE("curvature saturation bounds the local speed", "[profile]") {
    // Quarter circle at exactly r_min: speed must stay at or below
    // sqrt(mu g r_min) = 2.101 m/s.
    VehicleParams vp;
    std::vector<Vec2> arc;
    for (int i = 0; i <= 40; ++i) {
        double a = M_PI / 2 * i / 40;
        arc.emplace_back(0.5 * std::sin(a), 0.5 * (1.0 - std::cos(a)));
    }
    Trajectory t = min_time_profile(arc, vp, 0.0, {arc.size() - 1});
    double cap = std::sqrt(0.9 * 9.81 * 0.5) * (1.0 + 1e-3);
    for (const auto &s : t.samples)
        REQUIRE(s.vel.norm() <= cap);
}

TEST_CASE("interior stop yields zero speed and frontier_time", "[profile]") {
    VehicleParams vp;
    std::vector<Vec2> path = straight_path(6.0, 0.1);
    std::size_t mid = path.size() / 2;
    Trajectory t = min_time_profile(path, vp, 0.0, {mid, path.size() - 1}, mid);
    REQUIRE(t.samples[mid].vel.norm() <= 1e-9);
    REQUIRE(t.frontier_time.has_value());
    REQUIRE(*t.frontier_time == Catch::Approx(t.samples[mid].t));
    REQUIRE_FALSE(t.samples[mid].unknown); // the stop is still in known space
    REQUIRE(t.samples[mid + 1].unknown);
}

TEST_CASE("moving start and infeasible entry speeds", "[profile]") {
    VehicleParams vp;
    std::vector<Vec2> path = straight_path(4.0, 0.1);
    Trajectory t = min_time_profile(path, vp, 1.0, {path.size() - 1});
    REQUIRE(t.samples.front().vel.norm() == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(t.total_time <
            min_time_profile(path, vp, 0.0, {path.size() - 1}).total_time);
    // entry speed above the global cap is rejected
    vp.v_max = 0.5;
    REQUIRE_THROWS_AS(min_time_profile(path, vp, 1.0, {path.size() - 1}),
                      ProfileInfeasibleError);
}

TEST_CASE("validator passes profile output and flags planted violations", "[validate]") {
    VehicleParams vp;
    OccupancyGrid g;
    g.resolution = 0.25;
    g.origin = Vec2(-1.0, -1.0);
    g.width = 40;
    g.height = 40;
    g.cells.assign(1600, Occ::Free);
    std::vector<Vec2> path = straight_path(4.0, 0.1);
    Trajectory t = min_time_profile(path, vp, 0.0, {path.size() - 1});
    REQUIRE(validate_trajectory(t, g, vp).empty());

    Trajectory bad = t;
    bad.samples[3].u_long = 1.1 * vp.friction_force();
    bad.samples[3].u_lat = 0.0;
    auto v = validate_trajectory(bad, g, vp);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].sample == 3);
    REQUIRE(v[0].what.find("friction") != std::string::npos);

    g.cells[g.index(g.world_to_cell(Vec2(2.0, 0.0)).x(),
                    g.world_to_cell(Vec2(2.0, 0.0)).y())] = Occ::Occupied;
    auto v2 = validate_trajectory(t, g, vp);
    REQUIRE_FALSE(v2.empty());
    REQUIRE(v2[0].what.find("collision") != std::string::npos);
}

TEST_CASE("penalty integral values and convergence", "[penalty]") {
    OccupancyGrid g;
    g.resolution = 0.25;
    g.origin = Vec2(0.0, 0.0);
    g.width = 40;
    g.height = 40;
    g.cells.assign(1600, Occ::Unknown);
    CostField f = CostField::zeros(g);

    REQUIRE(evaluate_penalty({}, g, f) == 0.0);
    REQUIRE(evaluate_penalty({Vec2(1, 1)}, g, f) == 0.0);

    // 4 m straight segment, phi = 0 everywhere: 0.25 * 4 / 1.001
    std::vector<Vec2> seg = straight_path(4.0, 0.1);
    for (auto &p : seg)
        p += Vec2(0.5, 5.0);
    REQUIRE(evaluate_penalty(seg, g, f) == Catch::Approx(0.25 * 4.0 / 1.001));

    // smooth phi field: refining the discretization x10 changes < 1%
    for (int cy = 0; cy < 40; ++cy)
        for (int cx = 0; cx < 40; ++cx)
            f.phi[static_cast<std::size_t>(g.index(cx, cy))] =
                0.4f + 0.3f * std::sin(0.3 * cx) * std::cos(0.2 * cy);
    std::vector<Vec2> coarse, fine;
    for (int i = 0; i <= 8; ++i)
        coarse.emplace_back(0.5 + i, 0.5 + 0.9 * i);
    for (int i = 0; i <= 80; ++i)
        fine.emplace_back(0.5 + i / 10.0, 0.5 + 0.09 * i);
    double pc = evaluate_penalty(coarse, g, f);
    double pf = evaluate_penalty(fine, g, f);
    REQUIRE(std::abs(pc - pf) / pf < 0.01);
}

TEST_CASE("bubble radii clamp and degenerate tubes", "[bubbles]") {
    OccupancyGrid g;
    g.resolution = 0.25;
    g.origin = Vec2(0.0, 0.0);
    g.width = 40;
    g.height = 40;
    g.cells.assign(1600, Occ::Free);
    for (int cx = 0; cx < 40; ++cx)
        g.cells[g.index(cx, 0)] = Occ::Occupied; // wall along the bottom
    std::vector<double> df = distance_field(g);

    // waypoint 0.5 m from the nearest obstacle -> radius 0.4
    std::vector<Vec2> wp = {g.cell_center(5, 2), g.cell_center(10, 2)};
    double d = df[static_cast<std::size_t>(g.index(5, 2))];
    REQUIRE(d == Catch::Approx(0.5));
    BubbleTube tube = build_bubbles(g, wp, std::nullopt, df);
    REQUIRE(tube.radii[0] == Catch::Approx(0.4));

    // waypoint 1.2+ m away -> radius clamps at the 1.0 maximum
    std::vector<Vec2> far = {g.cell_center(5, 20), g.cell_center(10, 20)};
    BubbleTube tf = build_bubbles(g, far, std::nullopt, df);
    REQUIRE(tf.radii[0] == 1.0);

    // unknown-region radius is the fixed default
    BubbleTube tu = build_bubbles(g, wp, 1, df);
    REQUIRE(tu.radii[1] == 0.5);
    REQUIRE(tu.radii[0] < 1.0);

    // waypoint on top of the wall: degenerate
    std::vector<Vec2> degen = {g.cell_center(5, 0), g.cell_center(10, 5)};
    REQUIRE_THROWS_AS(build_bubbles(g, degen, std::nullopt, df),
                      InfeasiblePlanError);
}
