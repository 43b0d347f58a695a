#ifndef MAPPRED_SPEED_PROFILE_HPP
#define MAPPRED_SPEED_PROFILE_HPP

#include "mappred/errors.hpp"
#include "mappred/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace mappred {

struct VehicleParams {
    double mass = 2.5;     // kg
    double mu = 0.9;       // tire-ground friction coefficient
    double gravity = 9.81; // m/s^2
    double r_min = 0.5;    // minimum turn radius, meters
    double v_max = 4.0;    // speed cap, m/s

    double friction_accel() const { return mu * gravity; }       // m/s^2
    double friction_force() const { return mass * mu * gravity; } // N
};

struct TrajectorySample {
    double t = 0.0;
    Vec2 pos = Vec2::Zero();
    Vec2 vel = Vec2::Zero();
    double u_long = 0.0; // body-frame control force, N
    double u_lat = 0.0;
    bool unknown = false; // sample lies past the frontier
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double total_time = 0.0;
    std::optional<double> frontier_time;       // time of the frontier stop
    std::optional<std::size_t> frontier_index; // sample index of that stop

    /// Kinematic state at trajectory time t (clamped to [0, T]), interpolating
    /// position and velocity between samples.
    TrajectorySample state_at(double t) const {
        if (samples.empty())
            return {};
        if (t <= samples.front().t)
            return samples.front();
        if (t >= samples.back().t)
            return samples.back();
        std::size_t hi = 1;
        while (samples[hi].t < t)
            ++hi;
        const TrajectorySample &a = samples[hi - 1], &b = samples[hi];
        double den = b.t - a.t;
        double w = den > 0.0 ? (t - a.t) / den : 0.0;
        TrajectorySample s = a;
        s.t = t;
        s.pos = a.pos + w * (b.pos - a.pos);
        s.vel = a.vel + w * (b.vel - a.vel);
        s.u_long = a.u_long;
        // The lateral force on the arc tracks the local speed (u_lat = m k v^2),
        // so re-scale the held sample value to the interpolated speed; never
        // scale up, which keeps the friction circle of the source sample.
        double va2 = a.vel.squaredNorm();
        s.u_lat = va2 > 1e-12
                      ? a.u_lat * std::min(1.0, s.vel.squaredNorm() / va2)
                      : a.u_lat;
        s.unknown = a.unknown;
        return s;
    }
};

namespace detail {

// Path geometry on the unit parameter s in [0,1]: first and second derivative
// at each waypoint via central differences (one-sided at the ends).
struct PathGeometry {
    std::vector<Vec2> q1, q2; // q'(s_i), q''(s_i)
    double ds = 0.0;
};

inline PathGeometry path_geometry(const std::vector<Vec2> &q) {
    const std::size_t n = q.size();
    PathGeometry g;
    g.ds = 1.0 / static_cast<double>(n - 1);
    g.q1.resize(n);
    g.q2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0)
            g.q1[i] = (q[1] - q[0]) / g.ds;
        else if (i + 1 == n)
            g.q1[i] = (q[n - 1] - q[n - 2]) / g.ds;
        else
            g.q1[i] = (q[i + 1] - q[i - 1]) / (2.0 * g.ds);
        if (i == 0 || i + 1 == n)
            g.q2[i] = Vec2::Zero();
        else
            g.q2[i] = (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (g.ds * g.ds);
    }
    return g;
}

// Symmetric positive definite tridiagonal solve (Thomas algorithm).
inline void tridiag_solve(std::vector<double> &diag, std::vector<double> &off,
                          std::vector<double> &rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        double w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

} // namespace detail

/// Minimum-time speed profile over a fixed geometric path. Decision variables
/// are b_i = (ds/dt)^2 at each waypoint; the travel time
/// T = sum 2*ds/(sqrt(b_i) + sqrt(b_{i+1})) is convex in b and is minimized by
/// a log-barrier interior-point method whose Newton systems are tridiagonal.
/// Constraints: friction circle ||m(q'' b + q' a)|| <= mu m g with
/// a_i = (b_{i+1} - b_i)/(2 ds), the turning limit |u_lat| <= m b ||q'||^2 /
/// r_min (equivalent to a per-sample curvature gate on b), the speed cap, the
/// fixed entry speed, and zero speed at the requested stop indices.
inline Trajectory min_time_profile(const std::vector<Vec2> &waypoints,
                                   const VehicleParams &vp, double v_start,
                                   std::vector<std::size_t> stops,
                                   std::optional<std::size_t> frontier_index = {}) {
    const std::size_t n = waypoints.size();
    if (n < 2)
        throw ProfileInfeasibleError("min_time_profile: need at least two waypoints");
    if (v_start < 0.0)
        throw ProfileInfeasibleError("min_time_profile: negative start speed");
    detail::PathGeometry geo = detail::path_geometry(waypoints);
    const double ds = geo.ds;
    const double fa = vp.friction_accel(); // acceleration-form friction bound
    const double fa2 = fa * fa;

    // Per-sample upper bound on b from the speed cap, the turning constraint
    // (b must vanish where the path curvature exceeds 1/r_min), and pure
    // centripetal friction.
    std::vector<double> bcap(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sp2 = geo.q1[i].squaredNorm();
        double cap = vp.v_max * vp.v_max / sp2;
        Vec2 tan = geo.q1[i] / std::sqrt(sp2);
        double q2n = geo.q2[i].norm();
        if (q2n > 0.0)
            cap = std::min(cap, fa / q2n);
        double kappa_lat = std::abs(geo.q2[i].x() * tan.y() - geo.q2[i].y() * tan.x());
        // small slack for discretized curvature; the centripetal friction cap
        // still bounds the speed correctly in the slack band
        if (kappa_lat > sp2 / vp.r_min * (1.0 + 2e-3))
            cap = 0.0; // turning constraint admits only b = 0 here
        bcap[i] = cap;
    }

    std::sort(stops.begin(), stops.end());
    std::vector<bool> fixed(n, false);
    std::vector<double> b(n, 0.0);
    for (std::size_t s : stops) {
        if (s >= n)
            throw ProfileInfeasibleError("min_time_profile: stop index out of range");
        fixed[s] = true;
        b[s] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i] && bcap[i] <= 0.0) {
            fixed[i] = true; // curvature gate: only a stop is feasible here
            b[i] = 0.0;
        }
    double b_start = (v_start * v_start) / geo.q1[0].squaredNorm();
    if (!fixed[0]) {
        if (b_start > bcap[0] * (1.0 + 1e-9))
            throw ProfileInfeasibleError("min_time_profile: entry speed violates caps");
        fixed[0] = true;
        b[0] = b_start;
    } else if (v_start > 1e-9) {
        throw ProfileInfeasibleError("min_time_profile: moving start at a stop index");
    }
    bool any_free = false;
    for (std::size_t i = 0; i < n; ++i)
        any_free |= !fixed[i];

    // Feasible initialization: a conservative ramp-limited profile. Slopes are
    // limited so that the tangential share of friction is never exceeded;
    // several passes reconcile the limits with the fixed entries.
    if (any_free) {
        for (std::size_t i = 0; i < n; ++i)
            if (!fixed[i])
                b[i] = std::max(1e-9, 0.49 * bcap[i]);
        // The friction load on segment i is ||q2_i b_i + q1_i a|| with
        // a = (b_{i+1} - b_i) / (2 ds); at a given b_i the admissible a is an
        // interval from the quadratic ||q2_i b_i + q1_i a||^2 = fa^2. Bounds
        // only ever lower the free entries, so the sweeps converge; shrinking
        // b_i widens its own interval, so using the current b_i stays safe.
        auto accel_range = [&](std::size_t i, double bi, double &amin,
                               double &amax) {
            Vec2 u = geo.q2[i] * bi;
            const Vec2 &v = geo.q1[i];
            double vv = v.squaredNorm();
            double uv = u.dot(v);
            double disc = uv * uv - vv * (u.squaredNorm() - fa2);
            if (vv <= 0.0 || disc <= 0.0) {
                amin = amax = 0.0;
                return false;
            }
            double root = std::sqrt(disc);
            amin = std::min(0.0, (-uv - root) / vv);
            amax = std::max(0.0, (-uv + root) / vv);
            return true;
        };
        for (int pass = 0; pass < 50; ++pass) {
            double amin = 0.0, amax = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
                if (!fixed[i + 1] && accel_range(i, b[i], amin, amax))
                    b[i + 1] = std::min(b[i + 1], b[i] + 2.0 * ds * 0.7 * amax);
            for (std::size_t i = n - 1; i-- > 0;)
                if (!fixed[i] && accel_range(i, b[i], amin, amax))
                    b[i] = std::min(b[i], b[i + 1] - 2.0 * ds * 0.7 * amin);
            bool ok = true;
            for (std::size_t i = 0; i + 1 < n && ok; ++i) {
                double a = (b[i + 1] - b[i]) / (2.0 * ds);
                ok = (geo.q2[i] * b[i] + geo.q1[i] * a).squaredNorm() < fa2;
            }
            if (ok)
                break;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!fixed[i])
                b[i] = std::max(b[i], 1e-12);
        // Strict feasibility check of the initializer; the fixed entry speed
        // can make this impossible, which is a legitimate planner failure.
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double a = (b[i + 1] - b[i]) / (2.0 * ds);
            if ((geo.q2[i] * b[i] + geo.q1[i] * a).squaredNorm() >= fa2)
                throw ProfileInfeasibleError(
                    "min_time_profile: no feasible profile from the entry speed");
        }
    }

    auto friction_vecs = [&](std::size_t i, Vec2 &A, Vec2 &B) {
        A = geo.q2[i] - geo.q1[i] / (2.0 * ds);
        B = geo.q1[i] / (2.0 * ds);
    };

    if (any_free) {
        // grad/hess accumulators over all n entries; fixed ones are masked out
        // of the Newton solve.
        std::vector<double> grad(n), hd(n), ho(n - 1), step(n);
        double t_barrier = 1.0;
        const double mu_factor = 8.0;
        const int newton_iters = 60;
        for (int stage = 0; stage < 10; ++stage, t_barrier *= mu_factor) {
            for (int it = 0; it < newton_iters; ++it) {
                std::fill(grad.begin(), grad.end(), 0.0);
                std::fill(hd.begin(), hd.end(), 1e-12);
                std::fill(ho.begin(), ho.end(), 0.0);
                // objective: sum over segments of 2 ds / (sqrt(b_i)+sqrt(b_j))
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    double si = std::sqrt(b[i]), sj = std::sqrt(b[i + 1]);
                    double S = si + sj, S2 = S * S;
                    double gi = si > 0.0 ? -ds / (S2 * si) : 0.0;
                    double gj = sj > 0.0 ? -ds / (S2 * sj) : 0.0;
                    grad[i] += t_barrier * gi;
                    grad[i + 1] += t_barrier * gj;
                    if (si > 0.0)
                        hd[i] += t_barrier * ds * (3.0 * si + sj) /
                                 (2.0 * S2 * S * b[i] * si);
                    if (sj > 0.0)
                        hd[i + 1] += t_barrier * ds * (3.0 * sj + si) /
                                     (2.0 * S2 * S * b[i + 1] * sj);
                    if (si > 0.0 && sj > 0.0)
                        ho[i] += t_barrier * ds / (S2 * S * si * sj);
                }
                // barriers: positivity, caps, friction circle
                for (std::size_t i = 0; i < n; ++i) {
                    if (fixed[i])
                        continue;
                    grad[i] += -1.0 / b[i];
                    hd[i] += 1.0 / (b[i] * b[i]);
                    double m = bcap[i] - b[i];
                    grad[i] += 1.0 / m;
                    hd[i] += 1.0 / (m * m);
                }
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    Vec2 A, B;
                    friction_vecs(i, A, B);
                    Vec2 w = A * b[i] + B * b[i + 1];
                    double gval = w.squaredNorm() - fa2; // < 0 when feasible
                    double inv = -1.0 / gval;
                    double gA = 2.0 * A.dot(w), gB = 2.0 * B.dot(w);
                    grad[i] += inv * gA;
                    grad[i + 1] += inv * gB;
                    hd[i] += inv * 2.0 * A.squaredNorm() + inv * inv * gA * gA;
                    hd[i + 1] += inv * 2.0 * B.squaredNorm() + inv * inv * gB * gB;
                    ho[i] += inv * 2.0 * A.dot(B) + inv * inv * gA * gB;
                }
                // mask fixed entries
                for (std::size_t i = 0; i < n; ++i)
                    if (fixed[i]) {
                        grad[i] = 0.0;
                        hd[i] = 1.0;
                        if (i > 0)
                            ho[i - 1] = 0.0;
                        if (i + 1 < n)
                            ho[i] = 0.0;
                    }
                std::vector<double> d = hd, o = ho, r = grad;
                detail::tridiag_solve(d, o, r);
                double decrement = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    step[i] = -r[i];
                    decrement += grad[i] * r[i];
                }
                if (!(decrement > 0.0) || decrement < 1e-10)
                    break;
                // fraction-to-boundary line search on all barrier terms
                double alpha = 1.0;
                auto feasible = [&](double al) {
                    for (std::size_t i = 0; i < n; ++i) {
                        if (fixed[i])
                            continue;
                        double nb = b[i] + al * step[i];
                        if (nb <= 0.0 || nb >= bcap[i])
                            return false;
                    }
                    for (std::size_t i = 0; i + 1 < n; ++i) {
                        Vec2 A, B;
                        friction_vecs(i, A, B);
                        double bi = b[i] + (fixed[i] ? 0.0 : al * step[i]);
                        double bj = b[i + 1] + (fixed[i + 1] ? 0.0 : al * step[i + 1]);
                        if ((A * bi + B * bj).squaredNorm() >= fa2)
                            return false;
                    }
                    return true;
                };
                while (alpha > 1e-12 && !feasible(alpha))
                    alpha *= 0.5;
                if (alpha <= 1e-12)
                    break;
                alpha *= 0.99;
                auto merit = [&](double al) {
                    double val = 0.0;
                    for (std::size_t i = 0; i + 1 < n; ++i) {
                        double bi = b[i] + (fixed[i] ? 0.0 : al * step[i]);
                        double bj = b[i + 1] + (fixed[i + 1] ? 0.0 : al * step[i + 1]);
                        val += t_barrier * 2.0 * ds /
                               (std::sqrt(std::max(0.0, bi)) +
                                std::sqrt(std::max(0.0, bj)));
                        Vec2 A, B;
                        friction_vecs(i, A, B);
                        val -= std::log(fa2 - (A * bi + B * bj).squaredNorm());
                    }
                    for (std::size_t i = 0; i < n; ++i) {
                        if (fixed[i])
                            continue;
                        double bi = b[i] + al * step[i];
                        val -= std::log(bi) + std::log(bcap[i] - bi);
                    }
                    return val;
                };
                double base = merit(0.0);
                while (alpha > 1e-12 &&
                       merit(alpha) > base - 1e-4 * alpha * decrement)
                    alpha *= 0.5;
                if (alpha <= 1e-12)
                    break;
                for (std::size_t i = 0; i < n; ++i)
                    if (!fixed[i])
                        b[i] += alpha * step[i];
            }
        }
    }

    // Assemble the trajectory from the converged b profile.
    Trajectory traj;
    traj.samples.resize(n);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        TrajectorySample &s = traj.samples[i];
        if (i > 0) {
            double si = std::sqrt(std::max(0.0, b[i - 1]));
            double sj = std::sqrt(std::max(0.0, b[i]));
            if (si + sj <= 0.0)
                throw ProfileInfeasibleError(
                    "min_time_profile: adjacent zero-speed samples");
            t += 2.0 * ds / (si + sj);
        }
        s.t = t;
        s.pos = waypoints[i];
        s.vel = geo.q1[i] * std::sqrt(std::max(0.0, b[i]));
        double a = i + 1 < n ? (b[i + 1] - b[i]) / (2.0 * ds) : 0.0;
        Vec2 u = vp.mass * (geo.q2[i] * b[i] + geo.q1[i] * a);
        Vec2 tan = geo.q1[i].normalized();
        s.u_long = u.dot(tan);
        s.u_lat = u.x() * -tan.y() + u.y() * tan.x();
        // the frontier stop itself is the last known-space sample
        s.unknown = frontier_index && i > *frontier_index;
    }
    traj.total_time = t;
    traj.frontier_index = frontier_index;
    if (frontier_index) {
        // frontier_time is the stop on or after the frontier crossing
        for (std::size_t s : stops)
            if (s >= *frontier_index || s + 1 == n) {
                traj.frontier_time = traj.samples[std::min(s, n - 1)].t;
                break;
            }
        if (!traj.frontier_time)
            traj.frontier_time = traj.samples[*frontier_index].t;
    }
    return traj;
}

} // namespace mappred

#endif
