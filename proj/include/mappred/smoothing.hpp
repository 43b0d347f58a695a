#ifndef MAPPRED_SMOOTHING_HPP
#define MAPPRED_SMOOTHING_HPP

#include "mappred/bubbles.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <optional>
#include <vector>

namespace mappred {

struct SmoothOptions {
    std::optional<Vec2> start_direction; // unit vector; constrains q2 to the
                                         // ray from q1 when the robot moves
    std::vector<double> curvature_caps;  // per interior point, optional:
                                         // ||q_{i-1} - 2 q_i + q_{i+1}|| <= cap
    int max_iterations = 20000;
    double rho = 4.0;        // ADMM penalty weight
    double tolerance = 1e-7; // residual tolerance per point
    // Weight of a soft penalty keeping first differences near the tube's
    // reference differences. Without it the objective can bunch points near
    // corners, which weakens the curvature caps (they assume the nominal
    // spacing). Zero disables the term.
    double spacing_weight = 0.0;
};

namespace detail {

inline Vec2 project_ball(const Vec2 &p, const Vec2 &c, double r) {
    Vec2 d = p - c;
    double n = d.norm();
    return n <= r ? p : Vec2(c + d * (r / n));
}

// Projection onto {start + t*dir : t in [t_lo, t_hi]}, the chord where the ray
// from the start point meets the waypoint's ball.
inline Vec2 project_ray_chord(const Vec2 &p, const Vec2 &start, const Vec2 &dir,
                              const Vec2 &c, double r) {
    Vec2 rel = c - start;
    double m = dir.dot(rel);
    double disc = m * m - (rel.squaredNorm() - r * r);
    double t_lo = 0.0, t_hi = 0.0;
    if (disc >= 0.0) {
        double s = std::sqrt(disc);
        t_lo = std::max(0.0, m - s);
        t_hi = std::max(t_lo, m + s);
    } else {
        t_lo = t_hi = std::max(0.0, m); // ray misses the ball: closest point
    }
    double t = std::clamp(dir.dot(p - start), t_lo, t_hi);
    return start + t * dir;
}

} // namespace detail

/// Sum of squared second differences along the polyline — the smoothing
/// objective (a discrete curvature surrogate).
inline double smoothing_objective(const std::vector<Vec2> &q) {
    double obj = 0.0;
    for (std::size_t i = 1; i + 1 < q.size(); ++i)
        obj += (q[i - 1] - 2.0 * q[i] + q[i + 1]).squaredNorm();
    return obj;
}

/// Minimize the sum of squared second differences subject to per-waypoint ball
/// constraints, fixed endpoints, an optional start-direction ray constraint,
/// and optional per-point caps on the second-difference magnitude. Solved with
/// ADMM: the quadratic step is a sparse Cholesky solve (factorized once), the
/// constraint steps are closed-form projections.
inline std::vector<Vec2> smooth_path(const BubbleTube &tube,
                                     const SmoothOptions &opt = {}) {
    const std::size_t N = tube.centers.size();
    if (N < 2 || tube.radii.size() != N)
        throw SmoothingError("smooth_path: malformed tube");
    if (N == 2)
        return tube.centers;
    const std::size_t M = N - 2; // free interior points
    if (!opt.curvature_caps.empty() && opt.curvature_caps.size() != M)
        throw SmoothingError("smooth_path: curvature_caps size mismatch");
    const Vec2 qs = tube.centers.front(), qe = tube.centers.back();
    const bool capped = !opt.curvature_caps.empty();
    double rho = opt.rho;

    // d = A x + c, the second differences as a function of the interior points.
    Eigen::SparseMatrix<double> A(static_cast<int>(M), static_cast<int>(M));
    {
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < M; ++i) {
            trip.emplace_back(static_cast<int>(i), static_cast<int>(i), -2.0);
            if (i > 0)
                trip.emplace_back(static_cast<int>(i), static_cast<int>(i) - 1, 1.0);
            if (i + 1 < M)
                trip.emplace_back(static_cast<int>(i), static_cast<int>(i) + 1, 1.0);
        }
        A.setFromTriplets(trip.begin(), trip.end());
    }
    Eigen::MatrixX2d c_fix = Eigen::MatrixX2d::Zero(static_cast<int>(M), 2);
    c_fix.row(0) += qs.transpose();
    c_fix.row(static_cast<int>(M) - 1) += qe.transpose();

    Eigen::SparseMatrix<double> AtA = Eigen::SparseMatrix<double>(A.transpose()) * A;
    Eigen::SparseMatrix<double> I(static_cast<int>(M), static_cast<int>(M));
    I.setIdentity();

    // Optional spacing term: w * ||D1 x - g||^2 with D1 the first-difference
    // map on the interior points and g the reference differences (adjusted for
    // the fixed endpoints). Quadratic, so it folds into the x-step.
    const double w_sp = opt.spacing_weight;
    Eigen::SparseMatrix<double> D1(static_cast<int>(N) - 1, static_cast<int>(M));
    Eigen::MatrixX2d g_sp = Eigen::MatrixX2d::Zero(static_cast<int>(N) - 1, 2);
    if (w_sp > 0.0) {
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t j = 0; j + 1 < N; ++j) {
            if (j + 1 <= M)
                trip.emplace_back(static_cast<int>(j), static_cast<int>(j), 1.0);
            if (j > 0)
                trip.emplace_back(static_cast<int>(j), static_cast<int>(j) - 1, -1.0);
            Vec2 e = tube.centers[j + 1] - tube.centers[j];
            if (j == 0)
                e += qs;
            if (j + 2 == N)
                e -= qe;
            g_sp.row(static_cast<int>(j)) = e.transpose();
        }
        D1.setFromTriplets(trip.begin(), trip.end());
    }
    Eigen::SparseMatrix<double> D1tD1 =
        w_sp > 0.0 ? Eigen::SparseMatrix<double>(
                         Eigen::SparseMatrix<double>(D1.transpose()) * D1)
                   : Eigen::SparseMatrix<double>(static_cast<int>(M),
                                                 static_cast<int>(M));
    // With caps and no spacing term the objective is handled in the d-block
    // prox and the x-step Hessian is rho*(AtA + I): the factorization is
    // rho-free, so residual balancing can rescale rho without refactorizing.
    // The spacing term reintroduces rho into the capped Hessian, requiring a
    // refactorization whenever rho changes. Without caps: H = 2*AtA + rho*I.
    auto build_h = [&]() {
        if (capped) {
            Eigen::SparseMatrix<double> H(AtA + I);
            if (w_sp > 0.0)
                H = Eigen::SparseMatrix<double>(rho * H) +
                    Eigen::SparseMatrix<double>(2.0 * w_sp * D1tD1);
            return H;
        }
        Eigen::SparseMatrix<double> H =
            Eigen::SparseMatrix<double>(2.0 * AtA) + Eigen::SparseMatrix<double>(rho * I);
        if (w_sp > 0.0)
            H = H + Eigen::SparseMatrix<double>(2.0 * w_sp * D1tD1);
        return H;
    };
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(build_h());
    if (llt.info() != Eigen::Success)
        throw SmoothingError("smooth_path: factorization failed");
    const Eigen::MatrixX2d spacing_rhs =
        w_sp > 0.0 ? Eigen::MatrixX2d(2.0 * w_sp * (D1.transpose() * g_sp))
                   : Eigen::MatrixX2d::Zero(static_cast<int>(M), 2);

    // Warm start at the tube centers (always feasible for the balls).
    Eigen::MatrixX2d x(static_cast<int>(M), 2);
    for (std::size_t i = 0; i < M; ++i)
        x.row(static_cast<int>(i)) = tube.centers[i + 1].transpose();
    Eigen::MatrixX2d z1 = x, u1 = Eigen::MatrixX2d::Zero(static_cast<int>(M), 2);
    Eigen::MatrixX2d z2 = A * x + c_fix,
                     u2 = Eigen::MatrixX2d::Zero(static_cast<int>(M), 2);

    auto project_feasible = [&](const Vec2 &p, std::size_t i) {
        if (i == 0 && opt.start_direction)
            return detail::project_ray_chord(p, qs, *opt.start_direction,
                                             tube.centers[1], tube.radii[1]);
        return detail::project_ball(p, tube.centers[i + 1], tube.radii[i + 1]);
    };

    auto project_z1 = [&](const Eigen::MatrixX2d &v) {
        Eigen::MatrixX2d out(static_cast<int>(M), 2);
        for (std::size_t i = 0; i < M; ++i) {
            Vec2 p = v.row(static_cast<int>(i)).transpose();
            out.row(static_cast<int>(i)) = project_feasible(p, i).transpose();
        }
        return out;
    };

    double resid = std::numeric_limits<double>::infinity();
    const double tol = opt.tolerance * std::sqrt(static_cast<double>(M));
    const double relax = 1.7; // ADMM over-relaxation
    double best_resid = std::numeric_limits<double>::infinity();
    int last_improve = 0;
    Eigen::MatrixX2d z1_prev = z1, z2_prev = z2;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const bool check = (it + 1) % 10 == 0 || it + 1 == opt.max_iterations;
        if (check) {
            z1_prev = z1;
            z2_prev = z2;
        }
        if (capped && w_sp <= 0.0) {
            // rho cancels from the capped x-step:
            // rho(AtA + I) x = rho(z1-u1) + rho A^T (z2-u2-c)
            Eigen::MatrixX2d rhs =
                (z1 - u1) + (A.transpose() * (z2 - u2 - c_fix)).eval();
            x = llt.solve(rhs);
        } else if (capped) {
            Eigen::MatrixX2d rhs =
                rho * ((z1 - u1) + (A.transpose() * (z2 - u2 - c_fix)).eval()) +
                spacing_rhs;
            x = llt.solve(rhs);
        } else {
            Eigen::MatrixX2d rhs =
                rho * (z1 - u1) - (2.0 * (A.transpose() * c_fix)).eval() +
                spacing_rhs;
            x = llt.solve(rhs);
        }
        Eigen::MatrixX2d x_r = relax * x + (1.0 - relax) * z1;
        z1 = project_z1(x_r + u1);
        u1 += x_r - z1;
        Eigen::MatrixX2d d = A * x + c_fix;
        if (capped) {
            Eigen::MatrixX2d d_r = relax * d + (1.0 - relax) * z2;
            // Prox of ||d||^2 within the cap ball: shrink toward zero, clamp.
            Eigen::MatrixX2d v = d_r + u2;
            for (std::size_t i = 0; i < M; ++i) {
                Vec2 p = v.row(static_cast<int>(i)).transpose() * (rho / (2.0 + rho));
                double n = p.norm(), cap = opt.curvature_caps[i];
                if (n > cap)
                    p *= cap / n;
                z2.row(static_cast<int>(i)) = p.transpose();
            }
            u2 += d_r - z2;
        }
        if (check) {
            // primal and dual residuals both small before stopping
            double r_primal = (x - z1).norm();
            double r_dual = rho * (z1 - z1_prev).norm();
            if (capped) {
                r_primal = std::max(r_primal, (d - z2).norm());
                r_dual = std::max(r_dual,
                                  rho * (A.transpose() * (z2 - z2_prev)).norm());
            }
            resid = std::max(r_primal, r_dual);
            if (resid < tol)
                break;
            if (resid < best_resid * 0.5) {
                best_resid = resid;
                last_improve = it;
            } else if (it - last_improve > 1500) {
                break; // plateau: accept or reject at the threshold below
            }
            if (capped && (it + 1) % 100 == 0) {
                // residual balancing; scaled duals shrink/grow inversely
                bool changed = false;
                if (r_primal > 10.0 * r_dual && rho < 1e4) {
                    rho *= 2.0;
                    u1 *= 0.5;
                    u2 *= 0.5;
                    changed = true;
                } else if (r_dual > 10.0 * r_primal && rho > 1e-4) {
                    rho *= 0.5;
                    u1 *= 2.0;
                    u2 *= 2.0;
                    changed = true;
                }
                if (changed && w_sp > 0.0) {
                    llt.compute(build_h());
                    if (llt.info() != Eigen::Success)
                        throw SmoothingError("smooth_path: factorization failed");
                }
            }
        }
    }
    // Plateaued runs with small residuals are accepted: the final projection
    // below restores exact ball feasibility, and callers that pass curvature
    // caps keep their own safety margin on the cap values.
    if (!(resid < 1e-3 * std::sqrt(static_cast<double>(M))))
        throw SmoothingError("smooth_path: ADMM did not converge");

    std::vector<Vec2> out(N);
    out.front() = qs;
    out.back() = qe;
    for (std::size_t i = 0; i < M; ++i) {
        // Final projection so the corridor constraint holds exactly.
        Vec2 p = x.row(static_cast<int>(i)).transpose();
        out[i + 1] = project_feasible(p, i);
    }
    return out;
}

} // namespace mappred

#endif
